#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "seqtran/volume.hpp"

namespace seqtran {

// A task is named "institute-modality-objective", e.g. "01-T1ce-NCR".
struct TaskDescriptor {
    std::string id;
    std::string institute;
    std::string modality;
    std::string objective;

    static TaskDescriptor make(std::string institute, std::string modality, std::string objective);
    void validate() const;
};

struct Sample {
    ImageVolume image;
    LabelVolume label; // binary {0,1}
};

struct TaskDataset {
    TaskDescriptor descriptor;
    std::vector<Sample> samples;

    int sample_count() const { return static_cast<int>(samples.size()); }
    Shape shape() const { return samples.empty() ? Shape{} : samples.front().image.shape; }
    void validate() const;
};

struct Catalog {
    std::vector<TaskDataset> sources; // sorted by id
    std::optional<TaskDataset> target;

    const TaskDataset* find(const std::string& id) const;
};

// Manifest loading. The manifest is a JSON document listing tasks and their
// raw volume files (images: little-endian float32, labels: uint8, x fastest,
// file size checked against the declared shape). Images are min-max scaled to
// [0,1] per volume on load; labels must contain only 0 and 1.
Catalog load_manifest(const std::filesystem::path& manifest_path);

// Raw volume I/O used by the loader and the eval command.
ImageVolume read_image_volume(const std::filesystem::path& path, Shape shape);
LabelVolume read_label_volume(const std::filesystem::path& path, Shape shape);
void write_image_volume(const std::filesystem::path& path, const ImageVolume& v);
void write_label_volume(const std::filesystem::path& path, const LabelVolume& v);

// Trilinear resampling for images, nearest-neighbour for labels. Requesting
// the sample's own shape returns it bit-identically.
Sample resample_to(const Sample& sample, Shape shape);
ImageVolume resample_image(const ImageVolume& v, Shape shape);
LabelVolume resample_label(const LabelVolume& v, Shape shape);

// Element-wise minimum shape of two tasks; both are resampled to it before
// any pairwise metric (downsampling only, never inventing data).
Shape common_grid(const TaskDataset& a, const TaskDataset& b);
TaskDataset resample_task(const TaskDataset& task, Shape shape);

} // namespace seqtran
