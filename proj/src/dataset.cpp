#include "seqtran/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include <json.hpp>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

using nlohmann::json;

// Source coordinate of destination index i under centre-aligned resampling.
double src_coord(int i, int n_dst, int n_src) {
    const double ratio = static_cast<double>(n_src) / static_cast<double>(n_dst);
    return (static_cast<double>(i) + 0.5) * ratio - 0.5;
}

int nearest_index(int i, int n_dst, int n_src) {
    const double x = src_coord(i, n_dst, n_src);
    long k = std::lround(x);
    if (k < 0) k = 0;
    if (k > n_src - 1) k = n_src - 1;
    return static_cast<int>(k);
}

} // namespace

TaskDescriptor TaskDescriptor::make(std::string institute, std::string modality,
                                    std::string objective) {
    TaskDescriptor d;
    d.id = institute + "-" + modality + "-" + objective;
    d.institute = std::move(institute);
    d.modality = std::move(modality);
    d.objective = std::move(objective);
    d.validate();
    return d;
}

void TaskDescriptor::validate() const {
    if (modality.empty() || objective.empty()) {
        throw Error("invalid task descriptor: empty modality or objective in \"" + id + "\"");
    }
    if (id != institute + "-" + modality + "-" + objective) {
        throw Error("invalid task descriptor: id \"" + id +
                    "\" does not match institute-modality-objective fields");
    }
}

void TaskDataset::validate() const {
    descriptor.validate();
    if (samples.empty()) {
        throw Error("empty task: \"" + descriptor.id + "\" has no samples");
    }
    const Shape s = samples.front().image.shape;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].image.shape != samples[i].label.shape) {
            throw Error("shape mismatch between image and label: task " + descriptor.id +
                        " sample " + std::to_string(i));
        }
        if (samples[i].image.shape != s) {
            throw Error("shape mismatch within task " + descriptor.id + ": sample " +
                        std::to_string(i) + " differs from sample 0");
        }
    }
}

const TaskDataset* Catalog::find(const std::string& id) const {
    for (const auto& t : sources) {
        if (t.descriptor.id == id) {
            return &t;
        }
    }
    if (target && target->descriptor.id == id) {
        return &*target;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Raw volume I/O
// ---------------------------------------------------------------------------

namespace {

std::vector<char> read_exact(const std::filesystem::path& path, std::size_t expected_bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("missing file: " + path.string());
    }
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    if (size != expected_bytes) {
        throw Error("file size mismatch: " + path.string() + " holds " + std::to_string(size) +
                    " bytes, expected " + std::to_string(expected_bytes));
    }
    in.seekg(0, std::ios::beg);
    std::vector<char> buf(size);
    in.read(buf.data(), static_cast<std::streamsize>(size));
    if (!in) {
        throw Error("read failed: " + path.string());
    }
    return buf;
}

} // namespace

ImageVolume read_image_volume(const std::filesystem::path& path, Shape shape) {
    if (!shape.valid()) {
        throw Error("invalid shape for " + path.string());
    }
    const auto buf = read_exact(path, shape.voxels() * sizeof(float));
    ImageVolume v(shape);
    std::memcpy(v.data.data(), buf.data(), buf.size());
    return v;
}

LabelVolume read_label_volume(const std::filesystem::path& path, Shape shape) {
    if (!shape.valid()) {
        throw Error("invalid shape for " + path.string());
    }
    const auto buf = read_exact(path, shape.voxels());
    LabelVolume v(shape);
    std::memcpy(v.data.data(), buf.data(), buf.size());
    return v;
}

void write_image_volume(const std::filesystem::path& path, const ImageVolume& v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(v.data.data()),
              static_cast<std::streamsize>(v.data.size() * sizeof(float)));
}

void write_label_volume(const std::filesystem::path& path, const LabelVolume& v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(v.data.data()),
              static_cast<std::streamsize>(v.data.size()));
}

// ---------------------------------------------------------------------------
// Manifest loading
// ---------------------------------------------------------------------------

Catalog load_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw Error("missing file: " + manifest_path.string());
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error("manifest parse error: " + manifest_path.string() + ": " + e.what());
    }
    if (!doc.contains("version") || doc["version"].get<int>() != 1) {
        throw Error("unsupported manifest version in " + manifest_path.string());
    }
    const auto base = manifest_path.parent_path();

    Catalog catalog;
    std::set<std::string> seen_ids;
    try {
    for (const auto& jt : doc.at("tasks")) {
        TaskDataset task;
        task.descriptor.id = jt.at("id").get<std::string>();
        task.descriptor.institute = jt.at("institute").get<std::string>();
        task.descriptor.modality = jt.at("modality").get<std::string>();
        task.descriptor.objective = jt.at("objective").get<std::string>();
        task.descriptor.validate();
        if (!seen_ids.insert(task.descriptor.id).second) {
            throw Error("duplicate task id: " + task.descriptor.id);
        }

        const std::string role = jt.at("role").get<std::string>();
        if (role != "source" && role != "target") {
            throw Error("invalid role \"" + role + "\" for task " + task.descriptor.id);
        }

        int sample_index = 0;
        for (const auto& js : jt.at("samples")) {
            const auto dims = js.at("shape").get<std::vector<int>>();
            if (dims.size() != 3 || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0) {
                throw Error("invalid shape: task " + task.descriptor.id + " sample " +
                            std::to_string(sample_index));
            }
            const Shape shape{dims[0], dims[1], dims[2]};

            Sample s;
            s.image = read_image_volume(base / js.at("image").get<std::string>(), shape);
            s.label = read_label_volume(base / js.at("label").get<std::string>(), shape);

            float lo = s.image.data.empty() ? 0.f : s.image.data.front();
            float hi = lo;
            for (const float v : s.image.data) {
                if (!std::isfinite(v)) {
                    throw Error("non-finite image value: task " + task.descriptor.id +
                                " sample " + std::to_string(sample_index));
                }
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            // Per-volume min-max scaling to [0,1]; a constant volume maps to 0.
            if (hi > lo) {
                const float span = hi - lo;
                for (float& v : s.image.data) {
                    v = (v - lo) / span;
                }
            } else {
                std::fill(s.image.data.begin(), s.image.data.end(), 0.f);
            }
            for (const std::uint8_t v : s.label.data) {
                if (v > 1) {
                    throw Error("non-binary label: task " + task.descriptor.id + " sample " +
                                std::to_string(sample_index) + " contains value " +
                                std::to_string(static_cast<int>(v)));
                }
            }
            task.samples.push_back(std::move(s));
            ++sample_index;
        }
        task.validate();

        if (role == "source") {
            catalog.sources.push_back(std::move(task));
        } else {
            if (catalog.target) {
                throw Error("multiple target tasks: " + catalog.target->descriptor.id + " and " +
                            task.descriptor.id);
            }
            catalog.target = std::move(task);
        }
    }
    } catch (const json::exception& e) {
        throw Error("manifest field error: " + manifest_path.string() + ": " + e.what());
    }

    // Canonical ordering: manifest permutations cannot change the catalog.
    std::sort(catalog.sources.begin(), catalog.sources.end(),
              [](const TaskDataset& a, const TaskDataset& b) {
                  return a.descriptor.id < b.descriptor.id;
              });
    return catalog;
}

// ---------------------------------------------------------------------------
// Resampling
// ---------------------------------------------------------------------------

ImageVolume resample_image(const ImageVolume& v, Shape shape) {
    if (!shape.valid()) {
        throw Error("zero-sized axis in resample target shape");
    }
    if (shape == v.shape) {
        return v;
    }
    ImageVolume out(shape);
    const Shape s = v.shape;
    for (int z = 0; z < shape.nz; ++z) {
        const double zc = std::clamp(src_coord(z, shape.nz, s.nz), 0.0, double(s.nz - 1));
        const int z0 = static_cast<int>(zc);
        const int z1 = std::min(z0 + 1, s.nz - 1);
        const double wz = zc - z0;
        for (int y = 0; y < shape.ny; ++y) {
            const double yc = std::clamp(src_coord(y, shape.ny, s.ny), 0.0, double(s.ny - 1));
            const int y0 = static_cast<int>(yc);
            const int y1 = std::min(y0 + 1, s.ny - 1);
            const double wy = yc - y0;
            for (int x = 0; x < shape.nx; ++x) {
                const double xc = std::clamp(src_coord(x, shape.nx, s.nx), 0.0, double(s.nx - 1));
                const int x0 = static_cast<int>(xc);
                const int x1 = std::min(x0 + 1, s.nx - 1);
                const double wx = xc - x0;

                // lerp form keeps constant fields exactly constant
                auto lerp = [](double a, double b, double w) { return a + w * (b - a); };
                const double c00 = lerp(v.at(x0, y0, z0), v.at(x1, y0, z0), wx);
                const double c10 = lerp(v.at(x0, y1, z0), v.at(x1, y1, z0), wx);
                const double c01 = lerp(v.at(x0, y0, z1), v.at(x1, y0, z1), wx);
                const double c11 = lerp(v.at(x0, y1, z1), v.at(x1, y1, z1), wx);
                const double c0 = lerp(c00, c10, wy);
                const double c1 = lerp(c01, c11, wy);
                out.at(x, y, z) = static_cast<float>(lerp(c0, c1, wz));
            }
        }
    }
    return out;
}

LabelVolume resample_label(const LabelVolume& v, Shape shape) {
    if (!shape.valid()) {
        throw Error("zero-sized axis in resample target shape");
    }
    if (shape == v.shape) {
        return v;
    }
    LabelVolume out(shape);
    const Shape s = v.shape;
    for (int z = 0; z < shape.nz; ++z) {
        const int zs = nearest_index(z, shape.nz, s.nz);
        for (int y = 0; y < shape.ny; ++y) {
            const int ys = nearest_index(y, shape.ny, s.ny);
            for (int x = 0; x < shape.nx; ++x) {
                out.at(x, y, z) = v.at(nearest_index(x, shape.nx, s.nx), ys, zs);
            }
        }
    }
    return out;
}

Sample resample_to(const Sample& sample, Shape shape) {
    Sample out;
    out.image = resample_image(sample.image, shape);
    out.label = resample_label(sample.label, shape);
    return out;
}

Shape common_grid(const TaskDataset& a, const TaskDataset& b) {
    const Shape sa = a.shape();
    const Shape sb = b.shape();
    return Shape{std::min(sa.nx, sb.nx), std::min(sa.ny, sb.ny), std::min(sa.nz, sb.nz)};
}

TaskDataset resample_task(const TaskDataset& task, Shape shape) {
    TaskDataset out;
    out.descriptor = task.descriptor;
    out.samples.reserve(task.samples.size());
    for (const auto& s : task.samples) {
        out.samples.push_back(resample_to(s, shape));
    }
    return out;
}

} // namespace seqtran
