// Writes a small deterministic synthetic catalog (manifest + raw volumes)
// for demos and smoke tests. Images are smooth blobs with task-dependent
// geometry plus seeded noise; labels are solid ellipsoids.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqtran/dataset.hpp"
#include "seqtran/error.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct TaskSpec {
    std::string institute;
    std::string modality;
    std::string objective;
    std::string role;
    int samples;
    double blob_x, blob_y, blob_z; // blob centre, fractional
    double radius;                 // label ellipsoid radius, fractional
};

void write_task(const fs::path& dir, const TaskSpec& spec, seqtran::Shape shape, json& tasks,
                std::uint64_t seed) {
    const std::string id = spec.institute + "-" + spec.modality + "-" + spec.objective;
    json jt;
    jt["id"] = id;
    jt["institute"] = spec.institute;
    jt["modality"] = spec.modality;
    jt["objective"] = spec.objective;
    jt["role"] = spec.role;
    jt["samples"] = json::array();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.06, 0.06);
    std::uniform_real_distribution<double> noise(0.0, 0.05);

    for (int s = 0; s < spec.samples; ++s) {
        const double cx = (spec.blob_x + jitter(rng)) * shape.nx;
        const double cy = (spec.blob_y + jitter(rng)) * shape.ny;
        const double cz = (spec.blob_z + jitter(rng)) * shape.nz;
        const double r = spec.radius * std::min({shape.nx, shape.ny, shape.nz});

        seqtran::ImageVolume image(shape);
        seqtran::LabelVolume label(shape);
        for (int z = 0; z < shape.nz; ++z) {
            for (int y = 0; y < shape.ny; ++y) {
                for (int x = 0; x < shape.nx; ++x) {
                    const double dx = x - cx, dy = y - cy, dz = z - cz;
                    const double d2 = dx * dx + dy * dy + dz * dz;
                    image.at(x, y, z) =
                        static_cast<float>(std::exp(-d2 / (2.0 * r * r)) + noise(rng));
                    label.at(x, y, z) = d2 <= r * r ? 1 : 0;
                }
            }
        }

        const std::string img_name = id + "_" + std::to_string(s) + "_img.raw";
        const std::string lbl_name = id + "_" + std::to_string(s) + "_lbl.raw";
        seqtran::write_image_volume(dir / img_name, image);
        seqtran::write_label_volume(dir / lbl_name, label);
        jt["samples"].push_back({{"image", img_name},
                                 {"label", lbl_name},
                                 {"shape", {shape.nx, shape.ny, shape.nz}}});
    }
    tasks.push_back(std::move(jt));
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: gen_fixture <output-dir>\n";
        return 1;
    }
    try {
        const fs::path dir(argv[1]);
        fs::create_directories(dir);
        const seqtran::Shape shape{12, 12, 8};

        const std::vector<TaskSpec> specs = {
            {"A", "T1", "ED", "source", 3, 0.35, 0.35, 0.5, 0.30},
            {"A", "T2", "ED", "source", 2, 0.38, 0.36, 0.5, 0.28},
            {"B", "T1", "ED", "source", 4, 0.40, 0.40, 0.5, 0.31},
            {"B", "T1", "NCR", "source", 2, 0.62, 0.60, 0.5, 0.22},
            {"C", "T2", "NCR", "source", 3, 0.65, 0.62, 0.5, 0.20},
            {"C", "T1", "NCR", "source", 2, 0.60, 0.64, 0.5, 0.21},
            {"T", "T2", "ED", "target", 2, 0.39, 0.37, 0.5, 0.29},
        };

        json manifest;
        manifest["version"] = 1;
        manifest["tasks"] = json::array();
        std::uint64_t seed = 20240001;
        for (const auto& spec : specs) {
            write_task(dir, spec, shape, manifest["tasks"], seed++);
        }

        std::ofstream f(dir / "manifest.json", std::ios::trunc);
        f << manifest.dump(2) << "\n";
        std::cout << (dir / "manifest.json").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "gen_fixture: " << e.what() << "\n";
        return 1;
    }
}
