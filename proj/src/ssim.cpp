#include "seqtran/ssim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

void check_inputs(const LabelVolume& a, const LabelVolume& b, const SsimParams& params) {
    params.validate();
    if (a.shape != b.shape) {
        throw Error("shape mismatch: ssim operands differ");
    }
    if (a.shape.nx < params.window || a.shape.ny < params.window || a.shape.nz < params.window) {
        throw Error("volume smaller than ssim window");
    }
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        if (a.data[i] > 1 || b.data[i] > 1) {
            throw Error("non-binary input: ssim operates on {0,1} volumes");
        }
    }
}

// Window moments -> one SSIM value. Population variances; every term is
// commutative in (p,q) so the value is bitwise symmetric.
double ssim_from_sums(double sum_a, double sum_b, double sum_ab, double inv_n, double c1,
                      double c2) {
    const double mu_p = sum_a * inv_n;
    const double mu_q = sum_b * inv_n;
    const double mu_pq = sum_ab * inv_n;
    const double cov = mu_pq - mu_p * mu_q;
    const double var_p = mu_p - mu_p * mu_p; // binary data: E[p^2] = E[p]
    const double var_q = mu_q - mu_q * mu_q;
    const double num = (2.0 * (mu_p * mu_q) + c1) * (2.0 * cov + c2);
    const double den = (mu_p * mu_p + mu_q * mu_q + c1) * (var_p + var_q + c2);
    return num / den;
}

// Summed-area table with a zero border: cum has extent (nx+1)(ny+1)(nz+1).
struct SummedVolume {
    int nx1, ny1, nz1;
    std::vector<double> cum;

    explicit SummedVolume(const LabelVolume& v)
        : nx1(v.shape.nx + 1), ny1(v.shape.ny + 1), nz1(v.shape.nz + 1) {
        cum.assign(static_cast<std::size_t>(nx1) * ny1 * nz1, 0.0);
        for (int z = 0; z < v.shape.nz; ++z) {
            for (int y = 0; y < v.shape.ny; ++y) {
                double run = 0.0;
                for (int x = 0; x < v.shape.nx; ++x) {
                    run += v.at(x, y, z);
                    // cum[x+1,y+1,z+1] = run + cum[x+1,y,z+1] + cum[x+1,y+1,z] - cum[x+1,y,z]
                    at(x + 1, y + 1, z + 1) =
                        run + at(x + 1, y, z + 1) + at(x + 1, y + 1, z) - at(x + 1, y, z);
                }
            }
        }
    }

    double& at(int x, int y, int z) {
        return cum[static_cast<std::size_t>(x) +
                   static_cast<std::size_t>(nx1) *
                       (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny1) * z)];
    }
    double get(int x, int y, int z) const {
        return cum[static_cast<std::size_t>(x) +
                   static_cast<std::size_t>(nx1) *
                       (static_cast<std::size_t>(y) + static_cast<std::size_t>(ny1) * z)];
    }
    // Sum over [x0, x0+w) x [y0, y0+w) x [z0, z0+w).
    double window_sum(int x0, int y0, int z0, int w) const {
        const int x1 = x0 + w, y1 = y0 + w, z1 = z0 + w;
        return get(x1, y1, z1) - get(x0, y1, z1) - get(x1, y0, z1) - get(x1, y1, z0) +
               get(x0, y0, z1) + get(x0, y1, z0) + get(x1, y0, z0) - get(x0, y0, z0);
    }
};

LabelVolume product_volume(const LabelVolume& a, const LabelVolume& b) {
    LabelVolume ab(a.shape);
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        ab.data[i] = static_cast<std::uint8_t>(a.data[i] & b.data[i]);
    }
    return ab;
}

} // namespace

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw Error("ssim window must be odd and >= 3");
    }
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
        throw Error("ssim constants must be positive");
    }
}

double ssim_volume(const LabelVolume& a, const LabelVolume& b, const SsimParams& params) {
    check_inputs(a, b, params);
    const int w = params.window;
    const Shape s = a.shape;
    const int ox = s.nx - w + 1;
    const int oy = s.ny - w + 1;
    const int oz = s.nz - w + 1;

    const SummedVolume sa(a);
    const SummedVolume sb(b);
    const SummedVolume sab(product_volume(a, b));

    const double inv_n = 1.0 / (static_cast<double>(w) * w * w);
    const double c1 = params.c1();
    const double c2 = params.c2();

    // One partial per window-origin slice, combined in slice order, so the
    // result does not depend on the thread count.
    std::vector<double> partial(oz, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (int z = 0; z < oz; ++z) {
        double acc = 0.0;
        for (int y = 0; y < oy; ++y) {
            for (int x = 0; x < ox; ++x) {
                acc += ssim_from_sums(sa.window_sum(x, y, z, w), sb.window_sum(x, y, z, w),
                                      sab.window_sum(x, y, z, w), inv_n, c1, c2);
            }
        }
        partial[z] = acc;
    }
    double total = 0.0;
    for (const double p : partial) {
        total += p;
    }
    return total / (static_cast<double>(ox) * oy * oz);
}

double ssim_volume_serial(const LabelVolume& a, const LabelVolume& b, const SsimParams& params) {
    check_inputs(a, b, params);
    const int w = params.window;
    const Shape s = a.shape;
    const int ox = s.nx - w + 1;
    const int oy = s.ny - w + 1;
    const int oz = s.nz - w + 1;

    const double inv_n = 1.0 / (static_cast<double>(w) * w * w);
    const double c1 = params.c1();
    const double c2 = params.c2();

    std::vector<double> partial(oz, 0.0);
    for (int z = 0; z < oz; ++z) {
        double acc = 0.0;
        for (int y = 0; y < oy; ++y) {
            for (int x = 0; x < ox; ++x) {
                double sum_a = 0.0, sum_b = 0.0, sum_ab = 0.0;
                for (int dz = 0; dz < w; ++dz) {
                    for (int dy = 0; dy < w; ++dy) {
                        for (int dx = 0; dx < w; ++dx) {
                            const double pa = a.at(x + dx, y + dy, z + dz);
                            const double pb = b.at(x + dx, y + dy, z + dz);
                            sum_a += pa;
                            sum_b += pb;
                            sum_ab += pa * pb;
                        }
                    }
                }
                acc += ssim_from_sums(sum_a, sum_b, sum_ab, inv_n, c1, c2);
            }
        }
        partial[z] = acc;
    }
    double total = 0.0;
    for (const double p : partial) {
        total += p;
    }
    return total / (static_cast<double>(ox) * oy * oz);
}

double label_similarity_r(const TaskDataset& task_a, const TaskDataset& task_b,
                          const SsimParams& params) {
    if (task_a.samples.empty() || task_b.samples.empty()) {
        throw Error("empty task in label similarity");
    }
    if (task_a.shape() != task_b.shape()) {
        throw Error("label similarity requires a common grid: " + task_a.descriptor.id + " vs " +
                    task_b.descriptor.id);
    }
    std::vector<double> values;
    values.reserve(task_a.samples.size() * task_b.samples.size());
    for (const auto& sa : task_a.samples) {
        for (const auto& sb : task_b.samples) {
            values.push_back(ssim_volume(sa.label, sb.label, params));
        }
    }
    // Sorted accumulation: symmetric in the task arguments and reproducible.
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (const double v : values) {
        acc += v;
    }
    return acc / static_cast<double>(values.size());
}

} // namespace seqtran
