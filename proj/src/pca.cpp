#include "seqtran/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major n x n).
// Returns eigenvalues descending with matching orthonormal eigenvectors as
// rows. Deterministic: fixed sweep order, no pivoting randomness.
void jacobi_eigen(std::vector<double> m, int n, std::vector<double>& values,
                  std::vector<std::vector<double>>& vectors) {
    std::vector<double> v(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i) * n + i] = 1.0;
    }
    auto at = [&](std::vector<double>& a, int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * n + j];
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                off += at(m, i, j) * at(m, i, j);
            }
        }
        double diag = 0.0;
        for (int i = 0; i < n; ++i) {
            diag += at(m, i, i) * at(m, i, i);
        }
        if (off <= 1e-30 * std::max(1.0, diag)) {
            break;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(m, p, q);
                if (std::abs(apq) < 1e-300) {
                    continue;
                }
                const double app = at(m, p, p);
                const double aqq = at(m, q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double mkp = at(m, k, p);
                    const double mkq = at(m, k, q);
                    at(m, k, p) = c * mkp - s * mkq;
                    at(m, k, q) = s * mkp + c * mkq;
                }
                for (int k = 0; k < n; ++k) {
                    const double mpk = at(m, p, k);
                    const double mqk = at(m, q, k);
                    at(m, p, k) = c * mpk - s * mqk;
                    at(m, q, k) = s * mpk + c * mqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = at(v, k, p);
                    const double vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - s * vkq;
                    at(v, k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return at(m, a, a) > at(m, b, b);
    });

    values.assign(n, 0.0);
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (int r = 0; r < n; ++r) {
        const int k = order[r];
        values[r] = at(m, k, k);
        for (int i = 0; i < n; ++i) {
            vectors[r][i] = at(v, i, k);
        }
    }
}

// Largest-magnitude entry made positive so the decomposition is unique.
void fix_sign(std::vector<double>& component) {
    double best = 0.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < component.size(); ++i) {
        if (std::abs(component[i]) > std::abs(best)) {
            best = component[i];
            best_idx = i;
        }
    }
    if (component[best_idx] < 0.0) {
        for (double& c : component) {
            c = -c;
        }
    }
}

} // namespace

std::vector<double> PcaModel::project(const std::vector<double>& point) const {
    std::vector<double> out(components.size(), 0.0);
    for (std::size_t k = 0; k < components.size(); ++k) {
        double acc = 0.0;
        for (std::size_t f = 0; f < mean.size(); ++f) {
            acc += components[k][f] * (point[f] - mean[f]);
        }
        out[k] = acc;
    }
    return out;
}

PcaModel fit_pca(const std::vector<std::vector<double>>& points, int d) {
    const int n = static_cast<int>(points.size());
    if (n < 2) {
        throw Error("pca needs at least 2 points, got " + std::to_string(n));
    }
    const int f = static_cast<int>(points.front().size());
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != f) {
            throw Error("pca points have inconsistent dimension");
        }
    }
    const int max_d = std::min(f, n - 1);
    if (d < 1 || d > max_d) {
        throw Error("pca dimension out of range: d=" + std::to_string(d) + ", valid range [1, " +
                    std::to_string(max_d) + "]");
    }

    PcaModel model;
    model.mean.assign(f, 0.0);
    for (const auto& p : points) {
        for (int i = 0; i < f; ++i) {
            model.mean[i] += p[i];
        }
    }
    for (double& m : model.mean) {
        m /= n;
    }

    std::vector<std::vector<double>> centered(n, std::vector<double>(f));
    double total_sq = 0.0;
    double mean_sq = 0.0;
    for (int r = 0; r < n; ++r) {
        for (int i = 0; i < f; ++i) {
            const double c = points[r][i] - model.mean[i];
            centered[r][i] = c;
            total_sq += c * c;
        }
    }
    for (int i = 0; i < f; ++i) {
        mean_sq += model.mean[i] * model.mean[i];
    }
    if (total_sq <= 1e-18 * std::max(1.0, mean_sq)) {
        throw Error("degenerate covariance: all points identical");
    }

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> eigenvectors;

    if (f <= n) {
        // covariance route: F x F
        std::vector<double> cov(static_cast<std::size_t>(f) * f, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int i = 0; i < f; ++i) {
                const double ci = centered[r][i];
                for (int j = i; j < f; ++j) {
                    cov[static_cast<std::size_t>(i) * f + j] += ci * centered[r][j];
                }
            }
        }
        const double scale = 1.0 / (n - 1);
        for (int i = 0; i < f; ++i) {
            for (int j = i; j < f; ++j) {
                const double val = cov[static_cast<std::size_t>(i) * f + j] * scale;
                cov[static_cast<std::size_t>(i) * f + j] = val;
                cov[static_cast<std::size_t>(j) * f + i] = val;
            }
        }
        jacobi_eigen(std::move(cov), f, eigenvalues, eigenvectors);
        for (int k = 0; k < d; ++k) {
            model.components.push_back(eigenvectors[k]);
            model.explained_variance.push_back(std::max(0.0, eigenvalues[k]));
        }
    } else {
        // Gram route: n x n, components lifted back to feature space
        std::vector<double> gram(static_cast<std::size_t>(n) * n, 0.0);
        for (int r = 0; r < n; ++r) {
            for (int s = r; s < n; ++s) {
                double acc = 0.0;
                for (int i = 0; i < f; ++i) {
                    acc += centered[r][i] * centered[s][i];
                }
                acc /= (n - 1);
                gram[static_cast<std::size_t>(r) * n + s] = acc;
                gram[static_cast<std::size_t>(s) * n + r] = acc;
            }
        }
        jacobi_eigen(std::move(gram), n, eigenvalues, eigenvectors);
        for (int k = 0; k < d; ++k) {
            std::vector<double> comp(f, 0.0);
            for (int r = 0; r < n; ++r) {
                const double u = eigenvectors[k][r];
                for (int i = 0; i < f; ++i) {
                    comp[i] += u * centered[r][i];
                }
            }
            double norm = 0.0;
            for (const double c : comp) {
                norm += c * c;
            }
            norm = std::sqrt(norm);
            if (norm > 1e-300) {
                for (double& c : comp) {
                    c /= norm;
                }
            }
            model.components.push_back(std::move(comp));
            model.explained_variance.push_back(std::max(0.0, eigenvalues[k]));
        }
    }

    for (auto& comp : model.components) {
        fix_sign(comp);
    }
    return model;
}

std::vector<std::vector<double>> slice_features(const ImageVolume& image, int slice_axis) {
    if (slice_axis < 0 || slice_axis > 2) {
        throw Error("slice axis out of range: " + std::to_string(slice_axis));
    }
    const Shape s = image.shape;
    const int n_slices = slice_axis == 0 ? s.nx : slice_axis == 1 ? s.ny : s.nz;
    std::vector<std::vector<double>> feats;
    feats.reserve(n_slices);
    for (int k = 0; k < n_slices; ++k) {
        std::vector<double> f;
        f.reserve(image.data.size() / n_slices);
        if (slice_axis == 2) {
            for (int y = 0; y < s.ny; ++y) {
                for (int x = 0; x < s.nx; ++x) {
                    f.push_back(image.at(x, y, k));
                }
            }
        } else if (slice_axis == 1) {
            for (int z = 0; z < s.nz; ++z) {
                for (int x = 0; x < s.nx; ++x) {
                    f.push_back(image.at(x, k, z));
                }
            }
        } else {
            for (int z = 0; z < s.nz; ++z) {
                for (int y = 0; y < s.ny; ++y) {
                    f.push_back(image.at(k, y, z));
                }
            }
        }
        feats.push_back(std::move(f));
    }
    return feats;
}

std::pair<std::vector<DiscreteDistribution>, std::vector<DiscreteDistribution>>
reduce_pair(const TaskDataset& task_a, const TaskDataset& task_b, const ReductionConfig& config) {
    if (config.dim < 1) {
        throw Error("reduction dimension must be >= 1");
    }
    if (task_a.shape() != task_b.shape()) {
        throw Error("reduce_pair requires a common grid: " + task_a.descriptor.id + " vs " +
                    task_b.descriptor.id);
    }

    std::vector<std::vector<double>> pooled;
    std::vector<std::vector<std::vector<double>>> per_image_a, per_image_b;
    for (const auto& s : task_a.samples) {
        per_image_a.push_back(slice_features(s.image, config.slice_axis));
    }
    for (const auto& s : task_b.samples) {
        per_image_b.push_back(slice_features(s.image, config.slice_axis));
    }
    for (const auto& img : per_image_a) {
        pooled.insert(pooled.end(), img.begin(), img.end());
    }
    for (const auto& img : per_image_b) {
        pooled.insert(pooled.end(), img.begin(), img.end());
    }
    if (pooled.size() < 2) {
        throw Error("fewer than 2 pooled feature vectors for pair " + task_a.descriptor.id +
                    " / " + task_b.descriptor.id);
    }

    const int feature_dim = static_cast<int>(pooled.front().size());
    const int max_d = std::min(feature_dim, static_cast<int>(pooled.size()) - 1);
    const int d = std::min(config.dim, max_d);
    const PcaModel model = fit_pca(pooled, d);

    auto reduce_images = [&](const std::vector<std::vector<std::vector<double>>>& images) {
        std::vector<DiscreteDistribution> dists;
        dists.reserve(images.size());
        for (const auto& img : images) {
            DiscreteDistribution dd;
            dd.support.reserve(img.size());
            const double w = 1.0 / static_cast<double>(img.size());
            for (const auto& slice : img) {
                dd.support.push_back(model.project(slice));
                dd.weights.push_back(w);
            }
            dd.validate();
            dists.push_back(std::move(dd));
        }
        return dists;
    };

    return {reduce_images(per_image_a), reduce_images(per_image_b)};
}

} // namespace seqtran
