#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "seqtran/error.hpp"

// Small dense Gaussian-process machinery backing the calibration optimizer.
// Lives in a detail header so the surrogate itself can be tested directly.
namespace seqtran::detail {

inline bool cholesky(std::vector<double>& m, int n) {
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = m[static_cast<std::size_t>(i) * n + j];
            for (int k = 0; k < j; ++k) {
                sum -= m[static_cast<std::size_t>(i) * n + k] *
                       m[static_cast<std::size_t>(j) * n + k];
            }
            if (i == j) {
                if (sum <= 0.0) {
                    return false;
                }
                m[static_cast<std::size_t>(i) * n + j] = std::sqrt(sum);
            } else {
                m[static_cast<std::size_t>(i) * n + j] =
                    sum / m[static_cast<std::size_t>(j) * n + j];
            }
        }
    }
    return true;
}

inline void solve_lower(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = 0; i < n; ++i) {
        double sum = x[i];
        for (int k = 0; k < i; ++k) {
            sum -= l[static_cast<std::size_t>(i) * n + k] * x[k];
        }
        x[i] = sum / l[static_cast<std::size_t>(i) * n + i];
    }
}

inline void solve_upper_from_lower(const std::vector<double>& l, int n, std::vector<double>& x) {
    for (int i = n - 1; i >= 0; --i) {
        double sum = x[i];
        for (int k = i + 1; k < n; ++k) {
            sum -= l[static_cast<std::size_t>(k) * n + i] * x[k];
        }
        x[i] = sum / l[static_cast<std::size_t>(i) * n + i];
    }
}

struct Gp {
    std::vector<std::array<double, 2>> x; // inputs, normalized to [0,1]^2
    std::vector<double> chol;             // lower Cholesky of K + jitter*I
    std::vector<double> alpha;            // (K + jitter*I)^-1 (y - mean)
    double y_mean = 0.0;
    double amplitude = 1.0;
    double lengthscale = 0.25;
    double jitter = 0.0;

    double kernel(const std::array<double, 2>& a, const std::array<double, 2>& b) const {
        const double d0 = (a[0] - b[0]) / lengthscale;
        const double d1 = (a[1] - b[1]) / lengthscale;
        return amplitude * std::exp(-0.5 * (d0 * d0 + d1 * d1));
    }

    // posterior mean and standard deviation at one point
    std::pair<double, double> predict(const std::array<double, 2>& p) const {
        const int n = static_cast<int>(x.size());
        std::vector<double> k(n);
        for (int i = 0; i < n; ++i) {
            k[i] = kernel(p, x[i]);
        }
        double mean = y_mean;
        for (int i = 0; i < n; ++i) {
            mean += k[i] * alpha[i];
        }
        std::vector<double> v = k;
        solve_lower(chol, n, v);
        double var = amplitude + jitter;
        for (int i = 0; i < n; ++i) {
            var -= v[i] * v[i];
        }
        return {mean, std::sqrt(std::max(0.0, var))};
    }
};

inline Gp fit_gp(const std::vector<std::array<double, 2>>& x, const std::vector<double>& y) {
    Gp gp;
    gp.x = x;
    const int n = static_cast<int>(x.size());
    gp.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double var = 0.0;
    for (const double v : y) {
        var += (v - gp.y_mean) * (v - gp.y_mean);
    }
    var /= n;
    gp.amplitude = std::max(var, 1e-12);

    const double base_jitter = 1e-8 * gp.amplitude;
    for (double jitter = base_jitter; jitter <= 1e-2 * gp.amplitude + 1e-300; jitter *= 10.0) {
        std::vector<double> k(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                k[static_cast<std::size_t>(i) * n + j] = gp.kernel(x[i], x[j]);
            }
            k[static_cast<std::size_t>(i) * n + i] += jitter;
        }
        if (cholesky(k, n)) {
            gp.chol = std::move(k);
            gp.jitter = jitter;
            gp.alpha.assign(n, 0.0);
            for (int i = 0; i < n; ++i) {
                gp.alpha[i] = y[i] - gp.y_mean;
            }
            solve_lower(gp.chol, n, gp.alpha);
            solve_upper_from_lower(gp.chol, n, gp.alpha);
            return gp;
        }
    }
    throw Error("degenerate kernel matrix: jitter escalation exhausted");
}

} // namespace seqtran::detail
