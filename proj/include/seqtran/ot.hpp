#pragma once

#include <cstddef>
#include <vector>

namespace seqtran {

// Weighted point set: weights are non-negative and sum to 1 (checked to 1e-9).
struct DiscreteDistribution {
    std::vector<std::vector<double>> support; // n points, each dim-dimensional
    std::vector<double> weights;              // n weights

    std::size_t size() const { return support.size(); }
    std::size_t dim() const { return support.empty() ? 0 : support.front().size(); }
    void validate() const;
    bool operator==(const DiscreteDistribution& o) const {
        return support == o.support && weights == o.weights;
    }
};

struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> matrix; // rows x cols, row-major
    double cost = 0.0;          // sum gamma_ij * ||x_i - y_j||

    double at(std::size_t i, std::size_t j) const { return matrix[i * cols + j]; }
    // Largest violation of the row/column marginal constraints.
    double marginal_error(const DiscreteDistribution& a, const DiscreteDistribution& b) const;
};

// Exact 1-Wasserstein between one-dimensional distributions via quantile coupling.
double wasserstein_1d(const DiscreteDistribution& a, const DiscreteDistribution& b);

// Entropic transport in the log domain with over-relaxed updates. Internally
// warm-starts from a larger epsilon and anneals down to the requested one;
// max_iter bounds the total iteration count across the schedule. A small
// terminal residual is repaired by rounding the plan onto the transport
// polytope; anything worse throws with the final marginal error.
TransportPlan sinkhorn(const DiscreteDistribution& a, const DiscreteDistribution& b,
                       double epsilon, int max_iter = 1000, double tol = 1e-6);

// Exact optimal coupling by the transportation simplex. Intended for tests and
// small supports; refuses instances with more than 10^4 cells.
TransportPlan exact_transport_lp(const DiscreteDistribution& a, const DiscreteDistribution& b);

enum class OtSolver { sinkhorn, exact };

struct OtConfig {
    OtSolver solver = OtSolver::sinkhorn;
    double epsilon = 0.0; // <= 0: 0.01 * mean pairwise support distance
    // Slice distributions of similar images hold near-duplicate atoms, and
    // those instances routinely need more than a thousand iterations to push
    // the marginal error below tol.
    int max_iter = 20000;
    double tol = 1e-6;
};

// One Wasserstein distance under the configured solver. Identical inputs
// short-circuit to 0; the argument order is canonicalized first so the value
// is exactly symmetric.
double pair_distance(const DiscreteDistribution& a, const DiscreteDistribution& b,
                     const OtConfig& config = {});

// Mean pairwise distance between two lists of distributions. The pairwise
// values are accumulated in sorted order, which makes the result independent
// of both thread count and argument order.
double image_similarity_h(const std::vector<DiscreteDistribution>& dists_a,
                          const std::vector<DiscreteDistribution>& dists_b,
                          const OtConfig& config = {});
double image_similarity_h_serial(const std::vector<DiscreteDistribution>& dists_a,
                                 const std::vector<DiscreteDistribution>& dists_b,
                                 const OtConfig& config = {});

} // namespace seqtran
