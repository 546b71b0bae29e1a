#include "seqtran/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double euclidean(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        acc += d * d;
    }
    return std::sqrt(acc);
}

std::vector<double> cost_matrix(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::vector<double> c(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            c[i * m + j] = euclidean(a.support[i], b.support[j]);
        }
    }
    return c;
}

double plan_cost(const std::vector<double>& plan, const std::vector<double>& c) {
    double acc = 0.0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (plan[i] != 0.0) {
            acc += plan[i] * c[i];
        }
    }
    return acc;
}

} // namespace

void DiscreteDistribution::validate() const {
    if (support.empty()) {
        throw Error("empty distribution support");
    }
    if (support.size() != weights.size()) {
        throw Error("distribution support/weights size mismatch");
    }
    const std::size_t d = support.front().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i].size() != d) {
            throw Error("distribution support points have inconsistent dimension");
        }
        for (const double x : support[i]) {
            if (!std::isfinite(x)) {
                throw Error("non-finite support coordinate");
            }
        }
        if (weights[i] < 0.0 || !std::isfinite(weights[i])) {
            throw Error("negative or non-finite weight");
        }
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error("weights sum to " + std::to_string(sum) + ", expected 1");
    }
}

double TransportPlan::marginal_error(const DiscreteDistribution& a,
                                     const DiscreteDistribution& b) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            s += matrix[i * cols + j];
        }
        worst = std::max(worst, std::abs(s - a.weights[i]));
    }
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            s += matrix[i * cols + j];
        }
        worst = std::max(worst, std::abs(s - b.weights[j]));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// 1-D exact transport via quantile coupling
// ---------------------------------------------------------------------------

double wasserstein_1d(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    a.validate();
    b.validate();
    if (a.dim() != 1 || b.dim() != 1) {
        throw Error("wasserstein_1d requires 1-dimensional support");
    }

    auto sorted_atoms = [](const DiscreteDistribution& d) {
        std::vector<std::pair<double, double>> atoms; // (position, weight)
        atoms.reserve(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            atoms.emplace_back(d.support[i][0], d.weights[i]);
        }
        std::sort(atoms.begin(), atoms.end());
        return atoms;
    };
    auto xa = sorted_atoms(a);
    auto xb = sorted_atoms(b);

    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = xa[0].second;
    double rb = xb[0].second;
    while (i < xa.size() && j < xb.size()) {
        const double delta = std::min(ra, rb);
        cost += delta * std::abs(xa[i].first - xb[j].first);
        ra -= delta;
        rb -= delta;
        if (ra <= 0.0 && i + 1 < xa.size()) {
            ra = xa[++i].second;
        } else if (ra <= 0.0) {
            ++i;
        }
        if (rb <= 0.0 && j + 1 < xb.size()) {
            rb = xb[++j].second;
        } else if (rb <= 0.0) {
            ++j;
        }
        if (ra <= 0.0 && i >= xa.size()) break;
        if (rb <= 0.0 && j >= xb.size()) break;
    }
    return cost;
}

// ---------------------------------------------------------------------------
// Log-domain Sinkhorn
// ---------------------------------------------------------------------------

namespace {

double logsumexp_row(const double* vals, std::size_t n) {
    double hi = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        hi = std::max(hi, vals[i]);
    }
    if (hi == kNegInf) {
        return kNegInf;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::exp(vals[i] - hi);
    }
    return hi + std::log(acc);
}

} // namespace

TransportPlan sinkhorn(const DiscreteDistribution& a, const DiscreteDistribution& b,
                       double epsilon, int max_iter, double tol) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw Error("sinkhorn: support dimensions differ");
    }
    if (!(epsilon > 0.0)) {
        throw Error("sinkhorn: epsilon must be positive");
    }

    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const std::vector<double> c = cost_matrix(a, b);

    std::vector<double> log_a(n), log_b(m);
    for (std::size_t i = 0; i < n; ++i) {
        log_a[i] = a.weights[i] > 0.0 ? std::log(a.weights[i]) : kNegInf;
    }
    for (std::size_t j = 0; j < m; ++j) {
        log_b[j] = b.weights[j] > 0.0 ? std::log(b.weights[j]) : kNegInf;
    }

    std::vector<double> f(n, 0.0), g(m, 0.0);
    std::vector<double> buf(std::max(n, m));

    // Annealing schedule: halve epsilon from the cost scale down to the
    // requested value, warm-starting the potentials at each level. Updates are
    // over-relaxed (omega = 1.5); plain alternating updates stall near
    // degenerate optima at small epsilon.
    constexpr double kOmega = 1.5;
    double max_c = 0.0;
    for (const double v : c) {
        max_c = std::max(max_c, v);
    }
    std::vector<double> schedule;
    for (double e = max_c * 0.5; e > epsilon; e *= 0.5) {
        schedule.push_back(e);
    }
    schedule.push_back(epsilon);

    auto row_update = [&](double eps) {
        for (std::size_t i = 0; i < n; ++i) {
            if (log_a[i] == kNegInf) {
                f[i] = kNegInf;
                continue;
            }
            for (std::size_t j = 0; j < m; ++j) {
                buf[j] = (g[j] - c[i * m + j]) / eps;
            }
            const double nf = eps * (log_a[i] - logsumexp_row(buf.data(), m));
            f[i] = kOmega * nf + (1.0 - kOmega) * f[i];
        }
    };
    auto col_update = [&](double eps) {
        for (std::size_t j = 0; j < m; ++j) {
            if (log_b[j] == kNegInf) {
                g[j] = kNegInf;
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                buf[i] = (f[i] - c[i * m + j]) / eps;
            }
            const double ng = eps * (log_b[j] - logsumexp_row(buf.data(), n));
            g[j] = kOmega * ng + (1.0 - kOmega) * g[j];
        }
    };
    // With over-relaxation neither marginal is exact; check both.
    auto marginal_err = [&](double eps) {
        double err = 0.0;
        std::vector<double> col_sum(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double v = std::exp((f[i] + g[j] - c[i * m + j]) / eps);
                s += v;
                col_sum[j] += v;
            }
            err = std::max(err, std::abs(s - a.weights[i]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            err = std::max(err, std::abs(col_sum[j] - b.weights[j]));
        }
        return err;
    };

    int iters_used = 0;
    double err = std::numeric_limits<double>::infinity();
    bool needs_rounding = false;
    for (std::size_t level = 0; level < schedule.size(); ++level) {
        const double eps = schedule[level];
        const bool final_level = level + 1 == schedule.size();
        const int level_cap = final_level ? max_iter - iters_used
                                          : std::min(200, std::max(0, max_iter - iters_used));
        for (int it = 0; it < level_cap; ++it) {
            row_update(eps);
            col_update(eps);
            ++iters_used;
            err = marginal_err(eps);
            if (err <= tol || (!final_level && err <= 1e-2)) {
                break;
            }
        }
        if (final_level) {
            // Recompute at the target epsilon: if the budget ran out on an
            // earlier level, err is stale and measured at the wrong scale.
            err = marginal_err(eps);
            if (err > tol) {
                // The residual tail can contract extremely slowly. A small
                // residual is repaired by rounding the plan onto the transport
                // polytope (cost shift <= err * max cost); a large one is a
                // real failure.
                if (err <= std::max(100.0 * tol, 1e-5)) {
                    needs_rounding = true;
                } else {
                    throw Error("sinkhorn did not converge in " + std::to_string(max_iter) +
                                " iterations, marginal error " + std::to_string(err));
                }
            }
        }
    }

    TransportPlan plan;
    plan.rows = n;
    plan.cols = m;
    plan.matrix.assign(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (f[i] == kNegInf) {
            continue;
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (g[j] == kNegInf) {
                continue;
            }
            plan.matrix[i * m + j] = std::exp((f[i] + g[j] - c[i * m + j]) / epsilon);
        }
    }
    if (needs_rounding) {
        // Scale rows then columns down to their targets, then restore the
        // removed mass with a rank-one feasible correction.
        std::vector<double> row_sum(n, 0.0), col_sum(m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                row_sum[i] += plan.matrix[i * m + j];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double s = row_sum[i] > a.weights[i] && row_sum[i] > 0.0
                                 ? a.weights[i] / row_sum[i]
                                 : 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                plan.matrix[i * m + j] *= s;
                col_sum[j] += plan.matrix[i * m + j];
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double s = col_sum[j] > b.weights[j] && col_sum[j] > 0.0
                                 ? b.weights[j] / col_sum[j]
                                 : 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                plan.matrix[i * m + j] *= s;
            }
        }
        std::vector<double> miss_a(n, 0.0), miss_b(m, 0.0);
        double total_miss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s += plan.matrix[i * m + j];
            }
            miss_a[i] = std::max(0.0, a.weights[i] - s);
            total_miss += miss_a[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s += plan.matrix[i * m + j];
            }
            miss_b[j] = std::max(0.0, b.weights[j] - s);
        }
        if (total_miss > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    plan.matrix[i * m + j] += miss_a[i] * miss_b[j] / total_miss;
                }
            }
        }
    }
    plan.cost = plan_cost(plan.matrix, c);
    return plan;
}

// ---------------------------------------------------------------------------
// Exact transport: transportation simplex with an explicit tree basis
// ---------------------------------------------------------------------------

namespace {

struct BasisCell {
    int i;
    int j;
    double flow;
};

} // namespace

TransportPlan exact_transport_lp(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    a.validate();
    b.validate();
    if (a.dim() != b.dim()) {
        throw Error("exact transport: support dimensions differ");
    }
    const int n = static_cast<int>(a.size());
    const int m = static_cast<int>(b.size());
    if (static_cast<long long>(n) * m > 10000) {
        throw Error("size limit exceeded: exact transport handles at most 10^4 cells");
    }
    const std::vector<double> c = cost_matrix(a, b);

    // Northwest-corner initial basis: exactly n+m-1 cells, degenerate cells
    // carry zero flow.
    std::vector<BasisCell> basis;
    basis.reserve(n + m - 1);
    {
        std::vector<double> ra = a.weights;
        std::vector<double> rb = b.weights;
        int i = 0, j = 0;
        while (static_cast<int>(basis.size()) < n + m - 1) {
            const double q = std::min(ra[i], rb[j]);
            basis.push_back({i, j, q});
            ra[i] -= q;
            rb[j] -= q;
            if (i == n - 1 && j == m - 1) {
                break;
            }
            if (ra[i] <= rb[j]) {
                i < n - 1 ? ++i : ++j;
            } else {
                j < m - 1 ? ++j : ++i;
            }
        }
        // Pad with zero-flow cells if the walk ended early (can only happen
        // through exact ties on the last row/column).
        int pi = n - 1, pj = m - 1;
        while (static_cast<int>(basis.size()) < n + m - 1) {
            if (pj > 0) {
                basis.push_back({pi, --pj, 0.0});
            } else {
                basis.push_back({--pi, pj, 0.0});
            }
        }
    }

    double cost_scale = 1.0;
    for (const double v : c) {
        cost_scale = std::max(cost_scale, std::abs(v));
    }
    const double tol = 1e-12 * cost_scale;
    const long long max_pivots = 200LL * (n + m) * (n + m) + 1000;

    std::vector<double> u(n), v(m);
    std::vector<char> u_set(n), v_set(m);
    std::vector<std::vector<int>> row_cells(n), col_cells(m); // indices into basis

    for (long long pivot = 0;; ++pivot) {
        if (pivot > max_pivots) {
            throw Error("exact transport failed to terminate");
        }

        for (auto& rc : row_cells) rc.clear();
        for (auto& cc : col_cells) cc.clear();
        for (std::size_t k = 0; k < basis.size(); ++k) {
            row_cells[basis[k].i].push_back(static_cast<int>(k));
            col_cells[basis[k].j].push_back(static_cast<int>(k));
        }

        // Potentials via BFS over the basis tree, u[0] = 0.
        std::fill(u_set.begin(), u_set.end(), 0);
        std::fill(v_set.begin(), v_set.end(), 0);
        u[0] = 0.0;
        u_set[0] = 1;
        std::queue<std::pair<char, int>> frontier; // ('r', row) or ('c', col)
        frontier.push({'r', 0});
        while (!frontier.empty()) {
            auto [kind, idx] = frontier.front();
            frontier.pop();
            if (kind == 'r') {
                for (const int k : row_cells[idx]) {
                    const int j = basis[k].j;
                    if (!v_set[j]) {
                        v[j] = c[static_cast<std::size_t>(idx) * m + j] - u[idx];
                        v_set[j] = 1;
                        frontier.push({'c', j});
                    }
                }
            } else {
                for (const int k : col_cells[idx]) {
                    const int i = basis[k].i;
                    if (!u_set[i]) {
                        u[i] = c[static_cast<std::size_t>(i) * m + idx] - v[idx];
                        u_set[i] = 1;
                        frontier.push({'r', i});
                    }
                }
            }
        }

        // Most negative reduced cost enters; ties break on (i, j).
        int best_i = -1, best_j = -1;
        double best_red = -tol;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < m; ++j) {
                const double red = c[static_cast<std::size_t>(i) * m + j] - u[i] - v[j];
                if (red < best_red) {
                    best_red = red;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i < 0) {
            break; // optimal
        }

        // Unique cycle: path from row best_i to column best_j through the tree.
        // parent[] entries record the basis cell used to reach each node.
        std::vector<int> row_parent(n, -2), col_parent(m, -2);
        row_parent[best_i] = -1;
        std::queue<std::pair<char, int>> bfs;
        bfs.push({'r', best_i});
        while (!bfs.empty() && col_parent[best_j] == -2) {
            auto [kind, idx] = bfs.front();
            bfs.pop();
            if (kind == 'r') {
                for (const int k : row_cells[idx]) {
                    const int j = basis[k].j;
                    if (col_parent[j] == -2) {
                        col_parent[j] = k;
                        bfs.push({'c', j});
                    }
                }
            } else {
                for (const int k : col_cells[idx]) {
                    const int i = basis[k].i;
                    if (row_parent[i] == -2) {
                        row_parent[i] = k;
                        bfs.push({'r', i});
                    }
                }
            }
        }
        if (col_parent[best_j] == -2) {
            throw Error("exact transport: disconnected basis");
        }

        // Walk back from best_j to best_i; cells alternate -,+ starting with -.
        std::vector<int> cycle; // basis indices, minus positions at even slots
        {
            char kind = 'c';
            int idx = best_j;
            while (!(kind == 'r' && idx == best_i)) {
                const int k = kind == 'c' ? col_parent[idx] : row_parent[idx];
                cycle.push_back(k);
                if (kind == 'c') {
                    kind = 'r';
                    idx = basis[k].i;
                } else {
                    kind = 'c';
                    idx = basis[k].j;
                }
            }
        }

        double theta = std::numeric_limits<double>::infinity();
        int leave_pos = -1;
        for (std::size_t p = 0; p < cycle.size(); p += 2) {
            const BasisCell& cell = basis[cycle[p]];
            if (cell.flow < theta ||
                (cell.flow == theta && leave_pos >= 0 &&
                 std::pair<int, int>(cell.i, cell.j) <
                     std::pair<int, int>(basis[cycle[leave_pos]].i, basis[cycle[leave_pos]].j))) {
                theta = cell.flow;
                leave_pos = static_cast<int>(p);
            }
        }

        for (std::size_t p = 0; p < cycle.size(); ++p) {
            basis[cycle[p]].flow += (p % 2 == 0) ? -theta : theta;
        }
        const int leaving = cycle[leave_pos];
        basis[leaving] = {best_i, best_j, theta};
    }

    TransportPlan plan;
    plan.rows = static_cast<std::size_t>(n);
    plan.cols = static_cast<std::size_t>(m);
    plan.matrix.assign(static_cast<std::size_t>(n) * m, 0.0);
    for (const auto& cell : basis) {
        if (cell.flow > 0.0) {
            plan.matrix[static_cast<std::size_t>(cell.i) * m + cell.j] += cell.flow;
        }
    }
    plan.cost = plan_cost(plan.matrix, c);
    return plan;
}

// ---------------------------------------------------------------------------
// Task-level image similarity
// ---------------------------------------------------------------------------

namespace {

double auto_epsilon(const std::vector<double>& c) {
    double mean = 0.0;
    for (const double v : c) {
        mean += v;
    }
    mean /= static_cast<double>(c.size());
    return 0.01 * mean;
}

// Canonical argument order so pair_distance(a,b) == pair_distance(b,a) bitwise.
bool canonical_before(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    if (a.support != b.support) return a.support < b.support;
    return a.weights <= b.weights;
}

double sorted_sum(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double acc = 0.0;
    for (const double v : values) {
        acc += v;
    }
    return acc;
}

std::vector<double> pairwise_distances(const std::vector<DiscreteDistribution>& dists_a,
                                       const std::vector<DiscreteDistribution>& dists_b,
                                       const OtConfig& config, bool parallel) {
    if (dists_a.empty() || dists_b.empty()) {
        throw Error("image similarity requires non-empty distribution lists");
    }
    const std::size_t na = dists_a.size();
    const std::size_t nb = dists_b.size();
    std::vector<double> values(na * nb, 0.0);
    std::vector<std::string> failures(na * nb);
    const long long total = static_cast<long long>(na * nb);

    // Exceptions must not unwind out of the parallel region; collect and
    // rethrow the first failure in index order.
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (long long t = 0; t < total; ++t) {
        const std::size_t k = static_cast<std::size_t>(t) / nb;
        const std::size_t l = static_cast<std::size_t>(t) % nb;
        try {
            values[t] = pair_distance(dists_a[k], dists_b[l], config);
        } catch (const std::exception& e) {
            failures[t] = "pair (" + std::to_string(k) + ", " + std::to_string(l) + "): " +
                          e.what();
        }
    }
    (void)parallel;
    for (const auto& f : failures) {
        if (!f.empty()) {
            throw Error(f);
        }
    }
    return values;
}

} // namespace

double pair_distance(const DiscreteDistribution& a, const DiscreteDistribution& b,
                     const OtConfig& config) {
    if (a == b) {
        return 0.0; // identity of indiscernibles, exact
    }
    const DiscreteDistribution& first = canonical_before(a, b) ? a : b;
    const DiscreteDistribution& second = canonical_before(a, b) ? b : a;

    if (config.solver == OtSolver::exact) {
        return exact_transport_lp(first, second).cost;
    }
    double eps = config.epsilon;
    if (eps <= 0.0) {
        eps = auto_epsilon(cost_matrix(first, second));
        if (eps <= 0.0) {
            // All support points coincide; any feasible plan costs nothing.
            return 0.0;
        }
    }
    return sinkhorn(first, second, eps, config.max_iter, config.tol).cost;
}

double image_similarity_h(const std::vector<DiscreteDistribution>& dists_a,
                          const std::vector<DiscreteDistribution>& dists_b,
                          const OtConfig& config) {
    std::vector<double> values = pairwise_distances(dists_a, dists_b, config, true);
    return sorted_sum(values) / static_cast<double>(values.size());
}

double image_similarity_h_serial(const std::vector<DiscreteDistribution>& dists_a,
                                 const std::vector<DiscreteDistribution>& dists_b,
                                 const OtConfig& config) {
    std::vector<double> values = pairwise_distances(dists_a, dists_b, config, false);
    return sorted_sum(values) / static_cast<double>(values.size());
}

} // namespace seqtran
