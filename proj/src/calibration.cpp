#include "seqtran/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "seqtran/detail/gp.hpp"
#include "seqtran/error.hpp"

namespace seqtran {

namespace {

std::pair<std::string, std::string> canonical(const std::string& a, const std::string& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

} // namespace

void TransferRecord::validate() const {
    if (source_path.empty()) {
        throw Error("transfer record has an empty source path");
    }
    if (target.empty()) {
        throw Error("transfer record has no target");
    }
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
        throw Error("transfer record accuracy out of [0,1]: " + std::to_string(accuracy));
    }
    std::set<std::string> seen(source_path.begin(), source_path.end());
    if (seen.size() != source_path.size() || seen.count(target) > 0) {
        throw Error("transfer record repeats a task: target " + target);
    }
}

std::vector<TransferRecord> load_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("missing file: " + path.string());
    }
    std::vector<TransferRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error("records parse error at line " + std::to_string(line_no) + ": " +
                        e.what());
        }
        TransferRecord r;
        r.source_path = j.at("source_path").get<std::vector<std::string>>();
        r.target = j.at("target").get<std::string>();
        r.accuracy = j.at("accuracy").get<double>();
        r.validate();
        records.push_back(std::move(r));
    }
    return records;
}

void PairMetricsCache::put(const std::string& a, const std::string& b, PairMetrics m) {
    by_pair[canonical(a, b)] = m;
}

const PairMetrics& PairMetricsCache::at(const std::string& a, const std::string& b) const {
    const auto it = by_pair.find(canonical(a, b));
    if (it == by_pair.end()) {
        throw Error("pair metrics missing for " + a + " / " + b);
    }
    return it->second;
}

bool PairMetricsCache::contains(const std::string& a, const std::string& b) const {
    return by_pair.count(canonical(a, b)) > 0;
}

PairMetricsCache build_metric_cache(const std::vector<TransferRecord>& records,
                                    const Catalog& catalog, const MetricConfig& config) {
    std::set<std::pair<std::string, std::string>> needed;
    for (const auto& r : records) {
        r.validate();
        needed.insert(canonical(r.source_path.front(), r.target));
        needed.insert(canonical(r.source_path.back(), r.target));
        for (std::size_t i = 0; i + 1 < r.source_path.size(); ++i) {
            needed.insert(canonical(r.source_path[i], r.source_path[i + 1]));
        }
    }

    std::vector<std::pair<std::string, std::string>> pairs(needed.begin(), needed.end());
    for (const auto& [a, b] : pairs) {
        if (catalog.find(a) == nullptr) {
            throw Error("record task not in catalog: " + a);
        }
        if (catalog.find(b) == nullptr) {
            throw Error("record task not in catalog: " + b);
        }
    }

    std::vector<PairMetrics> metrics(pairs.size());
    std::vector<std::string> failures(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long k = 0; k < static_cast<long long>(pairs.size()); ++k) {
        try {
            metrics[k] = compute_pair_metrics(*catalog.find(pairs[k].first),
                                              *catalog.find(pairs[k].second), config);
        } catch (const std::exception& e) {
            failures[k] = "pair " + pairs[k].first + " / " + pairs[k].second + ": " + e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) {
            throw Error(f);
        }
    }

    PairMetricsCache cache;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        cache.put(pairs[k].first, pairs[k].second, metrics[k]);
    }
    return cache;
}

double record_path_cost(const TransferRecord& record, const PairMetricsCache& cache,
                        const AffinityParams& params) {
    auto cost_of = [&](const std::string& a, const std::string& b) {
        const PairMetrics& m = cache.at(a, b);
        return edge_cost(m.h, m.r, params);
    };
    // Same accumulation order as TransferPath: anchor, chain, closing edge.
    double acc = cost_of(record.source_path.front(), record.target);
    for (std::size_t i = 0; i + 1 < record.source_path.size(); ++i) {
        acc += cost_of(record.source_path[i], record.source_path[i + 1]);
    }
    if (record.source_path.size() >= 2) {
        acc += cost_of(record.source_path.back(), record.target);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Spearman objective
// ---------------------------------------------------------------------------

namespace {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) {
            ++j;
        }
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw Error("constant input to correlation");
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw Error("spearman needs two equal-length vectors with >= 2 entries");
    }
    return pearson(average_ranks(x), average_ranks(y));
}

double objective(const AffinityParams& params, const std::vector<TransferRecord>& records,
                 const PairMetricsCache& cache) {
    if (records.size() < 3) {
        throw Error("insufficient records: objective needs at least 3");
    }
    std::set<double> distinct;
    for (const auto& r : records) {
        distinct.insert(r.accuracy);
    }
    if (distinct.size() < 3) {
        throw Error("constant records: need at least 3 distinct accuracies");
    }

    std::map<std::string, std::vector<const TransferRecord*>> by_target;
    for (const auto& r : records) {
        by_target[r.target].push_back(&r);
    }

    double total = 0.0;
    int groups = 0;
    for (const auto& [target, group] : by_target) {
        if (group.size() < 2) {
            continue;
        }
        std::vector<double> neg_cost, acc;
        neg_cost.reserve(group.size());
        acc.reserve(group.size());
        for (const TransferRecord* r : group) {
            neg_cost.push_back(-record_path_cost(*r, cache, params));
            acc.push_back(r->accuracy);
        }
        const bool acc_constant =
            std::adjacent_find(acc.begin(), acc.end(), std::not_equal_to<>()) == acc.end();
        const bool cost_constant =
            std::adjacent_find(neg_cost.begin(), neg_cost.end(), std::not_equal_to<>()) ==
            neg_cost.end();
        if (acc_constant) {
            continue; // no ranking information in this group
        }
        // Constant costs rank nothing; count the group as zero correlation
        // instead of failing, so the optimizer can move away from such params.
        total += cost_constant ? 0.0 : spearman(neg_cost, acc);
        ++groups;
    }
    if (groups == 0) {
        throw Error("insufficient records: no target has 2+ rankable records");
    }
    return total / static_cast<double>(groups);
}

// ---------------------------------------------------------------------------
// Bayesian optimization
// ---------------------------------------------------------------------------

namespace {

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Halton points (bases 2 and 3) with a seeded digital shift: deterministic
// and roughly uniform.
std::vector<std::array<double, 2>> scrambled_halton(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double shift0 = unit(rng);
    const double shift1 = unit(rng);

    auto radical_inverse = [](int base, int index) {
        double inv_base = 1.0 / base;
        double factor = inv_base;
        double value = 0.0;
        while (index > 0) {
            value += (index % base) * factor;
            index /= base;
            factor *= inv_base;
        }
        return value;
    };

    std::vector<std::array<double, 2>> points(count);
    for (int i = 0; i < count; ++i) {
        double u = radical_inverse(2, i + 1) + shift0;
        double v = radical_inverse(3, i + 1) + shift1;
        points[i] = {u - std::floor(u), v - std::floor(v)};
    }
    return points;
}

} // namespace

double expected_improvement(double mean, double sigma, double best) {
    if (sigma <= 0.0) {
        return 0.0;
    }
    const double z = (mean - best) / sigma;
    return (mean - best) * normal_cdf(z) + sigma * normal_pdf(z);
}

void BoConfig::validate() const {
    if (!(alpha_low < alpha_high) || !(beta_low < beta_high)) {
        throw Error("bo bounds must satisfy low < high");
    }
    if (n_init < 2) {
        throw Error("bo needs n_init >= 2");
    }
    if (n_iter < 0) {
        throw Error("bo needs n_iter >= 0");
    }
}

BoResult bayes_opt_fn(const std::function<double(const AffinityParams&)>& fn,
                      SimilarityTransform transform, const BoConfig& config) {
    config.validate();

    auto denorm = [&](const std::array<double, 2>& p) {
        AffinityParams params;
        params.alpha = config.alpha_low + p[0] * (config.alpha_high - config.alpha_low);
        params.beta = config.beta_low + p[1] * (config.beta_high - config.beta_low);
        params.transform = transform;
        return params;
    };

    BoResult result;
    std::vector<std::array<double, 2>> observed_x;
    std::vector<double> observed_y;
    std::array<double, 2> best_x{0.0, 0.0};

    auto evaluate = [&](const std::array<double, 2>& p) {
        const AffinityParams params = denorm(p);
        const double value = fn(params);
        observed_x.push_back(p);
        observed_y.push_back(value);
        result.trace.push_back({params.alpha, params.beta, value});
        if (observed_y.size() == 1 || value > result.best_value) {
            result.best = params;
            result.best_value = value;
            best_x = p;
        }
    };

    for (const auto& p : scrambled_halton(config.n_init, config.seed)) {
        evaluate(p);
    }

    // Acquisition alternates between expected improvement over a global
    // quasi-random pool (exploration) and the posterior-mean argmax over a
    // multi-scale cloud around the incumbent (refinement). EI alone
    // over-explores once the observed variance is large.
    const auto global_pool = scrambled_halton(512, config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::mt19937_64 local_rng(config.seed ^ 0xd1b54a32d192ed03ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scales[] = {0.1, 0.02, 0.004, 0.001};

    for (int it = 0; it < config.n_iter; ++it) {
        const detail::Gp gp = detail::fit_gp(observed_x, observed_y);

        std::vector<std::array<double, 2>> local;
        for (const double s : scales) {
            for (int k = 0; k < 16; ++k) {
                std::array<double, 2> p{best_x[0] + s * gauss(local_rng),
                                        best_x[1] + s * gauss(local_rng)};
                p[0] = std::clamp(p[0], 0.0, 1.0);
                p[1] = std::clamp(p[1], 0.0, 1.0);
                local.push_back(p);
            }
        }

        std::array<double, 2> best_point{};
        if (it % 2 == 0) {
            std::vector<std::array<double, 2>> candidates = global_pool;
            candidates.insert(candidates.end(), local.begin(), local.end());
            double best_ei = -1.0;
            best_point = candidates[0];
            for (const auto& cand : candidates) {
                const auto [mean, sigma] = gp.predict(cand);
                const double ei = expected_improvement(mean, sigma, result.best_value);
                if (ei > best_ei) {
                    best_ei = ei;
                    best_point = cand;
                }
            }
        } else {
            double best_mean = -std::numeric_limits<double>::infinity();
            best_point = local[0];
            for (const auto& cand : local) {
                const double mean = gp.predict(cand).first;
                if (mean > best_mean) {
                    best_mean = mean;
                    best_point = cand;
                }
            }
        }
        evaluate(best_point);
    }
    return result;
}

BoResult bayes_opt(const std::vector<TransferRecord>& records, const PairMetricsCache& cache,
                   SimilarityTransform transform, const BoConfig& config) {
    return bayes_opt_fn(
        [&](const AffinityParams& params) { return objective(params, records, cache); },
        transform, config);
}

nlohmann::json calibration_to_json(const BoResult& result) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["alpha"] = result.best.alpha;
    j["beta"] = result.best.beta;
    j["mode"] = to_string(result.best.transform);
    j["objective"] = result.best_value;
    j["trace"] = nlohmann::json::array();
    for (const auto& t : result.trace) {
        j["trace"].push_back({{"alpha", t.alpha}, {"beta", t.beta}, {"objective", t.value}});
    }
    return j;
}

} // namespace seqtran
