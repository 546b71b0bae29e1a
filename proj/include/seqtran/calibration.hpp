#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqtran/affinity.hpp"

namespace seqtran {

// One observed transfer: a recorded source chain, its target, and the Dice
// score that transfer achieved. Accuracies are inputs here, never computed.
struct TransferRecord {
    std::vector<std::string> source_path;
    std::string target;
    double accuracy = 0.0; // in [0, 1]

    void validate() const;
};

std::vector<TransferRecord> load_records(const std::filesystem::path& path); // JSON lines
// H and R per task pair, precomputed once so the calibration objective only
// reprices edges.
struct PairMetricsCache {
    std::map<std::pair<std::string, std::string>, PairMetrics> by_pair;

    void put(const std::string& a, const std::string& b, PairMetrics m);
    const PairMetrics& at(const std::string& a, const std::string& b) const;
    bool contains(const std::string& a, const std::string& b) const;
};

// Builds the cache for exactly the pairs the records need (consecutive chain
// pairs plus chain-start/target and chain-end/target).
PairMetricsCache build_metric_cache(const std::vector<TransferRecord>& records,
                                    const Catalog& catalog, const MetricConfig& config);

// Cost of a recorded chain under candidate params, same accumulation order as
// TransferPath costs.
double record_path_cost(const TransferRecord& record, const PairMetricsCache& cache,
                        const AffinityParams& params);

// Spearman rank correlation with average ranks on ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Mean per-target Spearman correlation between negated path cost and recorded
// accuracy; in [-1, 1], higher is better. Targets whose costs are constant
// under the candidate params carry no ranking signal and contribute 0.
double objective(const AffinityParams& params, const std::vector<TransferRecord>& records,
                 const PairMetricsCache& cache);

struct BoConfig {
    double alpha_low = 0.0;
    double alpha_high = 10.0;
    double beta_low = 0.0;
    double beta_high = 10.0;
    int n_init = 8;  // scrambled low-discrepancy seed design
    int n_iter = 32; // expected-improvement steps
    std::uint64_t seed = 0;

    void validate() const;
};

struct BoTracePoint {
    double alpha = 0.0;
    double beta = 0.0;
    double value = 0.0;
};

struct BoResult {
    AffinityParams best;
    double best_value = 0.0;
    std::vector<BoTracePoint> trace; // every evaluation, in order
};

// Gaussian-process surrogate (squared-exponential kernel, escalating jitter)
// with expected-improvement acquisition over a quasi-random candidate set plus
// local refinements around the incumbent. Fixed seed => bit-identical trace.
BoResult bayes_opt(const std::vector<TransferRecord>& records, const PairMetricsCache& cache,
                   SimilarityTransform transform, const BoConfig& config);

// Same optimizer against an arbitrary black-box objective of (alpha, beta);
// bayes_opt binds the record-ranking objective to this engine.
BoResult bayes_opt_fn(const std::function<double(const AffinityParams&)>& fn,
                      SimilarityTransform transform, const BoConfig& config);

// Closed-form EI for maximization; exactly 0 when sigma vanishes.
double expected_improvement(double mean, double sigma, double best);

nlohmann::json calibration_to_json(const BoResult& result);

} // namespace seqtran
