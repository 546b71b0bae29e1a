#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "seqtran/dataset.hpp"
#include "seqtran/ot.hpp"
#include "seqtran/pca.hpp"
#include "seqtran/ssim.hpp"

namespace seqtran {

enum class SimilarityTransform {
    one_minus_r, // cost = alpha*h + beta*(1-r); alpha, beta >= 0
    signed_beta, // cost = alpha*h + beta*r; beta may be negative
};

std::string to_string(SimilarityTransform t);
SimilarityTransform similarity_transform_from_string(const std::string& s);

struct AffinityParams {
    double alpha = 1.0;
    double beta = 1.0;
    SimilarityTransform transform = SimilarityTransform::one_minus_r;

    void validate() const;
};

// Undirected edge, stored with i < j (lexicographic task ids).
struct AffinityEdge {
    std::string i;
    std::string j;
    double h = 0.0;    // image dissimilarity, >= 0
    double r = 0.0;    // label similarity, in [-1, 1]
    double cost = 0.0; // edge_cost(h, r, params)
};

struct GraphNode {
    TaskDescriptor descriptor;
    int sample_count = 0;
};

struct SourceGraph {
    std::vector<GraphNode> nodes; // sorted by id
    std::vector<AffinityEdge> edges; // sorted by (i, j)
    AffinityParams params;

    int node_index(const std::string& id) const; // -1 if absent
    void validate() const;
};

// True iff the tasks share a modality or a segmentation objective; pairs that
// share neither get no edge.
bool compatible(const TaskDescriptor& a, const TaskDescriptor& b);

double edge_cost(double h, double r, const AffinityParams& params);

// Knobs for the pairwise metrics feeding edge construction.
struct MetricConfig {
    ReductionConfig reduction;
    SsimParams ssim;
    OtConfig ot;
};

struct PairMetrics {
    double h = 0.0;
    double r = 0.0;
};

// H and R for one task pair on their common (element-wise minimum) grid.
PairMetrics compute_pair_metrics(const TaskDataset& a, const TaskDataset& b,
                                 const MetricConfig& config);

// Affinity graph over all compatible source pairs. Pair metrics are computed
// in parallel; assembly is single-writer and the result is canonical, so
// permuting the catalog cannot change the output.
SourceGraph build_graph(const Catalog& catalog, const AffinityParams& params,
                        const MetricConfig& config);

// Edges between the catalog's target and every compatible source, using the
// graph's own cost parameters. The graph is left untouched.
std::vector<AffinityEdge> attach_target(const SourceGraph& graph, const Catalog& catalog,
                                        const MetricConfig& config);

// Lossless round-trip (doubles survive serialize/parse exactly).
nlohmann::json graph_to_json(const SourceGraph& graph);
SourceGraph graph_from_json(const nlohmann::json& j);

} // namespace seqtran
