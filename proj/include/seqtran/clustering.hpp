#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqtran/affinity.hpp"

namespace seqtran {

struct Partition {
    std::map<std::string, int> assignment; // task id -> cluster index in [0, k)
    int k = 0;
    double modularity = 0.0;

    void validate(const SourceGraph& graph) const;
};

struct Representatives {
    std::map<int, std::string> by_cluster;
};

// Edge betweenness with edge costs as shortest-path lengths, one value per
// graph edge (same order as graph.edges). Each unordered node pair counts
// once. Per-source contributions are merged in source order, so the parallel
// and serial versions agree bit for bit. Rejects negative costs.
std::vector<double> edge_betweenness(const SourceGraph& graph);
std::vector<double> edge_betweenness_serial(const SourceGraph& graph);

// Weighted modularity with similarity weights exp(-cost):
// Q = sum_c (w_c/W - (s_c/2W)^2). Returns 0 for an edgeless graph.
double modularity(const SourceGraph& graph, const Partition& partition);

// Divisive clustering: repeatedly remove the highest-betweenness edge (ties
// broken by smallest (i, j)) and keep the connected-component partition with
// the highest modularity seen along the way.
Partition girvan_newman(const SourceGraph& graph);

// Per cluster, the member with the most samples; ties go to the smallest id.
Representatives select_representatives(const SourceGraph& graph, const Partition& partition);

nlohmann::json partition_to_json(const Partition& partition, const Representatives& reps);
void partition_from_json(const nlohmann::json& j, Partition& partition, Representatives& reps);

} // namespace seqtran
