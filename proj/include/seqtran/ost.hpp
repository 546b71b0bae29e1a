#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "seqtran/affinity.hpp"
#include "seqtran/clustering.hpp"

namespace seqtran {

// A transfer sequence: `nodes` holds the source chain followed by the target.
// `length` counts source nodes only. The cost is the stored-edge sum
// w(v0,t) + sum_i w(v_i, v_{i+1}) + w(v_last, t), accumulated left to right;
// for length 1 the reported cost is the single edge w(v0,t).
struct TransferPath {
    std::vector<std::string> nodes;
    int length = 0;
    double cost = 0.0;
    bool exact = true; // false when found by beam search on oversized clusters

    bool operator==(const TransferPath& o) const {
        return nodes == o.nodes && length == o.length && cost == o.cost;
    }
};

// Two-hop selection: minimize w(r,t) + w(r,i) + w(i,t) over representatives r
// and cluster members i != r. Candidates missing any of the three edges are
// skipped; cost ties break to the lexicographically smaller path.
TransferPath ost_l2(const SourceGraph& graph, const Partition& partition,
                    const Representatives& reps, const std::vector<AffinityEdge>& target_edges);

// General length-l selection within the representative's cluster. Exact search
// for cluster sizes <= 20, beam search (flagged non-exact) beyond that.
TransferPath ost_general(const SourceGraph& graph, const Partition& partition,
                         const Representatives& reps,
                         const std::vector<AffinityEdge>& target_edges, int path_length);

// All feasible length-l candidates sorted ascending by cost (ties by path).
std::vector<TransferPath> rank_candidates(const SourceGraph& graph, const Partition& partition,
                                          const Representatives& reps,
                                          const std::vector<AffinityEdge>& target_edges,
                                          int path_length, int top_n);

nlohmann::json path_to_json(const TransferPath& best, const std::vector<TransferPath>& alternatives,
                            const SourceGraph& graph, const std::vector<AffinityEdge>& target_edges);

} // namespace seqtran
