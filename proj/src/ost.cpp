#include "seqtran/ost.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

using EdgeKey = std::pair<std::string, std::string>;

EdgeKey key(const std::string& a, const std::string& b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct EdgeLookup {
    std::map<EdgeKey, const AffinityEdge*> edges;

    const AffinityEdge* find(const std::string& a, const std::string& b) const {
        const auto it = edges.find(key(a, b));
        return it == edges.end() ? nullptr : it->second;
    }
};

EdgeLookup make_lookup(const SourceGraph& graph, const std::vector<AffinityEdge>& target_edges) {
    EdgeLookup lut;
    for (const auto& e : graph.edges) {
        lut.edges[key(e.i, e.j)] = &e;
    }
    for (const auto& e : target_edges) {
        lut.edges[key(e.i, e.j)] = &e;
    }
    return lut;
}

// The one endpoint of the target edges that is not a graph node.
std::string deduce_target(const SourceGraph& graph, const std::vector<AffinityEdge>& target_edges) {
    if (target_edges.empty()) {
        throw Error("no sequential path: no target edges supplied");
    }
    std::string target;
    for (const auto& e : target_edges) {
        const std::string& cand = graph.node_index(e.i) < 0 ? e.i : e.j;
        if (graph.node_index(cand) >= 0) {
            throw Error("target edge " + e.i + " - " + e.j + " joins two graph nodes");
        }
        if (target.empty()) {
            target = cand;
        } else if (target != cand) {
            throw Error("target edges name two different targets: " + target + ", " + cand);
        }
    }
    return target;
}

// Members of each cluster, sorted by id (graph nodes are already sorted).
std::vector<std::vector<std::string>> cluster_members(const SourceGraph& graph,
                                                      const Partition& partition) {
    partition.validate(graph);
    std::vector<std::vector<std::string>> members(partition.k);
    for (const auto& node : graph.nodes) {
        members[partition.assignment.at(node.descriptor.id)].push_back(node.descriptor.id);
    }
    return members;
}

bool path_less(const TransferPath& a, const TransferPath& b) {
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.nodes < b.nodes;
}

// Enumerates every feasible length-l sequence below the given representative;
// `emit` sees paths with costs accumulated anchor edge first, then the chain,
// then the closing edge.
template <typename Emit>
void enumerate_from_rep(const EdgeLookup& lut, const std::string& rep,
                        const std::vector<std::string>& members, const std::string& target,
                        int path_length, Emit&& emit) {
    const AffinityEdge* anchor = lut.find(rep, target);
    if (anchor == nullptr) {
        return;
    }
    if (path_length == 1) {
        // Selection objective degenerates to the anchor edge alone; report its
        // single-edge cost rather than the doubled value.
        emit(TransferPath{{rep, target}, 1, anchor->cost, true});
        return;
    }

    struct Frame {
        std::vector<std::string> chain;
        double cost;
    };
    std::vector<Frame> frontier{{{rep}, anchor->cost}};
    for (int depth = 1; depth < path_length; ++depth) {
        std::vector<Frame> next;
        for (const auto& frame : frontier) {
            const std::string& last = frame.chain.back();
            for (const auto& m : members) {
                if (std::find(frame.chain.begin(), frame.chain.end(), m) != frame.chain.end()) {
                    continue;
                }
                const AffinityEdge* hop = lut.find(last, m);
                if (hop == nullptr) {
                    continue;
                }
                Frame f = frame;
                f.chain.push_back(m);
                f.cost += hop->cost;
                next.push_back(std::move(f));
            }
        }
        if (next.size() > 2'000'000) {
            throw Error("path enumeration too large; reduce the path length");
        }
        frontier = std::move(next);
    }
    for (const auto& frame : frontier) {
        const AffinityEdge* closing = lut.find(frame.chain.back(), target);
        if (closing == nullptr) {
            continue;
        }
        TransferPath p;
        p.nodes = frame.chain;
        p.nodes.push_back(target);
        p.length = path_length;
        p.cost = frame.cost + closing->cost;
        emit(std::move(p));
    }
}

// Beam variant for clusters too large to enumerate: keeps the best
// `beam_width` partial chains per depth.
template <typename Emit>
void beam_from_rep(const EdgeLookup& lut, const std::string& rep,
                   const std::vector<std::string>& members, const std::string& target,
                   int path_length, std::size_t beam_width, Emit&& emit) {
    const AffinityEdge* anchor = lut.find(rep, target);
    if (anchor == nullptr) {
        return;
    }
    struct Frame {
        std::vector<std::string> chain;
        double cost;
    };
    auto frame_less = [](const Frame& a, const Frame& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.chain < b.chain;
    };
    std::vector<Frame> frontier{{{rep}, anchor->cost}};
    for (int depth = 1; depth < path_length; ++depth) {
        std::vector<Frame> next;
        for (const auto& frame : frontier) {
            const std::string& last = frame.chain.back();
            for (const auto& m : members) {
                if (std::find(frame.chain.begin(), frame.chain.end(), m) != frame.chain.end()) {
                    continue;
                }
                const AffinityEdge* hop = lut.find(last, m);
                if (hop == nullptr) {
                    continue;
                }
                Frame f = frame;
                f.chain.push_back(m);
                f.cost += hop->cost;
                next.push_back(std::move(f));
            }
        }
        std::sort(next.begin(), next.end(), frame_less);
        if (next.size() > beam_width) {
            next.resize(beam_width);
        }
        frontier = std::move(next);
    }
    for (const auto& frame : frontier) {
        const AffinityEdge* closing = lut.find(frame.chain.back(), target);
        if (closing == nullptr) {
            continue;
        }
        TransferPath p;
        p.nodes = frame.chain;
        p.nodes.push_back(target);
        p.length = path_length;
        p.cost = frame.cost + closing->cost;
        p.exact = false;
        emit(std::move(p));
    }
}

constexpr int kExactClusterLimit = 20;
constexpr std::size_t kBeamWidth = 64;

std::vector<TransferPath> all_candidates(const SourceGraph& graph, const Partition& partition,
                                         const Representatives& reps,
                                         const std::vector<AffinityEdge>& target_edges,
                                         int path_length) {
    if (path_length < 1) {
        throw Error("path length must be >= 1");
    }
    const std::string target = deduce_target(graph, target_edges);
    const EdgeLookup lut = make_lookup(graph, target_edges);
    const auto members = cluster_members(graph, partition);

    std::vector<TransferPath> candidates;
    for (const auto& [cluster, rep] : reps.by_cluster) {
        const auto& mem = members[cluster];
        if (path_length > static_cast<int>(mem.size())) {
            continue; // not enough distinct nodes in this cluster
        }
        auto emit = [&](TransferPath p) { candidates.push_back(std::move(p)); };
        if (static_cast<int>(mem.size()) <= kExactClusterLimit) {
            enumerate_from_rep(lut, rep, mem, target, path_length, emit);
        } else {
            beam_from_rep(lut, rep, mem, target, path_length, kBeamWidth, emit);
        }
    }
    std::sort(candidates.begin(), candidates.end(), path_less);
    return candidates;
}

} // namespace

TransferPath ost_general(const SourceGraph& graph, const Partition& partition,
                         const Representatives& reps,
                         const std::vector<AffinityEdge>& target_edges, int path_length) {
    bool any_cluster_large_enough = false;
    const auto members = cluster_members(graph, partition);
    for (const auto& [cluster, rep] : reps.by_cluster) {
        (void)rep;
        if (path_length <= static_cast<int>(members[cluster].size())) {
            any_cluster_large_enough = true;
        }
    }
    if (!any_cluster_large_enough) {
        throw Error("path length " + std::to_string(path_length) +
                    " exceeds every cluster size");
    }
    const auto candidates = all_candidates(graph, partition, reps, target_edges, path_length);
    if (candidates.empty()) {
        throw Error("no sequential path: every candidate is missing an edge");
    }
    return candidates.front();
}

TransferPath ost_l2(const SourceGraph& graph, const Partition& partition,
                    const Representatives& reps, const std::vector<AffinityEdge>& target_edges) {
    return ost_general(graph, partition, reps, target_edges, 2);
}

std::vector<TransferPath> rank_candidates(const SourceGraph& graph, const Partition& partition,
                                          const Representatives& reps,
                                          const std::vector<AffinityEdge>& target_edges,
                                          int path_length, int top_n) {
    auto candidates = all_candidates(graph, partition, reps, target_edges, path_length);
    if (top_n >= 0 && candidates.size() > static_cast<std::size_t>(top_n)) {
        candidates.resize(static_cast<std::size_t>(top_n));
    }
    return candidates;
}

nlohmann::json path_to_json(const TransferPath& best, const std::vector<TransferPath>& alternatives,
                            const SourceGraph& graph, const std::vector<AffinityEdge>& target_edges) {
    const EdgeLookup lut = make_lookup(graph, target_edges);
    const std::string& target = best.nodes.back();

    nlohmann::json j;
    j["schema_version"] = 1;
    j["target"] = target;
    j["l"] = best.length;
    j["path"] = best.nodes;
    j["cost"] = best.cost;
    j["exact"] = best.exact;

    auto edge_entry = [&](const std::string& from, const std::string& to) {
        const AffinityEdge* e = lut.find(from, to);
        nlohmann::json je;
        je["from"] = from;
        je["to"] = to;
        if (e != nullptr) {
            je["h"] = e->h;
            je["r"] = e->r;
            je["cost"] = e->cost;
        }
        return je;
    };

    // Breakdown mirrors the cost accumulation: anchor, chain hops, closing hop.
    nlohmann::json breakdown = nlohmann::json::array();
    if (best.length >= 1) {
        breakdown.push_back(edge_entry(best.nodes.front(), target));
        for (int i = 0; i + 2 < static_cast<int>(best.nodes.size()); ++i) {
            breakdown.push_back(edge_entry(best.nodes[i], best.nodes[i + 1]));
        }
        if (best.length >= 2) {
            breakdown.push_back(edge_entry(best.nodes[best.nodes.size() - 2], target));
        }
    }
    j["edge_breakdown"] = std::move(breakdown);

    nlohmann::json alts = nlohmann::json::array();
    for (const auto& alt : alternatives) {
        alts.push_back({{"path", alt.nodes}, {"l", alt.length}, {"cost", alt.cost}});
    }
    j["alternatives"] = std::move(alts);
    return j;
}

} // namespace seqtran
