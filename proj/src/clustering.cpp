#include "seqtran/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "seqtran/error.hpp"

namespace seqtran {

namespace {

// Distances within this slack count as equally short; keeps path counting
// stable when several float sums describe the same shortest path.
bool close_dist(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b)) {
        return false;
    }
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

struct AdjacencyEntry {
    int neighbor;
    int edge;
    double cost;
};

std::vector<std::vector<AdjacencyEntry>> build_adjacency(const SourceGraph& graph) {
    std::vector<std::vector<AdjacencyEntry>> adj(graph.nodes.size());
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        if (edge.cost < 0.0) {
            throw Error("negative edge cost on " + edge.i + " - " + edge.j +
                        ": shortest paths undefined");
        }
        const int a = graph.node_index(edge.i);
        const int b = graph.node_index(edge.j);
        adj[a].push_back({b, static_cast<int>(e), edge.cost});
        adj[b].push_back({a, static_cast<int>(e), edge.cost});
    }
    return adj;
}

// Brandes accumulation from one source; adds this source's contribution to
// `contrib` (one slot per edge).
void betweenness_from_source(const std::vector<std::vector<AdjacencyEntry>>& adj, int source,
                             std::vector<double>& contrib) {
    const int n = static_cast<int>(adj.size());
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<double> sigma(n, 0.0);
    std::vector<double> delta(n, 0.0);
    std::vector<std::vector<std::pair<int, int>>> preds(n); // (node, edge)
    std::vector<int> settle_order;
    settle_order.reserve(n);
    std::vector<char> settled(n, 0);

    using QueueItem = std::pair<double, int>;
    std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>> pq;
    dist[source] = 0.0;
    sigma[source] = 1.0;
    pq.push({0.0, source});

    while (!pq.empty()) {
        const auto [d, v] = pq.top();
        pq.pop();
        if (settled[v]) {
            continue;
        }
        settled[v] = 1;
        settle_order.push_back(v);
        for (const auto& a : adj[v]) {
            const double nd = dist[v] + a.cost;
            if (settled[a.neighbor]) {
                continue;
            }
            if (close_dist(nd, dist[a.neighbor])) {
                sigma[a.neighbor] += sigma[v];
                preds[a.neighbor].push_back({v, a.edge});
            } else if (nd < dist[a.neighbor]) {
                dist[a.neighbor] = nd;
                sigma[a.neighbor] = sigma[v];
                preds[a.neighbor] = {{v, a.edge}};
                pq.push({nd, a.neighbor});
            }
        }
    }

    for (auto it = settle_order.rbegin(); it != settle_order.rend(); ++it) {
        const int w = *it;
        for (const auto& [v, e] : preds[w]) {
            const double share = sigma[v] / sigma[w] * (1.0 + delta[w]);
            contrib[e] += share;
            delta[v] += share;
        }
    }
}

std::vector<double> betweenness_impl(const SourceGraph& graph, bool parallel) {
    if (graph.nodes.empty()) {
        throw Error("betweenness of an empty graph");
    }
    const auto adj = build_adjacency(graph);
    const int n = static_cast<int>(graph.nodes.size());
    const std::size_t ne = graph.edges.size();

    // Per-source contributions land in separate buffers and are merged in
    // source order, so parallel and serial results match bitwise.
    std::vector<std::vector<double>> partial(n, std::vector<double>(ne, 0.0));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (int s = 0; s < n; ++s) {
        betweenness_from_source(adj, s, partial[s]);
    }
    (void)parallel;

    std::vector<double> out(ne, 0.0);
    for (int s = 0; s < n; ++s) {
        for (std::size_t e = 0; e < ne; ++e) {
            out[e] += partial[s][e];
        }
    }
    // Each unordered pair was visited from both endpoints.
    for (double& v : out) {
        v *= 0.5;
    }
    return out;
}

std::vector<int> connected_components(const SourceGraph& graph, const std::vector<char>& active) {
    const int n = static_cast<int>(graph.nodes.size());
    std::vector<std::vector<int>> adj(n);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (!active[e]) {
            continue;
        }
        const int a = graph.node_index(graph.edges[e].i);
        const int b = graph.node_index(graph.edges[e].j);
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> comp(n, -1);
    int next = 0;
    for (int start = 0; start < n; ++start) {
        if (comp[start] >= 0) {
            continue;
        }
        std::queue<int> q;
        q.push(start);
        comp[start] = next;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (const int w : adj[v]) {
                if (comp[w] < 0) {
                    comp[w] = next;
                    q.push(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

Partition partition_from_components(const SourceGraph& graph, const std::vector<int>& comp) {
    Partition p;
    p.k = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        p.assignment[graph.nodes[i].descriptor.id] = comp[i];
    }
    return p;
}

} // namespace

std::vector<double> edge_betweenness(const SourceGraph& graph) {
    return betweenness_impl(graph, true);
}

std::vector<double> edge_betweenness_serial(const SourceGraph& graph) {
    return betweenness_impl(graph, false);
}

void Partition::validate(const SourceGraph& graph) const {
    std::vector<char> used(static_cast<std::size_t>(std::max(k, 1)), 0);
    for (const auto& node : graph.nodes) {
        const auto it = assignment.find(node.descriptor.id);
        if (it == assignment.end()) {
            throw Error("uncovered node: " + node.descriptor.id);
        }
        if (it->second < 0 || it->second >= k) {
            throw Error("cluster index out of range for " + node.descriptor.id);
        }
        used[it->second] = 1;
    }
    for (int c = 0; c < k; ++c) {
        if (!used[c]) {
            throw Error("empty cluster " + std::to_string(c));
        }
    }
}

double modularity(const SourceGraph& graph, const Partition& partition) {
    partition.validate(graph);
    if (graph.edges.empty()) {
        return 0.0;
    }
    std::vector<double> intra(partition.k, 0.0);
    std::vector<double> strength(partition.k, 0.0);
    double total = 0.0;
    for (const auto& e : graph.edges) {
        const double w = std::exp(-e.cost); // similarity weight
        const int ci = partition.assignment.at(e.i);
        const int cj = partition.assignment.at(e.j);
        total += w;
        strength[ci] += w;
        strength[cj] += w;
        if (ci == cj) {
            intra[ci] += w;
        }
    }
    double q = 0.0;
    for (int c = 0; c < partition.k; ++c) {
        const double frac = strength[c] / (2.0 * total);
        q += intra[c] / total - frac * frac;
    }
    return q;
}

Partition girvan_newman(const SourceGraph& graph) {
    if (graph.nodes.empty()) {
        throw Error("clustering an empty graph");
    }
    std::vector<char> active(graph.edges.size(), 1);

    Partition best = partition_from_components(graph, connected_components(graph, active));
    best.modularity = modularity(graph, best);

    auto subgraph = [&]() {
        SourceGraph g;
        g.nodes = graph.nodes;
        g.params = graph.params;
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            if (active[e]) {
                g.edges.push_back(graph.edges[e]);
            }
        }
        return g;
    };

    std::size_t remaining = graph.edges.size();
    while (remaining > 0) {
        const SourceGraph sub = subgraph();
        const std::vector<double> bc = edge_betweenness(sub);

        // Highest betweenness, ties to the smallest (i, j). Near-equal values
        // count as tied so the choice is stable across summation orders.
        double hi = -1.0;
        for (const double v : bc) {
            hi = std::max(hi, v);
        }
        int pick = -1;
        for (std::size_t e = 0; e < bc.size(); ++e) {
            if (bc[e] >= hi - 1e-9 * std::max(1.0, hi)) {
                if (pick < 0 || std::tie(sub.edges[e].i, sub.edges[e].j) <
                                    std::tie(sub.edges[pick].i, sub.edges[pick].j)) {
                    pick = static_cast<int>(e);
                }
            }
        }

        // Map back to the original edge list and deactivate.
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            if (active[e] && graph.edges[e].i == sub.edges[pick].i &&
                graph.edges[e].j == sub.edges[pick].j) {
                active[e] = 0;
                break;
            }
        }
        --remaining;

        Partition p = partition_from_components(graph, connected_components(graph, active));
        p.modularity = modularity(graph, p);
        if (p.modularity > best.modularity) {
            best = std::move(p);
        }
    }
    return best;
}

Representatives select_representatives(const SourceGraph& graph, const Partition& partition) {
    partition.validate(graph);
    Representatives reps;
    for (const auto& node : graph.nodes) {
        const int c = partition.assignment.at(node.descriptor.id);
        const auto it = reps.by_cluster.find(c);
        if (it == reps.by_cluster.end()) {
            reps.by_cluster[c] = node.descriptor.id;
            continue;
        }
        const int incumbent = graph.nodes[graph.node_index(it->second)].sample_count;
        if (node.sample_count > incumbent ||
            (node.sample_count == incumbent && node.descriptor.id < it->second)) {
            it->second = node.descriptor.id;
        }
    }
    return reps;
}

nlohmann::json partition_to_json(const Partition& partition, const Representatives& reps) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["k"] = partition.k;
    j["modularity"] = partition.modularity;
    nlohmann::json clusters = nlohmann::json::object();
    for (int c = 0; c < partition.k; ++c) {
        clusters[std::to_string(c)] = nlohmann::json::array();
    }
    for (const auto& [id, c] : partition.assignment) {
        clusters[std::to_string(c)].push_back(id);
    }
    j["clusters"] = std::move(clusters);
    nlohmann::json r = nlohmann::json::object();
    for (const auto& [c, id] : reps.by_cluster) {
        r[std::to_string(c)] = id;
    }
    j["representatives"] = std::move(r);
    return j;
}

void partition_from_json(const nlohmann::json& j, Partition& partition, Representatives& reps) {
    partition = {};
    reps = {};
    partition.k = j.at("k").get<int>();
    partition.modularity = j.at("modularity").get<double>();
    for (const auto& [key, ids] : j.at("clusters").items()) {
        const int c = std::stoi(key);
        for (const auto& id : ids) {
            partition.assignment[id.get<std::string>()] = c;
        }
    }
    for (const auto& [key, id] : j.at("representatives").items()) {
        reps.by_cluster[std::stoi(key)] = id.get<std::string>();
    }
}

} // namespace seqtran
