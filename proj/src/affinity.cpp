#include "seqtran/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "seqtran/error.hpp"

namespace seqtran {

std::string to_string(SimilarityTransform t) {
    return t == SimilarityTransform::one_minus_r ? "one_minus_r" : "signed_beta";
}

SimilarityTransform similarity_transform_from_string(const std::string& s) {
    if (s == "one_minus_r") {
        return SimilarityTransform::one_minus_r;
    }
    if (s == "signed_beta") {
        return SimilarityTransform::signed_beta;
    }
    throw Error("unknown similarity transform \"" + s + "\"");
}

void AffinityParams::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw Error("affinity params must be finite");
    }
    if (transform == SimilarityTransform::one_minus_r && (alpha < 0.0 || beta < 0.0)) {
        throw Error("one_minus_r mode requires alpha, beta >= 0");
    }
}

bool compatible(const TaskDescriptor& a, const TaskDescriptor& b) {
    return a.modality == b.modality || a.objective == b.objective;
}

double edge_cost(double h, double r, const AffinityParams& params) {
    params.validate();
    if (params.transform == SimilarityTransform::one_minus_r) {
        return params.alpha * h + params.beta * (1.0 - r);
    }
    return params.alpha * h + params.beta * r;
}

int SourceGraph::node_index(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].descriptor.id == id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void SourceGraph::validate() const {
    std::set<std::string> ids;
    for (const auto& n : nodes) {
        n.descriptor.validate();
        if (!ids.insert(n.descriptor.id).second) {
            throw Error("duplicate graph node: " + n.descriptor.id);
        }
    }
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& e : edges) {
        if (e.i >= e.j) {
            throw Error("edge endpoints out of canonical order: " + e.i + " / " + e.j);
        }
        if (node_index(e.i) < 0 || node_index(e.j) < 0) {
            throw Error("edge endpoint not in graph: " + e.i + " - " + e.j);
        }
        if (!seen.insert({e.i, e.j}).second) {
            throw Error("duplicate edge: " + e.i + " - " + e.j);
        }
    }
}

PairMetrics compute_pair_metrics(const TaskDataset& a, const TaskDataset& b,
                                 const MetricConfig& config) {
    // Canonical orientation first so metrics are independent of call order.
    const bool swap = a.descriptor.id > b.descriptor.id;
    const TaskDataset& first = swap ? b : a;
    const TaskDataset& second = swap ? a : b;

    const Shape grid = common_grid(first, second);
    const TaskDataset ra = resample_task(first, grid);
    const TaskDataset rb = resample_task(second, grid);

    PairMetrics out;
    const auto [da, db] = reduce_pair(ra, rb, config.reduction);
    out.h = image_similarity_h(da, db, config.ot);
    out.r = label_similarity_r(ra, rb, config.ssim);
    return out;
}

SourceGraph build_graph(const Catalog& catalog, const AffinityParams& params,
                        const MetricConfig& config) {
    params.validate();
    if (catalog.sources.size() < 2) {
        throw Error("graph construction needs at least 2 source tasks");
    }

    SourceGraph graph;
    graph.params = params;
    std::vector<const TaskDataset*> tasks;
    for (const auto& t : catalog.sources) {
        t.validate();
        graph.nodes.push_back({t.descriptor, t.sample_count()});
        tasks.push_back(&t);
    }
    std::sort(graph.nodes.begin(), graph.nodes.end(), [](const GraphNode& a, const GraphNode& b) {
        return a.descriptor.id < b.descriptor.id;
    });
    std::sort(tasks.begin(), tasks.end(), [](const TaskDataset* a, const TaskDataset* b) {
        return a->descriptor.id < b->descriptor.id;
    });

    struct PairJob {
        int a;
        int b;
    };
    std::vector<PairJob> jobs;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (std::size_t j = i + 1; j < tasks.size(); ++j) {
            if (compatible(tasks[i]->descriptor, tasks[j]->descriptor)) {
                jobs.push_back({static_cast<int>(i), static_cast<int>(j)});
            }
        }
    }

    std::vector<AffinityEdge> edges(jobs.size());
    std::vector<std::string> failures(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long k = 0; k < static_cast<long long>(jobs.size()); ++k) {
        const TaskDataset& ta = *tasks[jobs[k].a];
        const TaskDataset& tb = *tasks[jobs[k].b];
        try {
            const PairMetrics m = compute_pair_metrics(ta, tb, config);
            edges[k] = {ta.descriptor.id, tb.descriptor.id, m.h, m.r,
                        edge_cost(m.h, m.r, params)};
        } catch (const std::exception& e) {
            failures[k] = "pair " + ta.descriptor.id + " / " + tb.descriptor.id + ": " + e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) {
            throw Error(f);
        }
    }
    graph.edges = std::move(edges);
    graph.validate();
    return graph;
}

std::vector<AffinityEdge> attach_target(const SourceGraph& graph, const Catalog& catalog,
                                        const MetricConfig& config) {
    if (!catalog.target) {
        throw Error("catalog has no target task");
    }
    const TaskDataset& target = *catalog.target;
    if (graph.node_index(target.descriptor.id) >= 0) {
        throw Error("target " + target.descriptor.id + " is already a graph node");
    }

    std::vector<const TaskDataset*> sources;
    for (const auto& node : graph.nodes) {
        if (!compatible(node.descriptor, target.descriptor)) {
            continue;
        }
        const TaskDataset* t = catalog.find(node.descriptor.id);
        if (t == nullptr) {
            throw Error("graph node " + node.descriptor.id + " missing from catalog");
        }
        sources.push_back(t);
    }
    if (sources.empty()) {
        throw Error("isolated target: " + target.descriptor.id +
                    " shares no modality or objective with any source");
    }

    std::vector<AffinityEdge> edges(sources.size());
    std::vector<std::string> failures(sources.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long k = 0; k < static_cast<long long>(sources.size()); ++k) {
        const TaskDataset& src = *sources[k];
        try {
            const PairMetrics m = compute_pair_metrics(src, target, config);
            const std::string& a = std::min(src.descriptor.id, target.descriptor.id);
            const std::string& b = std::max(src.descriptor.id, target.descriptor.id);
            edges[k] = {a, b, m.h, m.r, edge_cost(m.h, m.r, graph.params)};
        } catch (const std::exception& e) {
            failures[k] = "pair " + src.descriptor.id + " / " + target.descriptor.id + ": " +
                          e.what();
        }
    }
    for (const auto& f : failures) {
        if (!f.empty()) {
            throw Error(f);
        }
    }
    std::sort(edges.begin(), edges.end(), [](const AffinityEdge& a, const AffinityEdge& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    return edges;
}

nlohmann::json graph_to_json(const SourceGraph& graph) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["params"] = {{"alpha", graph.params.alpha},
                   {"beta", graph.params.beta},
                   {"mode", to_string(graph.params.transform)}};
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : graph.nodes) {
        j["nodes"].push_back({{"id", n.descriptor.id},
                              {"institute", n.descriptor.institute},
                              {"modality", n.descriptor.modality},
                              {"objective", n.descriptor.objective},
                              {"sample_count", n.sample_count}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges) {
        j["edges"].push_back({{"i", e.i}, {"j", e.j}, {"h", e.h}, {"r", e.r}, {"cost", e.cost}});
    }
    return j;
}

SourceGraph graph_from_json(const nlohmann::json& j) {
    SourceGraph graph;
    const auto& p = j.at("params");
    graph.params.alpha = p.at("alpha").get<double>();
    graph.params.beta = p.at("beta").get<double>();
    graph.params.transform = similarity_transform_from_string(p.at("mode").get<std::string>());
    for (const auto& n : j.at("nodes")) {
        GraphNode node;
        node.descriptor.id = n.at("id").get<std::string>();
        node.descriptor.institute = n.at("institute").get<std::string>();
        node.descriptor.modality = n.at("modality").get<std::string>();
        node.descriptor.objective = n.at("objective").get<std::string>();
        node.sample_count = n.at("sample_count").get<int>();
        graph.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
        graph.edges.push_back({e.at("i").get<std::string>(), e.at("j").get<std::string>(),
                               e.at("h").get<double>(), e.at("r").get<double>(),
                               e.at("cost").get<double>()});
    }
    graph.validate();
    return graph;
}

} // namespace seqtran
