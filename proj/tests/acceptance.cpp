// Acceptance suite: every criterion prints one PASS/FAIL line and the binary
// exits nonzero if any fail. Tolerances are pinned in the checks themselves.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include "seqtran/affinity.hpp"
#include "seqtran/calibration.hpp"
#include "seqtran/clustering.hpp"
#include "seqtran/dataset.hpp"
#include "seqtran/error.hpp"
#include "seqtran/ost.hpp"
#include "seqtran/segmetrics.hpp"
#include "seqtran/ssim.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace seqtran;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool expect(bool ok, const std::string& what, std::string& detail) {
    if (!ok && detail.empty()) {
        detail = what;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 1. transport solvers
// ---------------------------------------------------------------------------

bool check_ot(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::vector<DiscreteDistribution> one_dim;
    bool ok = true;

    for (int i = 0; i < 200; ++i) {
        const int d = 1 + i % 3;
        std::uniform_int_distribution<int> atoms(1, 10);
        const DiscreteDistribution a = testsup::random_distribution(atoms(rng), d, rng);
        const DiscreteDistribution b = testsup::random_distribution(atoms(rng), d, rng);

        const double w_ab = exact_transport_lp(a, b).cost;
        const double w_ba = exact_transport_lp(b, a).cost;
        const double w_aa = exact_transport_lp(a, a).cost;
        ok &= expect(std::abs(w_ab - w_ba) <= 1e-9, "lp symmetry exceeded 1e-9", detail);
        ok &= expect(std::abs(w_aa) <= 1e-9, "lp identity exceeded 1e-9", detail);
        ok &= expect(w_ab >= 0.0, "negative lp cost", detail);

        if (d == 1) {
            const double w1 = wasserstein_1d(a, b);
            ok &= expect(std::abs(w1 - w_ab) <= 1e-9, "wasserstein_1d vs lp exceeded 1e-9",
                         detail);
            one_dim.push_back(a);
            one_dim.push_back(b);
        }

        const double sk = sinkhorn(a, b, 1e-3, 40000, 1e-9).cost;
        const double rel = std::abs(sk - w_ab) / std::max(w_ab, 1e-30);
        ok &= expect(w_ab == 0.0 ? std::abs(sk) <= 1e-9 : rel <= 1e-3,
                     "sinkhorn(1e-3) off by more than 1e-3 relative", detail);
    }

    for (std::size_t i = 0; i + 2 < one_dim.size(); i += 3) {
        const double ab = exact_transport_lp(one_dim[i], one_dim[i + 1]).cost;
        const double bc = exact_transport_lp(one_dim[i + 1], one_dim[i + 2]).cost;
        const double ac = exact_transport_lp(one_dim[i], one_dim[i + 2]).cost;
        ok &= expect(ac <= ab + bc + 1e-9, "triangle inequality exceeded 1e-9", detail);
    }

    const double secs = elapsed_s(t0);
    ok &= expect(secs < 60.0, "runtime exceeded 60 s", detail);
    if (ok) {
        std::ostringstream ss;
        ss << "200 pairs, " << secs << " s";
        detail = ss.str();
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 2. ssim
// ---------------------------------------------------------------------------

bool check_ssim(std::string& detail) {
    std::mt19937_64 rng(77);
    SsimParams p;
    p.window = 3;
    bool ok = true;
    for (int i = 0; i < 50; ++i) {
        const LabelVolume a = testsup::random_binary_volume(Shape{9, 9, 9}, rng);
        const LabelVolume b = testsup::random_binary_volume(Shape{9, 9, 9}, rng);
        const double lib = ssim_volume(a, b, p);
        const double ref = oracle::ssim_volume(a, b, p);
        ok &= expect(std::abs(lib - ref) <= 1e-10, "oracle mismatch above 1e-10", detail);
        ok &= expect(ssim_volume(a, a, p) == 1.0, "self-ssim not exactly 1", detail);
    }
    const LabelVolume zeros(Shape{9, 9, 9}, 0);
    const LabelVolume ones(Shape{9, 9, 9}, 1);
    const double c1 = p.c1();
    ok &= expect(std::abs(ssim_volume(zeros, ones, p) - c1 / (1.0 + c1)) <= 1e-12,
                 "all-zeros/all-ones closed form off by more than 1e-12", detail);
    return ok;
}

// ---------------------------------------------------------------------------
// 3. task-level aggregation
// ---------------------------------------------------------------------------

bool check_aggregation(std::string& detail) {
    const Shape shape{7, 7, 6};
    const TaskDataset a =
        testsup::synthetic_task("A", "T1", "ED", 3, shape, 101, 0.4, 0.4, 0.5, 0.3);
    const TaskDataset b =
        testsup::synthetic_task("B", "T1", "ED", 3, shape, 102, 0.55, 0.5, 0.5, 0.27);
    MetricConfig mc;
    mc.reduction.dim = 2;
    mc.ssim.window = 3;
    mc.ot.solver = OtSolver::exact;

    const auto [da, db] = reduce_pair(a, b, mc.reduction);
    const double h = image_similarity_h(da, db, mc.ot);

    // Independent double-loop recomputation with the same sorted reduction.
    std::vector<double> hv;
    for (const auto& x : da) {
        for (const auto& y : db) {
            hv.push_back(pair_distance(x, y, mc.ot));
        }
    }
    std::sort(hv.begin(), hv.end());
    double hsum = 0.0;
    for (const double v : hv) {
        hsum += v;
    }
    const double h_ref = hsum / static_cast<double>(hv.size());

    const double r = label_similarity_r(a, b, mc.ssim);
    std::vector<double> rv;
    for (const auto& sa : a.samples) {
        for (const auto& sb : b.samples) {
            rv.push_back(ssim_volume(sa.label, sb.label, mc.ssim));
        }
    }
    std::sort(rv.begin(), rv.end());
    double rsum = 0.0;
    for (const double v : rv) {
        rsum += v;
    }
    const double r_ref = rsum / static_cast<double>(rv.size());

    bool ok = true;
    ok &= expect(h == h_ref, "H differs from the double-loop recomputation", detail);
    ok &= expect(r == r_ref, "R differs from the double-loop recomputation", detail);
    ok &= expect(hv.size() == 9 && rv.size() == 9, "expected 3x3 pair terms", detail);
    return ok;
}

// ---------------------------------------------------------------------------
// 4. clustering
// ---------------------------------------------------------------------------

bool check_clustering(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;

    {
        const SourceGraph g = testsup::make_graph(
            {{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}, {"f", 1}},
            {{"a", "b", 1.0}, {"a", "c", 1.0}, {"b", "c", 1.0},
             {"d", "e", 1.0}, {"d", "f", 1.0}, {"e", "f", 1.0}});
        const Partition p = girvan_newman(g);
        ok &= expect(p.k == 2, "two-triangle fixture did not split into 2", detail);
        ok &= expect(std::abs(p.modularity - 0.5) <= 1e-12,
                     "two-triangle modularity not 0.5 within 1e-12", detail);
    }

    {
        std::vector<testsup::EdgeSpec> edges;
        const std::vector<std::string> left{"a", "b", "c", "d"};
        const std::vector<std::string> right{"e", "f", "g", "h"};
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = i + 1; j < 4; ++j) {
                edges.push_back({left[i], left[j], 1.0});
                edges.push_back({right[i], right[j], 1.0});
            }
        }
        edges.push_back({"d", "e", 1.0});
        const SourceGraph g = testsup::make_graph({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1},
                                                   {"e", 1}, {"f", 1}, {"g", 1}, {"h", 1}},
                                                  edges);
        // The first removed edge is the betweenness argmax: the bridge.
        const std::vector<double> bc = edge_betweenness(g);
        std::size_t argmax = 0;
        for (std::size_t e = 1; e < bc.size(); ++e) {
            if (bc[e] > bc[argmax]) {
                argmax = e;
            }
        }
        ok &= expect(g.edges[argmax].i == testsup::tid("d") &&
                         g.edges[argmax].j == testsup::tid("e"),
                     "barbell bridge is not removed first", detail);
        const Partition p = girvan_newman(g);
        ok &= expect(p.k == 2, "barbell did not split into 2", detail);
        ok &= expect(p.assignment.at(testsup::tid("a")) != p.assignment.at(testsup::tid("e")),
                     "barbell halves not separated", detail);
    }

    // Exhaustive: every connected labeled graph on 2..6 nodes, unit costs.
    long compared = 0;
    for (int n = 2; ok && n <= 6; ++n) {
        std::vector<std::pair<int, int>> slots;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                slots.push_back({i, j});
            }
        }
        const int bits = static_cast<int>(slots.size());
        for (long mask = 1; mask < (1L << bits); ++mask) {
            // connectivity check on the mask
            std::vector<std::vector<int>> adj(n);
            for (int b = 0; b < bits; ++b) {
                if (mask & (1L << b)) {
                    adj[slots[b].first].push_back(slots[b].second);
                    adj[slots[b].second].push_back(slots[b].first);
                }
            }
            std::vector<char> seen(n, 0);
            std::vector<int> stack{0};
            seen[0] = 1;
            int reached = 1;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                for (const int u : adj[v]) {
                    if (!seen[u]) {
                        seen[u] = 1;
                        ++reached;
                        stack.push_back(u);
                    }
                }
            }
            if (reached != n) {
                continue;
            }

            std::vector<std::pair<std::string, int>> nodes;
            for (int i = 0; i < n; ++i) {
                nodes.push_back({std::string(1, static_cast<char>('a' + i)), 1});
            }
            std::vector<testsup::EdgeSpec> edges;
            for (int b = 0; b < bits; ++b) {
                if (mask & (1L << b)) {
                    edges.push_back({std::string(1, static_cast<char>('a' + slots[b].first)),
                                     std::string(1, static_cast<char>('a' + slots[b].second)),
                                     1.0});
                }
            }
            const SourceGraph g = testsup::make_graph(nodes, edges);
            const Partition lib = girvan_newman(g);
            const Partition ref = oracle::girvan_newman(g);
            if (lib.assignment != ref.assignment || lib.k != ref.k) {
                std::ostringstream ss;
                ss << "oracle disagreement at n=" << n << " mask=" << mask;
                detail = ss.str();
                ok = false;
                break;
            }
            ++compared;
        }
    }

    const double secs = elapsed_s(t0);
    ok &= expect(secs < 300.0, "runtime exceeded 5 min", detail);
    if (ok) {
        std::ostringstream ss;
        ss << compared << " graphs, " << secs << " s";
        detail = ss.str();
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 5. path selection optimality
// ---------------------------------------------------------------------------

bool check_ost(std::string& detail) {
    bool ok = true;

    {
        const SourceGraph g = testsup::make_graph({{"r", 10}, {"a", 5}, {"b", 5}},
                                                  {{"r", "a", 0.1}, {"r", "b", 0.3}});
        Partition p;
        p.k = 1;
        for (const auto& node : g.nodes) {
            p.assignment[node.descriptor.id] = 0;
        }
        Representatives reps;
        reps.by_cluster[0] = testsup::tid("r");
        const auto te = testsup::make_target_edges(
            "t", {{"r", "", 0.5}, {"a", "", 0.2}, {"b", "", 0.1}});
        const TransferPath path = ost_l2(g, p, reps, te);
        ok &= expect(path.nodes == std::vector<std::string>{testsup::tid("r"),
                                                            testsup::tid("a"),
                                                            testsup::tid("t")},
                     "worked fixture path wrong", detail);
        ok &= expect(std::abs(path.cost - 0.8) <= 1e-12, "worked fixture cost not 0.8", detail);
    }

    std::mt19937_64 rng(8899);
    for (int trial = 0; ok && trial < 100; ++trial) {
        const int cluster_size = 3 + trial % 10; // up to 12 nodes
        std::vector<std::pair<std::string, int>> nodes;
        std::uniform_int_distribution<int> samples(1, 50);
        for (int i = 0; i < cluster_size; ++i) {
            nodes.push_back({std::string(1, static_cast<char>('a' + i)), samples(rng)});
        }
        std::bernoulli_distribution coin(0.75);
        std::uniform_real_distribution<double> cost(0.05, 2.0);
        std::vector<testsup::EdgeSpec> edges;
        for (int i = 0; i < cluster_size; ++i) {
            for (int j = i + 1; j < cluster_size; ++j) {
                if (coin(rng)) {
                    edges.push_back({nodes[i].first, nodes[j].first, cost(rng)});
                }
            }
        }
        SourceGraph g = testsup::make_graph(nodes, edges);
        Partition p;
        p.k = 1;
        for (const auto& node : g.nodes) {
            p.assignment[node.descriptor.id] = 0;
        }
        Representatives reps;
        std::string rep = nodes[0].first;
        int best = -1;
        for (const auto& [name, count] : nodes) {
            if (count > best) {
                best = count;
                rep = name;
            }
        }
        reps.by_cluster[0] = testsup::tid(rep);
        std::vector<testsup::EdgeSpec> te_specs;
        for (const auto& [name, count] : nodes) {
            if (coin(rng)) {
                te_specs.push_back({name, "", cost(rng)});
            }
        }
        if (te_specs.empty()) {
            te_specs.push_back({rep, "", cost(rng)});
        }
        const auto te = testsup::make_target_edges("zz", te_specs);

        for (const int l : {2, 3}) {
            const auto ref = oracle::ost_candidates(g, p, reps, te, l);
            TransferPath lib;
            bool feasible = true;
            try {
                lib = ost_general(g, p, reps, te, l);
            } catch (const Error&) {
                feasible = false;
            }
            if (ref.empty()) {
                ok &= expect(!feasible, "library found a path the oracle ruled out", detail);
                continue;
            }
            ok &= expect(feasible, "library missed a feasible path", detail);
            if (feasible) {
                ok &= expect(lib.nodes == ref.front().nodes && lib.cost == ref.front().cost,
                             "selection differs from exhaustive enumeration", detail);
            }
            if (l == 2 && feasible) {
                const TransferPath l2 = ost_l2(g, p, reps, te);
                ok &= expect(l2.nodes == lib.nodes && l2.cost == lib.cost,
                             "ost_l2 and ost_general(2) disagree", detail);
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 6. cost-scale invariance
// ---------------------------------------------------------------------------

bool check_scale_invariance(std::string& detail) {
    const fs::path dir = testsup::fresh_temp_dir("accept_scale");
    testsup::write_demo_manifest(dir, false);
    const Catalog catalog = load_manifest(dir / "manifest.json");

    MetricConfig mc;
    mc.reduction.dim = 2;
    mc.ssim.window = 3;
    mc.ot.solver = OtSolver::exact;

    AffinityParams base;
    base.alpha = 1.0;
    base.beta = 1.0;
    AffinityParams scaled = base;
    const double c = 2.5;
    scaled.alpha *= c;
    scaled.beta *= c;

    bool ok = true;
    const SourceGraph g1 = build_graph(catalog, base, mc);
    const SourceGraph g2 = build_graph(catalog, scaled, mc);

    const Partition p1 = girvan_newman(g1);
    const Partition p2 = girvan_newman(g2);
    ok &= expect(p1.assignment == p2.assignment, "clusters changed under rescaling", detail);

    const Representatives r1 = select_representatives(g1, p1);
    const Representatives r2 = select_representatives(g2, p2);
    ok &= expect(r1.by_cluster == r2.by_cluster, "representatives changed under rescaling",
                 detail);

    const auto te1 = attach_target(g1, catalog, mc);
    const auto te2 = attach_target(g2, catalog, mc);
    const TransferPath path1 = ost_l2(g1, p1, r1, te1);
    const TransferPath path2 = ost_l2(g2, p2, r2, te2);
    ok &= expect(path1.nodes == path2.nodes, "selected path changed under rescaling", detail);

    const auto rank1 = rank_candidates(g1, p1, r1, te1, 2, 100);
    const auto rank2 = rank_candidates(g2, p2, r2, te2, 2, 100);
    ok &= expect(rank1.size() == rank2.size(), "candidate count changed under rescaling",
                 detail);
    for (std::size_t k = 0; ok && k < rank1.size(); ++k) {
        ok &= expect(rank1[k].nodes == rank2[k].nodes, "candidate ranking changed", detail);
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 7. calibration recovery
// ---------------------------------------------------------------------------

bool check_calibration(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();

    // Synthetic ranking problem: accuracies are a noisy decreasing function of
    // the path cost under hidden parameters.
    PairMetricsCache cache;
    std::mt19937_64 gen(555);
    std::uniform_real_distribution<double> uh(0.2, 2.0);
    std::uniform_real_distribution<double> ur(-0.3, 0.9);
    const std::vector<std::string> sources{"s1", "s2", "s3", "s4", "s5", "s6"};
    const std::vector<std::string> targets{"t1", "t2", "t3", "t4"};
    for (std::size_t i = 0; i < sources.size(); ++i) {
        for (std::size_t j = i + 1; j < sources.size(); ++j) {
            cache.put(sources[i], sources[j], {uh(gen), ur(gen)});
        }
        for (const auto& t : targets) {
            cache.put(sources[i], t, {uh(gen), ur(gen)});
        }
    }
    AffinityParams hidden;
    hidden.alpha = 2.5;
    hidden.beta = 4.0;

    std::vector<TransferRecord> records;
    std::normal_distribution<double> noise(0.0, 0.015);
    for (const auto& t : targets) {
        for (std::size_t i = 0; i < sources.size(); ++i) {
            TransferRecord r;
            r.target = t;
            if (i % 2 == 0) {
                r.source_path = {sources[i]};
            } else {
                r.source_path = {sources[i], sources[(i + 2) % sources.size()]};
            }
            const double cost = record_path_cost(r, cache, hidden);
            r.accuracy = std::clamp(0.95 - 0.08 * cost + noise(gen), 0.01, 0.99);
            records.push_back(std::move(r));
        }
    }

    int successes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        BoConfig cfg;
        cfg.n_init = 8;
        cfg.n_iter = 32;
        cfg.seed = seed;
        const BoResult bo = bayes_opt(records, cache, SimilarityTransform::one_minus_r, cfg);

        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double random_best = -2.0;
        for (int i = 0; i < 40; ++i) {
            AffinityParams p;
            p.alpha = 10.0 * unit(rng);
            p.beta = 10.0 * unit(rng);
            p.transform = SimilarityTransform::one_minus_r;
            random_best = std::max(random_best, objective(p, records, cache));
        }
        if (bo.best_value >= 0.9 && bo.best_value >= random_best) {
            ++successes;
        }
    }

    const double secs = elapsed_s(t0);
    bool ok = true;
    ok &= expect(successes >= 95, "fewer than 95/100 seeds succeeded", detail);
    ok &= expect(secs < 120.0, "runtime exceeded 2 min", detail);
    if (ok) {
        std::ostringstream ss;
        ss << successes << "/100 seeds, " << secs << " s";
        detail = ss.str();
    } else {
        std::ostringstream ss;
        ss << detail << " (" << successes << "/100, " << secs << " s)";
        detail = ss.str();
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 8. overlap metrics
// ---------------------------------------------------------------------------

bool check_metrics(std::string& detail) {
    bool ok = true;
    ok &= expect(dice(Confusion{2, 1, 1, 0}) == 2.0 / 3.0, "dice spot value", detail);
    ok &= expect(iou(Confusion{2, 1, 1, 0}) == 0.5, "iou spot value", detail);

    std::mt19937_64 rng(31415);
    std::uniform_int_distribution<std::uint64_t> count(0, 10000);
    for (int i = 0; i < 1000; ++i) {
        Confusion c{count(rng), count(rng), count(rng), count(rng)};
        if (c.tp + c.fp + c.fn == 0) {
            c.tp = 1;
        }
        const double d = dice(c);
        const double j = iou(c);
        ok &= expect(std::abs(d - 2.0 * j / (1.0 + j)) <= 1e-12,
                     "dice-iou identity above 1e-12", detail);
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 9. end-to-end determinism
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool check_end_to_end(std::string& detail) {
    const char* cli = std::getenv("SEQTRAN_CLI");
    if (cli == nullptr) {
        detail = "SEQTRAN_CLI not set";
        return false;
    }
    const fs::path dir = testsup::fresh_temp_dir("accept_e2e");
    const fs::path manifest = testsup::write_demo_manifest(dir, false);
    const fs::path manifest_perm = testsup::write_demo_manifest(dir, true);

    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(cli) + " " + args + " > /dev/null 2> " +
                                (dir / "err.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status) == 0;
    };
    const std::string flags = " --pca-dim 2 --ssim-window 3 --solver exact";

    auto pipeline = [&](const fs::path& mf, const std::string& tag) -> bool {
        const std::string graph = (dir / ("graph_" + tag + ".json")).string();
        const std::string part = (dir / ("part_" + tag + ".json")).string();
        const std::string path = (dir / ("path_" + tag + ".json")).string();
        if (!run("build-graph --manifest " + mf.string() + " --out " + graph + flags)) {
            return false;
        }
        if (!run("cluster --graph " + graph + " --out " + part)) {
            return false;
        }
        return run("select-path --graph " + graph + " --partition " + part + " --manifest " +
                   mf.string() + " --length 2 --out " + path + flags);
    };

    bool ok = true;
    ok &= expect(pipeline(manifest, "a"), "pipeline run 1 failed: " + slurp(dir / "err.txt"),
                 detail);
    ok &= expect(pipeline(manifest, "b"), "pipeline run 2 failed", detail);
    ok &= expect(pipeline(manifest_perm, "c"), "permuted pipeline failed", detail);
    if (!ok) {
        return false;
    }
    for (const std::string stem : {"graph_", "part_", "path_"}) {
        const std::string a = slurp(dir / (stem + "a.json"));
        ok &= expect(!a.empty(), stem + "a.json empty", detail);
        ok &= expect(a == slurp(dir / (stem + "b.json")), stem + " differs across reruns",
                     detail);
        ok &= expect(a == slurp(dir / (stem + "c.json")),
                     stem + " differs across catalog permutations", detail);
    }
    return ok;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"transport solvers: lp axioms, 1-d agreement, sinkhorn gap", check_ot},
        {"ssim: oracle match, exact self-similarity, closed form", check_ssim},
        {"task aggregation: H and R equal double-loop recomputation", check_aggregation},
        {"clustering: fixtures and exhaustive <=6-node oracle", check_clustering},
        {"path selection: brute-force optimality incl. tie-breaks", check_ost},
        {"cost-scale invariance of selections and rankings", check_scale_invariance},
        {"calibration: recovery beats random search in 95/100 seeds", check_calibration},
        {"overlap metrics: dice-iou identity and spot values", check_metrics},
        {"end-to-end byte determinism across runs and permutations", check_end_to_end},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (ok) {
            std::cout << "[PASS] " << c.name;
        } else {
            std::cout << "[FAIL] " << c.name;
            ++failures;
        }
        if (!detail.empty()) {
            std::cout << " -- " << detail;
        }
        std::cout << "\n" << std::flush;
    }
    return failures;
}
