// Compares the OpenMP kernels against their serial reference implementations
// on synthetic inputs and verifies both produce the same result.
//
//   bench_kernels [threads]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "seqtran/affinity.hpp"
#include "seqtran/clustering.hpp"
#include "seqtran/ot.hpp"
#include "seqtran/parallel.hpp"
#include "seqtran/ssim.hpp"

using namespace seqtran;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_best_of(F&& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = now_ms();
        fn();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                equal ? "results match" : "RESULTS DIFFER");
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) {
        set_max_threads(std::atoi(argv[1]));
    }
    std::printf("threads: %d\n\n", max_threads());
    std::mt19937_64 rng(42);

    {
        const Shape shape{48, 48, 48};
        std::bernoulli_distribution coin(0.4);
        LabelVolume a(shape), b(shape);
        for (std::size_t i = 0; i < a.data.size(); ++i) {
            a.data[i] = coin(rng) ? 1 : 0;
            b.data[i] = coin(rng) ? 1 : 0;
        }
        SsimParams p; // window 7
        double vs = 0.0, vp = 0.0;
        const double ts = time_best_of([&] { vs = ssim_volume_serial(a, b, p); }, 3);
        const double tp = time_best_of([&] { vp = ssim_volume(a, b, p); }, 3);
        report("ssim_volume 48^3 w7", ts, tp, vs == vp);
    }

    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto make_dists = [&](int count, int atoms, int dim) {
            std::vector<DiscreteDistribution> out;
            for (int k = 0; k < count; ++k) {
                DiscreteDistribution d;
                double total = 0.0;
                for (int i = 0; i < atoms; ++i) {
                    std::vector<double> pt(dim);
                    for (auto& x : pt) {
                        x = unit(rng);
                    }
                    d.support.push_back(std::move(pt));
                    const double w = 0.1 + unit(rng);
                    d.weights.push_back(w);
                    total += w;
                }
                for (auto& w : d.weights) {
                    w /= total;
                }
                out.push_back(std::move(d));
            }
            return out;
        };
        const auto da = make_dists(8, 48, 16);
        const auto db = make_dists(8, 48, 16);
        OtConfig cfg;
        cfg.max_iter = 3000;
        double vs = 0.0, vp = 0.0;
        const double ts = time_best_of([&] { vs = image_similarity_h_serial(da, db, cfg); }, 3);
        const double tp = time_best_of([&] { vp = image_similarity_h(da, db, cfg); }, 3);
        report("image_similarity 8x8 pairs", ts, tp, vs == vp);
    }

    {
        const int n = 48;
        std::vector<GraphNode> nodes;
        for (int i = 0; i < n; ++i) {
            GraphNode node;
            node.descriptor = TaskDescriptor::make("n" + std::to_string(100 + i), "M", "O");
            node.sample_count = 1;
            nodes.push_back(std::move(node));
        }
        SourceGraph g;
        g.nodes = std::move(nodes);
        std::bernoulli_distribution coin(0.35);
        std::uniform_real_distribution<double> cost(0.1, 2.0);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (coin(rng)) {
                    AffinityEdge e;
                    e.i = g.nodes[i].descriptor.id;
                    e.j = g.nodes[j].descriptor.id;
                    e.h = e.cost = cost(rng);
                    g.edges.push_back(std::move(e));
                }
            }
        }
        std::vector<double> vs, vp;
        const double ts = time_best_of([&] { vs = edge_betweenness_serial(g); }, 3);
        const double tp = time_best_of([&] { vp = edge_betweenness(g); }, 3);
        report("edge_betweenness n=48", ts, tp, vs == vp);
    }

    return 0;
}
