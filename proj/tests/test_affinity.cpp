#include <doctest.h>

#include <algorithm>
#include <random>

#include <json.hpp>

#include "seqtran/affinity.hpp"
#include "seqtran/error.hpp"
#include "support/builders.hpp"

using namespace seqtran;

namespace {

MetricConfig fast_config() {
    MetricConfig mc;
    mc.reduction.dim = 2;
    mc.ssim.window = 3;
    mc.ot.solver = OtSolver::exact;
    return mc;
}

Catalog demo_catalog() {
    Catalog cat;
    const Shape shape{6, 6, 6};
    cat.sources.push_back(
        testsup::synthetic_task("A", "T1", "ED", 2, shape, 1, 0.35, 0.4, 0.5, 0.3));
    cat.sources.push_back(
        testsup::synthetic_task("B", "T1", "ED", 3, shape, 2, 0.45, 0.4, 0.5, 0.28));
    cat.sources.push_back(
        testsup::synthetic_task("C", "T2", "ED", 2, shape, 3, 0.5, 0.55, 0.5, 0.26));
    cat.sources.push_back(
        testsup::synthetic_task("D", "T2", "NCR", 2, shape, 4, 0.6, 0.6, 0.5, 0.22));
    return cat;
}

} // namespace

TEST_CASE("compatibility needs a shared modality or objective") {
    const auto t1ce_ncr = TaskDescriptor::make("01", "T1ce", "NCR");
    const auto t2_ncr = TaskDescriptor::make("01", "T2", "NCR");
    CHECK(compatible(t1ce_ncr, t2_ncr)); // shared objective

    const auto x_ed = TaskDescriptor::make("X", "T1", "ED");
    const auto x_et = TaskDescriptor::make("X", "T1", "ET");
    CHECK(compatible(x_ed, x_et)); // shared modality

    const auto y_ncr = TaskDescriptor::make("Y", "T2", "NCR");
    CHECK(!compatible(x_ed, y_ncr));
    CHECK(compatible(y_ncr, x_et) == compatible(x_et, y_ncr)); // symmetric
}

TEST_CASE("edge cost arithmetic in both modes") {
    AffinityParams p;
    p.alpha = 2.0;
    p.beta = 3.0;
    CHECK(edge_cost(0.0, 1.0, p) == 0.0); // perfect affinity costs nothing

    p.alpha = 1.0;
    p.beta = 2.0;
    CHECK(edge_cost(2.0, 0.5, p) == doctest::Approx(3.0).epsilon(1e-15));

    AffinityParams lit;
    lit.alpha = 1.0;
    lit.beta = -2.0;
    lit.transform = SimilarityTransform::signed_beta;
    CHECK(edge_cost(2.0, 0.5, lit) == doctest::Approx(1.0).epsilon(1e-15));

    AffinityParams bad;
    bad.beta = -1.0; // negative beta is only legal in signed_beta mode
    CHECK_THROWS_AS(edge_cost(1.0, 0.0, bad), Error);
}

TEST_CASE("build_graph keeps only compatible pairs") {
    Catalog cat;
    const Shape shape{6, 6, 6};
    cat.sources.push_back(testsup::synthetic_task("A", "T1", "ED", 2, shape, 1));
    cat.sources.push_back(testsup::synthetic_task("B", "T1", "ED", 2, shape, 2));
    cat.sources.push_back(testsup::synthetic_task("C", "T2", "NCR", 2, shape, 3));
    const SourceGraph g = build_graph(cat, AffinityParams{}, fast_config());
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].i == "A-T1-ED");
    CHECK(g.edges[0].j == "B-T1-ED");
}

TEST_CASE("identical tasks produce a zero-cost edge") {
    Catalog cat;
    const TaskDataset a = testsup::synthetic_task("A", "T1", "ED", 1, Shape{6, 6, 6}, 7);
    TaskDataset b = a;
    b.descriptor = TaskDescriptor::make("B", "T1", "ED");
    cat.sources = {a, b};
    const SourceGraph g = build_graph(cat, AffinityParams{}, fast_config());
    REQUIRE(g.edges.size() == 1);
    CHECK(g.edges[0].h == 0.0);
    CHECK(g.edges[0].r == 1.0);
    CHECK(g.edges[0].cost == 0.0); // one_minus_r with h=0, r=1
}

TEST_CASE("graph edges match independently scripted metric computations") {
    const Catalog cat = demo_catalog();
    const MetricConfig mc = fast_config();
    const SourceGraph g = build_graph(cat, AffinityParams{}, mc);

    for (const auto& e : g.edges) {
        const TaskDataset* a = cat.find(e.i);
        const TaskDataset* b = cat.find(e.j);
        REQUIRE(a != nullptr);
        REQUIRE(b != nullptr);
        const Shape grid = common_grid(*a, *b);
        const TaskDataset ra = resample_task(*a, grid);
        const TaskDataset rb = resample_task(*b, grid);
        const auto [da, db] = reduce_pair(ra, rb, mc.reduction);
        CHECK(e.h == image_similarity_h_serial(da, db, mc.ot));
        CHECK(e.r == label_similarity_r(ra, rb, mc.ssim));
        CHECK(e.cost == edge_cost(e.h, e.r, g.params));
    }
}

TEST_CASE("graph construction is catalog-order invariant") {
    Catalog cat = demo_catalog();
    const SourceGraph g1 = build_graph(cat, AffinityParams{}, fast_config());
    std::reverse(cat.sources.begin(), cat.sources.end());
    const SourceGraph g2 = build_graph(cat, AffinityParams{}, fast_config());
    REQUIRE(g1.edges.size() == g2.edges.size());
    for (std::size_t k = 0; k < g1.edges.size(); ++k) {
        CHECK(g1.edges[k].i == g2.edges[k].i);
        CHECK(g1.edges[k].j == g2.edges[k].j);
        CHECK(g1.edges[k].h == g2.edges[k].h);
        CHECK(g1.edges[k].r == g2.edges[k].r);
        CHECK(g1.edges[k].cost == g2.edges[k].cost);
    }
}

TEST_CASE("one_minus_r costs are non-negative and vanish only at perfect affinity") {
    AffinityParams p;
    p.alpha = 1.5;
    p.beta = 0.5;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> uh(0.0, 3.0);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double h = uh(rng);
        const double r = ur(rng);
        const double c = edge_cost(h, r, p);
        CHECK(c >= 0.0);
        if (c == 0.0) {
            CHECK(h == 0.0);
            CHECK(r == 1.0);
        }
    }
}

TEST_CASE("attach_target computes compatible edges only, same cost rule") {
    Catalog cat = demo_catalog();
    cat.target = testsup::synthetic_task("T", "T1", "NCR", 2, Shape{6, 6, 6}, 9);
    const MetricConfig mc = fast_config();
    const SourceGraph g = build_graph(cat, AffinityParams{}, mc);
    const std::vector<AffinityEdge> edges = attach_target(g, cat, mc);
    // Compatible with A-T1-ED, B-T1-ED (modality) and D-T2-NCR (objective).
    REQUIRE(edges.size() == 3);
    for (const auto& e : edges) {
        const bool touches_target = e.i == "T-T1-NCR" || e.j == "T-T1-NCR";
        CHECK(touches_target);
        CHECK(e.cost == edge_cost(e.h, e.r, g.params));
    }
}

TEST_CASE("target identical to a single-sample source yields a zero-cost edge") {
    Catalog cat;
    const TaskDataset a = testsup::synthetic_task("A", "T1", "ED", 1, Shape{6, 6, 6}, 21);
    const TaskDataset b = testsup::synthetic_task("B", "T1", "ED", 1, Shape{6, 6, 6}, 22);
    TaskDataset target = a;
    target.descriptor = TaskDescriptor::make("Z", "T1", "ED");
    cat.sources = {a, b};
    cat.target = target;
    const SourceGraph g = build_graph(cat, AffinityParams{}, fast_config());
    const auto edges = attach_target(g, cat, fast_config());
    bool found = false;
    for (const auto& e : edges) {
        if (e.i == "A-T1-ED" || e.j == "A-T1-ED") {
            CHECK(e.cost == 0.0);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("isolated target is rejected") {
    Catalog cat;
    cat.sources.push_back(testsup::synthetic_task("A", "T1", "ED", 2, Shape{6, 6, 6}, 31));
    cat.sources.push_back(testsup::synthetic_task("B", "T1", "ED", 2, Shape{6, 6, 6}, 32));
    cat.target = testsup::synthetic_task("T", "T2", "NCR", 1, Shape{6, 6, 6}, 33);
    const SourceGraph g = build_graph(cat, AffinityParams{}, fast_config());
    CHECK_THROWS_WITH_AS(attach_target(g, cat, fast_config()),
                         doctest::Contains("isolated target"), Error);
}

TEST_CASE("graph json round-trip is lossless") {
    const Catalog cat = demo_catalog();
    const SourceGraph g = build_graph(cat, AffinityParams{}, fast_config());
    const nlohmann::json j = graph_to_json(g);
    const std::string text = j.dump();
    const SourceGraph back = graph_from_json(nlohmann::json::parse(text));
    REQUIRE(back.edges.size() == g.edges.size());
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        CHECK(back.edges[k].h == g.edges[k].h);
        CHECK(back.edges[k].r == g.edges[k].r);
        CHECK(back.edges[k].cost == g.edges[k].cost);
    }
    CHECK(back.params.alpha == g.params.alpha);
    REQUIRE(back.nodes.size() == g.nodes.size());
    for (std::size_t k = 0; k < g.nodes.size(); ++k) {
        CHECK(back.nodes[k].descriptor.id == g.nodes[k].descriptor.id);
        CHECK(back.nodes[k].sample_count == g.nodes[k].sample_count);
    }
}

TEST_CASE("rescaling alpha and beta rescales every cost") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uh(0.0, 2.0);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    AffinityParams p;
    p.alpha = 1.3;
    p.beta = 0.7;
    AffinityParams scaled = p;
    const double c = 4.5;
    scaled.alpha *= c;
    scaled.beta *= c;
    for (int trial = 0; trial < 100; ++trial) {
        const double h = uh(rng);
        const double r = ur(rng);
        CHECK(edge_cost(h, r, scaled) == doctest::Approx(c * edge_cost(h, r, p)).epsilon(1e-12));
    }
}
