// seqtran - sequential transfer planning over a catalog of segmentation tasks.
//
// Commands:
//   build-graph   pairwise affinities over compatible source pairs -> graph JSON
//   cluster       divisive clustering + representative election -> partition JSON
//   select-path   minimum-cost source chain toward the target -> path JSON
//   calibrate     fit (alpha, beta) against recorded transfer accuracies
//   eval          Dice/IoU between two binary volumes
//
// Every command exits 0 with valid JSON output on success and nonzero with a
// JSON error object on stderr on failure. Output files are written to a
// temporary name and renamed, so readers never observe partial files.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "seqtran/affinity.hpp"
#include "seqtran/calibration.hpp"
#include "seqtran/clustering.hpp"
#include "seqtran/dataset.hpp"
#include "seqtran/error.hpp"
#include "seqtran/ost.hpp"
#include "seqtran/parallel.hpp"
#include "seqtran/segmetrics.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class LogLevel { off = 0, info = 1, debug = 2 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("SEQTRAN_LOG");
        if (env == nullptr) return LogLevel::off;
        const std::string v(env);
        if (v == "info") return LogLevel::info;
        if (v == "debug") return LogLevel::debug;
        return LogLevel::off;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) {
        std::cerr << "[seqtran] " << msg << "\n";
    }
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) {
        std::cerr << "[seqtran] " << msg << "\n";
    }
}

void write_report(const fs::path& out, const json& j) {
    const fs::path tmp = out.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc);
        if (!f) {
            throw seqtran::Error("cannot write " + tmp.string());
        }
        f << j.dump(2) << "\n";
    }
    fs::rename(tmp, out);
    log_info("wrote " + out.string());
}

json read_json_file(const fs::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw seqtran::Error("missing file: " + path.string());
    }
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw seqtran::Error("parse error in " + path.string() + ": " + e.what());
    }
    return j;
}

// Options shared by the metric-computing commands. A --config JSON file can
// pre-set any of these; explicit flags win.
struct CommonOptions {
    std::string manifest;
    std::string graph;
    std::string partition;
    std::string out;
    double alpha = 1.0;
    double beta = 1.0;
    std::string mode = "one_minus_r";
    int pca_dim = 16;
    int ssim_window = 7;
    int length = 2;
    std::string solver = "sinkhorn";
    double ot_epsilon = 0.0; // 0 = auto
    int ot_max_iter = 20000;
    double ot_tol = 1e-6;
    std::uint64_t seed = 0;
    int jobs = 0;
    int top_n = 5;
    int bo_init = 8;
    int bo_iter = 32;
    double alpha_low = 0.0, alpha_high = 10.0;
    double beta_low = 0.0, beta_high = 10.0;
    std::string records;
    std::string pred;
    std::string gt;
    std::vector<int> shape;
};

void apply_config_file(const std::string& path, CommonOptions& o) {
    const json cfg = read_json_file(path);
    auto get = [&](const char* key, auto& slot) {
        if (cfg.contains(key)) {
            cfg.at(key).get_to(slot);
        }
    };
    get("manifest", o.manifest);
    get("graph", o.graph);
    get("partition", o.partition);
    get("out", o.out);
    get("alpha", o.alpha);
    get("beta", o.beta);
    get("mode", o.mode);
    get("pca-dim", o.pca_dim);
    get("ssim-window", o.ssim_window);
    get("length", o.length);
    get("solver", o.solver);
    get("ot-epsilon", o.ot_epsilon);
    get("ot-max-iter", o.ot_max_iter);
    get("ot-tol", o.ot_tol);
    get("seed", o.seed);
    get("jobs", o.jobs);
    get("top", o.top_n);
    get("bo-init", o.bo_init);
    get("bo-iter", o.bo_iter);
    get("alpha-low", o.alpha_low);
    get("alpha-high", o.alpha_high);
    get("beta-low", o.beta_low);
    get("beta-high", o.beta_high);
    get("records", o.records);
    get("pred", o.pred);
    get("gt", o.gt);
    get("shape", o.shape);
}

seqtran::MetricConfig metric_config(const CommonOptions& o) {
    seqtran::MetricConfig mc;
    mc.reduction.dim = o.pca_dim;
    mc.ssim.window = o.ssim_window;
    if (o.solver == "sinkhorn") {
        mc.ot.solver = seqtran::OtSolver::sinkhorn;
    } else if (o.solver == "exact") {
        mc.ot.solver = seqtran::OtSolver::exact;
    } else {
        throw seqtran::Error("unknown solver \"" + o.solver + "\" (sinkhorn|exact)");
    }
    mc.ot.epsilon = o.ot_epsilon;
    mc.ot.max_iter = o.ot_max_iter;
    mc.ot.tol = o.ot_tol;
    return mc;
}

seqtran::AffinityParams affinity_params(const CommonOptions& o) {
    seqtran::AffinityParams p;
    p.alpha = o.alpha;
    p.beta = o.beta;
    p.transform = seqtran::similarity_transform_from_string(o.mode);
    p.validate();
    return p;
}

int cmd_build_graph(const CommonOptions& o) {
    if (o.manifest.empty() || o.out.empty()) {
        throw seqtran::Error("build-graph requires --manifest and --out");
    }
    log_info("loading " + o.manifest);
    const seqtran::Catalog catalog = seqtran::load_manifest(o.manifest);
    log_debug("sources: " + std::to_string(catalog.sources.size()));
    const seqtran::SourceGraph graph =
        seqtran::build_graph(catalog, affinity_params(o), metric_config(o));
    write_report(o.out, seqtran::graph_to_json(graph));
    return 0;
}

int cmd_cluster(const CommonOptions& o) {
    if (o.graph.empty() || o.out.empty()) {
        throw seqtran::Error("cluster requires --graph and --out");
    }
    const seqtran::SourceGraph graph = seqtran::graph_from_json(read_json_file(o.graph));
    const seqtran::Partition partition = seqtran::girvan_newman(graph);
    const seqtran::Representatives reps = seqtran::select_representatives(graph, partition);
    write_report(o.out, seqtran::partition_to_json(partition, reps));
    return 0;
}

int cmd_select_path(const CommonOptions& o) {
    if (o.graph.empty() || o.partition.empty() || o.manifest.empty() || o.out.empty()) {
        throw seqtran::Error("select-path requires --graph, --partition, --manifest and --out");
    }
    const seqtran::SourceGraph graph = seqtran::graph_from_json(read_json_file(o.graph));
    seqtran::Partition partition;
    seqtran::Representatives reps;
    seqtran::partition_from_json(read_json_file(o.partition), partition, reps);

    const seqtran::Catalog catalog = seqtran::load_manifest(o.manifest);
    if (!catalog.target) {
        throw seqtran::Error("manifest has no target task");
    }
    log_info("attaching target " + catalog.target->descriptor.id);
    const std::vector<seqtran::AffinityEdge> target_edges =
        seqtran::attach_target(graph, catalog, metric_config(o));

    const seqtran::TransferPath best =
        seqtran::ost_general(graph, partition, reps, target_edges, o.length);
    std::vector<seqtran::TransferPath> ranked =
        seqtran::rank_candidates(graph, partition, reps, target_edges, o.length, o.top_n + 1);
    if (!ranked.empty()) {
        ranked.erase(ranked.begin()); // the head repeats the selected path
    }
    write_report(o.out, seqtran::path_to_json(best, ranked, graph, target_edges));
    return 0;
}

int cmd_calibrate(const CommonOptions& o) {
    if (o.records.empty() || o.manifest.empty() || o.out.empty()) {
        throw seqtran::Error("calibrate requires --records, --manifest and --out");
    }
    const std::vector<seqtran::TransferRecord> records = seqtran::load_records(o.records);
    const seqtran::Catalog catalog = seqtran::load_manifest(o.manifest);
    log_info("computing pair metrics for " + std::to_string(records.size()) + " records");
    const seqtran::PairMetricsCache cache =
        seqtran::build_metric_cache(records, catalog, metric_config(o));

    seqtran::BoConfig bo;
    bo.alpha_low = o.alpha_low;
    bo.alpha_high = o.alpha_high;
    bo.beta_low = o.beta_low;
    bo.beta_high = o.beta_high;
    bo.n_init = o.bo_init;
    bo.n_iter = o.bo_iter;
    bo.seed = o.seed;
    const seqtran::BoResult result = seqtran::bayes_opt(
        records, cache, seqtran::similarity_transform_from_string(o.mode), bo);
    write_report(o.out, seqtran::calibration_to_json(result));
    return 0;
}

int cmd_eval(const CommonOptions& o) {
    if (o.pred.empty() || o.gt.empty() || o.shape.size() != 3) {
        throw seqtran::Error("eval requires --pred, --gt and --shape nx ny nz");
    }
    const seqtran::Shape shape{o.shape[0], o.shape[1], o.shape[2]};
    const seqtran::LabelVolume pred = seqtran::read_label_volume(o.pred, shape);
    const seqtran::LabelVolume gt = seqtran::read_label_volume(o.gt, shape);
    const seqtran::Confusion c = seqtran::confusion(pred, gt);

    json j;
    j["schema_version"] = 1;
    j["confusion"] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
    j["dice"] = seqtran::dice(c);
    j["iou"] = seqtran::iou(c);
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sequential transfer path planning for segmentation task catalogs"};
    app.require_subcommand(1);

    CommonOptions o;

    // --config applies defaults before the remaining flags are parsed.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(argv[i + 1], o);
            } catch (const std::exception& e) {
                std::cerr << json{{"schema_version", 1}, {"error", e.what()}}.dump() << "\n";
                return 1;
            }
        }
    }
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; explicit flags win");
        cmd->add_option("--seed", o.seed, "random seed");
        cmd->add_option("--jobs", o.jobs, "parallelism bound (0 = hardware default)");
        cmd->add_option("--out", o.out, "output file path");
    };
    auto add_metric_flags = [&](CLI::App* cmd) {
        cmd->add_option("--pca-dim", o.pca_dim, "reduced dimension per slice");
        cmd->add_option("--ssim-window", o.ssim_window, "odd ssim window edge");
        cmd->add_option("--solver", o.solver, "transport solver: sinkhorn|exact");
        cmd->add_option("--ot-epsilon", o.ot_epsilon, "sinkhorn epsilon (0 = auto)");
        cmd->add_option("--ot-max-iter", o.ot_max_iter, "sinkhorn iteration budget");
        cmd->add_option("--ot-tol", o.ot_tol, "sinkhorn marginal tolerance");
    };

    CLI::App* build = app.add_subcommand("build-graph", "build the source affinity graph");
    build->add_option("--manifest", o.manifest, "task manifest JSON");
    build->add_option("--alpha", o.alpha, "image term weight");
    build->add_option("--beta", o.beta, "label term weight");
    build->add_option("--mode", o.mode, "cost mode: one_minus_r|signed_beta");
    add_metric_flags(build);
    add_common(build);

    CLI::App* cluster = app.add_subcommand("cluster", "cluster the graph, elect representatives");
    cluster->add_option("--graph", o.graph, "graph JSON from build-graph");
    add_common(cluster);

    CLI::App* select = app.add_subcommand("select-path", "pick the minimum-cost transfer path");
    select->add_option("--graph", o.graph, "graph JSON");
    select->add_option("--partition", o.partition, "partition JSON from cluster");
    select->add_option("--manifest", o.manifest, "manifest containing the target task");
    select->add_option("--length", o.length, "source chain length l");
    select->add_option("--top", o.top_n, "number of alternative paths to report");
    add_metric_flags(select);
    add_common(select);

    CLI::App* calibrate = app.add_subcommand("calibrate", "fit alpha/beta from transfer records");
    calibrate->add_option("--records", o.records, "JSON-lines transfer records");
    calibrate->add_option("--manifest", o.manifest, "task manifest JSON");
    calibrate->add_option("--mode", o.mode, "cost mode: one_minus_r|signed_beta");
    calibrate->add_option("--bo-init", o.bo_init, "seed evaluations");
    calibrate->add_option("--bo-iter", o.bo_iter, "acquisition steps");
    calibrate->add_option("--alpha-low", o.alpha_low, "alpha lower bound");
    calibrate->add_option("--alpha-high", o.alpha_high, "alpha upper bound");
    calibrate->add_option("--beta-low", o.beta_low, "beta lower bound");
    calibrate->add_option("--beta-high", o.beta_high, "beta upper bound");
    add_metric_flags(calibrate);
    add_common(calibrate);

    CLI::App* eval = app.add_subcommand("eval", "Dice/IoU between two binary volumes");
    eval->add_option("--pred", o.pred, "predicted binary volume (raw uint8)");
    eval->add_option("--gt", o.gt, "ground-truth binary volume (raw uint8)");
    eval->add_option("--shape", o.shape, "volume shape")->expected(3);
    add_common(eval);

    CLI11_PARSE(app, argc, argv);

    try {
        seqtran::set_max_threads(o.jobs);
        if (build->parsed()) return cmd_build_graph(o);
        if (cluster->parsed()) return cmd_cluster(o);
        if (select->parsed()) return cmd_select_path(o);
        if (calibrate->parsed()) return cmd_calibrate(o);
        if (eval->parsed()) return cmd_eval(o);
        throw seqtran::Error("no command given");
    } catch (const std::exception& e) {
        std::cerr << json{{"schema_version", 1}, {"error", e.what()}}.dump() << "\n";
        return 1;
    }
}
