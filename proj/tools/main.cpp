#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "axel/axelrod.hpp"
#include "axel/experiments.hpp"
#include "axel/io.hpp"
#include "axel/metrics.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace axel;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

void apply_overrides(json& cfg, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string raw = kv.substr(eq + 1);
        std::string pointer = "/";
        for (char c : key) pointer += (c == '.') ? '/' : c;
        json value;
        try {
            value = json::parse(raw);
        } catch (...) {
            value = raw;  // bare strings allowed
        }
        cfg[json::json_pointer(pointer)] = value;
    }
}

fs::path resolve_output_dir(const json& cfg) {
    fs::path dir = cfg.value("output_dir", std::string("out"));
    if (dir.is_relative()) {
        if (const char* root = std::getenv("AXELGNN_OUTPUT_ROOT")) dir = fs::path(root) / dir;
    }
    fs::create_directories(dir);
    return dir;
}

template <typename T>
T require(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw ConfigError("missing required config key \"" + key + "\"");
    try {
        return cfg.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key \"" + key + "\" has the wrong type");
    }
}

struct LoadedDataset {
    Graph graph;
    NodeData data;
    std::optional<std::vector<long long>> mapping;  // set when ids were remapped
};

LoadedDataset load_dataset(const json& dcfg, bool need_labels) {
    const bool has_synth = dcfg.contains("synth");
    const bool has_files = dcfg.contains("edge_list");
    if (has_synth == has_files)
        throw ConfigError("dataset must name exactly one source: \"synth\" or \"edge_list\"");

    LoadedDataset out;
    if (has_synth) {
        const auto& s = dcfg.at("synth");
        SbmConfig sc;
        sc.n = s.value("n", sc.n);
        sc.k_classes = s.value("classes", sc.k_classes);
        sc.p_intra = s.value("p_intra", sc.p_intra);
        sc.p_inter = s.value("p_inter", sc.p_inter);
        sc.feature_model = s.value("feature_model", sc.feature_model);
        sc.delta = s.value("delta", sc.delta);
        sc.feature_dim = s.value("feature_dim", sc.feature_dim);
        sc.seed = s.value("seed", 1u);
        auto [g, d] = synth_sbm(sc);
        out.graph = std::move(g);
        out.data = std::move(d);
    } else {
        auto loaded = load_edge_list(dcfg.at("edge_list").get<std::string>());
        out.graph = std::move(loaded.graph);
        if (loaded.remapped) out.mapping = std::move(loaded.original_ids);
        if (dcfg.contains("features")) {
            out.data.features = load_features_csv(dcfg.at("features").get<std::string>());
            if (out.data.features.rows != out.graph.n)
                throw ConfigError("features row count (" +
                                  std::to_string(out.data.features.rows) +
                                  ") does not match graph nodes (" +
                                  std::to_string(out.graph.n) + ")");
        }
        if (dcfg.contains("labels")) {
            out.data.labels = load_labels_csv(dcfg.at("labels").get<std::string>());
            if (out.data.labels.size() != out.graph.n)
                throw ConfigError("labels row count does not match graph nodes");
        } else if (need_labels) {
            throw ConfigError("dataset missing \"labels\" required by this task");
        }
    }
    if (dcfg.value("row_normalize", false)) row_normalize(out.data.features);
    return out;
}

gnn::ModelConfig parse_model_config(const json& cfg) {
    gnn::ModelConfig mc;
    const json m = cfg.value("model", json::object());
    mc.num_layers = m.value("layers", mc.num_layers);
    mc.hidden_dim = m.value("hidden", mc.hidden_dim);
    mc.segment_size = m.value("segment", mc.segment_size);
    mc.variant = gnn::variant_from_string(m.value("variant", std::string("full")));
    mc.dropout = m.value("dropout", mc.dropout);
    mc.phi_hidden = m.value("phi_hidden", 0);
    mc.literal_neighbor_norm = m.value("literal_neighbor_norm", false);
    mc.cosine_eps = m.value("cosine_eps", 1e-8);
    return mc;
}

train::TrainConfig parse_train_config(const json& cfg, bool influence) {
    train::TrainConfig tc;
    tc.max_epochs = influence ? 200 : 1000;
    tc.patience = influence ? 30 : 100;
    const json t = cfg.value("train", json::object());
    tc.lr = t.value("lr", tc.lr);
    tc.weight_decay = t.value("weight_decay", tc.weight_decay);
    tc.max_epochs = t.value("max_epochs", tc.max_epochs);
    tc.patience = t.value("patience", tc.patience);
    return tc;
}

experiments::SplitRatios parse_split(const json& cfg) {
    experiments::SplitRatios r;
    const json s = cfg.value("split", json::object());
    r.train = s.value("train", r.train);
    r.val = s.value("val", r.val);
    r.test = s.value("test", r.test);
    return r;
}

diffusion::DiffusionConfig parse_diffusion(const json& cfg) {
    diffusion::DiffusionConfig dc;
    const json d = cfg.value("diffusion", json::object());
    const std::string model = d.value("model", std::string("lt"));
    if (model == "lt")
        dc.model = diffusion::DiffusionModel::lt;
    else if (model == "sis")
        dc.model = diffusion::DiffusionModel::sis;
    else
        throw ConfigError("diffusion.model must be \"lt\" or \"sis\"");
    dc.num_simulations = d.value("num_simulations", dc.num_simulations);
    const json s = d.value("sis", json::object());
    dc.sis.beta_inf = s.value("beta", dc.sis.beta_inf);
    dc.sis.gamma = s.value("gamma", dc.sis.gamma);
    dc.sis.horizon = s.value("horizon", dc.sis.horizon);
    return dc;
}

json resolved_model_json(const gnn::ModelConfig& mc) {
    return json{{"layers", mc.num_layers},
                {"hidden", mc.hidden_dim},
                {"segment", mc.segment_size},
                {"variant", gnn::to_string(mc.variant)},
                {"dropout", mc.dropout},
                {"phi_hidden", mc.phi_hidden},
                {"literal_neighbor_norm", mc.literal_neighbor_norm},
                {"cosine_eps", mc.cosine_eps}};
}

json resolved_train_json(const train::TrainConfig& tc) {
    return json{{"lr", tc.lr},
                {"weight_decay", tc.weight_decay},
                {"max_epochs", tc.max_epochs},
                {"patience", tc.patience}};
}

std::vector<io::LayerMetricsRow> layer_metrics(const std::vector<Matrix>& embeddings,
                                               const std::vector<int>& labels,
                                               const Graph& g) {
    const auto polar = metrics::polarization_report(embeddings, labels);
    std::vector<io::LayerMetricsRow> rows;
    for (std::size_t l = 0; l < embeddings.size(); ++l) {
        io::LayerMetricsRow row{};
        row.layer = static_cast<int>(l) + 1;
        row.inter = polar.per_layer[l].inter_class_distance;
        row.intra = polar.per_layer[l].intra_class_distance;
        row.ratio = polar.per_layer[l].ratio;
        row.ratio_defined = polar.per_layer[l].ratio_defined;
        row.smoothness = metrics::smoothness(embeddings[l], g);
        row.silhouette = metrics::silhouette(embeddings[l], labels);
        const auto ch = metrics::calinski_harabasz(embeddings[l], labels);
        row.calinski_harabasz = ch.value;
        row.ch_defined = ch.defined;
        rows.push_back(row);
    }
    return rows;
}

int cmd_axelrod_sim(const json& cfg) {
    const json a = cfg.value("axelrod", json::object());
    axelrod::GridConfig gc;
    gc.L = a.value("L", 10);
    gc.f = a.value("f", 5);
    gc.q = a.value("q", 15);
    gc.periodic = a.value("periodic", false);
    const std::string neigh = a.value("neighborhood", std::string("von-neumann"));
    if (neigh == "von-neumann")
        gc.neighborhood = axelrod::Neighborhood::von_neumann;
    else if (neigh == "moore")
        gc.neighborhood = axelrod::Neighborhood::moore;
    else
        throw ConfigError("axelrod.neighborhood must be \"von-neumann\" or \"moore\"");
    const long long max_steps = a.value("max_steps", 10000000LL);
    const long long check_interval = a.value("check_interval", 0LL);
    const std::uint64_t seed = cfg.value("seed", 1u);

    json resolved = cfg;
    resolved["task"] = "axelrod-sim";
    resolved["seed"] = seed;
    resolved["axelrod"] = {{"L", gc.L},           {"f", gc.f},
                           {"q", gc.q},           {"periodic", gc.periodic},
                           {"neighborhood", neigh}, {"max_steps", max_steps},
                           {"check_interval", check_interval}};
    const fs::path outdir = resolve_output_dir(resolved);
    const std::string hash = io::config_hash(resolved);
    io::write_text(outdir / "resolved_config.json", resolved.dump(2) + "\n");

    axelrod::CultureGrid grid(gc, seed);
    std::ostringstream csv;
    csv << io::csv_provenance(hash, seed);
    csv << "step,mean_similarity,region_count,is_equilibrium\n";
    csv << 0 << ',' << grid.mean_neighbor_similarity() << ',' << grid.count_regions()
        << ',' << (grid.is_equilibrium() ? 1 : 0) << '\n';
    const auto result = grid.run_to_equilibrium(
        max_steps, check_interval, [&](const axelrod::Checkpoint& cp) {
            csv << cp.step << ',' << cp.mean_similarity << ',' << cp.region_count << ','
                << (cp.equilibrium ? 1 : 0) << '\n';
        });
    io::write_text(outdir / "trajectory.csv", csv.str());

    json summary = {{"task", "axelrod-sim"},
                    {"config_hash", hash},
                    {"seed", seed},
                    {"steps_taken", result.steps_taken},
                    {"reached_equilibrium", result.reached},
                    {"region_count", grid.count_regions()},
                    {"mean_similarity", grid.mean_neighbor_similarity()}};
    io::write_text(outdir / "summary.json", summary.dump(2) + "\n");
    std::cout << "axelrod-sim: " << (result.reached ? "equilibrium" : "step cap") << " after "
              << result.steps_taken << " steps, " << grid.count_regions() << " regions\n";
    return kExitOk;
}

int cmd_train(const json& cfg) {
    const std::string task = require<std::string>(cfg, "task");
    if (task != "node-classify" && task != "influence")
        throw ConfigError("config key \"task\" must be \"node-classify\" or \"influence\"");
    const bool influence = task == "influence";

    if (!cfg.contains("dataset")) throw ConfigError("missing required config key \"dataset\"");
    const LoadedDataset ds = load_dataset(cfg.at("dataset"), !influence);
    gnn::ModelConfig mc = parse_model_config(cfg);
    const train::TrainConfig tc = parse_train_config(cfg, influence);
    const experiments::SplitRatios ratios = parse_split(cfg);
    const std::uint64_t seed = cfg.value("seed", 1u);
    const int repeats = cfg.value("repeats", 10);

    json resolved = cfg;
    resolved["task"] = task;
    resolved["seed"] = seed;
    resolved["repeats"] = repeats;
    resolved["model"] = resolved_model_json(mc);
    resolved["train"] = resolved_train_json(tc);
    resolved["split"] = {{"train", ratios.train}, {"val", ratios.val}, {"test", ratios.test}};
    const fs::path outdir = resolve_output_dir(resolved);
    const std::string hash = io::config_hash(resolved);
    io::write_text(outdir / "resolved_config.json", resolved.dump(2) + "\n");
    if (ds.mapping) io::write_mapping_csv(outdir / "mapping.csv", *ds.mapping, hash, seed);

    json summary = {{"task", task}, {"config_hash", hash}, {"seed", seed}, {"repeats", repeats}};
    bool diverged = false;

    if (!influence) {
        const auto res = experiments::run_node_classification(ds.graph, ds.data, mc, tc,
                                                              ratios, repeats, seed);
        diverged = res.any_diverged;
        json per_run = json::array();
        for (std::size_t r = 0; r < res.runs.size(); ++r) {
            const auto& run = res.runs[r];
            io::write_history_csv(outdir / ("history_run" + std::to_string(r) + ".csv"),
                                  run.fit.history, hash, run.seed);
            if (!run.fit.diverged) {
                const auto rows = layer_metrics(run.fit.final_layer_embeddings,
                                                ds.data.labels.ints, ds.graph);
                io::write_metrics_csv(outdir / ("metrics_run" + std::to_string(r) + ".csv"),
                                      rows, hash, run.seed);
            }
            if (!run.fit.diverged)
                io::save_checkpoint(outdir / ("checkpoint_run" + std::to_string(r) + ".json"),
                                    run.model, hash, run.seed);
            per_run.push_back({{"seed", run.seed},
                               {"test_accuracy", run.fit.test_metric},
                               {"val_accuracy", run.fit.best_val_metric},
                               {"best_epoch", run.fit.best_epoch},
                               {"diverged", run.fit.diverged}});
        }
        summary["metric"] = "accuracy";
        summary["mean"] = res.mean_test;
        summary["std"] = res.std_test;
        summary["per_run"] = per_run;
    } else {
        const auto dc = parse_diffusion(cfg);
        const double fraction = cfg.value("diffusion", json::object()).value("seed_fraction", 0.10);
        const auto res = experiments::run_influence(ds.graph, dc, fraction, mc, tc, ratios,
                                                    repeats, seed);
        diverged = res.any_diverged;
        json per_fold = json::array();
        for (std::size_t f = 0; f < res.folds.size(); ++f) {
            const auto& fold = res.folds[f];
            io::write_history_csv(outdir / ("history_fold" + std::to_string(f) + ".csv"),
                                  fold.fit.history, hash, fold.seed);
            io::write_labels_csv(outdir / ("labels_fold" + std::to_string(f) + ".csv"),
                                 fold.labels, hash, fold.seed);
            per_fold.push_back({{"seed", fold.seed},
                                {"test_mae", fold.fit.test_metric},
                                {"val_mae", fold.fit.best_val_metric},
                                {"best_epoch", fold.fit.best_epoch},
                                {"diverged", fold.fit.diverged}});
        }
        summary["metric"] = "mae";
        summary["mean"] = res.mean_test_mae;
        summary["std"] = res.std_test_mae;
        summary["per_fold"] = per_fold;
    }
    summary["diverged_any"] = diverged;
    io::write_text(outdir / "summary.json", summary.dump(2) + "\n");
    std::cout << task << ": " << summary["metric"].get<std::string>() << " = "
              << summary["mean"].get<double>() << " +- " << summary["std"].get<double>()
              << " over " << repeats << " repeats\n";
    if (diverged) {
        io::write_text(outdir / "error.json",
                       json{{"error", "divergence in at least one run"},
                            {"config_hash", hash},
                            {"seed", seed}}.dump(2) + "\n");
        std::cerr << "error: at least one run diverged (partial artifacts kept)\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_influence_labels(const json& cfg) {
    if (!cfg.contains("dataset")) throw ConfigError("missing required config key \"dataset\"");
    const LoadedDataset ds = load_dataset(cfg.at("dataset"), false);
    const auto dc0 = parse_diffusion(cfg);
    const double fraction = cfg.value("diffusion", json::object()).value("seed_fraction", 0.10);
    const std::uint64_t seed = cfg.value("seed", 1u);

    json resolved = cfg;
    resolved["seed"] = seed;
    const fs::path outdir = resolve_output_dir(resolved);
    const std::string hash = io::config_hash(resolved);

    diffusion::DiffusionConfig dc = dc0;
    dc.seed = seed;
    const auto seeds = diffusion::sample_seeds(ds.graph, fraction, seed);
    diffusion::DiffusionResult result;
    if (dc.model == diffusion::DiffusionModel::lt) {
        const auto weights = diffusion::LtWeights::degree_normalized(ds.graph);
        result = diffusion::lt_estimate(ds.graph, seeds, weights, dc);
    } else {
        result = diffusion::sis_estimate(ds.graph, seeds, dc);
    }
    io::write_labels_csv(outdir / "labels.csv", result, hash, seed);
    json sidecar = resolved;
    sidecar["config_hash"] = hash;
    sidecar["num_seeds"] = seeds.size();
    sidecar["seeds"] = seeds;
    sidecar["note"] = dc.model == diffusion::DiffusionModel::sis
                          ? "SIS activation probability means infected at the horizon snapshot"
                          : "LT activation probability under per-run U[0,1) thresholds";
    io::write_text(outdir / "labels_sidecar.json", sidecar.dump(2) + "\n");
    std::cout << "influence-labels: wrote " << result.probs.size() << " rows ("
              << seeds.size() << " seeds)\n";
    return kExitOk;
}

int cmd_sweep(const json& cfg) {
    const std::string task = require<std::string>(cfg, "task");
    if (task != "node-classify" && task != "influence")
        throw ConfigError("config key \"task\" must be \"node-classify\" or \"influence\"");
    if (task == "influence")
        throw ConfigError("sweep currently supports task \"node-classify\" only");
    if (!cfg.contains("dataset")) throw ConfigError("missing required config key \"dataset\"");
    const LoadedDataset ds = load_dataset(cfg.at("dataset"), true);

    train::GridSpace space;
    const json gj = cfg.value("grid", json::object());
    if (gj.contains("layers")) space.layers = gj.at("layers").get<std::vector<int>>();
    if (gj.contains("lr")) space.lr = gj.at("lr").get<std::vector<double>>();
    if (gj.contains("weight_decay"))
        space.weight_decay = gj.at("weight_decay").get<std::vector<double>>();
    if (gj.contains("dropout")) space.dropout = gj.at("dropout").get<std::vector<double>>();
    if (gj.contains("hidden")) space.hidden = gj.at("hidden").get<std::vector<int>>();
    if (gj.contains("segment")) space.segment = gj.at("segment").get<std::vector<int>>();

    gnn::ModelConfig mc = parse_model_config(cfg);
    mc.head = gnn::Head::classify;
    mc.num_classes = ds.data.labels.num_classes;
    train::TrainConfig tc = parse_train_config(cfg, false);
    const std::uint64_t seed = cfg.value("seed", 1u);
    tc.seed = seed;
    const int repeats = cfg.value("repeats", 3);
    const experiments::SplitRatios ratios = parse_split(cfg);

    json resolved = cfg;
    resolved["seed"] = seed;
    resolved["repeats"] = repeats;
    const fs::path outdir = resolve_output_dir(resolved);
    const std::string hash = io::config_hash(resolved);
    io::write_text(outdir / "resolved_config.json", resolved.dump(2) + "\n");

    const SplitMask split = [&] {
        std::vector<int> ids(ds.graph.n);
        for (int i = 0; i < ds.graph.n; ++i) ids[i] = i;
        return split_nodes(ids, ds.graph.n, ratios.train, ratios.val, ratios.test, seed);
    }();
    train::TargetSpec target;
    target.classify = true;
    target.labels = ds.data.labels.ints;

    const auto res = train::grid_search(space, mc, tc, ds.graph, ds.data.features, target,
                                        split, repeats);

    std::ostringstream csv;
    csv << io::csv_provenance(hash, seed);
    csv << "layers,hidden,segment,lr,weight_decay,dropout,mean_val,std_val,mean_test,any_diverged\n";
    for (const auto& cell : res.cells)
        csv << cell.model.num_layers << ',' << cell.model.hidden_dim << ','
            << cell.model.segment_size << ',' << cell.train.lr << ','
            << cell.train.weight_decay << ',' << cell.model.dropout << ','
            << cell.mean_val_metric << ',' << cell.std_val_metric << ','
            << cell.mean_test_metric << ',' << (cell.any_diverged ? 1 : 0) << '\n';
    io::write_text(outdir / "sweep_results.csv", csv.str());

    const auto& best = res.cells[res.best_index];
    json best_json = {{"config_hash", hash},
                      {"seed", seed},
                      {"model", resolved_model_json(best.model)},
                      {"train", resolved_train_json(best.train)},
                      {"mean_val_metric", best.mean_val_metric},
                      {"mean_test_metric", best.mean_test_metric}};
    io::write_text(outdir / "best_config.json", best_json.dump(2) + "\n");
    std::cout << "sweep: " << res.cells.size() << " cells, best mean val metric "
              << best.mean_val_metric << "\n";
    return kExitOk;
}

int cmd_bench(const json& cfg) {
    const json b = cfg.value("bench", json::object());
    std::vector<int> nodes = b.value("nodes", std::vector<int>{250, 1000});
    std::vector<int> dims = b.value("dims", std::vector<int>{16, 32, 64});
    const int segment = b.value("segment", 8);
    const int ladder = b.value("ladder_points", 4);
    const std::uint64_t seed = cfg.value("seed", 1u);

    json resolved = cfg;
    resolved["seed"] = seed;
    resolved["bench"] = {{"nodes", nodes}, {"dims", dims}, {"segment", segment},
                         {"ladder_points", ladder}};
    const fs::path outdir = resolve_output_dir(resolved);
    const std::string hash = io::config_hash(resolved);
    io::write_text(outdir / "resolved_config.json", resolved.dump(2) + "\n");

    const auto report = experiments::bench_layer(nodes, dims, segment, ladder, seed);

    std::ostringstream layer_csv;
    layer_csv << io::csv_provenance(hash, seed) << "variant,nodes,dim,segment,layer_ms\n";
    for (const auto& r : report.layer_rows)
        layer_csv << r.variant << ',' << r.n_nodes << ',' << r.dim << ',' << r.segment << ','
                  << r.layer_ms << '\n';
    io::write_text(outdir / "bench_layer.csv", layer_csv.str());

    std::ostringstream agg_csv;
    agg_csv << io::csv_provenance(hash, seed) << "nodes,edges,dim,aggregate_ms\n";
    for (const auto& r : report.aggregate_rows)
        agg_csv << r.n_nodes << ',' << r.n_edges << ',' << r.dim << ',' << r.aggregate_ms << '\n';
    io::write_text(outdir / "bench_aggregate.csv", agg_csv.str());

    bool violated = false;
    for (std::size_t i = 0; i + 1 < report.layer_rows.size(); i += 2) {
        const auto& full = report.layer_rows[i];
        const auto& sim = report.layer_rows[i + 1];
        if (full.dim >= 32 && sim.layer_ms > full.layer_ms) {
            std::cerr << "bench: sim slower than full at nodes=" << full.n_nodes
                      << " dim=" << full.dim << "\n";
            violated = true;
        }
    }
    std::cout << "bench: " << report.layer_rows.size() << " layer cells, "
              << report.aggregate_rows.size() << " ladder points\n";
    return violated ? kExitRuntime : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AxelGNN: similarity-gated probabilistic message passing, the discrete "
                 "Axelrod grid simulator, diffusion label generation and benchmarks"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string out_override;
    std::int64_t seed_override = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--set", sets, "override config keys, e.g. --set train.lr=0.01");
        sub->add_option("--out", out_override, "output directory (overrides config)");
        sub->add_option("--seed", seed_override, "seed (overrides config)");
    };

    auto* sim = app.add_subcommand("axelrod-sim", "run the discrete cultural grid to equilibrium");
    auto* train_cmd = app.add_subcommand("train", "train a model (task: node-classify | influence)");
    auto* labels = app.add_subcommand("influence-labels", "generate Monte-Carlo diffusion labels");
    auto* sweep = app.add_subcommand("sweep", "grid search over hyperparameters");
    auto* bench = app.add_subcommand("bench", "layer and aggregation micro-benchmarks");
    for (auto* sub : {sim, train_cmd, labels, sweep, bench}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = load_config(config_path);
        apply_overrides(cfg, sets);
        if (!out_override.empty()) cfg["output_dir"] = out_override;
        if (seed_override >= 0) cfg["seed"] = static_cast<std::uint64_t>(seed_override);

        if (sim->parsed()) return cmd_axelrod_sim(cfg);
        if (train_cmd->parsed()) return cmd_train(cfg);
        if (labels->parsed()) return cmd_influence_labels(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
