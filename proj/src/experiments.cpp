#include "axel/experiments.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <tuple>

namespace axel::experiments {

namespace {

std::vector<int> all_nodes(int n) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[i] = i;
    return ids;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / xs.size())};
}

}  // namespace

ClassifySummary run_node_classification(const Graph& g, const NodeData& data,
                                        const gnn::ModelConfig& model_cfg,
                                        const train::TrainConfig& train_cfg,
                                        const SplitRatios& ratios, int repeats,
                                        std::uint64_t base_seed) {
    if (!data.labels.is_int) throw ConfigError("node classification requires integer labels");
    gnn::ModelConfig mc = model_cfg;
    mc.head = gnn::Head::classify;
    mc.num_classes = data.labels.num_classes;

    train::TargetSpec target;
    target.classify = true;
    target.labels = data.labels.ints;

    ClassifySummary out;
    std::vector<double> tests;
    for (int r = 0; r < repeats; ++r) {
        const std::uint64_t seed = Rng::derive(base_seed, static_cast<std::uint64_t>(r));
        RepeatResult rr;
        rr.seed = seed;
        rr.split = split_nodes(all_nodes(g.n), g.n, ratios.train, ratios.val, ratios.test, seed);
        train::TrainConfig tc = train_cfg;
        tc.seed = seed;
        Rng init_rng(seed);
        gnn::Model model = gnn::build_model(mc, data.features.cols, init_rng);
        rr.fit = train::fit(model, g, data.features, target, rr.split, tc);
        rr.model = std::move(model);
        out.any_diverged = out.any_diverged || rr.fit.diverged;
        if (!rr.fit.diverged) tests.push_back(rr.fit.test_metric);
        out.runs.push_back(std::move(rr));
    }
    std::tie(out.mean_test, out.std_test) = mean_std(tests);
    return out;
}

Matrix influence_features(const Graph& g, const std::vector<int>& seeds) {
    Matrix x(g.n, 2);
    int max_deg = 1;
    for (int v = 0; v < g.n; ++v) max_deg = std::max(max_deg, g.degree(v));
    for (int v = 0; v < g.n; ++v)
        x.at(v, 1) = static_cast<double>(g.degree(v)) / max_deg;
    for (int s : seeds) x.at(s, 0) = 1.0;
    return x;
}

InfluenceSummary run_influence(const Graph& g, const diffusion::DiffusionConfig& diff_cfg,
                               double seed_fraction, const gnn::ModelConfig& model_cfg,
                               const train::TrainConfig& train_cfg,
                               const SplitRatios& ratios, int folds,
                               std::uint64_t base_seed) {
    gnn::ModelConfig mc = model_cfg;
    mc.head = gnn::Head::regress_unit;

    InfluenceSummary out;
    std::vector<double> maes;
    for (int f = 0; f < folds; ++f) {
        const std::uint64_t seed = Rng::derive(base_seed, 0x1000 + static_cast<std::uint64_t>(f));
        InfluenceFold fold;
        fold.seed = seed;
        fold.seeds_used = diffusion::sample_seeds(g, seed_fraction, seed);

        diffusion::DiffusionConfig dc = diff_cfg;
        dc.seed = seed;
        if (dc.model == diffusion::DiffusionModel::lt) {
            const auto weights = diffusion::LtWeights::degree_normalized(g);
            fold.labels = diffusion::lt_estimate(g, fold.seeds_used, weights, dc);
        } else {
            fold.labels = diffusion::sis_estimate(g, fold.seeds_used, dc);
        }

        train::TargetSpec target;
        target.classify = false;
        target.targets = Matrix(g.n, 1);
        for (int v = 0; v < g.n; ++v) target.targets.at(v, 0) = fold.labels.probs[v];

        const Matrix x = influence_features(g, fold.seeds_used);
        const SplitMask split =
            split_nodes(all_nodes(g.n), g.n, ratios.train, ratios.val, ratios.test, seed);
        train::TrainConfig tc = train_cfg;
        tc.seed = seed;
        Rng init_rng(seed);
        gnn::Model model = gnn::build_model(mc, x.cols, init_rng);
        fold.fit = train::fit(model, g, x, target, split, tc);
        fold.model = std::move(model);
        out.any_diverged = out.any_diverged || fold.fit.diverged;
        if (!fold.fit.diverged) maes.push_back(fold.fit.test_metric);
        out.folds.push_back(std::move(fold));
    }
    std::tie(out.mean_test_mae, out.std_test_mae) = mean_std(maes);
    return out;
}

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = clock_type::now();
        body();
        const auto t1 = clock_type::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

Graph random_graph(int n, double avg_degree, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    const long long target = static_cast<long long>(avg_degree * n / 2);
    for (long long e = 0; e < target; ++e) {
        const int u = rng.below_int(n);
        const int v = rng.below_int(n);
        if (u != v) edges.emplace_back(u, v);
    }
    return Graph::from_edges(n, edges);
}

}  // namespace

BenchReport bench_layer(const std::vector<int>& node_counts, const std::vector<int>& dims,
                        int segment_size, int ladder_points, std::uint64_t seed) {
    BenchReport report;
    Rng rng(seed);

    for (int n : node_counts) {
        const Graph g = random_graph(n, 8.0, rng);
        for (int d : dims) {
            Matrix x(n, d);
            for (double& v : x.data) v = rng.normal();
            for (auto variant : {gnn::Variant::full, gnn::Variant::sim}) {
                gnn::ModelConfig cfg;
                cfg.num_layers = 1;
                cfg.hidden_dim = d;
                cfg.segment_size = std::min(segment_size, d);
                cfg.variant = variant;
                cfg.dropout = 0.0;
                Rng init_rng(seed);
                gnn::Model model = gnn::build_model(cfg, d, init_rng);
                const ad::Tensor xt = ad::make_tensor(x);
                const double ms = time_ms(
                    [&] {
                        ad::Tape tape;
                        gnn::layer_forward(tape, model.layers[0], cfg, xt, g, false, nullptr);
                    },
                    5);
                report.layer_rows.push_back(
                    {gnn::to_string(variant), n, d, cfg.segment_size, ms});
            }
        }
    }

    // |E| doubling ladder at fixed n and d: aggregation stage only
    {
        const int n = node_counts.empty() ? 1000 : node_counts.back();
        const int d = dims.empty() ? 64 : dims.back();
        double avg_degree = 8.0;
        for (int p = 0; p < ladder_points; ++p) {
            const Graph g = random_graph(n, avg_degree, rng);
            Matrix h(n, d);
            for (double& v : h.data) v = rng.normal();
            const ad::Tensor ht = ad::make_tensor(h);
            const ad::Tensor pe = ad::make_tensor(Matrix(g.num_edges(), 1, 0.5));
            const ad::Tensor ps = ad::make_tensor(Matrix(n, 1, 0.5));
            const double ms = time_ms(
                [&] {
                    ad::Tape tape;
                    gnn::aggregate(tape, ht, pe, ps, g, false);
                },
                7);
            report.aggregate_rows.push_back({n, g.num_edges(), d, ms});
            avg_degree *= 2.0;
        }
    }
    return report;
}

}  // namespace axel::experiments
