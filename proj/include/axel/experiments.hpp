#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axel/axelgnn.hpp"
#include "axel/diffusion.hpp"
#include "axel/graph.hpp"
#include "axel/metrics.hpp"
#include "axel/training.hpp"

namespace axel::experiments {

struct SplitRatios {
    double train = 0.6, val = 0.2, test = 0.2;
};

struct RepeatResult {
    std::uint64_t seed;
    train::FitResult fit;
    SplitMask split;
    gnn::Model model;  // restored best-validation parameters
};

struct ClassifySummary {
    std::vector<RepeatResult> runs;
    double mean_test = 0.0;
    double std_test = 0.0;
    bool any_diverged = false;
};

// Trains `repeats` random initializations (fresh split per repeat, seeds
// derived from base_seed) and reports mean +- std test accuracy.
ClassifySummary run_node_classification(const Graph& g, const NodeData& data,
                                        const gnn::ModelConfig& model_cfg,
                                        const train::TrainConfig& train_cfg,
                                        const SplitRatios& ratios, int repeats,
                                        std::uint64_t base_seed);

struct InfluenceFold {
    std::uint64_t seed;
    std::vector<int> seeds_used;
    train::FitResult fit;
    diffusion::DiffusionResult labels;
    gnn::Model model;
};

struct InfluenceSummary {
    std::vector<InfluenceFold> folds;
    double mean_test_mae = 0.0;
    double std_test_mae = 0.0;
    bool any_diverged = false;
};

// Influence-estimation protocol: per fold, a fresh 10% seed set and
// regenerated Monte-Carlo labels, then a regression fit on
// [seed indicator, degree/max_degree] node features.
InfluenceSummary run_influence(const Graph& g, const diffusion::DiffusionConfig& diff_cfg,
                               double seed_fraction, const gnn::ModelConfig& model_cfg,
                               const train::TrainConfig& train_cfg,
                               const SplitRatios& ratios, int folds,
                               std::uint64_t base_seed);

Matrix influence_features(const Graph& g, const std::vector<int>& seeds);

// -- layer micro-benchmark -----------------------------------------------------

struct BenchRow {
    std::string variant;
    int n_nodes;
    int dim;
    int segment;
    double layer_ms;
};

struct AggBenchRow {
    int n_nodes;
    long long n_edges;
    int dim;
    double aggregate_ms;
};

struct BenchReport {
    std::vector<BenchRow> layer_rows;
    std::vector<AggBenchRow> aggregate_rows;
};

// Times layer_forward for the full and sim variants across |V| and d grids,
// plus the aggregation stage over an |E|-doubling ladder.
BenchReport bench_layer(const std::vector<int>& node_counts, const std::vector<int>& dims,
                        int segment_size, int ladder_points, std::uint64_t seed);

}  // namespace axel::experiments
