#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "axel/axelgnn.hpp"
#include "axel/graph.hpp"
#include "axel/tensor.hpp"

namespace axel::train {

struct TrainConfig {
    double lr = 0.01;
    double weight_decay = 5e-4;
    int max_epochs = 1000;
    int patience = 100;
    std::uint64_t seed = 0;
};

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Matrix> m, v;
    long long t = 0;

    static AdamState init(const std::vector<ad::Tensor>& params);
};

// Bias-corrected Adam with classic L2: weight_decay * param added to the
// gradient for parameters flagged in decay_mask.
void adam_step(const std::vector<ad::Tensor>& params,
               const std::vector<std::uint8_t>& decay_mask, AdamState& state,
               double lr, double weight_decay, const AdamHyper& hyper = {});

// mean over masked nodes of -log softmax(logits)[label]
ad::Tensor cross_entropy(ad::Tape& t, const ad::Tensor& logits,
                         const std::vector<int>& labels,
                         const std::vector<std::uint8_t>& mask);

// mean over masked nodes of |pred - target|
ad::Tensor mae_loss(ad::Tape& t, const ad::Tensor& pred, const Matrix& target,
                    const std::vector<std::uint8_t>& mask);

// Either integer class labels (classify) or a real n x 1 target (regress).
struct TargetSpec {
    bool classify = true;
    std::vector<int> labels;
    Matrix targets;  // n x 1
};

struct EpochRow {
    int epoch;
    double train_loss;
    double val_loss;
    double val_metric;        // accuracy (higher better) or MAE (lower better)
    double embedding_change;  // mean |X_e - X_{e-1}| per coordinate, averaged over layers
};

struct FitResult {
    std::vector<EpochRow> history;
    int best_epoch = -1;
    double best_val_metric = 0.0;
    double test_metric = 0.0;
    bool diverged = false;
    std::string divergence_note;
    // eval-mode forward of the restored best model
    std::vector<Matrix> final_layer_embeddings;
    Matrix final_output;
};

FitResult fit(gnn::Model& model, const Graph& g, const Matrix& features,
              const TargetSpec& target, const SplitMask& split, const TrainConfig& cfg);

double masked_accuracy(const Matrix& logits, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask);
double masked_mae(const Matrix& pred, const Matrix& target,
                  const std::vector<std::uint8_t>& mask);

struct GridSpace {
    std::vector<int> layers{2};
    std::vector<double> lr{0.01};
    std::vector<double> weight_decay{5e-4};
    std::vector<double> dropout{0.1};
    std::vector<int> hidden{32};
    std::vector<int> segment{8};
};

struct GridCell {
    gnn::ModelConfig model;
    TrainConfig train;
    double mean_val_metric = 0.0;
    double std_val_metric = 0.0;
    double mean_test_metric = 0.0;
    bool any_diverged = false;
    std::vector<double> per_repeat_val;
};

struct GridResult {
    std::vector<GridCell> cells;
    int best_index = -1;
};

// Exhaustive product over the space; selection by mean validation metric
// (max accuracy / min MAE). Diverged repeats score worst.
GridResult grid_search(const GridSpace& space, const gnn::ModelConfig& model_base,
                       const TrainConfig& train_base, const Graph& g,
                       const Matrix& features, const TargetSpec& target,
                       const SplitMask& split, int repeats);

}  // namespace axel::train
