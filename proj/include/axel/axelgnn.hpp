#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "axel/graph.hpp"
#include "axel/rng.hpp"
#include "axel/tensor.hpp"

namespace axel::gnn {

enum class Variant { full, sim, mean_baseline };
enum class Head { classify, regress_unit };

Variant variant_from_string(const std::string& s);
std::string to_string(Variant v);

struct ModelConfig {
    int num_layers = 2;
    int hidden_dim = 32;
    int segment_size = 8;
    Variant variant = Variant::full;
    double dropout = 0.1;
    Head head = Head::classify;
    int num_classes = 2;      // classify head width
    int phi_hidden = 0;       // 0 -> 2 * segment_size
    bool literal_neighbor_norm = false;  // divide by |N(v)| instead of |N(v)|+1
    double cosine_eps = 1e-8;
};

// two affine maps with a tanh between; maps 2*s_j -> s_j for segment j
struct PhiNet {
    ad::Tensor W1, b1, W2, b2;
};

// Per-layer learnables. The gate parameters are stored in unconstrained
// space: beta = exp(log_beta) > 0, theta = tanh(theta_raw) in [-1, 1].
struct AxelLayerParams {
    int d_in = 0, d_out = 0;
    ad::Tensor W, b;
    ad::Tensor log_beta, theta_raw;
    std::vector<PhiNet> phi;  // full variant, one per segment
    ad::Tensor W_group;       // sim variant, C x s
};

struct LayerDiagnostics {
    Matrix edge_p;                       // |E| x 1
    Matrix self_p;                       // n x 1
    std::vector<double> mean_copy_prob;  // per segment
};

struct Model {
    ModelConfig cfg;
    int input_dim = 0;
    std::vector<AxelLayerParams> layers;
    ad::Tensor head_W, head_b;

    std::vector<ad::Tensor> parameters() const;
    // parallel to parameters(): true where weight decay applies (everything
    // except the gate parameters log_beta / theta_raw)
    std::vector<std::uint8_t> decay_mask() const;

    std::vector<Matrix> snapshot_values() const;
    void restore_values(const std::vector<Matrix>& values);
};

Model build_model(const ModelConfig& cfg, int input_dim, Rng& rng);

int num_segments(int d_out, int segment_size);
int segment_begin(int j, int segment_size);
int segment_end(int j, int segment_size, int d_out);

// H = X W + b
ad::Tensor transform(ad::Tape& t, const AxelLayerParams& p, const ad::Tensor& x);

struct InteractionProbs {
    ad::Tensor edge_p;      // |E| x 1, symmetric by construction
    ad::Tensor self_p;      // n x 1
    ad::Tensor edge_sim;    // |E| x 1 cosine similarities
};

InteractionProbs interaction_probs(ad::Tape& t, const AxelLayerParams& p,
                                   const ad::Tensor& h, const Graph& g, double eps);

ad::Tensor aggregate(ad::Tape& t, const ad::Tensor& h, const ad::Tensor& edge_p,
                     const ad::Tensor& self_p, const Graph& g, bool literal_norm);

ad::Tensor copy_full(ad::Tape& t, const AxelLayerParams& p, const ad::Tensor& h,
                     const ad::Tensor& a, int segment_size,
                     std::vector<double>* mean_copy_prob = nullptr);
ad::Tensor copy_sim(ad::Tape& t, const AxelLayerParams& p, const ad::Tensor& h,
                    const ad::Tensor& a, int segment_size,
                    std::vector<double>* mean_copy_prob = nullptr);

ad::Tensor layer_forward(ad::Tape& t, const AxelLayerParams& p, const ModelConfig& cfg,
                         const ad::Tensor& x, const Graph& g, bool train,
                         Rng* dropout_rng, LayerDiagnostics* diag = nullptr);

struct ForwardResult {
    ad::Tensor output;                     // logits (n x k) or scores (n x 1)
    std::vector<ad::Tensor> layer_outputs; // X^(1) .. X^(L)
    std::vector<LayerDiagnostics> diagnostics;
};

ForwardResult model_forward(ad::Tape& t, const Model& m, const Graph& g,
                            const ad::Tensor& x, bool train, Rng* dropout_rng,
                            bool want_diagnostics = false);

}  // namespace axel::gnn
