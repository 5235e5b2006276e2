#include "axel/axelgnn.hpp"

#include <algorithm>
#include <cmath>

namespace axel::gnn {

using ad::Tensor;

Variant variant_from_string(const std::string& s) {
    if (s == "full") return Variant::full;
    if (s == "sim") return Variant::sim;
    if (s == "mean" || s == "mean-baseline") return Variant::mean_baseline;
    throw ConfigError("unknown model variant '" + s + "'");
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::sim: return "sim";
        default: return "mean";
    }
}

int num_segments(int d_out, int segment_size) {
    return (d_out + segment_size - 1) / segment_size;
}
int segment_begin(int j, int segment_size) { return j * segment_size; }
int segment_end(int j, int segment_size, int d_out) {
    return std::min((j + 1) * segment_size, d_out);
}

namespace {

Matrix glorot(int rows, int cols, Rng& rng) {
    Matrix m(rows, cols);
    const double bound = std::sqrt(6.0 / (rows + cols));
    for (double& v : m.data) v = rng.uniform(-bound, bound);
    return m;
}

}  // namespace

Model build_model(const ModelConfig& cfg, int input_dim, Rng& rng) {
    if (cfg.num_layers < 1) throw ConfigError("model: num_layers must be >= 1");
    if (cfg.segment_size < 1) throw ConfigError("model: segment_size must be >= 1");
    if (cfg.segment_size > cfg.hidden_dim)
        throw ConfigError("model: segment_size must not exceed hidden_dim");

    Model m;
    m.cfg = cfg;
    m.input_dim = input_dim;
    int d_in = input_dim;
    for (int l = 0; l < cfg.num_layers; ++l) {
        AxelLayerParams p;
        p.d_in = d_in;
        p.d_out = cfg.hidden_dim;
        p.W = ad::make_tensor(glorot(p.d_in, p.d_out, rng), true);
        p.b = ad::make_tensor(Matrix(1, p.d_out), true);
        p.log_beta = ad::make_scalar(0.0, true);   // beta = 1
        p.theta_raw = ad::make_scalar(0.0, true);  // theta = 0
        const int s = cfg.segment_size;
        const int C = num_segments(p.d_out, s);
        if (cfg.variant == Variant::full) {
            const int k = cfg.phi_hidden > 0 ? cfg.phi_hidden : 2 * s;
            for (int j = 0; j < C; ++j) {
                const int w = segment_end(j, s, p.d_out) - segment_begin(j, s);
                PhiNet phi;
                phi.W1 = ad::make_tensor(glorot(2 * w, k, rng), true);
                phi.b1 = ad::make_tensor(Matrix(1, k), true);
                phi.W2 = ad::make_tensor(glorot(k, w, rng), true);
                phi.b2 = ad::make_tensor(Matrix(1, w), true);
                p.phi.push_back(std::move(phi));
            }
        } else if (cfg.variant == Variant::sim) {
            p.W_group = ad::make_tensor(Matrix(C, s), true);  // sigma(0) = 0.5
        }
        m.layers.push_back(std::move(p));
        d_in = cfg.hidden_dim;
    }
    const int head_out = cfg.head == Head::classify ? cfg.num_classes : 1;
    m.head_W = ad::make_tensor(glorot(d_in, head_out, rng), true);
    m.head_b = ad::make_tensor(Matrix(1, head_out), true);
    return m;
}

std::vector<Tensor> Model::parameters() const {
    std::vector<Tensor> out;
    for (const auto& p : layers) {
        out.push_back(p.W);
        out.push_back(p.b);
        if (cfg.variant != Variant::mean_baseline) {
            out.push_back(p.log_beta);
            out.push_back(p.theta_raw);
        }
        for (const auto& phi : p.phi) {
            out.push_back(phi.W1);
            out.push_back(phi.b1);
            out.push_back(phi.W2);
            out.push_back(phi.b2);
        }
        if (p.W_group) out.push_back(p.W_group);
    }
    out.push_back(head_W);
    out.push_back(head_b);
    return out;
}

std::vector<std::uint8_t> Model::decay_mask() const {
    std::vector<std::uint8_t> out;
    for (const auto& p : layers) {
        out.push_back(1);  // W
        out.push_back(1);  // b
        if (cfg.variant != Variant::mean_baseline) {
            out.push_back(0);  // log_beta: gate params roam freely
            out.push_back(0);  // theta_raw
        }
        for (std::size_t i = 0; i < p.phi.size(); ++i) {
            out.push_back(1);
            out.push_back(1);
            out.push_back(1);
            out.push_back(1);
        }
        if (p.W_group) out.push_back(1);
    }
    out.push_back(1);  // head_W
    out.push_back(1);  // head_b
    return out;
}

std::vector<Matrix> Model::snapshot_values() const {
    std::vector<Matrix> out;
    for (const auto& p : parameters()) out.push_back(p->value);
    return out;
}

void Model::restore_values(const std::vector<Matrix>& values) {
    auto params = parameters();
    if (values.size() != params.size())
        throw ContractError("restore_values: parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->value.same_shape(values[i]))
            throw ContractError("restore_values: shape mismatch");
        params[i]->value = values[i];
    }
}

Tensor transform(ad::Tape& t, const AxelLayerParams& p, const Tensor& x) {
    return ad::add_rowvec(t, ad::matmul(t, x, p.W), p.b);
}

InteractionProbs interaction_probs(ad::Tape& t, const AxelLayerParams& p,
                                   const Tensor& h, const Graph& g, double eps) {
    InteractionProbs out;
    const Tensor beta = ad::exp_op(t, p.log_beta);
    const Tensor theta = ad::tanh_op(t, p.theta_raw);

    auto gate = [&](const Tensor& s) {
        return ad::sigmoid(t, ad::mul_scalar_t(t, ad::sub_scalar_t(t, s, theta), beta));
    };

    if (g.num_edges() > 0) {
        std::vector<int> src, dst;
        src.reserve(g.num_edges());
        dst.reserve(g.num_edges());
        for (auto [u, v] : g.edges) {
            src.push_back(u);
            dst.push_back(v);
        }
        const Tensor hu = ad::gather_rows(t, h, std::move(src));
        const Tensor hv = ad::gather_rows(t, h, std::move(dst));
        out.edge_sim = ad::cosine_rows(t, hu, hv, eps);
        out.edge_p = gate(out.edge_sim);
    } else {
        out.edge_sim = ad::make_tensor(Matrix(0, 1));
        out.edge_p = ad::make_tensor(Matrix(0, 1));
    }
    // self-similarity through the same eps-guarded cosine (~1, not hard-coded)
    const Tensor self_sim = ad::cosine_rows(t, h, h, eps);
    out.self_p = gate(self_sim);
    return out;
}

Tensor aggregate(ad::Tape& t, const Tensor& h, const Tensor& edge_p,
                 const Tensor& self_p, const Graph& g, bool literal_norm) {
    return ad::neighbor_aggregate(t, h, edge_p, self_p, g, literal_norm);
}

namespace {

// x_out = c (.) a + (1 - c) (.) h   -- shared by both variants so the
// constant-phi equivalence is bitwise
Tensor convex_combine(ad::Tape& t, const Tensor& c, const Tensor& a_seg,
                      const Tensor& h_seg) {
    const Tensor one_minus_c = ad::add_const(t, ad::scale(t, c, -1.0), 1.0);
    return ad::add(t, ad::hadamard(t, c, a_seg), ad::hadamard(t, one_minus_c, h_seg));
}

Tensor convex_combine_rowvec(ad::Tape& t, const Tensor& c_row, const Tensor& a_seg,
                             const Tensor& h_seg) {
    const Tensor one_minus_c = ad::add_const(t, ad::scale(t, c_row, -1.0), 1.0);
    return ad::add(t, ad::mul_rowvec(t, a_seg, c_row),
                   ad::mul_rowvec(t, h_seg, one_minus_c));
}

double matrix_mean(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    double s = 0.0;
    for (double v : m.data) s += v;
    return s / m.size();
}

}  // namespace

Tensor copy_full(ad::Tape& t, const AxelLayerParams& p, const Tensor& h,
                 const Tensor& a, int segment_size,
                 std::vector<double>* mean_copy_prob) {
    const int d = h->value.cols;
    const int C = num_segments(d, segment_size);
    if (static_cast<int>(p.phi.size()) != C)
        throw ContractError("copy_full: segment bookkeeping mismatch");
    std::vector<Tensor> segments;
    segments.reserve(C);
    for (int j = 0; j < C; ++j) {
        const int c0 = segment_begin(j, segment_size);
        const int c1 = segment_end(j, segment_size, d);
        const Tensor h_seg = ad::slice_cols(t, h, c0, c1);
        const Tensor a_seg = ad::slice_cols(t, a, c0, c1);
        const Tensor in = ad::concat_cols(t, {h_seg, a_seg});
        const auto& phi = p.phi[j];
        const Tensor hid = ad::tanh_op(t, ad::add_rowvec(t, ad::matmul(t, in, phi.W1), phi.b1));
        const Tensor pre = ad::add_rowvec(t, ad::matmul(t, hid, phi.W2), phi.b2);
        const Tensor c = ad::sigmoid(t, pre);
        if (mean_copy_prob) mean_copy_prob->push_back(matrix_mean(c->value));
        segments.push_back(convex_combine(t, c, a_seg, h_seg));
    }
    return segments.size() == 1 ? segments[0] : ad::concat_cols(t, segments);
}

Tensor copy_sim(ad::Tape& t, const AxelLayerParams& p, const Tensor& h,
                const Tensor& a, int segment_size,
                std::vector<double>* mean_copy_prob) {
    const int d = h->value.cols;
    const int C = num_segments(d, segment_size);
    if (!p.W_group || p.W_group->value.rows != C)
        throw ContractError("copy_sim: segment bookkeeping mismatch");
    const Tensor c_all = ad::sigmoid(t, p.W_group);  // C x s
    std::vector<Tensor> segments;
    segments.reserve(C);
    for (int j = 0; j < C; ++j) {
        const int c0 = segment_begin(j, segment_size);
        const int c1 = segment_end(j, segment_size, d);
        const int w = c1 - c0;
        // row j truncated to the segment width; node-independent gate
        const Tensor c_row = ad::slice_cols(t, ad::gather_rows(t, c_all, {j}), 0, w);
        if (mean_copy_prob) mean_copy_prob->push_back(matrix_mean(c_row->value));
        const Tensor h_seg = ad::slice_cols(t, h, c0, c1);
        const Tensor a_seg = ad::slice_cols(t, a, c0, c1);
        segments.push_back(convex_combine_rowvec(t, c_row, a_seg, h_seg));
    }
    return segments.size() == 1 ? segments[0] : ad::concat_cols(t, segments);
}

Tensor layer_forward(ad::Tape& t, const AxelLayerParams& p, const ModelConfig& cfg,
                     const Tensor& x, const Graph& g, bool train, Rng* dropout_rng,
                     LayerDiagnostics* diag) {
    const Tensor h = transform(t, p, x);

    if (cfg.variant == Variant::mean_baseline) {
        // plain mean aggregation over N(v) u {v}: all gates pinned to 1
        const Tensor ones_e = ad::make_tensor(Matrix(g.num_edges(), 1, 1.0));
        const Tensor ones_n = ad::make_tensor(Matrix(g.n, 1, 1.0));
        const Tensor agg = aggregate(t, h, ones_e, ones_n, g, cfg.literal_neighbor_norm);
        Tensor out = ad::tanh_op(t, agg);
        if (train && cfg.dropout > 0 && dropout_rng)
            out = ad::dropout(t, out, cfg.dropout, *dropout_rng, true);
        return out;
    }

    const InteractionProbs probs = interaction_probs(t, p, h, g, cfg.cosine_eps);
    const Tensor agg = aggregate(t, h, probs.edge_p, probs.self_p, g,
                                 cfg.literal_neighbor_norm);
    std::vector<double> mean_copy;
    Tensor out = cfg.variant == Variant::full
                     ? copy_full(t, p, h, agg, cfg.segment_size, diag ? &mean_copy : nullptr)
                     : copy_sim(t, p, h, agg, cfg.segment_size, diag ? &mean_copy : nullptr);
    if (diag) {
        diag->edge_p = probs.edge_p->value;
        diag->self_p = probs.self_p->value;
        diag->mean_copy_prob = std::move(mean_copy);
    }
    if (train && cfg.dropout > 0 && dropout_rng)
        out = ad::dropout(t, out, cfg.dropout, *dropout_rng, true);
    return out;
}

ForwardResult model_forward(ad::Tape& t, const Model& m, const Graph& g,
                            const Tensor& x, bool train, Rng* dropout_rng,
                            bool want_diagnostics) {
    ForwardResult res;
    Tensor cur = x;
    const int L = static_cast<int>(m.layers.size());
    for (int l = 0; l < L; ++l) {
        LayerDiagnostics diag;
        // dropout after every layer except the last, train mode only
        const bool drop = train && l + 1 < L;
        cur = layer_forward(t, m.layers[l], m.cfg, cur, g, drop, dropout_rng,
                            want_diagnostics ? &diag : nullptr);
        res.layer_outputs.push_back(cur);
        if (want_diagnostics) res.diagnostics.push_back(std::move(diag));
    }
    Tensor head = ad::add_rowvec(t, ad::matmul(t, cur, m.head_W), m.head_b);
    res.output = m.cfg.head == Head::classify ? head : ad::sigmoid(t, head);
    return res;
}

}  // namespace axel::gnn
