#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "axel/graph.hpp"
#include "axel/matrix.hpp"
#include "axel/rng.hpp"

namespace axel::ad {

// One node of the computation graph. Value and gradient share a shape; the
// gradient buffer is zero-initialized at creation and accumulated additively
// by the backward closures.
struct TensorNode {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;

    explicit TensorNode(Matrix v, bool req = false)
        : value(std::move(v)), grad(value.rows, value.cols), requires_grad(req) {}
};

using Tensor = std::shared_ptr<TensorNode>;

Tensor make_tensor(Matrix value, bool requires_grad = false);
Tensor make_scalar(double value, bool requires_grad = false);

void zero_grad(const std::vector<Tensor>& params);

// Records backward rules in creation order (hence topological). One backward
// pass per forward pass; running backward twice without reset() is an error.
class Tape {
public:
    void record(std::function<void()> backward_rule) {
        ops_.emplace_back(std::move(backward_rule));
    }
    void backward(const Tensor& loss);
    void reset();
    std::size_t num_ops() const { return ops_.size(); }
    bool backward_done() const { return backward_done_; }

private:
    std::vector<std::function<void()>> ops_;
    bool backward_done_ = false;
};

// -- ops ---------------------------------------------------------------------
// Each op computes its forward value via the kernels layer and records a
// backward closure on the tape.

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b);
Tensor add(Tape& t, const Tensor& a, const Tensor& b);
Tensor sub(Tape& t, const Tensor& a, const Tensor& b);
Tensor hadamard(Tape& t, const Tensor& a, const Tensor& b);
Tensor scale(Tape& t, const Tensor& a, double c);
Tensor add_const(Tape& t, const Tensor& a, double c);
Tensor sigmoid(Tape& t, const Tensor& a);
Tensor tanh_op(Tape& t, const Tensor& a);
Tensor exp_op(Tape& t, const Tensor& a);

// broadcast a 1 x d row vector over the rows of X
Tensor add_rowvec(Tape& t, const Tensor& x, const Tensor& b);
Tensor mul_rowvec(Tape& t, const Tensor& x, const Tensor& v);

// broadcast a 1 x 1 tensor over every element of X
Tensor mul_scalar_t(Tape& t, const Tensor& x, const Tensor& s);
Tensor sub_scalar_t(Tape& t, const Tensor& x, const Tensor& s);

// row i = (A_i . B_i) / (|A_i| |B_i| + eps), clamped into [-1, 1]
Tensor cosine_rows(Tape& t, const Tensor& a, const Tensor& b, double eps = 1e-8);

Tensor gather_rows(Tape& t, const Tensor& x, std::vector<int> idx);
Tensor slice_cols(Tape& t, const Tensor& x, int c0, int c1);
Tensor concat_cols(Tape& t, const std::vector<Tensor>& parts);
Tensor sum_all(Tape& t, const Tensor& x);
Tensor log_softmax_rows(Tape& t, const Tensor& x);

// mean over masked rows of -logp[row][label]
Tensor nll_masked(Tape& t, const Tensor& logp, const std::vector<int>& labels,
                  const std::vector<std::uint8_t>& mask);
// mean over masked rows of |pred - target|; subgradient 0 at ties
Tensor mae_masked(Tape& t, const Tensor& pred, const Matrix& target,
                  const std::vector<std::uint8_t>& mask);

// inverted dropout: train-time mask scaled by 1/(1-rate); identity in eval
Tensor dropout(Tape& t, const Tensor& x, double rate, Rng& rng, bool train);

// Gated neighborhood mean (see kernels::aggregate_forward). p_edge is
// |E| x 1 indexed by undirected edge id, p_self is n x 1.
Tensor neighbor_aggregate(Tape& t, const Tensor& h, const Tensor& p_edge,
                          const Tensor& p_self, const Graph& g, bool literal_norm);

// -- gradient checking ---------------------------------------------------------
// Rebuilds the computation on a fresh tape per evaluation. The builder gets
// leaf tensors initialized from xs and must return a scalar loss.
using BuildFn = std::function<Tensor(Tape&, const std::vector<Tensor>&)>;

// max over all coordinates of |analytic - numeric| / max(1, |analytic|, |numeric|)
double check_gradients(const BuildFn& f, const std::vector<Matrix>& xs, double h = 1e-5);
double check_gradients(const BuildFn& f, const Matrix& x, double h = 1e-5);

}  // namespace axel::ad
