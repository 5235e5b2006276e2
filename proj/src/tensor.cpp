#include "axel/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "axel/kernels.hpp"

namespace axel::ad {

Tensor make_tensor(Matrix value, bool requires_grad) {
    return std::make_shared<TensorNode>(std::move(value), requires_grad);
}

Tensor make_scalar(double value, bool requires_grad) {
    Matrix m(1, 1);
    m.at(0, 0) = value;
    return make_tensor(std::move(m), requires_grad);
}

void zero_grad(const std::vector<Tensor>& params) {
    for (const auto& p : params) p->grad.fill(0.0);
}

void Tape::backward(const Tensor& loss) {
    if (loss->value.rows != 1 || loss->value.cols != 1)
        throw ContractError("backward: loss must be a 1x1 scalar");
    if (backward_done_)
        throw ContractError("backward: tape already consumed; reset() before reuse");
    backward_done_ = true;
    loss->grad.at(0, 0) += 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

void Tape::reset() {
    ops_.clear();
    backward_done_ = false;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a->value.same_shape(b->value))
        throw DimensionError(std::string(op) + ": shape mismatch");
}

}  // namespace

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b) {
    if (a->value.cols != b->value.rows) throw DimensionError("matmul: inner dims differ");
    Matrix out(a->value.rows, b->value.cols);
    kernels::matmul(a->value, b->value, out);
    Tensor c = make_tensor(std::move(out));
    t.record([a, b, c] {
        kernels::matmul_acc_nt(c->grad, b->value, a->grad);
        kernels::matmul_acc_tn(a->value, c->grad, b->grad);
    });
    return c;
}

Tensor add(Tape& t, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Matrix out(a->value.rows, a->value.cols);
    kernels::zip_rows(a->value, b->value, out, [](double x, double y) { return x + y; });
    Tensor c = make_tensor(std::move(out));
    t.record([a, b, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            a->grad.data[i] += c->grad.data[i];
            b->grad.data[i] += c->grad.data[i];
        }
    });
    return c;
}

Tensor sub(Tape& t, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Matrix out(a->value.rows, a->value.cols);
    kernels::zip_rows(a->value, b->value, out, [](double x, double y) { return x - y; });
    Tensor c = make_tensor(std::move(out));
    t.record([a, b, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            a->grad.data[i] += c->grad.data[i];
            b->grad.data[i] -= c->grad.data[i];
        }
    });
    return c;
}

Tensor hadamard(Tape& t, const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out(a->value.rows, a->value.cols);
    kernels::zip_rows(a->value, b->value, out, [](double x, double y) { return x * y; });
    Tensor c = make_tensor(std::move(out));
    t.record([a, b, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            a->grad.data[i] += c->grad.data[i] * b->value.data[i];
            b->grad.data[i] += c->grad.data[i] * a->value.data[i];
        }
    });
    return c;
}

Tensor scale(Tape& t, const Tensor& a, double cval) {
    Matrix out(a->value.rows, a->value.cols);
    kernels::map_rows(a->value, out, [cval](double x) { return cval * x; });
    Tensor c = make_tensor(std::move(out));
    t.record([a, c, cval] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) a->grad.data[i] += cval * c->grad.data[i];
    });
    return c;
}

Tensor add_const(Tape& t, const Tensor& a, double cval) {
    Matrix out(a->value.rows, a->value.cols);
    kernels::map_rows(a->value, out, [cval](double x) { return x + cval; });
    Tensor c = make_tensor(std::move(out));
    t.record([a, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) a->grad.data[i] += c->grad.data[i];
    });
    return c;
}

namespace {

// numerically stable, output clamped into the open interval (0, 1)
inline double sigmoid_scalar(double x) {
    double y;
    if (x >= 0) {
        y = 1.0 / (1.0 + std::exp(-x));
    } else {
        const double e = std::exp(x);
        y = e / (1.0 + e);
    }
    const double lo = std::nextafter(0.0, 1.0);
    const double hi = std::nextafter(1.0, 0.0);
    return std::min(std::max(y, lo), hi);
}

}  // namespace

Tensor sigmoid(Tape& t, const Tensor& a) {
    Matrix out(a->value.rows, a->value.cols);
    kernels::map_rows(a->value, out, [](double x) { return sigmoid_scalar(x); });
    Tensor c = make_tensor(std::move(out));
    t.record([a, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            const double y = c->value.data[i];
            a->grad.data[i] += c->grad.data[i] * y * (1.0 - y);
        }
    });
    return c;
}

Tensor tanh_op(Tape& t, const Tensor& a) {
    Matrix out(a->value.rows, a->value.cols);
    kernels::map_rows(a->value, out, [](double x) { return std::tanh(x); });
    Tensor c = make_tensor(std::move(out));
    t.record([a, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            const double y = c->value.data[i];
            a->grad.data[i] += c->grad.data[i] * (1.0 - y * y);
        }
    });
    return c;
}

Tensor exp_op(Tape& t, const Tensor& a) {
    Matrix out(a->value.rows, a->value.cols);
    kernels::map_rows(a->value, out, [](double x) { return std::exp(x); });
    Tensor c = make_tensor(std::move(out));
    t.record([a, c] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i)
            a->grad.data[i] += c->grad.data[i] * c->value.data[i];
    });
    return c;
}

Tensor add_rowvec(Tape& t, const Tensor& x, const Tensor& b) {
    if (b->value.rows != 1 || b->value.cols != x->value.cols)
        throw DimensionError("add_rowvec: expected 1 x cols vector");
    Matrix out(x->value.rows, x->value.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) = x->value.at(i, j) + b->value.at(0, j);
    Tensor c = make_tensor(std::move(out));
    t.record([x, b, c] {
        for (int i = 0; i < c->grad.rows; ++i)
            for (int j = 0; j < c->grad.cols; ++j) {
                x->grad.at(i, j) += c->grad.at(i, j);
                b->grad.at(0, j) += c->grad.at(i, j);
            }
    });
    return c;
}

Tensor mul_rowvec(Tape& t, const Tensor& x, const Tensor& v) {
    if (v->value.rows != 1 || v->value.cols != x->value.cols)
        throw DimensionError("mul_rowvec: expected 1 x cols vector");
    Matrix out(x->value.rows, x->value.cols);
    for (int i = 0; i < out.rows; ++i)
        for (int j = 0; j < out.cols; ++j) out.at(i, j) = x->value.at(i, j) * v->value.at(0, j);
    Tensor c = make_tensor(std::move(out));
    t.record([x, v, c] {
        for (int i = 0; i < c->grad.rows; ++i)
            for (int j = 0; j < c->grad.cols; ++j) {
                x->grad.at(i, j) += c->grad.at(i, j) * v->value.at(0, j);
                v->grad.at(0, j) += c->grad.at(i, j) * x->value.at(i, j);
            }
    });
    return c;
}

Tensor mul_scalar_t(Tape& t, const Tensor& x, const Tensor& s) {
    if (s->value.rows != 1 || s->value.cols != 1)
        throw DimensionError("mul_scalar_t: scalar tensor must be 1x1");
    const double sv = s->value.at(0, 0);
    Matrix out(x->value.rows, x->value.cols);
    kernels::map_rows(x->value, out, [sv](double v) { return v * sv; });
    Tensor c = make_tensor(std::move(out));
    t.record([x, s, c] {
        const double sv = s->value.at(0, 0);
        double acc = 0.0;
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            x->grad.data[i] += c->grad.data[i] * sv;
            acc += c->grad.data[i] * x->value.data[i];
        }
        s->grad.at(0, 0) += acc;
    });
    return c;
}

Tensor sub_scalar_t(Tape& t, const Tensor& x, const Tensor& s) {
    if (s->value.rows != 1 || s->value.cols != 1)
        throw DimensionError("sub_scalar_t: scalar tensor must be 1x1");
    const double sv = s->value.at(0, 0);
    Matrix out(x->value.rows, x->value.cols);
    kernels::map_rows(x->value, out, [sv](double v) { return v - sv; });
    Tensor c = make_tensor(std::move(out));
    t.record([x, s, c] {
        double acc = 0.0;
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) {
            x->grad.data[i] += c->grad.data[i];
            acc += c->grad.data[i];
        }
        s->grad.at(0, 0) -= acc;
    });
    return c;
}

Tensor cosine_rows(Tape& t, const Tensor& a, const Tensor& b, double eps) {
    require_same_shape(a, b, "cosine_rows");
    if (eps <= 0) throw ContractError("cosine_rows: eps must be positive");
    const int n = a->value.rows, d = a->value.cols;
    Matrix out(n, 1);
    // cache norms and raw dots for the backward rule
    auto dots = std::make_shared<std::vector<double>>(n);
    auto na = std::make_shared<std::vector<double>>(n);
    auto nb = std::make_shared<std::vector<double>>(n);
    for (int i = 0; i < n; ++i) {
        const double* ra = a->value.row(i);
        const double* rb = b->value.row(i);
        double dot = 0, qa = 0, qb = 0;
        for (int j = 0; j < d; ++j) {
            dot += ra[j] * rb[j];
            qa += ra[j] * ra[j];
            qb += rb[j] * rb[j];
        }
        (*dots)[i] = dot;
        (*na)[i] = std::sqrt(qa);
        (*nb)[i] = std::sqrt(qb);
        const double den = (*na)[i] * (*nb)[i] + eps;
        out.at(i, 0) = std::clamp(dot / den, -1.0, 1.0);
    }
    Tensor c = make_tensor(std::move(out));
    t.record([a, b, c, dots, na, nb, eps] {
        const int n = a->value.rows, d = a->value.cols;
        for (int i = 0; i < n; ++i) {
            const double g = c->grad.at(i, 0);
            if (g == 0.0) continue;
            const double dot = (*dots)[i];
            const double la = (*na)[i], lb = (*nb)[i];
            const double den = la * lb + eps;
            const double inv_den = 1.0 / den;
            // d/dA_i = B_i/den - dot * (lb/la) * A_i / den^2   (la > 0)
            const double ca = la > 0 ? dot * lb / la * inv_den * inv_den : 0.0;
            const double cb = lb > 0 ? dot * la / lb * inv_den * inv_den : 0.0;
            const double* ra = a->value.row(i);
            const double* rb = b->value.row(i);
            double* ga = a->grad.row(i);
            double* gb = b->grad.row(i);
            for (int j = 0; j < d; ++j) {
                ga[j] += g * (rb[j] * inv_den - ca * ra[j]);
                gb[j] += g * (ra[j] * inv_den - cb * rb[j]);
            }
        }
    });
    return c;
}

Tensor gather_rows(Tape& t, const Tensor& x, std::vector<int> idx) {
    const int d = x->value.cols;
    Matrix out(static_cast<int>(idx.size()), d);
    for (int i = 0; i < out.rows; ++i) {
        const double* src = x->value.row(idx[i]);
        double* dst = out.row(i);
        std::copy(src, src + d, dst);
    }
    Tensor c = make_tensor(std::move(out));
    auto indices = std::make_shared<std::vector<int>>(std::move(idx));
    t.record([x, c, indices] {
        const int d = x->value.cols;
        for (int i = 0; i < c->grad.rows; ++i) {
            double* dst = x->grad.row((*indices)[i]);
            const double* src = c->grad.row(i);
            for (int j = 0; j < d; ++j) dst[j] += src[j];
        }
    });
    return c;
}

Tensor slice_cols(Tape& t, const Tensor& x, int c0, int c1) {
    if (c0 < 0 || c1 > x->value.cols || c0 >= c1)
        throw DimensionError("slice_cols: bad range");
    Matrix out(x->value.rows, c1 - c0);
    for (int i = 0; i < out.rows; ++i)
        std::copy(x->value.row(i) + c0, x->value.row(i) + c1, out.row(i));
    Tensor c = make_tensor(std::move(out));
    t.record([x, c, c0] {
        for (int i = 0; i < c->grad.rows; ++i) {
            double* dst = x->grad.row(i) + c0;
            const double* src = c->grad.row(i);
            for (int j = 0; j < c->grad.cols; ++j) dst[j] += src[j];
        }
    });
    return c;
}

Tensor concat_cols(Tape& t, const std::vector<Tensor>& parts) {
    if (parts.empty()) throw DimensionError("concat_cols: no parts");
    const int rows = parts[0]->value.rows;
    int cols = 0;
    for (const auto& p : parts) {
        if (p->value.rows != rows) throw DimensionError("concat_cols: row mismatch");
        cols += p->value.cols;
    }
    Matrix out(rows, cols);
    int off = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < rows; ++i)
            std::copy(p->value.row(i), p->value.row(i) + p->value.cols, out.row(i) + off);
        off += p->value.cols;
    }
    Tensor c = make_tensor(std::move(out));
    auto parts_copy = std::make_shared<std::vector<Tensor>>(parts);
    t.record([c, parts_copy] {
        int off = 0;
        for (const auto& p : *parts_copy) {
            for (int i = 0; i < c->grad.rows; ++i) {
                const double* src = c->grad.row(i) + off;
                double* dst = p->grad.row(i);
                for (int j = 0; j < p->grad.cols; ++j) dst[j] += src[j];
            }
            off += p->value.cols;
        }
    });
    return c;
}

Tensor sum_all(Tape& t, const Tensor& x) {
    double s = 0.0;
    for (double v : x->value.data) s += v;
    Tensor c = make_scalar(s);
    t.record([x, c] {
        const double g = c->grad.at(0, 0);
        const int n = x->grad.size();
        for (int i = 0; i < n; ++i) x->grad.data[i] += g;
    });
    return c;
}

Tensor log_softmax_rows(Tape& t, const Tensor& x) {
    const int n = x->value.rows, k = x->value.cols;
    Matrix out(n, k);
    for (int i = 0; i < n; ++i) {
        const double* r = x->value.row(i);
        double mx = r[0];
        for (int j = 1; j < k; ++j) mx = std::max(mx, r[j]);
        double z = 0.0;
        for (int j = 0; j < k; ++j) z += std::exp(r[j] - mx);
        const double lz = mx + std::log(z);
        for (int j = 0; j < k; ++j) out.at(i, j) = r[j] - lz;
    }
    Tensor c = make_tensor(std::move(out));
    t.record([x, c] {
        const int n = x->value.rows, k = x->value.cols;
        for (int i = 0; i < n; ++i) {
            const double* gy = c->grad.row(i);
            double gsum = 0.0;
            for (int j = 0; j < k; ++j) gsum += gy[j];
            const double* ly = c->value.row(i);
            double* gx = x->grad.row(i);
            for (int j = 0; j < k; ++j) gx[j] += gy[j] - std::exp(ly[j]) * gsum;
        }
    });
    return c;
}

Tensor nll_masked(Tape& t, const Tensor& logp, const std::vector<int>& labels,
                  const std::vector<std::uint8_t>& mask) {
    const int n = logp->value.rows, k = logp->value.cols;
    if (static_cast<int>(labels.size()) != n || static_cast<int>(mask.size()) != n)
        throw DimensionError("nll_masked: labels/mask size mismatch");
    int count = 0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        if (labels[i] < 0 || labels[i] >= k) throw ContractError("nll_masked: label out of range");
        acc -= logp->value.at(i, labels[i]);
        ++count;
    }
    if (count == 0) throw ContractError("nll_masked: empty mask");
    Tensor c = make_scalar(acc / count);
    auto labels_copy = std::make_shared<std::vector<int>>(labels);
    auto mask_copy = std::make_shared<std::vector<std::uint8_t>>(mask);
    t.record([logp, c, labels_copy, mask_copy, count] {
        const double g = c->grad.at(0, 0) / count;
        for (int i = 0; i < logp->value.rows; ++i)
            if ((*mask_copy)[i]) logp->grad.at(i, (*labels_copy)[i]) -= g;
    });
    return c;
}

Tensor mae_masked(Tape& t, const Tensor& pred, const Matrix& target,
                  const std::vector<std::uint8_t>& mask) {
    const int n = pred->value.rows;
    if (pred->value.cols != 1) throw DimensionError("mae_masked: pred must be n x 1");
    if (target.rows != n || target.cols != 1 || static_cast<int>(mask.size()) != n)
        throw DimensionError("mae_masked: target/mask size mismatch");
    int count = 0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!mask[i]) continue;
        acc += std::abs(pred->value.at(i, 0) - target.at(i, 0));
        ++count;
    }
    if (count == 0) throw ContractError("mae_masked: empty mask");
    Tensor c = make_scalar(acc / count);
    auto target_copy = std::make_shared<Matrix>(target);
    auto mask_copy = std::make_shared<std::vector<std::uint8_t>>(mask);
    t.record([pred, c, target_copy, mask_copy, count] {
        const double g = c->grad.at(0, 0) / count;
        for (int i = 0; i < pred->value.rows; ++i) {
            if (!(*mask_copy)[i]) continue;
            const double diff = pred->value.at(i, 0) - target_copy->at(i, 0);
            if (diff > 0)
                pred->grad.at(i, 0) += g;
            else if (diff < 0)
                pred->grad.at(i, 0) -= g;
        }
    });
    return c;
}

Tensor dropout(Tape& t, const Tensor& x, double rate, Rng& rng, bool train) {
    if (rate < 0 || rate >= 1) throw ConfigError("dropout: rate must be in [0,1)");
    if (!train || rate == 0.0) {
        // identity pass-through kept on the tape
        Matrix out = x->value;
        Tensor c = make_tensor(std::move(out));
        t.record([x, c] {
            const int n = c->grad.size();
            for (int i = 0; i < n; ++i) x->grad.data[i] += c->grad.data[i];
        });
        return c;
    }
    const double keep_scale = 1.0 / (1.0 - rate);
    auto mask = std::make_shared<std::vector<double>>(x->value.size());
    for (double& m : *mask) m = rng.uniform() < rate ? 0.0 : keep_scale;
    Matrix out(x->value.rows, x->value.cols);
    for (int i = 0; i < out.size(); ++i) out.data[i] = x->value.data[i] * (*mask)[i];
    Tensor c = make_tensor(std::move(out));
    t.record([x, c, mask] {
        const int n = c->grad.size();
        for (int i = 0; i < n; ++i) x->grad.data[i] += c->grad.data[i] * (*mask)[i];
    });
    return c;
}

Tensor neighbor_aggregate(Tape& t, const Tensor& h, const Tensor& p_edge,
                          const Tensor& p_self, const Graph& g, bool literal_norm) {
    if (h->value.rows != g.n) throw DimensionError("neighbor_aggregate: H rows != n");
    if (p_edge->value.rows != g.num_edges() || p_edge->value.cols != 1)
        throw DimensionError("neighbor_aggregate: p_edge must be |E| x 1");
    if (p_self->value.rows != g.n || p_self->value.cols != 1)
        throw DimensionError("neighbor_aggregate: p_self must be n x 1");
    Matrix out(g.n, h->value.cols);
    kernels::aggregate_forward(g.n, g.offsets.data(), g.neighbors.data(),
                               g.arc_edge.data(), h->value, p_edge->value.data.data(),
                               p_self->value.data.data(), literal_norm, out);
    Tensor c = make_tensor(std::move(out));
    const Graph* gp = &g;  // graphs outlive tapes by construction
    t.record([h, p_edge, p_self, c, gp, literal_norm] {
        kernels::aggregate_backward(gp->n, gp->offsets.data(), gp->neighbors.data(),
                                    gp->arc_edge.data(), gp->num_edges(), h->value,
                                    p_edge->value.data.data(), p_self->value.data.data(),
                                    literal_norm, c->grad, h->grad,
                                    p_edge->grad.data.data(), p_self->grad.data.data());
    });
    return c;
}

double check_gradients(const BuildFn& f, const std::vector<Matrix>& xs, double h) {
    if (h <= 0) throw ContractError("check_gradients: h must be positive");

    // analytic gradients
    std::vector<Tensor> leaves;
    leaves.reserve(xs.size());
    for (const auto& x : xs) leaves.push_back(make_tensor(x, true));
    Tape tape;
    Tensor loss = f(tape, leaves);
    tape.backward(loss);

    auto eval = [&](const std::vector<Matrix>& vals) {
        std::vector<Tensor> ls;
        ls.reserve(vals.size());
        for (const auto& v : vals) ls.push_back(make_tensor(v, false));
        Tape tp;
        return f(tp, ls)->value.at(0, 0);
    };

    double max_err = 0.0;
    std::vector<Matrix> work = xs;
    for (std::size_t p = 0; p < xs.size(); ++p) {
        for (int i = 0; i < xs[p].size(); ++i) {
            const double orig = work[p].data[i];
            work[p].data[i] = orig + h;
            const double fp = eval(work);
            work[p].data[i] = orig - h;
            const double fm = eval(work);
            work[p].data[i] = orig;
            const double numeric = (fp - fm) / (2.0 * h);
            const double analytic = leaves[p]->grad.data[i];
            const double err = std::abs(analytic - numeric) /
                               std::max({1.0, std::abs(analytic), std::abs(numeric)});
            max_err = std::max(max_err, err);
        }
    }
    return max_err;
}

double check_gradients(const BuildFn& f, const Matrix& x, double h) {
    return check_gradients(f, std::vector<Matrix>{x}, h);
}

}  // namespace axel::ad
