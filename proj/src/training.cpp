#include "axel/training.hpp"

#include <algorithm>
#include <cmath>

namespace axel::train {

AdamState AdamState::init(const std::vector<ad::Tensor>& params) {
    AdamState s;
    s.m.reserve(params.size());
    s.v.reserve(params.size());
    for (const auto& p : params) {
        s.m.emplace_back(p->value.rows, p->value.cols);
        s.v.emplace_back(p->value.rows, p->value.cols);
    }
    return s;
}

void adam_step(const std::vector<ad::Tensor>& params,
               const std::vector<std::uint8_t>& decay_mask, AdamState& state,
               double lr, double weight_decay, const AdamHyper& hyper) {
    if (params.size() != state.m.size() || params.size() != decay_mask.size())
        throw ContractError("adam_step: state shape mismatch");
    ++state.t;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i]->value;
        auto& g = params[i]->grad;
        if (!p.same_shape(state.m[i])) throw ContractError("adam_step: shape mismatch");
        const bool decay = decay_mask[i] && weight_decay > 0;
        for (int k = 0; k < p.size(); ++k) {
            double grad = g.data[k];
            if (decay) grad += weight_decay * p.data[k];
            state.m[i].data[k] = hyper.beta1 * state.m[i].data[k] + (1 - hyper.beta1) * grad;
            state.v[i].data[k] = hyper.beta2 * state.v[i].data[k] + (1 - hyper.beta2) * grad * grad;
            const double mhat = state.m[i].data[k] / bc1;
            const double vhat = state.v[i].data[k] / bc2;
            p.data[k] -= lr * mhat / (std::sqrt(vhat) + hyper.eps);
        }
    }
}

ad::Tensor cross_entropy(ad::Tape& t, const ad::Tensor& logits,
                         const std::vector<int>& labels,
                         const std::vector<std::uint8_t>& mask) {
    return ad::nll_masked(t, ad::log_softmax_rows(t, logits), labels, mask);
}

ad::Tensor mae_loss(ad::Tape& t, const ad::Tensor& pred, const Matrix& target,
                    const std::vector<std::uint8_t>& mask) {
    return ad::mae_masked(t, pred, target, mask);
}

double masked_accuracy(const Matrix& logits, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask) {
    int total = 0, correct = 0;
    for (int i = 0; i < logits.rows; ++i) {
        if (!mask[i]) continue;
        int arg = 0;
        for (int j = 1; j < logits.cols; ++j)
            if (logits.at(i, j) > logits.at(i, arg)) arg = j;
        correct += arg == labels[i];
        ++total;
    }
    if (total == 0) throw ContractError("masked_accuracy: empty mask");
    return static_cast<double>(correct) / total;
}

double masked_mae(const Matrix& pred, const Matrix& target,
                  const std::vector<std::uint8_t>& mask) {
    int total = 0;
    double acc = 0.0;
    for (int i = 0; i < pred.rows; ++i) {
        if (!mask[i]) continue;
        acc += std::abs(pred.at(i, 0) - target.at(i, 0));
        ++total;
    }
    if (total == 0) throw ContractError("masked_mae: empty mask");
    return acc / total;
}

namespace {

double mean_abs_change(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double acc = 0.0;
    for (std::size_t l = 0; l < a.size(); ++l) {
        double s = 0.0;
        for (int k = 0; k < a[l].size(); ++k) s += std::abs(a[l].data[k] - b[l].data[k]);
        acc += s / a[l].size();
    }
    return acc / a.size();
}

}  // namespace

FitResult fit(gnn::Model& model, const Graph& g, const Matrix& features,
              const TargetSpec& target, const SplitMask& split, const TrainConfig& cfg) {
    if (cfg.lr < 0) throw ConfigError("fit: learning_rate must be >= 0");
    if (cfg.patience < 1) throw ConfigError("fit: patience must be >= 1");

    const bool classify = target.classify;
    auto params = model.parameters();
    auto decay = model.decay_mask();
    AdamState adam = AdamState::init(params);
    Rng dropout_rng(Rng::derive(cfg.seed, 0xd20));

    FitResult res;
    const ad::Tensor x = ad::make_tensor(features, false);

    auto eval_forward = [&](std::vector<Matrix>* embeddings_out, Matrix* output_out) {
        ad::Tape tape;
        auto fr = gnn::model_forward(tape, model, g, x, false, nullptr);
        if (embeddings_out) {
            embeddings_out->clear();
            for (const auto& e : fr.layer_outputs) embeddings_out->push_back(e->value);
        }
        if (output_out) *output_out = fr.output->value;
        double val_loss;
        {
            ad::Tape loss_tape;
            const ad::Tensor out_leaf = ad::make_tensor(fr.output->value);
            val_loss = classify
                           ? cross_entropy(loss_tape, out_leaf, target.labels, split.val)->value.at(0, 0)
                           : mae_loss(loss_tape, out_leaf, target.targets, split.val)->value.at(0, 0);
        }
        const double metric = classify
                                  ? masked_accuracy(fr.output->value, target.labels, split.val)
                                  : masked_mae(fr.output->value, target.targets, split.val);
        return std::pair<double, double>{val_loss, metric};
    };

    std::vector<Matrix> prev_embeddings;
    {
        ad::Tape tape;
        auto fr = gnn::model_forward(tape, model, g, x, false, nullptr);
        for (const auto& e : fr.layer_outputs) prev_embeddings.push_back(e->value);
    }

    const bool higher_better = classify;
    double best = higher_better ? -1e300 : 1e300;
    std::vector<Matrix> best_snapshot = model.snapshot_values();
    int since_best = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        ad::zero_grad(params);
        ad::Tape tape;
        auto fr = gnn::model_forward(tape, model, g, x, true, &dropout_rng);
        const ad::Tensor loss =
            classify ? cross_entropy(tape, fr.output, target.labels, split.train)
                     : mae_loss(tape, fr.output, target.targets, split.train);
        const double train_loss = loss->value.at(0, 0);
        if (!std::isfinite(train_loss)) {
            res.diverged = true;
            res.divergence_note = "non-finite training loss at epoch " + std::to_string(epoch);
            break;
        }
        tape.backward(loss);
        adam_step(params, decay, adam, cfg.lr, cfg.weight_decay);

        std::vector<Matrix> embeddings;
        auto [val_loss, val_metric] = eval_forward(&embeddings, nullptr);
        const double change = mean_abs_change(embeddings, prev_embeddings);
        prev_embeddings = std::move(embeddings);

        res.history.push_back({epoch, train_loss, val_loss, val_metric, change});

        const bool improved = higher_better ? val_metric > best : val_metric < best;
        if (improved) {
            best = val_metric;
            best_snapshot = model.snapshot_values();
            res.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }

    model.restore_values(best_snapshot);
    res.best_val_metric = best;
    {
        Matrix output;
        std::vector<Matrix> embeddings;
        ad::Tape tape;
        auto fr = gnn::model_forward(tape, model, g, x, false, nullptr);
        for (const auto& e : fr.layer_outputs) embeddings.push_back(e->value);
        output = fr.output->value;
        res.test_metric = classify ? masked_accuracy(output, target.labels, split.test)
                                   : masked_mae(output, target.targets, split.test);
        res.final_layer_embeddings = std::move(embeddings);
        res.final_output = std::move(output);
    }
    return res;
}

GridResult grid_search(const GridSpace& space, const gnn::ModelConfig& model_base,
                       const TrainConfig& train_base, const Graph& g,
                       const Matrix& features, const TargetSpec& target,
                       const SplitMask& split, int repeats) {
    if (space.layers.empty() || space.lr.empty() || space.weight_decay.empty() ||
        space.dropout.empty() || space.hidden.empty() || space.segment.empty())
        throw ConfigError("grid_search: empty dimension in space");
    if (repeats < 1) throw ConfigError("grid_search: repeats >= 1");

    const bool higher_better = target.classify;
    GridResult out;
    for (int L : space.layers)
        for (int hid : space.hidden)
            for (int seg : space.segment)
                for (double lr : space.lr)
                    for (double wd : space.weight_decay)
                        for (double dr : space.dropout) {
                            GridCell cell;
                            cell.model = model_base;
                            cell.model.num_layers = L;
                            cell.model.hidden_dim = hid;
                            cell.model.segment_size = std::min(seg, hid);
                            cell.model.dropout = dr;
                            cell.train = train_base;
                            cell.train.lr = lr;
                            cell.train.weight_decay = wd;

                            double acc_val = 0, acc_test = 0;
                            std::vector<double> vals;
                            for (int r = 0; r < repeats; ++r) {
                                TrainConfig tc = cell.train;
                                tc.seed = Rng::derive(train_base.seed, static_cast<std::uint64_t>(r));
                                Rng init_rng(tc.seed);
                                gnn::Model model = gnn::build_model(cell.model, features.cols, init_rng);
                                auto fit_res = fit(model, g, features, target, split, tc);
                                double v;
                                if (fit_res.diverged) {
                                    cell.any_diverged = true;
                                    v = higher_better ? -1e300 : 1e300;
                                } else {
                                    v = fit_res.best_val_metric;
                                    acc_test += fit_res.test_metric;
                                }
                                vals.push_back(v);
                                acc_val += v;
                            }
                            cell.per_repeat_val = vals;
                            cell.mean_val_metric = acc_val / repeats;
                            cell.mean_test_metric = acc_test / repeats;
                            double var = 0;
                            for (double v : vals) var += (v - cell.mean_val_metric) * (v - cell.mean_val_metric);
                            cell.std_val_metric = std::sqrt(var / repeats);
                            out.cells.push_back(std::move(cell));
                        }

    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        if (out.best_index < 0) {
            out.best_index = static_cast<int>(i);
            continue;
        }
        const double cur = out.cells[i].mean_val_metric;
        const double best = out.cells[out.best_index].mean_val_metric;
        if (higher_better ? cur > best : cur < best) out.best_index = static_cast<int>(i);
    }
    return out;
}

}  // namespace axel::train
