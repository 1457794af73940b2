#include "rcsf/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rcsf {

LossGrad mse_loss(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) {
        throw DimensionError("mse_loss: shape mismatch");
    }
    LossGrad out;
    out.grad = Tensor(pred.shape);
    const double inv_n = 1.0 / static_cast<double>(pred.numel());
    double acc = 0.0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        double d = pred.data[i] - target.data[i];
        acc += d * d;
        out.grad.data[i] = 2.0 * d * inv_n;
    }
    out.value = acc * inv_n;
    return out;
}

double mse_value(const Tensor& pred, const Tensor& target) {
    if (!pred.same_shape(target)) {
        throw DimensionError("mse_value: shape mismatch");
    }
    double acc = 0.0;
    for (size_t i = 0; i < pred.numel(); ++i) {
        double d = pred.data[i] - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.numel());
}

void adam_step(std::span<double> value, std::span<const double> grad,
               std::span<double> m, std::span<double> v, uint64_t t, double lr,
               const AdamHyper& hyper) {
    if (value.size() != grad.size() || value.size() != m.size() ||
        value.size() != v.size()) {
        throw DimensionError("adam_step: span size mismatch");
    }
    const double b1 = hyper.beta1, b2 = hyper.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (size_t i = 0; i < value.size(); ++i) {
        m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
        v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
        double m_hat = m[i] / bc1;
        double v_hat = v[i] / bc2;
        value[i] -= lr * m_hat / (std::sqrt(v_hat) + hyper.eps);
    }
}

AdamOptimizer::AdamOptimizer(std::vector<Param*> params, AdamHyper hyper)
    : params_(std::move(params)), hyper_(hyper) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (Param* p : params_) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

void AdamOptimizer::step(double lr) {
    t_ += 1;
    for (size_t i = 0; i < params_.size(); ++i) {
        adam_step(params_[i]->value, params_[i]->grad, m_[i], v_[i], t_, lr,
                  hyper_);
    }
}

double eval_mse(NeuralModel& model, const Tensor& x, const Tensor& y,
                size_t batch_size) {
    const size_t n = x.shape[0];
    double sq_sum = 0.0;
    size_t entries = 0;
    std::vector<size_t> idx;
    for (size_t start = 0; start < n; start += batch_size) {
        size_t stop = std::min(n, start + batch_size);
        idx.resize(stop - start);
        std::iota(idx.begin(), idx.end(), start);
        Tensor bx = gather_rows(x, idx);
        Tensor by = gather_rows(y, idx);
        Tensor out = model.forward(bx, Mode::eval);
        sq_sum += mse_value(out, by) * static_cast<double>(out.numel());
        entries += out.numel();
    }
    if (entries == 0) throw DimensionError("eval_mse: empty dataset");
    return sq_sum / static_cast<double>(entries);
}

TrainHistory train(NeuralModel& model, const Tensor& train_x,
                   const Tensor& train_y, const Tensor& val_x,
                   const Tensor& val_y, const TrainConfig& cfg) {
    if (train_x.rank() < 2 || train_x.shape[0] == 0) {
        throw DimensionError("train: empty training set");
    }
    if (train_x.shape[0] != train_y.shape[0] || val_x.shape[0] != val_y.shape[0]) {
        throw DimensionError("train: input/target count mismatch");
    }
    const size_t n = train_x.shape[0];
    const size_t batch = std::max<size_t>(1, cfg.batch_size);

    AdamOptimizer opt(model.parameters(), cfg.adam);
    Rng rng(cfg.seed);

    TrainHistory history;
    double lr = cfg.lr_initial;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<double> best_params;
    size_t stale_epochs = 0;

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng = rng.substream(epoch);
        for (size_t i = n; i > 1; --i) {
            size_t j = static_cast<size_t>(shuffle_rng.next_u64() % i);
            std::swap(order[i - 1], order[j]);
        }

        double sq_sum = 0.0;
        size_t entries = 0;
        for (size_t start = 0; start < n; start += batch) {
            size_t stop = std::min(n, start + batch);
            std::span<const size_t> bidx(order.data() + start, stop - start);
            Tensor bx = gather_rows(train_x, bidx);
            Tensor by = gather_rows(train_y, bidx);

            Tensor out = model.forward(bx, Mode::train);
            LossGrad lg = mse_loss(out, by);
            if (!std::isfinite(lg.value)) {
                throw TrainingError(epoch, "training loss is not finite");
            }
            sq_sum += lg.value * static_cast<double>(out.numel());
            entries += out.numel();

            model.zero_grad();
            model.backward(lg.grad);
            opt.step(lr);
        }
        double train_loss = sq_sum / static_cast<double>(entries);

        double val_loss = val_x.shape[0] > 0
                              ? eval_mse(model, val_x, val_y, batch)
                              : train_loss;
        if (!std::isfinite(val_loss)) {
            throw TrainingError(epoch, "validation loss is not finite");
        }

        bool improved_meaningfully =
            val_loss < best_val * (1.0 - cfg.plateau_rel_improve);
        if (val_loss < best_val) {
            best_val = val_loss;
            best_params = model.snapshot();
        }
        if (improved_meaningfully) {
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if (stale_epochs >= cfg.plateau_patience && lr > cfg.lr_final) {
                lr = cfg.lr_final;
                stale_epochs = 0;
            }
        }

        history.epochs.push_back({train_loss, val_loss, best_val, lr});
    }

    if (!best_params.empty()) model.restore(best_params);
    return history;
}

}  // namespace rcsf
