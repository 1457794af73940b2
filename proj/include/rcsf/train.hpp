#pragma once

#include "rcsf/model.hpp"

namespace rcsf {

struct LossGrad {
    double value = 0.0;
    Tensor grad;
};

/// Mean squared error over all entries; gradient 2*(pred-target)/count.
LossGrad mse_loss(const Tensor& pred, const Tensor& target);
double mse_value(const Tensor& pred, const Tensor& target);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One Adam update with bias correction on a single parameter tensor;
/// t is the 1-based step count including this step.
void adam_step(std::span<double> value, std::span<const double> grad,
               std::span<double> m, std::span<double> v, uint64_t t, double lr,
               const AdamHyper& hyper = {});

class AdamOptimizer {
public:
    explicit AdamOptimizer(std::vector<Param*> params, AdamHyper hyper = {});

    void step(double lr);
    uint64_t steps() const { return t_; }

private:
    std::vector<Param*> params_;
    std::vector<std::vector<double>> m_, v_;
    AdamHyper hyper_;
    uint64_t t_ = 0;
};

struct TrainConfig {
    double lr_initial = 1e-3;
    double lr_final = 1e-4;
    size_t batch_size = 64;
    size_t epochs = 100;
    uint64_t seed = 1;
    // Drop to lr_final after this many epochs without a relative validation
    // improvement of at least plateau_rel_improve.
    size_t plateau_patience = 10;
    double plateau_rel_improve = 1e-5;
    AdamHyper adam;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double best_val_loss = 0.0;  // best-so-far, non-increasing by construction
    double lr = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

/// Minibatch training with the plateau learning-rate schedule. The model is
/// left holding the parameters of its best validation epoch. Deterministic
/// in (config.seed, data): shuffles come from per-epoch substreams and all
/// reductions run in a fixed serial order. Throws TrainingError on a
/// non-finite loss.
TrainHistory train(NeuralModel& model, const Tensor& train_x,
                   const Tensor& train_y, const Tensor& val_x,
                   const Tensor& val_y, const TrainConfig& cfg);

/// Eval-mode MSE over a dataset, batched.
double eval_mse(NeuralModel& model, const Tensor& x, const Tensor& y,
                size_t batch_size = 256);

}  // namespace rcsf
