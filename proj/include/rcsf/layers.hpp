#pragma once

#include <memory>
#include <string>

#include "rcsf/rng.hpp"
#include "rcsf/tensor.hpp"

namespace rcsf {

enum class Mode { train, eval };

enum class LayerKind : uint32_t {
    dense = 1,
    conv2d = 2,
    batch_norm = 3,
    leaky_relu = 4,
    tanh_out = 5,
    sigmoid = 6,
    reshape = 7,
    rezero_block = 8,
};

/// A parameter tensor and its gradient accumulator.
struct Param {
    std::vector<double> value;
    std::vector<double> grad;

    explicit Param(size_t n = 0) : value(n, 0.0), grad(n, 0.0) {}
    size_t size() const { return value.size(); }
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual LayerKind kind() const = 0;
    virtual Shape out_shape(const Shape& in) const = 0;

    /// Train mode caches activations for backward and, for batch norm,
    /// uses batch statistics; eval mode is pure.
    virtual Tensor forward(const Tensor& in, Mode mode) = 0;

    /// Returns the gradient w.r.t. the layer input and accumulates
    /// parameter gradients. Requires a preceding train-mode forward.
    virtual Tensor backward(const Tensor& grad_out) = 0;

    virtual std::vector<Param*> params() { return {}; }   // trainable
    virtual std::vector<Param*> state() { return {}; }    // running stats
    virtual void init(Rng&) {}
    virtual uint64_t flops(const Shape& in) const = 0;

protected:
    void require_cache(const char* who) const;
    bool has_cache_ = false;
};

using LayerPtr = std::unique_ptr<Layer>;

class DenseLayer final : public Layer {
public:
    DenseLayer(size_t in_features, size_t out_features);

    LayerKind kind() const override { return LayerKind::dense; }
    Shape out_shape(const Shape& in) const override;
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override { return {&weight_, &bias_}; }
    void init(Rng& rng) override;
    uint64_t flops(const Shape& in) const override;

    size_t in_features() const { return in_; }
    size_t out_features() const { return out_; }

private:
    size_t in_, out_;
    Param weight_;  // (out, in) row-major
    Param bias_;    // (out)
    Tensor cached_in_;
};

class Conv2dLayer final : public Layer {
public:
    Conv2dLayer(size_t in_channels, size_t out_channels, size_t kernel,
                size_t stride = 1, size_t pad = 0);

    LayerKind kind() const override { return LayerKind::conv2d; }
    Shape out_shape(const Shape& in) const override;
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override { return {&weight_, &bias_}; }
    void init(Rng& rng) override;
    uint64_t flops(const Shape& in) const override;

    size_t in_channels() const { return cin_; }
    size_t out_channels() const { return cout_; }
    size_t kernel() const { return k_; }
    size_t stride() const { return stride_; }
    size_t pad() const { return pad_; }

private:
    size_t cin_, cout_, k_, stride_, pad_;
    Param weight_;  // (cout, cin, k, k)
    Param bias_;    // (cout)
    Tensor cached_in_;
};

/// Normalizes per channel (rank-4 input, over batch*H*W) or per feature
/// (rank-2 input, over batch). Running statistics feed eval mode.
class BatchNormLayer final : public Layer {
public:
    explicit BatchNormLayer(size_t channels, double eps = 1e-5,
                            double momentum = 0.9);

    LayerKind kind() const override { return LayerKind::batch_norm; }
    Shape out_shape(const Shape& in) const override;
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override { return {&gamma_, &beta_}; }
    std::vector<Param*> state() override { return {&run_mean_, &run_var_}; }
    uint64_t flops(const Shape& in) const override;

    size_t channels() const { return channels_; }
    double eps() const { return eps_; }
    double momentum() const { return momentum_; }

private:
    size_t channels_;
    double eps_, momentum_;
    Param gamma_, beta_;
    Param run_mean_, run_var_;
    Tensor cached_norm_;                 // x_hat
    std::vector<double> cached_inv_std_; // per channel
};

class LeakyReluLayer final : public Layer {
public:
    explicit LeakyReluLayer(double slope = 0.3) : slope_(slope) {}

    LayerKind kind() const override { return LayerKind::leaky_relu; }
    Shape out_shape(const Shape& in) const override { return in; }
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    uint64_t flops(const Shape& in) const override;

    double slope() const { return slope_; }

private:
    double slope_;
    Tensor cached_in_;
};

class TanhLayer final : public Layer {
public:
    LayerKind kind() const override { return LayerKind::tanh_out; }
    Shape out_shape(const Shape& in) const override { return in; }
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    uint64_t flops(const Shape& in) const override;

private:
    Tensor cached_out_;
};

class SigmoidLayer final : public Layer {
public:
    LayerKind kind() const override { return LayerKind::sigmoid; }
    Shape out_shape(const Shape& in) const override { return in; }
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    uint64_t flops(const Shape& in) const override;

private:
    Tensor cached_out_;
};

/// Reshapes each sample to `sample_shape` (batch axis preserved).
class ReshapeLayer final : public Layer {
public:
    explicit ReshapeLayer(Shape sample_shape);

    LayerKind kind() const override { return LayerKind::reshape; }
    Shape out_shape(const Shape& in) const override;
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    uint64_t flops(const Shape&) const override { return 0; }

    const Shape& sample_shape() const { return sample_shape_; }

private:
    Shape sample_shape_;
    Shape cached_in_shape_;
};

/// out = in + alpha * branch(in), with the scalar alpha learned and
/// initialized to zero, so the block starts as the identity map.
class ReZeroBlock final : public Layer {
public:
    explicit ReZeroBlock(std::vector<LayerPtr> branch);

    LayerKind kind() const override { return LayerKind::rezero_block; }
    Shape out_shape(const Shape& in) const override;
    Tensor forward(const Tensor& in, Mode mode) override;
    Tensor backward(const Tensor& grad_out) override;
    std::vector<Param*> params() override;
    std::vector<Param*> state() override;
    void init(Rng& rng) override;
    uint64_t flops(const Shape& in) const override;

    double alpha() const { return alpha_.value[0]; }
    const std::vector<LayerPtr>& branch() const { return branch_; }

private:
    std::vector<LayerPtr> branch_;
    Param alpha_;
    Tensor cached_branch_out_;
};

}  // namespace rcsf
