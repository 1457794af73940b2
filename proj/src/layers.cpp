#include "rcsf/layers.hpp"

#include <cmath>

namespace rcsf {

namespace {

// Glorot-uniform draw for a weight tensor.
void glorot_init(std::vector<double>& w, size_t fan_in, size_t fan_out, Rng& rng) {
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : w) v = rng.uniform(-bound, bound);
}

}  // namespace

void Layer::require_cache(const char* who) const {
    if (!has_cache_) {
        throw StateError(std::string(who) +
                         ": backward without a preceding train-mode forward");
    }
}

// ---------------------------------------------------------------------------
// Dense

DenseLayer::DenseLayer(size_t in_features, size_t out_features)
    : in_(in_features), out_(out_features), weight_(in_features * out_features),
      bias_(out_features) {
    if (in_ == 0 || out_ == 0) throw DomainError("DenseLayer: zero dimension");
}

Shape DenseLayer::out_shape(const Shape& in) const {
    if (in.size() != 2 || in[1] != in_) {
        throw DimensionError("DenseLayer: expected input shape (batch, " +
                             std::to_string(in_) + ")");
    }
    return {in[0], out_};
}

Tensor DenseLayer::forward(const Tensor& in, Mode mode) {
    Shape os = out_shape(in.shape);
    const size_t batch = in.shape[0];
    Tensor out(os);
    const double* w = weight_.value.data();
    for (size_t b = 0; b < batch; ++b) {
        const double* x = in.data.data() + b * in_;
        double* y = out.data.data() + b * out_;
        for (size_t o = 0; o < out_; ++o) {
            const double* wr = w + o * in_;
            double acc = bias_.value[o];
            for (size_t i = 0; i < in_; ++i) acc += wr[i] * x[i];
            y[o] = acc;
        }
    }
    if (mode == Mode::train) {
        cached_in_ = in;
        has_cache_ = true;
    }
    return out;
}

Tensor DenseLayer::backward(const Tensor& grad_out) {
    require_cache("DenseLayer");
    const size_t batch = cached_in_.shape[0];
    if (grad_out.shape != Shape{batch, out_}) {
        throw DimensionError("DenseLayer: gradient shape mismatch");
    }
    Tensor grad_in(cached_in_.shape);
    const double* w = weight_.value.data();
    double* dw = weight_.grad.data();
    for (size_t b = 0; b < batch; ++b) {
        const double* x = cached_in_.data.data() + b * in_;
        const double* dy = grad_out.data.data() + b * out_;
        double* dx = grad_in.data.data() + b * in_;
        for (size_t o = 0; o < out_; ++o) {
            const double g = dy[o];
            const double* wr = w + o * in_;
            double* dwr = dw + o * in_;
            for (size_t i = 0; i < in_; ++i) {
                dx[i] += g * wr[i];
                dwr[i] += g * x[i];
            }
            bias_.grad[o] += g;
        }
    }
    has_cache_ = false;
    return grad_in;
}

void DenseLayer::init(Rng& rng) {
    glorot_init(weight_.value, in_, out_, rng);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

uint64_t DenseLayer::flops(const Shape&) const {
    return 2ull * in_ * out_;
}

// ---------------------------------------------------------------------------
// Conv2d

Conv2dLayer::Conv2dLayer(size_t in_channels, size_t out_channels, size_t kernel,
                         size_t stride, size_t pad)
    : cin_(in_channels), cout_(out_channels), k_(kernel), stride_(stride),
      pad_(pad), weight_(in_channels * out_channels * kernel * kernel),
      bias_(out_channels) {
    if (cin_ == 0 || cout_ == 0 || k_ == 0 || stride_ == 0) {
        throw DomainError("Conv2dLayer: zero dimension");
    }
}

Shape Conv2dLayer::out_shape(const Shape& in) const {
    if (in.size() != 4 || in[1] != cin_) {
        throw DimensionError("Conv2dLayer: expected input shape (batch, " +
                             std::to_string(cin_) + ", h, w)");
    }
    size_t h = in[2], w = in[3];
    if (h + 2 * pad_ < k_ || w + 2 * pad_ < k_) {
        throw DimensionError("Conv2dLayer: kernel larger than padded input");
    }
    size_t ho = (h + 2 * pad_ - k_) / stride_ + 1;
    size_t wo = (w + 2 * pad_ - k_) / stride_ + 1;
    return {in[0], cout_, ho, wo};
}

Tensor Conv2dLayer::forward(const Tensor& in, Mode mode) {
    Shape os = out_shape(in.shape);
    const size_t batch = in.shape[0], h = in.shape[2], w = in.shape[3];
    const size_t ho = os[2], wo = os[3];
    Tensor out(os);
    const long pad = static_cast<long>(pad_);

    for (size_t b = 0; b < batch; ++b) {
        for (size_t co = 0; co < cout_; ++co) {
            double* y = out.data.data() + ((b * cout_ + co) * ho) * wo;
            const double bias = bias_.value[co];
            for (size_t i = 0; i < ho * wo; ++i) y[i] = bias;
            for (size_t ci = 0; ci < cin_; ++ci) {
                const double* x = in.data.data() + ((b * cin_ + ci) * h) * w;
                const double* wker =
                    weight_.value.data() + ((co * cin_ + ci) * k_) * k_;
                for (size_t ky = 0; ky < k_; ++ky) {
                    for (size_t kx = 0; kx < k_; ++kx) {
                        const double wv = wker[ky * k_ + kx];
                        for (size_t oy = 0; oy < ho; ++oy) {
                            long iy = static_cast<long>(oy * stride_ + ky) - pad;
                            if (iy < 0 || iy >= static_cast<long>(h)) continue;
                            const double* xr = x + static_cast<size_t>(iy) * w;
                            double* yr = y + oy * wo;
                            for (size_t ox = 0; ox < wo; ++ox) {
                                long ix = static_cast<long>(ox * stride_ + kx) - pad;
                                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                                yr[ox] += wv * xr[static_cast<size_t>(ix)];
                            }
                        }
                    }
                }
            }
        }
    }
    if (mode == Mode::train) {
        cached_in_ = in;
        has_cache_ = true;
    }
    return out;
}

Tensor Conv2dLayer::backward(const Tensor& grad_out) {
    require_cache("Conv2dLayer");
    const Tensor& in = cached_in_;
    Shape os = out_shape(in.shape);
    if (grad_out.shape != os) {
        throw DimensionError("Conv2dLayer: gradient shape mismatch");
    }
    const size_t batch = in.shape[0], h = in.shape[2], w = in.shape[3];
    const size_t ho = os[2], wo = os[3];
    const long pad = static_cast<long>(pad_);

    Tensor grad_in(in.shape);
    for (size_t b = 0; b < batch; ++b) {
        for (size_t co = 0; co < cout_; ++co) {
            const double* dy = grad_out.data.data() + ((b * cout_ + co) * ho) * wo;
            double& dbias = bias_.grad[co];
            for (size_t i = 0; i < ho * wo; ++i) dbias += dy[i];
            for (size_t ci = 0; ci < cin_; ++ci) {
                const double* x = in.data.data() + ((b * cin_ + ci) * h) * w;
                double* dx = grad_in.data.data() + ((b * cin_ + ci) * h) * w;
                const double* wker =
                    weight_.value.data() + ((co * cin_ + ci) * k_) * k_;
                double* dwker =
                    weight_.grad.data() + ((co * cin_ + ci) * k_) * k_;
                for (size_t ky = 0; ky < k_; ++ky) {
                    for (size_t kx = 0; kx < k_; ++kx) {
                        const double wv = wker[ky * k_ + kx];
                        double dw_acc = 0.0;
                        for (size_t oy = 0; oy < ho; ++oy) {
                            long iy = static_cast<long>(oy * stride_ + ky) - pad;
                            if (iy < 0 || iy >= static_cast<long>(h)) continue;
                            const double* xr = x + static_cast<size_t>(iy) * w;
                            double* dxr = dx + static_cast<size_t>(iy) * w;
                            const double* dyr = dy + oy * wo;
                            for (size_t ox = 0; ox < wo; ++ox) {
                                long ix = static_cast<long>(ox * stride_ + kx) - pad;
                                if (ix < 0 || ix >= static_cast<long>(w)) continue;
                                const double g = dyr[ox];
                                dw_acc += g * xr[static_cast<size_t>(ix)];
                                dxr[static_cast<size_t>(ix)] += g * wv;
                            }
                        }
                        dwker[ky * k_ + kx] += dw_acc;
                    }
                }
            }
        }
    }
    has_cache_ = false;
    return grad_in;
}

void Conv2dLayer::init(Rng& rng) {
    glorot_init(weight_.value, cin_ * k_ * k_, cout_ * k_ * k_, rng);
    std::fill(bias_.value.begin(), bias_.value.end(), 0.0);
}

uint64_t Conv2dLayer::flops(const Shape& in) const {
    Shape os = out_shape(in);
    return 2ull * k_ * k_ * cin_ * cout_ * os[2] * os[3];
}

// ---------------------------------------------------------------------------
// BatchNorm

BatchNormLayer::BatchNormLayer(size_t channels, double eps, double momentum)
    : channels_(channels), eps_(eps), momentum_(momentum), gamma_(channels),
      beta_(channels), run_mean_(channels), run_var_(channels) {
    if (channels_ == 0) throw DomainError("BatchNormLayer: zero channels");
    std::fill(gamma_.value.begin(), gamma_.value.end(), 1.0);
    std::fill(run_var_.value.begin(), run_var_.value.end(), 1.0);
}

Shape BatchNormLayer::out_shape(const Shape& in) const {
    if (in.size() == 4) {
        if (in[1] != channels_) {
            throw DimensionError("BatchNormLayer: channel count mismatch");
        }
    } else if (in.size() == 2) {
        if (in[1] != channels_) {
            throw DimensionError("BatchNormLayer: feature count mismatch");
        }
    } else {
        throw DimensionError("BatchNormLayer: expected rank-2 or rank-4 input");
    }
    return in;
}

Tensor BatchNormLayer::forward(const Tensor& in, Mode mode) {
    out_shape(in.shape);
    const size_t batch = in.shape[0];
    const size_t spatial = in.rank() == 4 ? in.shape[2] * in.shape[3] : 1;
    const size_t m = batch * spatial;

    Tensor out(in.shape);
    Tensor norm(in.shape);
    std::vector<double> inv_std(channels_);

    auto element = [&](size_t b, size_t c, size_t s) {
        return (b * channels_ + c) * spatial + s;
    };

    for (size_t c = 0; c < channels_; ++c) {
        double mean, var;
        if (mode == Mode::train) {
            double sum = 0.0;
            for (size_t b = 0; b < batch; ++b)
                for (size_t s = 0; s < spatial; ++s) sum += in.data[element(b, c, s)];
            mean = sum / static_cast<double>(m);
            double sq = 0.0;
            for (size_t b = 0; b < batch; ++b)
                for (size_t s = 0; s < spatial; ++s) {
                    double d = in.data[element(b, c, s)] - mean;
                    sq += d * d;
                }
            var = sq / static_cast<double>(m);
            run_mean_.value[c] = momentum_ * run_mean_.value[c] + (1.0 - momentum_) * mean;
            run_var_.value[c] = momentum_ * run_var_.value[c] + (1.0 - momentum_) * var;
        } else {
            mean = run_mean_.value[c];
            var = run_var_.value[c];
        }
        double istd = 1.0 / std::sqrt(var + eps_);
        inv_std[c] = istd;
        const double g = gamma_.value[c], bt = beta_.value[c];
        for (size_t b = 0; b < batch; ++b) {
            for (size_t s = 0; s < spatial; ++s) {
                size_t i = element(b, c, s);
                double xh = (in.data[i] - mean) * istd;
                norm.data[i] = xh;
                out.data[i] = g * xh + bt;
            }
        }
    }
    if (mode == Mode::train) {
        cached_norm_ = std::move(norm);
        cached_inv_std_ = std::move(inv_std);
        has_cache_ = true;
    }
    return out;
}

Tensor BatchNormLayer::backward(const Tensor& grad_out) {
    require_cache("BatchNormLayer");
    if (grad_out.shape != cached_norm_.shape) {
        throw DimensionError("BatchNormLayer: gradient shape mismatch");
    }
    const size_t batch = grad_out.shape[0];
    const size_t spatial = grad_out.rank() == 4 ? grad_out.shape[2] * grad_out.shape[3] : 1;
    const double m = static_cast<double>(batch * spatial);

    Tensor grad_in(grad_out.shape);
    auto element = [&](size_t b, size_t c, size_t s) {
        return (b * channels_ + c) * spatial + s;
    };

    for (size_t c = 0; c < channels_; ++c) {
        double sum_dy = 0.0, sum_dy_xh = 0.0;
        for (size_t b = 0; b < batch; ++b) {
            for (size_t s = 0; s < spatial; ++s) {
                size_t i = element(b, c, s);
                sum_dy += grad_out.data[i];
                sum_dy_xh += grad_out.data[i] * cached_norm_.data[i];
            }
        }
        gamma_.grad[c] += sum_dy_xh;
        beta_.grad[c] += sum_dy;

        const double g_istd = gamma_.value[c] * cached_inv_std_[c];
        const double mean_dy = sum_dy / m;
        const double mean_dy_xh = sum_dy_xh / m;
        for (size_t b = 0; b < batch; ++b) {
            for (size_t s = 0; s < spatial; ++s) {
                size_t i = element(b, c, s);
                grad_in.data[i] = g_istd * (grad_out.data[i] - mean_dy -
                                            cached_norm_.data[i] * mean_dy_xh);
            }
        }
    }
    has_cache_ = false;
    return grad_in;
}

uint64_t BatchNormLayer::flops(const Shape& in) const {
    return Tensor::shape_numel(in) / in[0];
}

// ---------------------------------------------------------------------------
// Activations

Tensor LeakyReluLayer::forward(const Tensor& in, Mode mode) {
    Tensor out(in.shape);
    for (size_t i = 0; i < in.data.size(); ++i) {
        double v = in.data[i];
        out.data[i] = v >= 0.0 ? v : slope_ * v;
    }
    if (mode == Mode::train) {
        cached_in_ = in;
        has_cache_ = true;
    }
    return out;
}

Tensor LeakyReluLayer::backward(const Tensor& grad_out) {
    require_cache("LeakyReluLayer");
    if (grad_out.shape != cached_in_.shape) {
        throw DimensionError("LeakyReluLayer: gradient shape mismatch");
    }
    Tensor grad_in(grad_out.shape);
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        grad_in.data[i] =
            grad_out.data[i] * (cached_in_.data[i] >= 0.0 ? 1.0 : slope_);
    }
    has_cache_ = false;
    return grad_in;
}

uint64_t LeakyReluLayer::flops(const Shape& in) const {
    return Tensor::shape_numel(in) / in[0];
}

Tensor TanhLayer::forward(const Tensor& in, Mode mode) {
    Tensor out(in.shape);
    for (size_t i = 0; i < in.data.size(); ++i) out.data[i] = std::tanh(in.data[i]);
    if (mode == Mode::train) {
        cached_out_ = out;
        has_cache_ = true;
    }
    return out;
}

Tensor TanhLayer::backward(const Tensor& grad_out) {
    require_cache("TanhLayer");
    if (grad_out.shape != cached_out_.shape) {
        throw DimensionError("TanhLayer: gradient shape mismatch");
    }
    Tensor grad_in(grad_out.shape);
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        double y = cached_out_.data[i];
        grad_in.data[i] = grad_out.data[i] * (1.0 - y * y);
    }
    has_cache_ = false;
    return grad_in;
}

uint64_t TanhLayer::flops(const Shape& in) const {
    return Tensor::shape_numel(in) / in[0];
}

Tensor SigmoidLayer::forward(const Tensor& in, Mode mode) {
    Tensor out(in.shape);
    for (size_t i = 0; i < in.data.size(); ++i) {
        out.data[i] = 1.0 / (1.0 + std::exp(-in.data[i]));
    }
    if (mode == Mode::train) {
        cached_out_ = out;
        has_cache_ = true;
    }
    return out;
}

Tensor SigmoidLayer::backward(const Tensor& grad_out) {
    require_cache("SigmoidLayer");
    if (grad_out.shape != cached_out_.shape) {
        throw DimensionError("SigmoidLayer: gradient shape mismatch");
    }
    Tensor grad_in(grad_out.shape);
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        double y = cached_out_.data[i];
        grad_in.data[i] = grad_out.data[i] * y * (1.0 - y);
    }
    has_cache_ = false;
    return grad_in;
}

uint64_t SigmoidLayer::flops(const Shape& in) const {
    return Tensor::shape_numel(in) / in[0];
}

// ---------------------------------------------------------------------------
// Reshape

ReshapeLayer::ReshapeLayer(Shape sample_shape)
    : sample_shape_(std::move(sample_shape)) {
    if (sample_shape_.empty() || sample_shape_.size() > 3) {
        throw DomainError("ReshapeLayer: sample rank must be 1..3");
    }
}

Shape ReshapeLayer::out_shape(const Shape& in) const {
    size_t per = Tensor::shape_numel(in) / in[0];
    if (per != Tensor::shape_numel(sample_shape_)) {
        throw DimensionError("ReshapeLayer: entry count mismatch");
    }
    Shape os{in[0]};
    os.insert(os.end(), sample_shape_.begin(), sample_shape_.end());
    return os;
}

Tensor ReshapeLayer::forward(const Tensor& in, Mode mode) {
    Shape os = out_shape(in.shape);
    if (mode == Mode::train) {
        cached_in_shape_ = in.shape;
        has_cache_ = true;
    }
    return in.reshaped(os);
}

Tensor ReshapeLayer::backward(const Tensor& grad_out) {
    require_cache("ReshapeLayer");
    has_cache_ = false;
    return grad_out.reshaped(cached_in_shape_);
}

// ---------------------------------------------------------------------------
// ReZero residual block

ReZeroBlock::ReZeroBlock(std::vector<LayerPtr> branch)
    : branch_(std::move(branch)), alpha_(1) {
    if (branch_.empty()) throw DomainError("ReZeroBlock: empty branch");
}

Shape ReZeroBlock::out_shape(const Shape& in) const {
    Shape s = in;
    for (const LayerPtr& l : branch_) s = l->out_shape(s);
    if (s != in) {
        throw DimensionError("ReZeroBlock: branch must preserve shape");
    }
    return in;
}

Tensor ReZeroBlock::forward(const Tensor& in, Mode mode) {
    Tensor branch_out = in;
    for (const LayerPtr& l : branch_) branch_out = l->forward(branch_out, mode);
    if (!branch_out.same_shape(in)) {
        throw DimensionError("ReZeroBlock: branch must preserve shape");
    }
    Tensor out(in.shape);
    const double a = alpha_.value[0];
    for (size_t i = 0; i < in.data.size(); ++i) {
        out.data[i] = in.data[i] + a * branch_out.data[i];
    }
    if (mode == Mode::train) {
        cached_branch_out_ = std::move(branch_out);
        has_cache_ = true;
    }
    return out;
}

Tensor ReZeroBlock::backward(const Tensor& grad_out) {
    require_cache("ReZeroBlock");
    if (grad_out.shape != cached_branch_out_.shape) {
        throw DimensionError("ReZeroBlock: gradient shape mismatch");
    }
    double dalpha = 0.0;
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        dalpha += grad_out.data[i] * cached_branch_out_.data[i];
    }
    alpha_.grad[0] += dalpha;

    Tensor branch_grad(grad_out.shape);
    const double a = alpha_.value[0];
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        branch_grad.data[i] = a * grad_out.data[i];
    }
    for (size_t li = branch_.size(); li-- > 0;) {
        branch_grad = branch_[li]->backward(branch_grad);
    }
    Tensor grad_in(grad_out.shape);
    for (size_t i = 0; i < grad_out.data.size(); ++i) {
        grad_in.data[i] = grad_out.data[i] + branch_grad.data[i];
    }
    has_cache_ = false;
    return grad_in;
}

std::vector<Param*> ReZeroBlock::params() {
    std::vector<Param*> ps;
    for (const LayerPtr& l : branch_) {
        auto sub = l->params();
        ps.insert(ps.end(), sub.begin(), sub.end());
    }
    ps.push_back(&alpha_);
    return ps;
}

std::vector<Param*> ReZeroBlock::state() {
    std::vector<Param*> ps;
    for (const LayerPtr& l : branch_) {
        auto sub = l->state();
        ps.insert(ps.end(), sub.begin(), sub.end());
    }
    return ps;
}

void ReZeroBlock::init(Rng& rng) {
    for (const LayerPtr& l : branch_) l->init(rng);
    alpha_.value[0] = 0.0;
}

uint64_t ReZeroBlock::flops(const Shape& in) const {
    uint64_t total = 0;
    Shape s = in;
    for (const LayerPtr& l : branch_) {
        total += l->flops(s);
        s = l->out_shape(s);
    }
    // scale by alpha + residual add
    return total + 2ull * (Tensor::shape_numel(in) / in[0]);
}

}  // namespace rcsf
