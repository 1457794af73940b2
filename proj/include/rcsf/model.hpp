#pragma once

#include <array>
#include <string>

#include "rcsf/layers.hpp"

namespace rcsf {

/// Ordered layer stack with a marked encoder/decoder boundary: layers
/// [0, encoder_end) form the encoder, the rest the decoder. An empty model
/// is the identity map (used as a lossless compressor stub).
class NeuralModel {
public:
    std::vector<LayerPtr> layers;
    size_t encoder_end = 0;
    Shape input_shape;  // per-sample

    NeuralModel() = default;
    NeuralModel(NeuralModel&&) = default;
    NeuralModel& operator=(NeuralModel&&) = default;

    Tensor forward(const Tensor& in, Mode mode);
    Tensor forward_range(const Tensor& in, size_t first, size_t last, Mode mode);
    Tensor encode(const Tensor& in);  // eval-mode encoder pass
    Tensor decode(const Tensor& in);  // eval-mode decoder pass

    /// Backpropagates through the layers of the last train-mode forward,
    /// accumulating parameter gradients.
    void backward(const Tensor& loss_grad);

    void zero_grad();
    std::vector<Param*> parameters();
    std::vector<Param*> state_tensors();
    void init_params(Rng& rng);

    Shape output_shape() const;           // per-sample
    size_t codeword_length() const;       // encoder output entries (batch 1)

    /// Flat copy of every parameter and running statistic, and its inverse.
    std::vector<double> snapshot() const;
    void restore(std::span<const double> snap);

    void save(const std::string& path) const;
    static NeuralModel load(const std::string& path);
    std::vector<uint8_t> serialize() const;
    static NeuralModel deserialize(std::span<const uint8_t> bytes);

private:
    size_t forward_first_ = 0, forward_last_ = 0;
    bool has_forward_cache_ = false;
};

struct Ae1Config {
    size_t conv_filters = 16;
    std::array<size_t, 2> refine_channels{8, 16};
    double leaky_slope = 0.3;
};

struct Ae2Config {
    size_t hidden = 0;  // 0: use 4 * n_s2
    double leaky_slope = 0.3;
};

/// Convolutional autoencoder for the full cascaded channel, input shape
/// (2, n_ris, n_t), bottleneck n_s1. Encoder: conv + batch norm + LeakyReLU
/// + dense to the codeword, bounded by a sigmoid. Decoder: dense stem,
/// two ReZero refine blocks of three 3x3 convs, tanh output.
NeuralModel build_ae1(size_t n_ris, size_t n_t, size_t n_s1,
                      const Ae1Config& cfg = {});

/// Fully-connected autoencoder for the ratio vector, input shape (2*n_ris,),
/// bottleneck n_s2, mirroring AE1's bounding and residual decoder.
NeuralModel build_ae2(size_t n_ris, size_t n_s2, const Ae2Config& cfg = {});

/// Per-inference FLOPs at batch 1: dense 2*in*out, conv2d
/// 2*k*k*cin*cout*h_out*w_out, activations and batch norm one per entry.
uint64_t count_flops(const NeuralModel& model);

constexpr uint32_t kModelFormatVersion = 1;

}  // namespace rcsf
