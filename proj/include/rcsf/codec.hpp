#pragma once

#include <span>

#include "rcsf/dataset.hpp"
#include "rcsf/numerics.hpp"
#include "rcsf/tensor.hpp"

namespace rcsf {

/// Per-dataset magnitude bound mapping entries into [-1, 1]. Fitted on the
/// training split only.
struct NormalizationSpec {
    double scale = 1.0;
};

struct ClipStats {
    size_t clipped = 0;
    size_t total = 0;
};

/// (2, rows, cols) tensor holding (Re, Im)/scale, clipped to [-1, 1];
/// clip events are counted, not fatal.
Tensor channel_to_tensor(const CMat& h, const NormalizationSpec& spec,
                         ClipStats* clips = nullptr);

/// Inverse of channel_to_tensor (exact when nothing clipped). Expects a
/// rank-3 (2, rows, cols) tensor.
CMat tensor_to_channel(const Tensor& t, const NormalizationSpec& spec);

/// Row-wise variation of the cascaded channel. Rows whose reference energy
/// falls below eps are masked invalid and carry the fallback entry 0.
struct RatioVector {
    CVec p;
    std::vector<uint8_t> valid;  // 1 = well-defined

    size_t size() const { return p.size(); }
};

/// p_i = <h_i(0), h_i(t)> / ||h_i(0)||^2 (Hermitian inner product).
RatioVector extract_ratio(const CMat& h0, const CMat& ht, double eps = 1e-12);

/// Row i of the result is p_i * h0_hat_i; masked entries yield zero rows.
CMat reconstruct_from_ratio(const CMat& h0_hat, const RatioVector& p_hat);

/// (2*n,) tensor: first half Re/scale, second half Im/scale, clipped.
Tensor ratio_to_tensor(const RatioVector& p, const NormalizationSpec& spec,
                       ClipStats* clips = nullptr);
RatioVector tensor_to_ratio(const Tensor& t, const NormalizationSpec& spec);

/// Uniform scalar quantizer on [0, 1]: values are clipped into range, then
/// index = round_half_away_from_zero(v * (2^n_q - 1)). n_q must be 1..30.
std::vector<uint32_t> quantize(std::span<const double> values, int n_q);
std::vector<double> dequantize(std::span<const uint32_t> indices, int n_q);

/// Bounded codeword with its quantized form.
struct Codeword {
    std::vector<double> values;  // in [0, 1]
    int n_q = 0;
    std::vector<uint32_t> indices;
};

Codeword make_codeword(std::vector<double> values, int n_q);

/// MSB-first packing of n_q-bit indices, concatenated in order and
/// zero-padded to a byte boundary.
std::vector<uint8_t> pack_bits(std::span<const uint32_t> indices, int n_q);
std::vector<uint32_t> unpack_bits(std::span<const uint8_t> bytes, int n_q,
                                  size_t count);

/// 99.9th-percentile (nearest-rank) magnitude of |Re| and |Im| over the
/// given episodes' channels, never below `floor`.
NormalizationSpec fit_channel_scale(std::span<const Episode> episodes,
                                    double percentile = 0.999);

/// Same statistic over the ratio vectors extract_ratio yields for
/// t = 1..T within each episode.
NormalizationSpec fit_ratio_scale(std::span<const Episode> episodes,
                                  double percentile = 0.999);

}  // namespace rcsf
