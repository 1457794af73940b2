#include "rcsf/codec.hpp"

#include <algorithm>
#include <cmath>

namespace rcsf {

namespace {

double clip_unit(double v, ClipStats* clips) {
    if (clips) clips->total += 1;
    if (v > 1.0) {
        if (clips) clips->clipped += 1;
        return 1.0;
    }
    if (v < -1.0) {
        if (clips) clips->clipped += 1;
        return -1.0;
    }
    return v;
}

NormalizationSpec percentile_scale(std::vector<double>& mags, double percentile,
                                   double floor = 1e-12) {
    if (mags.empty()) throw DomainError("normalization fit: no data");
    size_t rank = static_cast<size_t>(
        std::ceil(percentile * static_cast<double>(mags.size())));
    rank = std::min(std::max<size_t>(rank, 1), mags.size()) - 1;
    std::nth_element(mags.begin(), mags.begin() + rank, mags.end());
    return NormalizationSpec{std::max(mags[rank], floor)};
}

}  // namespace

Tensor channel_to_tensor(const CMat& h, const NormalizationSpec& spec,
                         ClipStats* clips) {
    if (!(spec.scale > 0.0)) throw DomainError("channel_to_tensor: scale must be > 0");
    Tensor t(Shape{2, h.rows, h.cols});
    const double inv = 1.0 / spec.scale;
    const size_t plane = h.rows * h.cols;
    for (size_t i = 0; i < plane; ++i) {
        t.data[i] = clip_unit(h.data[i].real() * inv, clips);
        t.data[plane + i] = clip_unit(h.data[i].imag() * inv, clips);
    }
    return t;
}

CMat tensor_to_channel(const Tensor& t, const NormalizationSpec& spec) {
    if (t.rank() != 3 || t.shape[0] != 2) {
        throw DimensionError("tensor_to_channel: expected shape (2, rows, cols)");
    }
    CMat h(t.shape[1], t.shape[2]);
    const size_t plane = h.rows * h.cols;
    for (size_t i = 0; i < plane; ++i) {
        h.data[i] = cplx{t.data[i] * spec.scale, t.data[plane + i] * spec.scale};
    }
    return h;
}

RatioVector extract_ratio(const CMat& h0, const CMat& ht, double eps) {
    if (!h0.same_shape(ht)) {
        throw DimensionError("extract_ratio: shape mismatch");
    }
    RatioVector out;
    out.p.resize(h0.rows);
    out.valid.assign(h0.rows, 1);
    for (size_t i = 0; i < h0.rows; ++i) {
        double energy = norm_sq(h0.row(i));
        if (energy < eps) {
            out.p[i] = cplx{0.0, 0.0};
            out.valid[i] = 0;
        } else {
            out.p[i] = hermitian_inner(h0.row(i), ht.row(i)) / energy;
        }
    }
    return out;
}

CMat reconstruct_from_ratio(const CMat& h0_hat, const RatioVector& p_hat) {
    if (p_hat.size() != h0_hat.rows) {
        throw DimensionError("reconstruct_from_ratio: length mismatch");
    }
    CMat h(h0_hat.rows, h0_hat.cols);
    for (size_t i = 0; i < h0_hat.rows; ++i) {
        cplx pi = p_hat.p[i];
        for (size_t k = 0; k < h0_hat.cols; ++k) {
            h(i, k) = pi * h0_hat(i, k);
        }
    }
    return h;
}

Tensor ratio_to_tensor(const RatioVector& p, const NormalizationSpec& spec,
                       ClipStats* clips) {
    if (!(spec.scale > 0.0)) throw DomainError("ratio_to_tensor: scale must be > 0");
    const size_t n = p.size();
    Tensor t(Shape{2 * n});
    const double inv = 1.0 / spec.scale;
    for (size_t i = 0; i < n; ++i) {
        t.data[i] = clip_unit(p.p[i].real() * inv, clips);
        t.data[n + i] = clip_unit(p.p[i].imag() * inv, clips);
    }
    return t;
}

RatioVector tensor_to_ratio(const Tensor& t, const NormalizationSpec& spec) {
    if (t.rank() != 1 || t.numel() % 2 != 0) {
        throw DimensionError("tensor_to_ratio: expected a flat (2*n) tensor");
    }
    const size_t n = t.numel() / 2;
    RatioVector out;
    out.p.resize(n);
    out.valid.assign(n, 1);
    for (size_t i = 0; i < n; ++i) {
        out.p[i] = cplx{t.data[i] * spec.scale, t.data[n + i] * spec.scale};
    }
    return out;
}

namespace {
void check_nq(int n_q) {
    if (n_q < 1 || n_q > 30) {
        throw DomainError("quantizer: n_q must lie in [1, 30]");
    }
}
}  // namespace

std::vector<uint32_t> quantize(std::span<const double> values, int n_q) {
    check_nq(n_q);
    const double levels = static_cast<double>((1u << n_q) - 1);
    std::vector<uint32_t> idx(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        double v = std::clamp(values[i], 0.0, 1.0);
        // std::round rounds halfway cases away from zero.
        idx[i] = static_cast<uint32_t>(std::round(v * levels));
    }
    return idx;
}

std::vector<double> dequantize(std::span<const uint32_t> indices, int n_q) {
    check_nq(n_q);
    const uint32_t max_idx = (1u << n_q) - 1;
    const double inv_levels = 1.0 / static_cast<double>(max_idx);
    std::vector<double> out(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] > max_idx) {
            throw DomainError("dequantize: index out of range");
        }
        out[i] = static_cast<double>(indices[i]) * inv_levels;
    }
    return out;
}

Codeword make_codeword(std::vector<double> values, int n_q) {
    Codeword cw;
    cw.indices = quantize(values, n_q);
    cw.values = std::move(values);
    cw.n_q = n_q;
    return cw;
}

std::vector<uint8_t> pack_bits(std::span<const uint32_t> indices, int n_q) {
    check_nq(n_q);
    const uint32_t max_idx = (1u << n_q) - 1;
    std::vector<uint8_t> out((indices.size() * static_cast<size_t>(n_q) + 7) / 8,
                             0);
    size_t bit = 0;
    for (uint32_t v : indices) {
        if (v > max_idx) throw DomainError("pack_bits: index out of range");
        for (int b = n_q - 1; b >= 0; --b) {
            if ((v >> b) & 1u) {
                out[bit / 8] |= static_cast<uint8_t>(0x80u >> (bit % 8));
            }
            ++bit;
        }
    }
    return out;
}

std::vector<uint32_t> unpack_bits(std::span<const uint8_t> bytes, int n_q,
                                  size_t count) {
    check_nq(n_q);
    size_t need = (count * static_cast<size_t>(n_q) + 7) / 8;
    if (bytes.size() < need) {
        throw DecodeError("unpack_bits: buffer too short");
    }
    std::vector<uint32_t> out(count, 0);
    size_t bit = 0;
    for (size_t i = 0; i < count; ++i) {
        uint32_t v = 0;
        for (int b = 0; b < n_q; ++b) {
            v <<= 1;
            if (bytes[bit / 8] & (0x80u >> (bit % 8))) v |= 1u;
            ++bit;
        }
        out[i] = v;
    }
    return out;
}

NormalizationSpec fit_channel_scale(std::span<const Episode> episodes,
                                    double percentile) {
    std::vector<double> mags;
    for (const Episode& ep : episodes) {
        for (const CMat& h : ep.h) {
            for (const cplx& v : h.data) {
                mags.push_back(std::fabs(v.real()));
                mags.push_back(std::fabs(v.imag()));
            }
        }
    }
    return percentile_scale(mags, percentile);
}

NormalizationSpec fit_ratio_scale(std::span<const Episode> episodes,
                                  double percentile) {
    std::vector<double> mags;
    for (const Episode& ep : episodes) {
        for (size_t t = 1; t < ep.h.size(); ++t) {
            RatioVector r = extract_ratio(ep.h[0], ep.h[t]);
            for (const cplx& v : r.p) {
                mags.push_back(std::fabs(v.real()));
                mags.push_back(std::fabs(v.imag()));
            }
        }
    }
    return percentile_scale(mags, percentile);
}

}  // namespace rcsf
