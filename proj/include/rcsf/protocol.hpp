#pragma once

#include "rcsf/codec.hpp"
#include "rcsf/model.hpp"

namespace rcsf {

enum class FrameKind : uint8_t { full = 1, ratio = 2 };

/// One UE->BS feedback frame. Wire layout (little-endian): kind u8,
/// interval index u32, payload bit length u32, then ceil(bits/8) payload
/// bytes. payload_bits counts pre-padding bits: n_q * codeword length
/// (64 * length in raw mode).
struct FeedbackMessage {
    FrameKind kind = FrameKind::full;
    uint32_t t = 0;
    uint32_t payload_bits = 0;
    std::vector<uint8_t> payload;
};

std::vector<uint8_t> serialize_frame(const FeedbackMessage& msg);
FeedbackMessage parse_frame(std::span<const uint8_t> bytes);

/// Codeword transport: uniform n_q-bit quantization, or raw IEEE doubles
/// (the lossless harness mode).
struct QuantSpec {
    int n_q = 4;
    bool raw64 = false;
};

std::vector<uint8_t> encode_payload(std::span<const double> values,
                                    const QuantSpec& q);
std::vector<double> decode_payload(std::span<const uint8_t> payload,
                                   uint32_t payload_bits, const QuantSpec& q);

struct ProtocolConfig {
    size_t n_ris = 0;
    size_t n_t = 0;
    size_t intervals = 0;  // T: ratio frames per large timescale
    QuantSpec quant;
    NormalizationSpec chan_scale;
    NormalizationSpec ratio_scale;
    // When set, the UE mirrors the BS decode of H(0) and takes ratios
    // against that reconstruction instead of the true anchor.
    bool mirror_decoder_anchor = false;
};

/// Per-interval transmitted-bit bookkeeping (pre-padding payload bits).
class OverheadLedger {
public:
    void record(uint32_t bits);
    uint64_t total_bits() const { return total_; }
    size_t intervals() const { return count_; }
    double average_bits() const;
    const std::vector<uint32_t>& per_interval() const { return bits_; }

private:
    std::vector<uint32_t> bits_;
    uint64_t total_ = 0;
    size_t count_ = 0;
};

/// UE half of the two-timescale loop: a FULL frame at the start of each
/// large timescale (every T+1 intervals), RATIO frames in between.
class UeSide {
public:
    UeSide(const ProtocolConfig& cfg, NeuralModel& ae1, NeuralModel* ae2);

    FeedbackMessage step(const CMat& h_t);

    size_t t() const { return t_; }
    const OverheadLedger& ledger() const { return ledger_; }

private:
    ProtocolConfig cfg_;
    NeuralModel& ae1_;
    NeuralModel* ae2_;
    CMat anchor_;
    bool has_anchor_ = false;
    size_t t_ = 0;
    OverheadLedger ledger_;
};

/// BS half: reconstructs the anchor from FULL frames, applies reconstructed
/// ratios to it for RATIO frames.
class BsSide {
public:
    BsSide(const ProtocolConfig& cfg, NeuralModel& ae1, NeuralModel* ae2);

    CMat step(const FeedbackMessage& msg);

    size_t t() const { return t_; }
    const CMat& anchor() const { return anchor_hat_; }
    bool has_anchor() const { return has_anchor_; }

private:
    ProtocolConfig cfg_;
    NeuralModel& ae1_;
    NeuralModel* ae2_;
    CMat anchor_hat_;
    bool has_anchor_ = false;
    size_t t_ = 0;
};

/// Eq-style equivalent overhead: n_q * (n_s1 + T*n_s2) / (T+1) bits per
/// interval.
double equivalent_overhead(int n_q, size_t n_s1, size_t n_s2, size_t T);

struct Gammas {
    double gamma1;
    double gamma2;
};

/// gamma1 = n_s1 / (2 n_t n_ris), gamma2 = n_s2 / (2 n_ris).
Gammas compression_ratios(size_t n_s1, size_t n_s2, size_t n_t, size_t n_ris);

}  // namespace rcsf
