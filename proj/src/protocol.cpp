#include "rcsf/protocol.hpp"

#include "rcsf/binio.hpp"

namespace rcsf {

std::vector<uint8_t> serialize_frame(const FeedbackMessage& msg) {
    if (msg.payload.size() != (msg.payload_bits + 7) / 8) {
        throw ProtocolError("serialize_frame: payload length disagrees with header");
    }
    std::vector<uint8_t> out;
    out.reserve(9 + msg.payload.size());
    put_u8(out, static_cast<uint8_t>(msg.kind));
    put_u32(out, msg.t);
    put_u32(out, msg.payload_bits);
    out.insert(out.end(), msg.payload.begin(), msg.payload.end());
    return out;
}

FeedbackMessage parse_frame(std::span<const uint8_t> bytes) {
    ByteReader in(bytes);
    FeedbackMessage msg;
    uint8_t kind = in.u8();
    if (kind != static_cast<uint8_t>(FrameKind::full) &&
        kind != static_cast<uint8_t>(FrameKind::ratio)) {
        throw DecodeError("parse_frame: unknown frame kind " + std::to_string(kind));
    }
    msg.kind = static_cast<FrameKind>(kind);
    msg.t = in.u32();
    msg.payload_bits = in.u32();
    size_t want = (static_cast<size_t>(msg.payload_bits) + 7) / 8;
    if (in.remaining() != want) {
        throw DecodeError("parse_frame: payload length disagrees with header");
    }
    auto body = in.bytes(want);
    msg.payload.assign(body.begin(), body.end());
    return msg;
}

std::vector<uint8_t> encode_payload(std::span<const double> values,
                                    const QuantSpec& q) {
    if (q.raw64) {
        std::vector<uint8_t> out;
        out.reserve(values.size() * 8);
        for (double v : values) put_f64(out, v);
        return out;
    }
    return pack_bits(quantize(values, q.n_q), q.n_q);
}

std::vector<double> decode_payload(std::span<const uint8_t> payload,
                                   uint32_t payload_bits, const QuantSpec& q) {
    if (q.raw64) {
        if (payload_bits % 64 != 0) {
            throw DecodeError("decode_payload: raw payload bits not a multiple of 64");
        }
        size_t count = payload_bits / 64;
        if (payload.size() != count * 8) {
            throw DecodeError("decode_payload: raw payload truncated");
        }
        ByteReader in(payload);
        std::vector<double> out(count);
        for (double& v : out) v = in.f64();
        return out;
    }
    if (payload_bits % static_cast<uint32_t>(q.n_q) != 0) {
        throw DecodeError("decode_payload: bits not a multiple of n_q");
    }
    size_t count = payload_bits / static_cast<uint32_t>(q.n_q);
    return dequantize(unpack_bits(payload, q.n_q, count), q.n_q);
}

void OverheadLedger::record(uint32_t bits) {
    bits_.push_back(bits);
    total_ += bits;
    count_ += 1;
}

double OverheadLedger::average_bits() const {
    if (count_ == 0) throw StateError("OverheadLedger: no intervals recorded");
    return static_cast<double>(total_) / static_cast<double>(count_);
}

namespace {

uint32_t payload_bit_count(size_t values, const QuantSpec& q) {
    return static_cast<uint32_t>(values * (q.raw64 ? 64 : q.n_q));
}

}  // namespace

UeSide::UeSide(const ProtocolConfig& cfg, NeuralModel& ae1, NeuralModel* ae2)
    : cfg_(cfg), ae1_(ae1), ae2_(ae2) {
    if (cfg_.intervals > 0 && ae2_ == nullptr) {
        throw ProtocolError("UeSide: ratio intervals configured without AE2");
    }
}

FeedbackMessage UeSide::step(const CMat& h_t) {
    if (h_t.rows != cfg_.n_ris || h_t.cols != cfg_.n_t) {
        throw DimensionError("UeSide: channel shape does not match config");
    }
    const size_t phase = t_ % (cfg_.intervals + 1);
    FeedbackMessage msg;
    msg.t = static_cast<uint32_t>(t_);

    if (phase == 0) {
        Tensor x = channel_to_tensor(h_t, cfg_.chan_scale);
        Tensor code = squeeze0(ae1_.encode(to_batch1(x)));
        msg.kind = FrameKind::full;
        msg.payload = encode_payload(code.data, cfg_.quant);
        msg.payload_bits = payload_bit_count(code.numel(), cfg_.quant);

        if (cfg_.mirror_decoder_anchor) {
            // Reproduce the BS-side reconstruction and anchor on it.
            std::vector<double> values =
                decode_payload(msg.payload, msg.payload_bits, cfg_.quant);
            Tensor code_hat(Shape{1, values.size()});
            code_hat.data = values;
            Tensor out = squeeze0(ae1_.decode(code_hat));
            anchor_ = tensor_to_channel(
                out.reshaped({2, cfg_.n_ris, cfg_.n_t}), cfg_.chan_scale);
        } else {
            anchor_ = h_t;
        }
        has_anchor_ = true;
    } else {
        if (!has_anchor_) {
            throw StateError("UeSide: ratio interval without a stored anchor");
        }
        RatioVector p = extract_ratio(anchor_, h_t);
        Tensor x = ratio_to_tensor(p, cfg_.ratio_scale);
        Tensor code = squeeze0(ae2_->encode(to_batch1(x)));
        msg.kind = FrameKind::ratio;
        msg.payload = encode_payload(code.data, cfg_.quant);
        msg.payload_bits = payload_bit_count(code.numel(), cfg_.quant);
    }

    ledger_.record(msg.payload_bits);
    t_ += 1;
    return msg;
}

BsSide::BsSide(const ProtocolConfig& cfg, NeuralModel& ae1, NeuralModel* ae2)
    : cfg_(cfg), ae1_(ae1), ae2_(ae2) {
    if (cfg_.intervals > 0 && ae2_ == nullptr) {
        throw ProtocolError("BsSide: ratio intervals configured without AE2");
    }
}

CMat BsSide::step(const FeedbackMessage& msg) {
    if (msg.t != t_) {
        throw ProtocolError("BsSide: frame t=" + std::to_string(msg.t) +
                            " but expected t=" + std::to_string(t_));
    }
    const size_t phase = t_ % (cfg_.intervals + 1);
    const FrameKind expected = phase == 0 ? FrameKind::full : FrameKind::ratio;
    if (msg.kind != expected) {
        throw ProtocolError("BsSide: unexpected frame kind at t=" +
                            std::to_string(t_));
    }
    if (msg.kind == FrameKind::ratio && !has_anchor_) {
        throw ProtocolError("BsSide: RATIO frame before any FULL frame");
    }

    std::vector<double> values =
        decode_payload(msg.payload, msg.payload_bits, cfg_.quant);
    Tensor code(Shape{1, values.size()});
    code.data = std::move(values);

    CMat h_hat;
    if (msg.kind == FrameKind::full) {
        Tensor out = squeeze0(ae1_.decode(code));
        if (out.numel() != 2 * cfg_.n_ris * cfg_.n_t) {
            throw DecodeError("BsSide: decoded FULL size mismatch");
        }
        h_hat = tensor_to_channel(out.reshaped({2, cfg_.n_ris, cfg_.n_t}),
                                  cfg_.chan_scale);
        anchor_hat_ = h_hat;
        has_anchor_ = true;
    } else {
        Tensor out = squeeze0(ae2_->decode(code));
        if (out.numel() != 2 * cfg_.n_ris) {
            throw DecodeError("BsSide: decoded RATIO size mismatch");
        }
        RatioVector p_hat =
            tensor_to_ratio(out.reshaped({2 * cfg_.n_ris}), cfg_.ratio_scale);
        h_hat = reconstruct_from_ratio(anchor_hat_, p_hat);
    }
    t_ += 1;
    return h_hat;
}

double equivalent_overhead(int n_q, size_t n_s1, size_t n_s2, size_t T) {
    if (n_q < 0) throw DomainError("equivalent_overhead: n_q must be >= 0");
    return static_cast<double>(n_q) *
           (static_cast<double>(n_s1) +
            static_cast<double>(T) * static_cast<double>(n_s2)) /
           static_cast<double>(T + 1);
}

Gammas compression_ratios(size_t n_s1, size_t n_s2, size_t n_t, size_t n_ris) {
    if (n_t == 0 || n_ris == 0) {
        throw DomainError("compression_ratios: dimensions must be positive");
    }
    return Gammas{
        static_cast<double>(n_s1) / (2.0 * static_cast<double>(n_t * n_ris)),
        static_cast<double>(n_s2) / (2.0 * static_cast<double>(n_ris)),
    };
}

}  // namespace rcsf
