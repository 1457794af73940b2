#include "rcsf/model.hpp"

#include "rcsf/binio.hpp"

namespace rcsf {

namespace {
constexpr char kMagic[4] = {'R', 'C', 'N', 'N'};
}

Tensor NeuralModel::forward(const Tensor& in, Mode mode) {
    return forward_range(in, 0, layers.size(), mode);
}

Tensor NeuralModel::forward_range(const Tensor& in, size_t first, size_t last,
                                  Mode mode) {
    if (first > last || last > layers.size()) {
        throw StateError("forward_range: bad layer range");
    }
    Tensor x = in;
    for (size_t i = first; i < last; ++i) {
        x = layers[i]->forward(x, mode);
    }
    if (mode == Mode::train) {
        forward_first_ = first;
        forward_last_ = last;
        has_forward_cache_ = true;
    }
    return x;
}

Tensor NeuralModel::encode(const Tensor& in) {
    return forward_range(in, 0, encoder_end, Mode::eval);
}

Tensor NeuralModel::decode(const Tensor& in) {
    return forward_range(in, encoder_end, layers.size(), Mode::eval);
}

void NeuralModel::backward(const Tensor& loss_grad) {
    if (!has_forward_cache_) {
        throw StateError("backward: no preceding train-mode forward");
    }
    Tensor g = loss_grad;
    for (size_t i = forward_last_; i-- > forward_first_;) {
        g = layers[i]->backward(g);
    }
    has_forward_cache_ = false;
}

void NeuralModel::zero_grad() {
    for (Param* p : parameters()) {
        std::fill(p->grad.begin(), p->grad.end(), 0.0);
    }
}

std::vector<Param*> NeuralModel::parameters() {
    std::vector<Param*> ps;
    for (const LayerPtr& l : layers) {
        auto sub = l->params();
        ps.insert(ps.end(), sub.begin(), sub.end());
    }
    return ps;
}

std::vector<Param*> NeuralModel::state_tensors() {
    std::vector<Param*> ps;
    for (const LayerPtr& l : layers) {
        auto sub = l->state();
        ps.insert(ps.end(), sub.begin(), sub.end());
    }
    return ps;
}

void NeuralModel::init_params(Rng& rng) {
    for (const LayerPtr& l : layers) l->init(rng);
}

Shape NeuralModel::output_shape() const {
    Shape s{1};
    s.insert(s.end(), input_shape.begin(), input_shape.end());
    for (const LayerPtr& l : layers) s = l->out_shape(s);
    return Shape(s.begin() + 1, s.end());
}

size_t NeuralModel::codeword_length() const {
    Shape s{1};
    s.insert(s.end(), input_shape.begin(), input_shape.end());
    for (size_t i = 0; i < encoder_end; ++i) s = layers[i]->out_shape(s);
    return Tensor::shape_numel(s);
}

std::vector<double> NeuralModel::snapshot() const {
    std::vector<double> snap;
    auto* self = const_cast<NeuralModel*>(this);
    for (Param* p : self->parameters()) {
        snap.insert(snap.end(), p->value.begin(), p->value.end());
    }
    for (Param* p : self->state_tensors()) {
        snap.insert(snap.end(), p->value.begin(), p->value.end());
    }
    return snap;
}

void NeuralModel::restore(std::span<const double> snap) {
    size_t pos = 0;
    auto copy_into = [&](Param* p) {
        if (pos + p->size() > snap.size()) {
            throw DimensionError("restore: snapshot too short");
        }
        std::copy(snap.begin() + pos, snap.begin() + pos + p->size(),
                  p->value.begin());
        pos += p->size();
    };
    for (Param* p : parameters()) copy_into(p);
    for (Param* p : state_tensors()) copy_into(p);
    if (pos != snap.size()) {
        throw DimensionError("restore: snapshot size mismatch");
    }
}

uint64_t count_flops(const NeuralModel& model) {
    uint64_t total = 0;
    Shape s{1};
    s.insert(s.end(), model.input_shape.begin(), model.input_shape.end());
    for (const LayerPtr& l : model.layers) {
        total += l->flops(s);
        s = l->out_shape(s);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Builders

namespace {

std::vector<LayerPtr> refine_block_branch(size_t io_channels,
                                          const Ae1Config& cfg) {
    // Three 3x3 convs, each with batch norm; LeakyReLU on all but the last.
    std::vector<LayerPtr> branch;
    size_t c1 = cfg.refine_channels[0], c2 = cfg.refine_channels[1];
    branch.push_back(std::make_unique<Conv2dLayer>(io_channels, c1, 3, 1, 1));
    branch.push_back(std::make_unique<BatchNormLayer>(c1));
    branch.push_back(std::make_unique<LeakyReluLayer>(cfg.leaky_slope));
    branch.push_back(std::make_unique<Conv2dLayer>(c1, c2, 3, 1, 1));
    branch.push_back(std::make_unique<BatchNormLayer>(c2));
    branch.push_back(std::make_unique<LeakyReluLayer>(cfg.leaky_slope));
    branch.push_back(std::make_unique<Conv2dLayer>(c2, io_channels, 3, 1, 1));
    branch.push_back(std::make_unique<BatchNormLayer>(io_channels));
    return branch;
}

std::vector<LayerPtr> dense_block_branch(size_t width, double slope) {
    std::vector<LayerPtr> branch;
    branch.push_back(std::make_unique<DenseLayer>(width, width));
    branch.push_back(std::make_unique<LeakyReluLayer>(slope));
    branch.push_back(std::make_unique<DenseLayer>(width, width));
    return branch;
}

}  // namespace

NeuralModel build_ae1(size_t n_ris, size_t n_t, size_t n_s1,
                      const Ae1Config& cfg) {
    if (n_ris < 1 || n_t < 1) throw DomainError("build_ae1: empty geometry");
    const size_t flat = 2 * n_ris * n_t;
    if (n_s1 < 1 || n_s1 > flat) {
        throw DomainError("build_ae1: n_s1 must lie in [1, 2*n_ris*n_t]");
    }

    NeuralModel m;
    m.input_shape = {2, n_ris, n_t};

    // Encoder
    m.layers.push_back(std::make_unique<Conv2dLayer>(2, cfg.conv_filters, 3, 1, 1));
    m.layers.push_back(std::make_unique<BatchNormLayer>(cfg.conv_filters));
    m.layers.push_back(std::make_unique<LeakyReluLayer>(cfg.leaky_slope));
    m.layers.push_back(
        std::make_unique<ReshapeLayer>(Shape{cfg.conv_filters * n_ris * n_t}));
    m.layers.push_back(
        std::make_unique<DenseLayer>(cfg.conv_filters * n_ris * n_t, n_s1));
    m.layers.push_back(std::make_unique<SigmoidLayer>());
    m.encoder_end = m.layers.size();

    // Decoder
    m.layers.push_back(std::make_unique<DenseLayer>(n_s1, flat));
    m.layers.push_back(std::make_unique<ReshapeLayer>(Shape{2, n_ris, n_t}));
    m.layers.push_back(std::make_unique<ReZeroBlock>(refine_block_branch(2, cfg)));
    m.layers.push_back(std::make_unique<ReZeroBlock>(refine_block_branch(2, cfg)));
    m.layers.push_back(std::make_unique<TanhLayer>());
    return m;
}

NeuralModel build_ae2(size_t n_ris, size_t n_s2, const Ae2Config& cfg) {
    if (n_ris < 1) throw DomainError("build_ae2: empty geometry");
    const size_t flat = 2 * n_ris;
    if (n_s2 < 1 || n_s2 > flat) {
        throw DomainError("build_ae2: n_s2 must lie in [1, 2*n_ris]");
    }
    const size_t hidden = cfg.hidden ? cfg.hidden : 4 * n_s2;

    NeuralModel m;
    m.input_shape = {flat};

    // Encoder
    m.layers.push_back(std::make_unique<DenseLayer>(flat, hidden));
    m.layers.push_back(std::make_unique<LeakyReluLayer>(cfg.leaky_slope));
    m.layers.push_back(std::make_unique<DenseLayer>(hidden, n_s2));
    m.layers.push_back(std::make_unique<SigmoidLayer>());
    m.encoder_end = m.layers.size();

    // Decoder
    m.layers.push_back(std::make_unique<DenseLayer>(n_s2, hidden));
    m.layers.push_back(std::make_unique<LeakyReluLayer>(cfg.leaky_slope));
    m.layers.push_back(std::make_unique<DenseLayer>(hidden, flat));
    m.layers.push_back(
        std::make_unique<ReZeroBlock>(dense_block_branch(flat, cfg.leaky_slope)));
    m.layers.push_back(
        std::make_unique<ReZeroBlock>(dense_block_branch(flat, cfg.leaky_slope)));
    m.layers.push_back(std::make_unique<TanhLayer>());
    return m;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void write_layer_manifest(std::vector<uint8_t>& out, const Layer& layer) {
    put_u32(out, static_cast<uint32_t>(layer.kind()));
    switch (layer.kind()) {
        case LayerKind::dense: {
            const auto& l = static_cast<const DenseLayer&>(layer);
            put_u64(out, l.in_features());
            put_u64(out, l.out_features());
            break;
        }
        case LayerKind::conv2d: {
            const auto& l = static_cast<const Conv2dLayer&>(layer);
            put_u64(out, l.in_channels());
            put_u64(out, l.out_channels());
            put_u64(out, l.kernel());
            put_u64(out, l.stride());
            put_u64(out, l.pad());
            break;
        }
        case LayerKind::batch_norm: {
            const auto& l = static_cast<const BatchNormLayer&>(layer);
            put_u64(out, l.channels());
            put_f64(out, l.eps());
            put_f64(out, l.momentum());
            break;
        }
        case LayerKind::leaky_relu: {
            const auto& l = static_cast<const LeakyReluLayer&>(layer);
            put_f64(out, l.slope());
            break;
        }
        case LayerKind::tanh_out:
        case LayerKind::sigmoid:
            break;
        case LayerKind::reshape: {
            const auto& l = static_cast<const ReshapeLayer&>(layer);
            put_u32(out, static_cast<uint32_t>(l.sample_shape().size()));
            for (size_t d : l.sample_shape()) put_u64(out, d);
            break;
        }
        case LayerKind::rezero_block: {
            const auto& l = static_cast<const ReZeroBlock&>(layer);
            put_u32(out, static_cast<uint32_t>(l.branch().size()));
            for (const LayerPtr& sub : l.branch()) {
                write_layer_manifest(out, *sub);
            }
            break;
        }
    }
}

LayerPtr read_layer_manifest(ByteReader& in) {
    auto kind = static_cast<LayerKind>(in.u32());
    switch (kind) {
        case LayerKind::dense: {
            size_t i = in.u64(), o = in.u64();
            return std::make_unique<DenseLayer>(i, o);
        }
        case LayerKind::conv2d: {
            size_t ci = in.u64(), co = in.u64(), k = in.u64(), s = in.u64(),
                   p = in.u64();
            return std::make_unique<Conv2dLayer>(ci, co, k, s, p);
        }
        case LayerKind::batch_norm: {
            size_t c = in.u64();
            double eps = in.f64(), mom = in.f64();
            return std::make_unique<BatchNormLayer>(c, eps, mom);
        }
        case LayerKind::leaky_relu:
            return std::make_unique<LeakyReluLayer>(in.f64());
        case LayerKind::tanh_out:
            return std::make_unique<TanhLayer>();
        case LayerKind::sigmoid:
            return std::make_unique<SigmoidLayer>();
        case LayerKind::reshape: {
            uint32_t rank = in.u32();
            Shape s(rank);
            for (auto& d : s) d = in.u64();
            return std::make_unique<ReshapeLayer>(std::move(s));
        }
        case LayerKind::rezero_block: {
            uint32_t n = in.u32();
            std::vector<LayerPtr> branch;
            branch.reserve(n);
            for (uint32_t i = 0; i < n; ++i) branch.push_back(read_layer_manifest(in));
            return std::make_unique<ReZeroBlock>(std::move(branch));
        }
    }
    throw DecodeError("unknown layer kind in model manifest");
}

}  // namespace

std::vector<uint8_t> NeuralModel::serialize() const {
    std::vector<uint8_t> out;
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u32(out, kModelFormatVersion);
    put_u32(out, static_cast<uint32_t>(encoder_end));
    put_u32(out, static_cast<uint32_t>(input_shape.size()));
    for (size_t d : input_shape) put_u64(out, d);
    put_u32(out, static_cast<uint32_t>(layers.size()));
    for (const LayerPtr& l : layers) write_layer_manifest(out, *l);

    std::vector<double> snap = snapshot();
    put_u64(out, snap.size());
    for (double v : snap) put_f64(out, v);
    return out;
}

NeuralModel NeuralModel::deserialize(std::span<const uint8_t> bytes) {
    ByteReader in(bytes);
    auto magic = in.bytes(4);
    if (!std::equal(magic.begin(), magic.end(), kMagic)) {
        throw DecodeError("not a model file (bad magic)");
    }
    uint32_t version = in.u32();
    if (version != kModelFormatVersion) {
        throw DecodeError("unsupported model version " + std::to_string(version));
    }
    NeuralModel m;
    m.encoder_end = in.u32();
    uint32_t rank = in.u32();
    m.input_shape.resize(rank);
    for (auto& d : m.input_shape) d = in.u64();
    uint32_t n_layers = in.u32();
    m.layers.reserve(n_layers);
    for (uint32_t i = 0; i < n_layers; ++i) {
        m.layers.push_back(read_layer_manifest(in));
    }
    if (m.encoder_end > m.layers.size()) {
        throw DecodeError("model encoder boundary out of range");
    }
    uint64_t n = in.u64();
    std::vector<double> snap(n);
    for (double& v : snap) v = in.f64();
    if (in.remaining() != 0) {
        throw DecodeError("trailing bytes after model parameters");
    }
    m.restore(snap);
    return m;
}

void NeuralModel::save(const std::string& path) const {
    write_file_bytes(path, serialize());
}

NeuralModel NeuralModel::load(const std::string& path) {
    try {
        return deserialize(read_file_bytes(path));
    } catch (const DecodeError& e) {
        throw DecodeError(std::string(e.what()) + " [" + path + "]");
    }
}

}  // namespace rcsf
