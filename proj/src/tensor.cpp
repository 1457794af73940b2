#include "rcsf/tensor.hpp"

#include <cmath>

namespace rcsf {

Tensor::Tensor(std::vector<size_t> s) : shape(std::move(s)) {
    if (shape.empty() || shape.size() > 4) {
        throw DimensionError("Tensor: rank must be 1..4");
    }
    data.assign(shape_numel(shape), 0.0);
}

size_t Tensor::shape_numel(const std::vector<size_t>& s) {
    size_t n = 1;
    for (size_t d : s) n *= d;
    return n;
}

Tensor Tensor::reshaped(std::vector<size_t> new_shape) const {
    if (shape_numel(new_shape) != numel()) {
        throw DimensionError("reshape: entry count mismatch");
    }
    Tensor out;
    out.shape = std::move(new_shape);
    out.data = data;
    return out;
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor to_batch1(const Tensor& sample) {
    std::vector<size_t> s;
    s.reserve(sample.rank() + 1);
    s.push_back(1);
    s.insert(s.end(), sample.shape.begin(), sample.shape.end());
    return sample.reshaped(std::move(s));
}

Tensor squeeze0(const Tensor& batch1) {
    if (batch1.rank() < 2 || batch1.shape[0] != 1) {
        throw DimensionError("squeeze0: leading axis must have size 1");
    }
    return batch1.reshaped(
        std::vector<size_t>(batch1.shape.begin() + 1, batch1.shape.end()));
}

Tensor stack_batch(std::span<const Tensor> samples) {
    if (samples.empty()) throw DimensionError("stack_batch: no samples");
    std::vector<size_t> s;
    s.push_back(samples.size());
    s.insert(s.end(), samples[0].shape.begin(), samples[0].shape.end());
    Tensor out(std::move(s));
    size_t per = samples[0].numel();
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!samples[i].same_shape(samples[0])) {
            throw DimensionError("stack_batch: ragged sample shapes");
        }
        std::copy(samples[i].data.begin(), samples[i].data.end(),
                  out.data.begin() + i * per);
    }
    return out;
}

Tensor gather_rows(const Tensor& x, std::span<const size_t> idx) {
    if (x.rank() < 2) throw DimensionError("gather_rows: need a batch axis");
    size_t per = x.numel() / x.shape[0];
    std::vector<size_t> s = x.shape;
    s[0] = idx.size();
    Tensor out(std::move(s));
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= x.shape[0]) throw DimensionError("gather_rows: index out of range");
        std::copy(x.data.begin() + idx[i] * per, x.data.begin() + (idx[i] + 1) * per,
                  out.data.begin() + i * per);
    }
    return out;
}

}  // namespace rcsf
