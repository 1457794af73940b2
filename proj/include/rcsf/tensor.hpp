#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcsf/errors.hpp"

namespace rcsf {

using Shape = std::vector<size_t>;

/// Dense real tensor, rank 1..4, row-major. Axis 0 is the batch axis for
/// batched data.
struct Tensor {
    std::vector<size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<size_t> s);

    size_t rank() const { return shape.size(); }
    size_t numel() const { return data.size(); }

    static size_t shape_numel(const std::vector<size_t>& s);

    /// Same data, new shape (entry counts must agree).
    Tensor reshaped(std::vector<size_t> new_shape) const;

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
    bool all_finite() const;
};

/// Prepend a batch axis of size 1.
Tensor to_batch1(const Tensor& sample);

/// Drop a leading batch axis of size 1.
Tensor squeeze0(const Tensor& batch1);

/// Stack same-shaped samples along a new leading batch axis.
Tensor stack_batch(std::span<const Tensor> samples);

/// Select rows (axis 0 slices) by index, in order.
Tensor gather_rows(const Tensor& x, std::span<const size_t> idx);

}  // namespace rcsf
