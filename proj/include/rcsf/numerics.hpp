#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rcsf/errors.hpp"

namespace rcsf {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Dense complex matrix, row-major.
struct CMat {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<cplx> data;

    CMat() = default;
    CMat(size_t r, size_t c) : rows(r), cols(c), data(r * c) {}

    cplx& operator()(size_t i, size_t k) { return data[i * cols + k]; }
    const cplx& operator()(size_t i, size_t k) const { return data[i * cols + k]; }

    std::span<cplx> row(size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const cplx> row(size_t i) const {
        return {data.data() + i * cols, cols};
    }

    size_t size() const { return rows * cols; }
    bool same_shape(const CMat& o) const {
        return rows == o.rows && cols == o.cols;
    }
};

/// sum_i conj(x_i) * y_i
cplx hermitian_inner(std::span<const cplx> x, std::span<const cplx> y);

/// Squared Euclidean norm (real, non-negative).
double norm_sq(std::span<const cplx> x);

/// Frobenius inner product sum_ik conj(a_ik) * b_ik.
cplx frob_inner(const CMat& a, const CMat& b);
double frob_norm_sq(const CMat& m);

bool all_finite(std::span<const cplx> x);
bool all_finite(const CMat& m);

enum class SignalForm { direct, reformulated };

/// Received scalar at one interval. `direct` evaluates
/// a^T diag(phi) B v x + z; `reformulated` evaluates
/// phi^T diag(a) B v x + z. The two are algebraically identical; both code
/// paths are kept verbatim so the identity can be checked numerically.
cplx received_signal(const CVec& a, const CVec& phi, const CMat& B,
                     const CVec& v, cplx x, cplx z, SignalForm form);

}  // namespace rcsf
