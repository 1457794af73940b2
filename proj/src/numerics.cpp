#include "rcsf/numerics.hpp"

#include <cmath>

namespace rcsf {

cplx hermitian_inner(std::span<const cplx> x, std::span<const cplx> y) {
    if (x.size() != y.size()) {
        throw DimensionError("hermitian_inner: length mismatch " +
                             std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()));
    }
    cplx acc{0.0, 0.0};
    for (size_t i = 0; i < x.size(); ++i) {
        acc += std::conj(x[i]) * y[i];
    }
    return acc;
}

double norm_sq(std::span<const cplx> x) {
    double acc = 0.0;
    for (const cplx& v : x) acc += std::norm(v);
    return acc;
}

cplx frob_inner(const CMat& a, const CMat& b) {
    if (!a.same_shape(b)) {
        throw DimensionError("frob_inner: shape mismatch");
    }
    return hermitian_inner(a.data, b.data);
}

double frob_norm_sq(const CMat& m) { return norm_sq(m.data); }

bool all_finite(std::span<const cplx> x) {
    for (const cplx& v : x) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

bool all_finite(const CMat& m) { return all_finite(std::span<const cplx>(m.data)); }

cplx received_signal(const CVec& a, const CVec& phi, const CMat& B,
                     const CVec& v, cplx x, cplx z, SignalForm form) {
    if (a.size() != phi.size() || a.size() != B.rows) {
        throw DimensionError("received_signal: a/phi length must equal B.rows");
    }
    if (v.size() != B.cols) {
        throw DimensionError("received_signal: v length must equal B.cols");
    }

    cplx s{0.0, 0.0};
    if (form == SignalForm::direct) {
        // a^T (diag(phi) B) v
        for (size_t i = 0; i < B.rows; ++i) {
            cplx bi_v{0.0, 0.0};
            for (size_t k = 0; k < B.cols; ++k) {
                bi_v += (phi[i] * B(i, k)) * v[k];
            }
            s += a[i] * bi_v;
        }
    } else {
        // phi^T (diag(a) B) v
        for (size_t i = 0; i < B.rows; ++i) {
            cplx bi_v{0.0, 0.0};
            for (size_t k = 0; k < B.cols; ++k) {
                bi_v += (a[i] * B(i, k)) * v[k];
            }
            s += phi[i] * bi_v;
        }
    }
    return s * x + z;
}

}  // namespace rcsf
