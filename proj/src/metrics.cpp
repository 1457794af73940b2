#include "rcsf/metrics.hpp"

#include <cmath>
#include <limits>

#include "rcsf/kvfile.hpp"

namespace rcsf {

Nmse nmse(const CMat& h, const CMat& h_hat) {
    if (!h.same_shape(h_hat)) throw DimensionError("nmse: shape mismatch");
    double ref = frob_norm_sq(h);
    if (!(ref > 0.0)) throw DomainError("nmse: zero-norm reference channel");
    double err = 0.0;
    for (size_t i = 0; i < h.data.size(); ++i) {
        err += std::norm(h.data[i] - h_hat.data[i]);
    }
    Nmse out;
    out.linear = err / ref;
    out.db = out.linear > 0.0 ? 10.0 * std::log10(out.linear)
                              : -std::numeric_limits<double>::infinity();
    return out;
}

std::string nmse_db_csv(double linear) {
    if (linear < 1e-18) return "<-180";
    return format_f64(10.0 * std::log10(linear));
}

}  // namespace rcsf
