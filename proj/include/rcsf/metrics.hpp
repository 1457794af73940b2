#pragma once

#include "rcsf/numerics.hpp"

namespace rcsf {

struct Nmse {
    double linear = 0.0;
    double db = 0.0;  // -inf when linear == 0
};

/// ||H - H_hat||_F^2 / ||H||_F^2 and its dB value. Throws DomainError when
/// the reference has zero norm.
Nmse nmse(const CMat& h, const CMat& h_hat);

/// CSV rendering of an NMSE dB value; linear values below 1e-18 print as
/// the sentinel "<-180".
std::string nmse_db_csv(double linear);

}  // namespace rcsf
