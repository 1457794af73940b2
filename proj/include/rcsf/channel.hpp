#pragma once

#include <vector>

#include "rcsf/numerics.hpp"
#include "rcsf/rng.hpp"

namespace rcsf {

/// BS ULA + RIS UPA dimensions. Spacing is in wavelengths.
struct ArrayGeometry {
    size_t n_t = 8;   // BS antennas (ULA)
    size_t n1 = 8;    // RIS rows
    size_t n2 = 8;    // RIS columns
    double spacing = 0.5;

    size_t n_ris() const { return n1 * n2; }
    void validate() const;
};

/// Saleh-Valenzuela BS-RIS link with first-order AR drift across large
/// timescales. Path gains are unit-variance circular Gaussian; BS departure
/// sine is uniform on [-1,1]; RIS arrival angles are uniform over the front
/// hemisphere.
struct BsRisParams {
    size_t path_count = 8;  // L_B
    double rho = 0.9;       // AR coefficient

    void validate() const;
};

struct RisUeParams {
    size_t path_count = 4;                          // L_U
    double speed_mps = 1.0;                         // UE speed
    double wavelength_m = 299792458.0 / 2.655e9;    // carrier 2.655 GHz
    double dt_s = 0.005;                            // feedback interval

    void validate() const;
};

struct PathComponent {
    cplx gain;
    double sin_az_cos_el = 0.0;
    double sin_el = 0.0;
    double doppler_hz = 0.0;
};

/// Frozen multipath description of the RIS-UE link for one episode; the
/// channel at interval t follows by rotating each path's phase.
struct RisUePaths {
    std::vector<PathComponent> paths;
    double dt_s = 0.005;
    size_t n1 = 0;
    size_t n2 = 0;
    double spacing = 0.5;
};

/// (1/sqrt(n)) [ e^{j 2 pi spacing k sin_angle} ]_{k=0..n-1}; unit norm.
CVec ula_steering(size_t n, double sin_angle, double spacing = 0.5);

/// Kronecker product of the per-axis ULA responses: axis 1 (length n1)
/// responds to sin(az)cos(el), axis 2 (length n2) to sin(el). Unit norm,
/// length n1*n2.
CVec upa_steering(size_t n1, size_t n2, double sin_az_cos_el, double sin_el,
                  double spacing = 0.5);

/// One Saleh-Venzuela draw of the BS-RIS channel, shape n_ris x n_t, with
/// E||B||_F^2 = n_t * n_ris.
CMat gen_bs_ris(const ArrayGeometry& geom, const BsRisParams& params, Rng& rng);

/// rho * B_prev + sqrt(1 - rho^2) * E with E a fresh gen_bs_ris draw, so the
/// second moment is preserved. Applied once per large-timescale boundary.
CMat evolve_bs_ris(const CMat& prev, const ArrayGeometry& geom,
                   const BsRisParams& params, Rng& rng);

RisUePaths gen_ris_ue_paths(const ArrayGeometry& geom, const RisUeParams& params,
                            Rng& rng);

/// a(t) = sqrt(n_ris / L_U) * sum_p g_p e^{j 2 pi f_p t dt} u(angles_p).
/// Deterministic in (paths, t); E||a||^2 = n_ris.
CVec ris_ue_at(const RisUePaths& paths, size_t t);

/// Cascaded channel H = diag(a) B; row i equals a_i * b_i.
CMat cascade(const CVec& a, const CMat& B);

}  // namespace rcsf
