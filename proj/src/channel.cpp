#include "rcsf/channel.hpp"

#include <cmath>
#include <numbers>

namespace rcsf {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
}  // namespace

void ArrayGeometry::validate() const {
    if (n_t < 1 || n1 < 1 || n2 < 1) {
        throw DomainError("ArrayGeometry: antenna counts must be >= 1");
    }
    if (!(spacing > 0.0)) {
        throw DomainError("ArrayGeometry: spacing must be > 0");
    }
}

void BsRisParams::validate() const {
    if (path_count < 1) throw DomainError("BsRisParams: path_count must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw DomainError("BsRisParams: rho must lie in [0, 1]");
    }
}

void RisUeParams::validate() const {
    if (path_count < 1) throw DomainError("RisUeParams: path_count must be >= 1");
    if (!(speed_mps >= 0.0)) throw DomainError("RisUeParams: speed must be >= 0");
    if (!(wavelength_m > 0.0)) throw DomainError("RisUeParams: wavelength must be > 0");
    if (!(dt_s > 0.0)) throw DomainError("RisUeParams: dt must be > 0");
}

CVec ula_steering(size_t n, double sin_angle, double spacing) {
    if (n < 1) throw DomainError("ula_steering: n must be >= 1");
    if (!(sin_angle >= -1.0 && sin_angle <= 1.0)) {
        throw DomainError("ula_steering: |sin_angle| must be <= 1");
    }
    CVec v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double step = 2.0 * kPi * spacing * sin_angle;
    for (size_t k = 0; k < n; ++k) {
        double phase = step * static_cast<double>(k);
        v[k] = cplx{scale * std::cos(phase), scale * std::sin(phase)};
    }
    return v;
}

CVec upa_steering(size_t n1, size_t n2, double sin_az_cos_el, double sin_el,
                  double spacing) {
    CVec u1 = ula_steering(n1, sin_az_cos_el, spacing);
    CVec u2 = ula_steering(n2, sin_el, spacing);
    CVec out(n1 * n2);
    for (size_t i = 0; i < n1; ++i) {
        for (size_t k = 0; k < n2; ++k) {
            out[i * n2 + k] = u1[i] * u2[k];
        }
    }
    return out;
}

CMat gen_bs_ris(const ArrayGeometry& geom, const BsRisParams& params, Rng& rng) {
    geom.validate();
    params.validate();

    const size_t n_ris = geom.n_ris();
    const size_t n_t = geom.n_t;
    const double scale = std::sqrt(static_cast<double>(n_t * n_ris) /
                                   static_cast<double>(params.path_count));

    CMat b(n_ris, n_t);
    for (size_t l = 0; l < params.path_count; ++l) {
        cplx alpha = rng.cnormal();
        double bs_sin = rng.uniform(-1.0, 1.0);
        double az = rng.uniform(-kHalfPi, kHalfPi);
        double el = rng.uniform(-kHalfPi, kHalfPi);

        CVec a_ris = upa_steering(geom.n1, geom.n2, std::sin(az) * std::cos(el),
                                  std::sin(el), geom.spacing);
        CVec a_bs = ula_steering(n_t, bs_sin, geom.spacing);

        cplx g = scale * alpha;
        for (size_t i = 0; i < n_ris; ++i) {
            cplx gi = g * a_ris[i];
            for (size_t k = 0; k < n_t; ++k) {
                b(i, k) += gi * std::conj(a_bs[k]);
            }
        }
    }
    return b;
}

CMat evolve_bs_ris(const CMat& prev, const ArrayGeometry& geom,
                   const BsRisParams& params, Rng& rng) {
    params.validate();
    if (prev.rows != geom.n_ris() || prev.cols != geom.n_t) {
        throw DimensionError("evolve_bs_ris: prev shape does not match geometry");
    }
    CMat innovation = gen_bs_ris(geom, params, rng);
    const double rho = params.rho;
    const double w = std::sqrt(1.0 - rho * rho);
    CMat next(prev.rows, prev.cols);
    for (size_t i = 0; i < prev.data.size(); ++i) {
        next.data[i] = rho * prev.data[i] + w * innovation.data[i];
    }
    return next;
}

RisUePaths gen_ris_ue_paths(const ArrayGeometry& geom, const RisUeParams& params,
                            Rng& rng) {
    geom.validate();
    params.validate();

    RisUePaths out;
    out.dt_s = params.dt_s;
    out.n1 = geom.n1;
    out.n2 = geom.n2;
    out.spacing = geom.spacing;
    out.paths.resize(params.path_count);

    const double max_doppler = params.speed_mps / params.wavelength_m;
    for (PathComponent& p : out.paths) {
        p.gain = rng.cnormal();
        double az = rng.uniform(-kHalfPi, kHalfPi);
        double el = rng.uniform(-kHalfPi, kHalfPi);
        p.sin_az_cos_el = std::sin(az) * std::cos(el);
        p.sin_el = std::sin(el);
        double travel = rng.uniform(0.0, 2.0 * kPi);
        p.doppler_hz = max_doppler * std::cos(travel);
    }
    return out;
}

CVec ris_ue_at(const RisUePaths& paths, size_t t) {
    const size_t n_ris = paths.n1 * paths.n2;
    const double l_u = static_cast<double>(paths.paths.size());
    const double scale = std::sqrt(static_cast<double>(n_ris) / l_u);

    CVec a(n_ris, cplx{0.0, 0.0});
    const double time_s = static_cast<double>(t) * paths.dt_s;
    for (const PathComponent& p : paths.paths) {
        double phase = 2.0 * kPi * p.doppler_hz * time_s;
        cplx rot{std::cos(phase), std::sin(phase)};
        CVec u = upa_steering(paths.n1, paths.n2, p.sin_az_cos_el, p.sin_el,
                              paths.spacing);
        cplx g = scale * p.gain * rot;
        for (size_t i = 0; i < n_ris; ++i) a[i] += g * u[i];
    }
    return a;
}

CMat cascade(const CVec& a, const CMat& B) {
    if (a.size() != B.rows) {
        throw DimensionError("cascade: a length must equal B.rows");
    }
    CMat h(B.rows, B.cols);
    for (size_t i = 0; i < B.rows; ++i) {
        for (size_t k = 0; k < B.cols; ++k) {
            h(i, k) = a[i] * B(i, k);
        }
    }
    return h;
}

}  // namespace rcsf
