#include <doctest.h>

#include <cmath>

#include "rcsf/channel.hpp"
#include "rcsf/codec.hpp"

using namespace rcsf;

TEST_CASE("ula_steering closed forms") {
    CVec single = ula_steering(1, 0.37);
    REQUIRE(single.size() == 1);
    CHECK(single[0].real() == doctest::Approx(1.0));
    CHECK(single[0].imag() == doctest::Approx(0.0));

    CVec broadside = ula_steering(4, 0.0);
    for (const cplx& v : broadside) {
        CHECK(v.real() == doctest::Approx(0.5));
        CHECK(v.imag() == doctest::Approx(0.0));
    }

    // e^{j pi} = -1
    CVec edge = ula_steering(2, 1.0);
    CHECK(edge[0].real() == doctest::Approx(0.70710678).epsilon(1e-6));
    CHECK(edge[1].real() == doctest::Approx(-0.70710678).epsilon(1e-6));
    CHECK(edge[1].imag() == doctest::Approx(0.0));

    CHECK_THROWS_AS((void)ula_steering(4, 1.5), DomainError);
    CHECK_THROWS_AS((void)ula_steering(0, 0.0), DomainError);
}

TEST_CASE("upa_steering reduces to ULA on a degenerate axis") {
    CVec flat = upa_steering(1, 1, 0.2, -0.4);
    REQUIRE(flat.size() == 1);
    CHECK(std::abs(flat[0] - cplx{1, 0}) < 1e-15);

    CVec u = upa_steering(2, 1, 0.33, 0.0);
    CVec ref = ula_steering(2, 0.33);
    for (size_t i = 0; i < 2; ++i) CHECK(std::abs(u[i] - ref[i]) < 1e-15);

    CVec broadside = upa_steering(2, 2, 0.0, 0.0);
    for (const cplx& v : broadside) {
        CHECK(v.real() == doctest::Approx(0.5));
        CHECK(v.imag() == doctest::Approx(0.0));
    }

    CHECK_THROWS_AS((void)upa_steering(2, 2, 1.01, 0.0), DomainError);
}

TEST_CASE("steering vectors always have unit norm") {
    Rng rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        size_t n = 1 + rng.next_u64() % 16;
        double s = rng.uniform(-1.0, 1.0);
        CHECK(norm_sq(ula_steering(n, s)) == doctest::Approx(1.0).epsilon(1e-12));

        size_t n1 = 1 + rng.next_u64() % 8, n2 = 1 + rng.next_u64() % 8;
        double a = rng.uniform(-1.0, 1.0), b = rng.uniform(-1.0, 1.0);
        CHECK(norm_sq(upa_steering(n1, n2, a, b)) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gen_bs_ris second moment matches the SV normalization") {
    ArrayGeometry geom{.n_t = 4, .n1 = 4, .n2 = 2};
    BsRisParams params{.path_count = 3, .rho = 0.9};
    Rng rng(77);
    double acc = 0.0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        Rng sub = rng.substream(i);
        CMat b = gen_bs_ris(geom, params, sub);
        acc += frob_norm_sq(b);
    }
    double mean_ratio =
        acc / draws / static_cast<double>(geom.n_t * geom.n_ris());
    CHECK(mean_ratio > 0.9);
    CHECK(mean_ratio < 1.1);
}

TEST_CASE("gen_bs_ris has rank at most the path count") {
    // rank(B) <= L_B: with L_B = 1 every 2x2 minor vanishes.
    ArrayGeometry geom{.n_t = 3, .n1 = 2, .n2 = 2};
    BsRisParams params{.path_count = 1, .rho = 0.9};
    Rng rng(5);
    CMat b = gen_bs_ris(geom, params, rng);
    for (size_t i = 1; i < b.rows; ++i) {
        for (size_t k = 1; k < b.cols; ++k) {
            cplx det = b(0, 0) * b(i, k) - b(0, k) * b(i, 0);
            CHECK(std::abs(det) < 1e-10);
        }
    }
}

TEST_CASE("evolve_bs_ris endpoints and correlation") {
    ArrayGeometry geom{.n_t = 4, .n1 = 2, .n2 = 2};
    BsRisParams params{.path_count = 4, .rho = 0.9};
    Rng rng(31);
    CMat b0 = gen_bs_ris(geom, params, rng);

    // rho = 1 keeps the channel exactly
    BsRisParams frozen = params;
    frozen.rho = 1.0;
    Rng r1(1);
    CMat same = evolve_bs_ris(b0, geom, frozen, r1);
    for (size_t i = 0; i < b0.data.size(); ++i) {
        CHECK(same.data[i] == b0.data[i]);
    }

    // rho = 0 draws an independent channel with the innovation's stream
    BsRisParams fresh = params;
    fresh.rho = 0.0;
    Rng r2(2), r2b(2);
    CMat indep = evolve_bs_ris(b0, geom, fresh, r2);
    CMat expect = gen_bs_ris(geom, fresh, r2b);
    for (size_t i = 0; i < b0.data.size(); ++i) {
        CHECK(indep.data[i] == expect.data[i]);
    }

    BsRisParams bad = params;
    bad.rho = 1.5;
    Rng r3(3);
    CHECK_THROWS_AS((void)evolve_bs_ris(b0, geom, bad, r3), DomainError);

    // empirical correlation Re E<B_prev, B> / E||B||^2 ~ rho
    Rng mc(99);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Rng sa = mc.substream(2 * i), sb = mc.substream(2 * i + 1);
        CMat prev = gen_bs_ris(geom, params, sa);
        CMat next = evolve_bs_ris(prev, geom, params, sb);
        num += frob_inner(prev, next).real();
        den += frob_norm_sq(next);
    }
    double corr = num / den;
    CHECK(corr > 0.85);
    CHECK(corr < 0.95);
}

TEST_CASE("AR evolution preserves the second moment") {
    ArrayGeometry geom{.n_t = 2, .n1 = 2, .n2 = 2};
    BsRisParams params{.path_count = 2, .rho = 0.9};
    Rng mc(123);
    double first = 0.0, last = 0.0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        Rng sub = mc.substream(i);
        CMat b = gen_bs_ris(geom, params, sub);
        first += frob_norm_sq(b);
        for (int step = 0; step < 5; ++step) {
            b = evolve_bs_ris(b, geom, params, sub);
        }
        last += frob_norm_sq(b);
    }
    CHECK(last / first == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("gen_ris_ue_paths bounds Doppler by speed/wavelength") {
    ArrayGeometry geom{.n_t = 2, .n1 = 4, .n2 = 4};

    RisUeParams still{.path_count = 5, .speed_mps = 0.0};
    Rng r0(1);
    RisUePaths frozen = gen_ris_ue_paths(geom, still, r0);
    for (const PathComponent& p : frozen.paths) CHECK(p.doppler_hz == 0.0);

    // 1 m/s at 2.655 GHz: max Doppler ~ 8.857 Hz
    RisUeParams moving;
    moving.path_count = 64;
    const double max_doppler = moving.speed_mps / moving.wavelength_m;
    CHECK(max_doppler == doctest::Approx(8.857).epsilon(1e-3));
    Rng r1(2);
    RisUePaths paths = gen_ris_ue_paths(geom, moving, r1);
    for (const PathComponent& p : paths.paths) {
        CHECK(std::abs(p.doppler_hz) <= max_doppler);
    }
}

TEST_CASE("ris_ue_at phase evolution") {
    ArrayGeometry geom{.n_t = 2, .n1 = 2, .n2 = 2};
    RisUeParams params{.path_count = 3};
    Rng rng(17);
    RisUePaths paths = gen_ris_ue_paths(geom, params, rng);

    // all Dopplers zero: a(t) constant
    RisUePaths still = paths;
    for (PathComponent& p : still.paths) p.doppler_hz = 0.0;
    CVec a0 = ris_ue_at(still, 0);
    CVec a9 = ris_ue_at(still, 9);
    for (size_t i = 0; i < a0.size(); ++i) CHECK(std::abs(a0[i] - a9[i]) < 1e-14);

    // single path with f*dt = 0.25: a(1) = j * a(0)
    RisUePaths quarter = paths;
    quarter.paths.resize(1);
    quarter.paths[0].doppler_hz = 0.25 / quarter.dt_s;
    CVec q0 = ris_ue_at(quarter, 0);
    CVec q1 = ris_ue_at(quarter, 1);
    const cplx j{0.0, 1.0};
    for (size_t i = 0; i < q0.size(); ++i) {
        CHECK(std::abs(q1[i] - j * q0[i]) < 1e-12);
    }

    // per-interval phase advance is exactly 2 pi f dt
    CVec q2 = ris_ue_at(quarter, 2);
    for (size_t i = 0; i < q0.size(); ++i) {
        if (std::abs(q1[i]) < 1e-12) continue;
        cplx step = q2[i] / q1[i];
        CHECK(std::arg(step) == doctest::Approx(2.0 * std::numbers::pi * 0.25)
                                    .epsilon(1e-10));
    }
}

TEST_CASE("cascade matches the entrywise oracle") {
    Rng rng(41);
    CMat b(4, 2);
    for (cplx& v : b.data) v = rng.cnormal();
    CVec a(4);
    for (cplx& v : a) v = rng.cnormal();

    CMat h = cascade(a, b);
    for (size_t i = 0; i < 4; ++i) {
        for (size_t k = 0; k < 2; ++k) {
            CHECK(std::abs(h(i, k) - a[i] * b(i, k)) < 1e-15);
        }
    }

    // all-ones a: H = B
    CVec ones(4, cplx{1, 0});
    CMat same = cascade(ones, b);
    for (size_t i = 0; i < b.data.size(); ++i) CHECK(same.data[i] == b.data[i]);

    // a = [2, 0, 0, 0]
    CVec spike(4, cplx{0, 0});
    spike[0] = cplx{2, 0};
    CMat sparse = cascade(spike, b);
    for (size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(sparse(0, k) - 2.0 * b(0, k)) < 1e-15);
        CHECK(std::abs(sparse(1, k)) == 0.0);
    }

    CVec bad(3);
    CHECK_THROWS_AS((void)cascade(bad, b), DimensionError);
}

TEST_CASE("broadside single-path channel has the closed-form entry") {
    // L_B = 1 with unit gain and broadside angles gives entries of
    // magnitude exactly 1: sqrt(n_t n_ris) * (1/sqrt(n_ris)) * (1/sqrt(n_t)).
    ArrayGeometry geom{.n_t = 4, .n1 = 2, .n2 = 2};
    const size_t n_ris = geom.n_ris();
    CVec a_ris = upa_steering(geom.n1, geom.n2, 0.0, 0.0);
    CVec a_bs = ula_steering(geom.n_t, 0.0);
    double scale = std::sqrt(static_cast<double>(geom.n_t * n_ris));
    CMat b(n_ris, geom.n_t);
    for (size_t i = 0; i < n_ris; ++i) {
        for (size_t k = 0; k < geom.n_t; ++k) {
            b(i, k) = scale * a_ris[i] * std::conj(a_bs[k]);
        }
    }
    for (const cplx& v : b.data) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.imag() == doctest::Approx(0.0));
    }

    // The same closed form makes every entry of an L_B = 1 draw share the
    // modulus |alpha|, whatever the angles.
    BsRisParams one_path{.path_count = 1, .rho = 0.9};
    Rng rng(8);
    CMat drawn = gen_bs_ris(geom, one_path, rng);
    double first = std::abs(drawn.data[0]);
    for (const cplx& v : drawn.data) {
        CHECK(std::abs(v) == doctest::Approx(first).epsilon(1e-12));
    }
}
