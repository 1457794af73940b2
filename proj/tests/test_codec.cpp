#include <doctest.h>

#include <cmath>

#include "rcsf/channel.hpp"
#include "rcsf/codec.hpp"

using namespace rcsf;

TEST_CASE("channel/tensor conversion is an exact inverse absent clipping") {
    Rng rng(1);
    CMat h(4, 3);
    for (cplx& v : h.data) v = rng.cnormal();

    NormalizationSpec spec{10.0};
    ClipStats clips;
    Tensor t = channel_to_tensor(h, spec, &clips);
    CHECK(t.shape == Shape{2, 4, 3});
    CHECK(clips.clipped == 0);
    CHECK(clips.total == 24);

    CMat back = tensor_to_channel(t, spec);
    for (size_t i = 0; i < h.data.size(); ++i) {
        CHECK(std::abs(back.data[i] - h.data[i]) < 1e-12);
    }

    // zero channel -> zero tensor; boundary entry maps to exactly 1
    CMat zero(2, 2);
    Tensor zt = channel_to_tensor(zero, spec);
    for (double v : zt.data) CHECK(v == 0.0);

    CMat edge(1, 1);
    edge(0, 0) = cplx{spec.scale, -spec.scale};
    Tensor et = channel_to_tensor(edge, spec);
    CHECK(et.data[0] == 1.0);
    CHECK(et.data[1] == -1.0);
}

TEST_CASE("channel_to_tensor counts clip events") {
    CMat h(1, 2);
    h(0, 0) = cplx{3.0, 0.1};
    h(0, 1) = cplx{-5.0, 0.2};
    NormalizationSpec spec{1.0};
    ClipStats clips;
    Tensor t = channel_to_tensor(h, spec, &clips);
    CHECK(clips.clipped == 2);
    CHECK(t.data[0] == 1.0);
    CHECK(t.data[1] == -1.0);
}

TEST_CASE("extract_ratio matches the hand-computed forms") {
    const cplx j{0.0, 1.0};

    CMat h0(2, 2);
    h0(0, 0) = cplx{1, 0};
    h0(0, 1) = j;
    h0(1, 0) = cplx{2, 0};
    h0(1, 1) = cplx{0, -1};

    // Ht = H0: all-ones ratio
    RatioVector same = extract_ratio(h0, h0);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(std::abs(same.p[i] - cplx{1, 0}) < 1e-14);
        CHECK(same.valid[i] == 1);
    }

    // row scaled by 2j: numerator 4j over norm^2 = 2 gives exactly 2j
    CMat ht = h0;
    ht(0, 0) = 2.0 * j * h0(0, 0);
    ht(0, 1) = 2.0 * j * h0(0, 1);
    RatioVector r = extract_ratio(h0, ht);
    CHECK(std::abs(r.p[0] - 2.0 * j) < 1e-14);
    CHECK(std::abs(r.p[1] - cplx{1, 0}) < 1e-14);

    // zero reference row is masked with fallback 0
    CMat degenerate = h0;
    degenerate(1, 0) = degenerate(1, 1) = cplx{0, 0};
    RatioVector masked = extract_ratio(degenerate, ht);
    CHECK(masked.valid[1] == 0);
    CHECK(masked.p[1] == cplx{0, 0});

    CMat wrong(3, 2);
    CHECK_THROWS_AS((void)extract_ratio(h0, wrong), DimensionError);
}

TEST_CASE("ratio extraction is scale covariant") {
    Rng rng(5);
    CMat h0(6, 3), ht(6, 3);
    for (cplx& v : h0.data) v = rng.cnormal();
    for (cplx& v : ht.data) v = rng.cnormal();
    cplx c{1.7, -0.4};

    CMat scaled = ht;
    for (cplx& v : scaled.data) v *= c;

    RatioVector base = extract_ratio(h0, ht);
    RatioVector cov = extract_ratio(h0, scaled);
    for (size_t i = 0; i < base.size(); ++i) {
        CHECK(std::abs(cov.p[i] - c * base.p[i]) < 1e-12);
    }
}

TEST_CASE("reconstruct_from_ratio inverts extraction when B is stable") {
    ArrayGeometry geom{.n_t = 4, .n1 = 2, .n2 = 2};
    Rng rng(9);
    BsRisParams bp{.path_count = 3, .rho = 0.9};
    CMat b = gen_bs_ris(geom, bp, rng);
    RisUeParams up{.path_count = 3};
    RisUePaths paths = gen_ris_ue_paths(geom, up, rng);

    CMat h0 = cascade(ris_ue_at(paths, 0), b);
    CMat h5 = cascade(ris_ue_at(paths, 5), b);

    RatioVector p = extract_ratio(h0, h5);
    CMat rebuilt = reconstruct_from_ratio(h0, p);
    double err = 0.0, ref = 0.0;
    for (size_t i = 0; i < h5.data.size(); ++i) {
        err += std::norm(rebuilt.data[i] - h5.data[i]);
        ref += std::norm(h5.data[i]);
    }
    CHECK(std::sqrt(err / ref) < 1e-10);

    // all-ones ratio reproduces the anchor; zero entries zero the row
    RatioVector ones;
    ones.p.assign(h0.rows, cplx{1, 0});
    ones.valid.assign(h0.rows, 1);
    CMat anchor_copy = reconstruct_from_ratio(h0, ones);
    CHECK(anchor_copy.data == h0.data);

    ones.p[2] = cplx{0, 0};
    CMat zeroed = reconstruct_from_ratio(h0, ones);
    for (size_t k = 0; k < h0.cols; ++k) CHECK(zeroed(2, k) == cplx{0, 0});

    RatioVector wrong;
    wrong.p.assign(h0.rows + 1, cplx{1, 0});
    wrong.valid.assign(h0.rows + 1, 1);
    CHECK_THROWS_AS((void)reconstruct_from_ratio(h0, wrong), DimensionError);
}

TEST_CASE("ratio/tensor conversion layout and roundtrip") {
    RatioVector p;
    p.p = {cplx{1, 0}, cplx{1, 0}, cplx{1, 0}};
    p.valid = {1, 1, 1};
    NormalizationSpec spec{1.0};

    Tensor t = ratio_to_tensor(p, spec);
    CHECK(t.shape == Shape{6});
    for (size_t i = 0; i < 3; ++i) {
        CHECK(t.data[i] == 1.0);       // real half
        CHECK(t.data[3 + i] == 0.0);   // imaginary half
    }

    // pure-imaginary boundary entry lands at 1.0 in the imaginary half
    RatioVector pj;
    pj.p = {cplx{0.0, 2.5}};
    pj.valid = {1};
    NormalizationSpec spec_j{2.5};
    Tensor tj = ratio_to_tensor(pj, spec_j);
    CHECK(tj.data[0] == 0.0);
    CHECK(tj.data[1] == 1.0);

    Rng rng(12);
    RatioVector rnd;
    for (int i = 0; i < 8; ++i) rnd.p.push_back(rng.cnormal());
    rnd.valid.assign(8, 1);
    NormalizationSpec wide{8.0};
    RatioVector back = tensor_to_ratio(ratio_to_tensor(rnd, wide), wide);
    for (size_t i = 0; i < 8; ++i) {
        CHECK(std::abs(back.p[i] - rnd.p[i]) < 1e-12);
    }
}

TEST_CASE("quantizer endpoints, rounding rule, and idempotence") {
    CHECK_THROWS_AS((void)quantize(std::vector<double>{0.5}, 0), DomainError);

    for (int n_q : {1, 2, 4, 8}) {
        std::vector<double> ends{0.0, 1.0};
        auto idx = quantize(ends, n_q);
        CHECK(idx[0] == 0);
        CHECK(idx[1] == (1u << n_q) - 1);
        auto back = dequantize(idx, n_q);
        CHECK(back[0] == 0.0);
        CHECK(back[1] == 1.0);
    }

    // n_q=4: 0.5 * 15 = 7.5 rounds away from zero to 8 -> 8/15
    auto idx = quantize(std::vector<double>{0.5}, 4);
    CHECK(idx[0] == 8);
    CHECK(dequantize(idx, 4)[0] == doctest::Approx(8.0 / 15.0));

    // quantize(dequantize(q)) == q for every level
    for (int n_q : {1, 3, 4, 8}) {
        std::vector<uint32_t> levels;
        for (uint32_t q = 0; q < (1u << n_q); ++q) levels.push_back(q);
        auto values = dequantize(levels, n_q);
        CHECK(quantize(values, n_q) == levels);
    }
}

TEST_CASE("quantizer is monotone and bounded by half a step") {
    Rng rng(31);
    for (int n_q : {1, 2, 4, 8}) {
        const double bound = 1.0 / (2.0 * ((1u << n_q) - 1));
        double prev_v = 0.0;
        uint32_t prev_idx = 0;
        for (int k = 0; k <= 3000; ++k) {
            double v = static_cast<double>(k) / 3000.0;
            auto idx = quantize(std::vector<double>{v}, n_q);
            if (k > 0) CHECK(idx[0] >= prev_idx);
            double back = dequantize(idx, n_q)[0];
            CHECK(std::abs(back - v) <= bound * (1.0 + 1e-12));
            prev_v = v;
            prev_idx = idx[0];
        }
        (void)prev_v;
    }

    // out-of-range inputs clip first
    auto clipped = quantize(std::vector<double>{-0.3, 1.7}, 4);
    CHECK(clipped[0] == 0);
    CHECK(clipped[1] == 15);
}

TEST_CASE("pack_bits layout and roundtrip") {
    // two nibbles 0xA, 0x5 pack MSB-first into the single byte 0xA5
    std::vector<uint32_t> nibbles{0xA, 0x5};
    auto packed = pack_bits(nibbles, 4);
    REQUIRE(packed.size() == 1);
    CHECK(packed[0] == 0xA5);
    CHECK(unpack_bits(packed, 4, 2) == nibbles);

    CHECK(pack_bits(std::vector<uint32_t>{}, 4).empty());

    // zero padding to the byte boundary: 111 000 001 + 7 pad bits
    std::vector<uint32_t> three{0x7, 0x0, 0x1};
    auto padded = pack_bits(three, 3);  // 9 bits -> 2 bytes
    REQUIRE(padded.size() == 2);
    CHECK(padded[0] == 0xE0);
    CHECK(padded[1] == 0x80);
    CHECK(unpack_bits(padded, 3, 3) == three);

    CHECK_THROWS_AS((void)pack_bits(std::vector<uint32_t>{16}, 4), DomainError);
    CHECK_THROWS_AS((void)unpack_bits(padded, 3, 10), DecodeError);
}

TEST_CASE("pack/unpack fuzz roundtrip") {
    Rng rng(47);
    for (int rep = 0; rep < 500; ++rep) {
        int n_q = 1 + static_cast<int>(rng.next_u64() % 16);
        size_t len = rng.next_u64() % 64;
        std::vector<uint32_t> idx(len);
        for (uint32_t& v : idx) {
            v = static_cast<uint32_t>(rng.next_u64() & ((1u << n_q) - 1));
        }
        auto packed = pack_bits(idx, n_q);
        CHECK(packed.size() == (len * n_q + 7) / 8);
        CHECK(unpack_bits(packed, n_q, len) == idx);
    }
}

TEST_CASE("normalization fit uses the training split percentile") {
    // one episode, values with a known percentile
    Episode ep;
    CMat h(10, 10);
    int k = 0;
    for (cplx& v : h.data) {
        v = cplx{static_cast<double>(++k) / 100.0, 0.0};  // 0.01 .. 1.00
    }
    ep.h.push_back(h);
    std::vector<Episode> eps{ep};

    // 200 magnitudes: 100 reals 0.01..1.00 and 100 zeros (imag parts).
    // The 99.9th percentile (nearest rank, ceil(0.999*200) = 200) is the
    // largest magnitude.
    NormalizationSpec spec = fit_channel_scale(eps, 0.999);
    CHECK(spec.scale == doctest::Approx(1.0));

    // the 50th percentile of the same data: rank ceil(0.5*200)=100 ->
    // sorted[99]; 100 zeros occupy ranks 1..100, so the median is 0 and the
    // fit floors it to a tiny positive scale
    NormalizationSpec mid = fit_channel_scale(eps, 0.5);
    CHECK(mid.scale > 0.0);
}
