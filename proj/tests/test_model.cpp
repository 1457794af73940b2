#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include "grad_check.hpp"
#include "rcsf/binio.hpp"
#include "rcsf/model.hpp"

using namespace rcsf;
using gradcheck::random_tensor;

TEST_CASE("empty model is the identity map") {
    NeuralModel m;
    m.input_shape = {2, 3, 2};
    Rng rng(1);
    Tensor in = random_tensor({1, 2, 3, 2}, rng);
    Tensor out = m.forward(in, Mode::eval);
    CHECK(out.data == in.data);
    CHECK(count_flops(m) == 0);
    CHECK(m.codeword_length() == 12);
}

TEST_CASE("ae1 keeps the autoencoder shape contract") {
    const size_t n_ris = 16, n_t = 4, n_s1 = 32;
    NeuralModel ae1 = build_ae1(n_ris, n_t, n_s1);
    Rng rng(2);
    ae1.init_params(rng);

    CHECK(ae1.input_shape == Shape{2, n_ris, n_t});
    CHECK(ae1.output_shape() == Shape{2, n_ris, n_t});
    CHECK(ae1.codeword_length() == n_s1);

    Tensor in = random_tensor({2, 2, n_ris, n_t}, rng, -0.9, 0.9);
    Tensor out = ae1.forward(in, Mode::eval);
    CHECK(out.shape == in.shape);
    for (double v : out.data) {
        CHECK(v > -1.0);
        CHECK(v < 1.0);
    }

    // encoder output is sigmoid-bounded to (0,1)
    Tensor code = ae1.encode(in);
    CHECK(code.shape == Shape{2, n_s1});
    for (double v : code.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }

    CHECK_THROWS_AS((void)build_ae1(n_ris, n_t, 2 * n_ris * n_t + 1), DomainError);
    CHECK_THROWS_AS((void)build_ae1(n_ris, n_t, 0), DomainError);
}

TEST_CASE("ae2 keeps the autoencoder shape contract") {
    const size_t n_ris = 16, n_s2 = 8;
    NeuralModel ae2 = build_ae2(n_ris, n_s2);
    Rng rng(3);
    ae2.init_params(rng);

    CHECK(ae2.input_shape == Shape{2 * n_ris});
    CHECK(ae2.output_shape() == Shape{2 * n_ris});
    CHECK(ae2.codeword_length() == n_s2);

    Tensor in = random_tensor({3, 2 * n_ris}, rng, -0.9, 0.9);
    Tensor out = ae2.forward(in, Mode::eval);
    CHECK(out.shape == in.shape);

    CHECK_THROWS_AS((void)build_ae2(n_ris, 2 * n_ris + 1), DomainError);
}

TEST_CASE("decoder at initialization is the dense stem through tanh") {
    const size_t n_ris = 8, n_t = 4, n_s1 = 16;
    NeuralModel ae1 = build_ae1(n_ris, n_t, n_s1);
    Rng rng(4);
    ae1.init_params(rng);

    Tensor code = random_tensor({1, n_s1}, rng, 0.05, 0.95);
    Tensor full = ae1.decode(code);

    // stem = dense + reshape, then tanh; the ReZero blocks start at zero
    Tensor stem = ae1.forward_range(code, ae1.encoder_end, ae1.encoder_end + 2,
                                    Mode::eval);
    TanhLayer tanh_layer;
    Tensor expect = tanh_layer.forward(stem, Mode::eval);
    REQUIRE(full.shape == expect.shape);
    for (size_t i = 0; i < full.numel(); ++i) {
        CHECK(full.data[i] == doctest::Approx(expect.data[i]).epsilon(1e-12));
    }
}

TEST_CASE("count_flops follows the stated conventions") {
    // dense 4 -> 2: 2 * 4 * 2 = 16
    NeuralModel dense;
    dense.input_shape = {4};
    dense.layers.push_back(std::make_unique<DenseLayer>(4, 2));
    CHECK(count_flops(dense) == 16);

    // conv 3x3, 2 -> 2 channels, 8x8 same-padded: 2*3*3*2*2*8*8 = 4608
    NeuralModel conv;
    conv.input_shape = {2, 8, 8};
    conv.layers.push_back(std::make_unique<Conv2dLayer>(2, 2, 3, 1, 1));
    CHECK(count_flops(conv) == 4608);

    // activations and batch norm count one per entry
    NeuralModel acts;
    acts.input_shape = {2, 8, 8};
    acts.layers.push_back(std::make_unique<BatchNormLayer>(2));
    acts.layers.push_back(std::make_unique<LeakyReluLayer>(0.3));
    CHECK(count_flops(acts) == 2 * 128);
}

TEST_CASE("flop counting is additive over concatenation") {
    auto make_m1 = [] {
        NeuralModel m;
        m.input_shape = {6};
        m.layers.push_back(std::make_unique<DenseLayer>(6, 5));
        m.layers.push_back(std::make_unique<LeakyReluLayer>(0.3));
        return m;
    };
    auto make_m2 = [] {
        NeuralModel m;
        m.input_shape = {5};
        m.layers.push_back(std::make_unique<DenseLayer>(5, 3));
        m.layers.push_back(std::make_unique<TanhLayer>());
        return m;
    };
    NeuralModel m1 = make_m1(), m2 = make_m2();

    NeuralModel chained;
    chained.input_shape = {6};
    NeuralModel p1 = make_m1(), p2 = make_m2();
    for (auto& l : p1.layers) chained.layers.push_back(std::move(l));
    for (auto& l : p2.layers) chained.layers.push_back(std::move(l));

    CHECK(count_flops(chained) == count_flops(m1) + count_flops(m2));
}

TEST_CASE("model save/load roundtrip is bit-identical") {
    const std::string path =
        (std::filesystem::temp_directory_path() /
         ("rcsf_model_" + std::to_string(::getpid()) + ".rcnn"))
            .string();

    NeuralModel ae1 = build_ae1(8, 4, 16);
    Rng rng(9);
    ae1.init_params(rng);
    // move batch-norm state off its defaults so it must survive the trip
    Tensor batch = random_tensor({4, 2, 8, 4}, rng);
    (void)ae1.forward(batch, Mode::train);

    ae1.save(path);
    NeuralModel back = NeuralModel::load(path);

    CHECK(back.encoder_end == ae1.encoder_end);
    CHECK(back.input_shape == ae1.input_shape);
    CHECK(back.snapshot() == ae1.snapshot());
    CHECK(back.serialize() == ae1.serialize());

    Tensor probe = random_tensor({1, 2, 8, 4}, rng, -0.9, 0.9);
    Tensor a = ae1.forward(probe, Mode::eval);
    Tensor b = back.forward(probe, Mode::eval);
    CHECK(a.data == b.data);

    std::filesystem::remove(path);

    CHECK_THROWS_AS((void)NeuralModel::load(path), IoError);
}

TEST_CASE("model deserialize rejects corrupted bytes") {
    NeuralModel ae2 = build_ae2(4, 4);
    Rng rng(10);
    ae2.init_params(rng);
    auto bytes = ae2.serialize();

    auto bad_magic = bytes;
    bad_magic[0] = 'Z';
    CHECK_THROWS_AS((void)NeuralModel::deserialize(bad_magic), DecodeError);

    auto truncated = bytes;
    truncated.resize(truncated.size() - 7);
    CHECK_THROWS_AS((void)NeuralModel::deserialize(truncated), DecodeError);

    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS((void)NeuralModel::deserialize(trailing), DecodeError);
}

TEST_CASE("model-level backward requires a train-mode forward") {
    NeuralModel ae2 = build_ae2(4, 2);
    Rng rng(11);
    ae2.init_params(rng);
    Tensor grad(Shape{1, 8});
    CHECK_THROWS_AS(ae2.backward(grad), StateError);
}
