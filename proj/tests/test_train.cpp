#include <doctest.h>

#include <cmath>

#include "grad_check.hpp"
#include "rcsf/train.hpp"

using namespace rcsf;
using gradcheck::random_tensor;

TEST_CASE("mse_loss values and gradient") {
    Tensor a(Shape{1, 2});
    a.data = {1.0, 2.0};
    Tensor zeros(Shape{1, 2});

    CHECK(mse_loss(a, a).value == 0.0);

    // (1 + 4) / 2 = 2.5
    LossGrad lg = mse_loss(a, zeros);
    CHECK(lg.value == doctest::Approx(2.5));
    CHECK(lg.grad.data[0] == doctest::Approx(1.0));   // 2*1/2
    CHECK(lg.grad.data[1] == doctest::Approx(2.0));   // 2*2/2

    Tensor ones(Shape{2, 3});
    std::fill(ones.data.begin(), ones.data.end(), 1.0);
    Tensor z(Shape{2, 3});
    CHECK(mse_loss(ones, z).value == doctest::Approx(1.0));

    Tensor bad(Shape{1, 3});
    CHECK_THROWS_AS((void)mse_loss(a, bad), DimensionError);
}

TEST_CASE("adam: zero gradients leave parameters untouched") {
    std::vector<double> w{1.0, -2.0, 3.0};
    std::vector<double> g(3, 0.0), m(3, 0.0), v(3, 0.0);
    for (uint64_t t = 1; t <= 10; ++t) {
        adam_step(w, g, m, v, t, 0.1);
    }
    CHECK(w == std::vector<double>{1.0, -2.0, 3.0});
}

TEST_CASE("adam: first step moves by about lr for any nonzero gradient") {
    for (double g0 : {1e-6, 0.5, 3.0, -7.0}) {
        std::vector<double> w{0.0}, g{g0}, m{0.0}, v{0.0};
        adam_step(w, g, m, v, 1, 0.01);
        // bias correction makes m_hat = g, v_hat = g^2 at t=1
        CHECK(std::abs(w[0]) == doctest::Approx(0.01).epsilon(1e-4));
        CHECK((w[0] < 0) == (g0 > 0));
    }
}

TEST_CASE("adam: two constant-gradient steps match the hand trace") {
    // lr=0.1, g=0.5: with constant gradients m_hat=g and v_hat=g^2 at every
    // step, so each update is lr*g/(|g|+eps) ~ 0.1.
    std::vector<double> w{1.0}, g{0.5}, m{0.0}, v{0.0};
    adam_step(w, g, m, v, 1, 0.1);
    CHECK(m[0] == doctest::Approx(0.05));
    CHECK(v[0] == doctest::Approx(0.00025));
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-7));
    adam_step(w, g, m, v, 2, 0.1);
    CHECK(m[0] == doctest::Approx(0.095));
    CHECK(v[0] == doctest::Approx(0.00049975));
    CHECK(w[0] == doctest::Approx(0.8).epsilon(1e-7));
}

namespace {

// Tiny autoencoder training setup shared by the trainer tests.
struct TrainFixture {
    Tensor train_x, val_x;

    TrainFixture() {
        Rng rng(77);
        // low-dimensional structure: samples = s * base + noise
        Tensor base(Shape{8});
        for (double& v : base.data) v = rng.uniform(-0.5, 0.5);
        auto draw = [&](size_t n) {
            Tensor x(Shape{n, 8});
            for (size_t i = 0; i < n; ++i) {
                double s = rng.uniform(-1.0, 1.0);
                for (size_t k = 0; k < 8; ++k) {
                    x.data[i * 8 + k] = s * base.data[k] + 0.01 * rng.normal();
                }
            }
            return x;
        };
        train_x = draw(64);
        val_x = draw(16);
    }

    static NeuralModel make_model(uint64_t seed) {
        NeuralModel m = build_ae2(4, 4);
        Rng rng(seed);
        m.init_params(rng);
        return m;
    }

    static TrainConfig config(size_t epochs) {
        TrainConfig cfg;
        cfg.batch_size = 16;
        cfg.epochs = epochs;
        cfg.seed = 5;
        return cfg;
    }
};

}  // namespace

TEST_CASE("training reduces loss and retains the best validation epoch") {
    TrainFixture fx;
    NeuralModel model = TrainFixture::make_model(1);
    double before = eval_mse(model, fx.val_x, fx.val_x, 16);

    TrainHistory hist =
        train(model, fx.train_x, fx.train_x, fx.val_x, fx.val_x,
              TrainFixture::config(60));
    REQUIRE(hist.epochs.size() == 60);

    double after = eval_mse(model, fx.val_x, fx.val_x, 16);
    CHECK(after < before);

    // best-so-far series is non-increasing
    for (size_t e = 1; e < hist.epochs.size(); ++e) {
        CHECK(hist.epochs[e].best_val_loss <= hist.epochs[e - 1].best_val_loss);
    }
    // the model holds the best validation parameters
    double best = hist.epochs.back().best_val_loss;
    CHECK(after == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("training is deterministic under a fixed seed") {
    TrainFixture fx;
    NeuralModel a = TrainFixture::make_model(3);
    NeuralModel b = TrainFixture::make_model(3);
    (void)train(a, fx.train_x, fx.train_x, fx.val_x, fx.val_x,
                TrainFixture::config(15));
    (void)train(b, fx.train_x, fx.train_x, fx.val_x, fx.val_x,
                TrainFixture::config(15));
    CHECK(a.snapshot() == b.snapshot());
}

TEST_CASE("plateau schedule drops the learning rate once") {
    TrainFixture fx;
    NeuralModel model = TrainFixture::make_model(4);
    TrainConfig cfg = TrainFixture::config(20);
    cfg.plateau_patience = 5;
    // demand a halving per epoch so the schedule is guaranteed to go stale
    cfg.plateau_rel_improve = 0.5;
    TrainHistory hist =
        train(model, fx.train_x, fx.train_x, fx.val_x, fx.val_x, cfg);

    CHECK(hist.epochs.front().lr == doctest::Approx(cfg.lr_initial));
    bool dropped = false;
    for (const EpochRecord& e : hist.epochs) {
        if (e.lr == cfg.lr_final) dropped = true;
        if (dropped) CHECK(e.lr == cfg.lr_final);
    }
    CHECK(dropped);
}

TEST_CASE("non-finite loss raises a training error with the epoch") {
    TrainFixture fx;
    NeuralModel model = TrainFixture::make_model(5);
    Tensor poisoned = fx.train_x;
    poisoned.data[3] = std::numeric_limits<double>::quiet_NaN();
    try {
        (void)train(model, poisoned, poisoned, fx.val_x, fx.val_x,
                    TrainFixture::config(3));
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.epoch == 0);
    }
}

TEST_CASE("whole-model gradients agree with finite differences") {
    // End-to-end check through AE2 (dense + activations + ReZero + tanh).
    NeuralModel model = build_ae2(3, 3);
    Rng rng(21);
    model.init_params(rng);
    // move the rezero scalars off zero so every path is exercised
    for (Param* p : model.parameters()) {
        if (p->size() == 1) p->value[0] = 0.3;
    }

    Tensor x = random_tensor({2, 6}, rng, -0.8, 0.8);
    Tensor target = random_tensor({2, 6}, rng, -0.5, 0.5);

    Tensor out = model.forward(x, Mode::train);
    LossGrad lg = mse_loss(out, target);
    model.zero_grad();
    model.backward(lg.grad);

    const double h = 1e-6;
    double max_rel = 0.0;
    for (Param* p : model.parameters()) {
        std::vector<double> fd(p->size());
        for (size_t i = 0; i < p->size(); ++i) {
            double keep = p->value[i];
            p->value[i] = keep + h;
            double up = mse_value(model.forward(x, Mode::train), target);
            p->value[i] = keep - h;
            double down = mse_value(model.forward(x, Mode::train), target);
            p->value[i] = keep;
            fd[i] = (up - down) / (2.0 * h);
        }
        max_rel = std::max(max_rel, gradcheck::rel_error(fd, p->grad));
    }
    CHECK(max_rel < 1e-4);
}
