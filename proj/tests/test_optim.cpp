#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "mnl/errors.hpp"
#include "mnl/optim.hpp"
#include "mnl/synthetic.hpp"
#include "mnl/unit.hpp"

using namespace mnl;

TEST_CASE("default optimizer settings") {
    const OptimConfig cfg;
    CHECK(cfg.gamma == 0.95);
    CHECK(cfg.lr_inc == 1.5);
    CHECK(cfg.lr_dec == 0.1);
    CHECK(cfg.lr_min == 0.001);
    CHECK(cfg.lr_max == 0.1);
    CHECK(cfg.l2_lambda == 0.001);
    CHECK(cfg.minibatch_size == 100);
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config validation") {
    auto bad = [](auto mutate) {
        OptimConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(cfg.validate(), ParameterError);
    };
    bad([](OptimConfig& c) { c.gamma = 1.0; });
    bad([](OptimConfig& c) { c.lr_inc = 1.0; });
    bad([](OptimConfig& c) { c.lr_dec = 1.0; });
    bad([](OptimConfig& c) { c.lr_min = 0.2; });
    bad([](OptimConfig& c) { c.l2_lambda = -1.0; });
    bad([](OptimConfig& c) { c.clip_threshold = 0.0; });
    bad([](OptimConfig& c) { c.minibatch_size = 0; });
    bad([](OptimConfig& c) { c.epochs = 0; });
    bad([](OptimConfig& c) { c.learning_rate = 0.0; });
}

TEST_CASE("clip_truncate") {
    CHECK(clip_truncate(Vec64{0.5, -3.0}, 1.0) == Vec64{0.5, -1.0});
    const Vec64 inside{0.1, -0.9, 0.0};
    CHECK(clip_truncate(inside, 1.0) == inside);
    CHECK(clip_truncate(Vec64{0.25}, 0.25) == Vec64{0.25});
}

TEST_CASE("clip_truncate is idempotent") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        Vec64 g(20);
        for (double& v : g) v = rng.uniform(-5, 5);
        const double t = rng.uniform(0.01, 3.0);
        const Vec64 once = clip_truncate(g, t);
        CHECK(clip_truncate(once, t) == once);
    }
}

TEST_CASE("zero gradient leaves parameters and decays the accumulator") {
    OptimConfig cfg;
    Vec64 w{1.0, -2.0};
    RmsPropState s = RmsPropState::fresh(2, cfg);
    s.mean_square = {0.4, 0.2};
    rmsprop_update(w, Vec64{0.0, 0.0}, s, cfg);
    CHECK(w == Vec64{1.0, -2.0});
    CHECK(s.mean_square[0] == doctest::Approx(0.95 * 0.4).epsilon(1e-15));
    CHECK(s.mean_square[1] == doctest::Approx(0.95 * 0.2).epsilon(1e-15));
}

TEST_CASE("consistent sign grows the rate by lr_inc until lr_max") {
    OptimConfig cfg;
    Vec64 w{1.0};
    RmsPropState s = RmsPropState::fresh(1, cfg);
    // Hand iteration: the first step has no previous sign (factor 1), then
    // 0.001·1.5^k until the clamp at 0.1.
    double rate = 0.001;
    double m = 0.0;
    double expected_w = 1.0;
    for (int k = 0; k < 20; ++k) {
        if (k > 0) rate = std::min(rate * 1.5, 0.1);
        m = 0.95 * m + 0.05;
        expected_w -= cfg.learning_rate * rate / std::sqrt(m + 1e-8);
        rmsprop_update(w, Vec64{1.0}, s, cfg);
        CHECK(s.rate[0] == doctest::Approx(rate).epsilon(1e-14));
        CHECK(w[0] == doctest::Approx(expected_w).epsilon(1e-13));
    }
    CHECK(s.rate[0] == 0.1);
    CHECK(s.updates == 20);
}

TEST_CASE("sign flip scales the rate by lr_dec with clamp at lr_min") {
    OptimConfig cfg;
    Vec64 w{0.0};
    RmsPropState s = RmsPropState::fresh(1, cfg);
    for (int k = 0; k < 6; ++k) rmsprop_update(w, Vec64{1.0}, s, cfg);
    const double grown = 0.001 * std::pow(1.5, 5);
    CHECK(s.rate[0] == doctest::Approx(grown).epsilon(1e-14));
    rmsprop_update(w, Vec64{-1.0}, s, cfg);
    CHECK(s.rate[0] == doctest::Approx(std::max(grown * 0.1, 0.001)).epsilon(1e-14));
    rmsprop_update(w, Vec64{1.0}, s, cfg);
    CHECK(s.rate[0] == 0.001);
}

TEST_CASE("rates stay within bounds under random gradients") {
    OptimConfig cfg;
    Rng rng(77);
    Vec64 w(50, 0.0);
    RmsPropState s = RmsPropState::fresh(w.size(), cfg);
    for (int step = 0; step < 500; ++step) {
        Vec64 g(w.size());
        for (double& v : g) v = rng.uniform01() < 0.1 ? 0.0 : rng.uniform(-1, 1);
        rmsprop_update(w, g, s, cfg);
        for (std::size_t j = 0; j < w.size(); ++j) {
            REQUIRE(s.rate[j] >= cfg.lr_min);
            REQUIRE(s.rate[j] <= cfg.lr_max);
            REQUIRE(s.mean_square[j] >= 0.0);
        }
    }
}

TEST_CASE("plain RMSProp keeps the initial rate") {
    OptimConfig cfg;
    cfg.adaptive_rates = false;
    Vec64 w{0.0};
    RmsPropState s = RmsPropState::fresh(1, cfg);
    for (int k = 0; k < 10; ++k) rmsprop_update(w, Vec64{k % 3 == 0 ? -1.0 : 1.0}, s, cfg);
    CHECK(s.rate[0] == cfg.lr_min);
}

TEST_CASE("rmsprop_update shape mismatch") {
    OptimConfig cfg;
    Vec64 w{0.0, 1.0};
    RmsPropState s = RmsPropState::fresh(2, cfg);
    CHECK_THROWS_AS(rmsprop_update(w, Vec64{1.0}, s, cfg), DimensionError);
}

TEST_CASE("minibatch_schedule") {
    const auto b = minibatch_schedule(250, 100);
    REQUIRE(b.size() == 3);
    CHECK(b[0].count == 100);
    CHECK(b[1].count == 100);
    CHECK(b[2].count == 50);
    CHECK(b[2].first == 200);
    CHECK(minibatch_schedule(40, 100).size() == 1);
    CHECK(minibatch_schedule(100, 100).size() == 1);
    CHECK(minibatch_schedule(0, 100).empty());
    CHECK_THROWS_AS(minibatch_schedule(10, 0), ParameterError);
}

TEST_CASE("minibatch_schedule is an order-preserving partition") {
    for (std::size_t n : {1u, 7u, 99u, 100u, 101u, 1234u}) {
        for (std::size_t size : {1u, 3u, 100u, 5000u}) {
            std::size_t next = 0;
            for (const Batch& b : minibatch_schedule(n, size)) {
                REQUIRE(b.first == next);
                REQUIRE(b.count >= 1);
                REQUIRE(b.count <= size);
                next += b.count;
            }
            CHECK(next == n);
        }
    }
}

namespace {

WindowedSet constant_set(std::size_t n, std::size_t w, double value) {
    return build_windows(std::vector<double>(n + w, value), w);
}

}  // namespace

TEST_CASE("training reduces error on constant-zero targets") {
    const WindowedSet set = constant_set(300, 3, 0.0);
    for (Arch arch : {Arch::lstm, Arch::gru}) {
        OptimConfig cfg;
        cfg.epochs = 3;
        Rng rng(4);
        const TrainResult r = train_unit(arch, 2, set, Activation::tanh, cfg, rng);
        CHECK(r.rmse <= r.initial_rmse);
    }
}

TEST_CASE("one epoch on a single batch performs exactly one update") {
    OptimConfig cfg;
    cfg.epochs = 1;
    cfg.minibatch_size = 100;
    Rng rng(1);
    const TrainResult r = train_unit(Arch::gru, 2, constant_set(50, 2, 0.01), Activation::tanh, cfg, rng);
    CHECK(r.updates == 1);
    cfg.epochs = 3;
    Rng rng2(1);
    CHECK(train_unit(Arch::gru, 2, constant_set(250, 2, 0.01), Activation::tanh, cfg, rng2).updates == 9);
}

TEST_CASE("training is bit-reproducible") {
    const ReturnSeries r = log_returns(synthetic_garch_prices(GarchSpec{}, 600));
    const WindowedSet set = build_windows(r.values, 4);
    OptimConfig cfg;
    cfg.epochs = 2;
    for (Arch arch : {Arch::lstm, Arch::gru}) {
        Rng a(31);
        Rng b(31);
        const TrainResult x = train_unit(arch, 2, set, Activation::tanh, cfg, a);
        const TrainResult y = train_unit(arch, 2, set, Activation::tanh, cfg, b);
        CHECK(x.unit == y.unit);
        CHECK(x.rmse == y.rmse);
    }
}

TEST_CASE("non-finite loss aborts with the batch index") {
    std::vector<double> v(30, 0.0);
    v[25] = std::numeric_limits<double>::infinity();
    const WindowedSet set = build_windows(v, 2);
    OptimConfig cfg;
    cfg.minibatch_size = 10;
    Rng rng(2);
    try {
        train_unit(Arch::gru, 2, set, Activation::tanh, cfg, rng);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("batch 2") != std::string::npos);
    } catch (const Error&) {
        FAIL("wrong error type");
    }
}

TEST_CASE("empty training set") {
    OptimConfig cfg;
    Rng rng(1);
    CHECK_THROWS_AS(train_unit(Arch::gru, 2, WindowedSet{}, Activation::tanh, cfg, rng), DataError);
}
