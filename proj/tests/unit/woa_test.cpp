#include <doctest.h>

#include <cmath>
#include <string>

#include "medguard/core/synth.hpp"
#include "medguard/woa/binary.hpp"
#include "medguard/woa/woa.hpp"

using namespace medguard;

namespace {

// Fixed-value source for pinning the closed-form position updates.
struct ConstSource {
    double value;
    double next_double() { return value; }
};

const std::vector<Bounds> kWide = {Bounds{-100.0, 100.0}};

}  // namespace

TEST_CASE("shrink factor decays linearly from 2 to 0") {
    CHECK(shrink_factor(0, 200) == 2.0);
    CHECK(shrink_factor(200, 200) == 0.0);
    CHECK(shrink_factor(100, 200) == 1.0);
}

TEST_CASE("encircle_update closed forms") {
    ConstSource half{0.5};  // A = 0, C = 1

    SUBCASE("current equal to best is a fixed point") {
        Whale w{{3.0}, 0.0};
        CHECK(encircle_update(w, w, 1.0, half, kWide) == std::vector<double>{3.0});
    }

    SUBCASE("a = 0 forces convergence onto the best position") {
        ConstSource r{0.9};
        Whale current{{5.0}, 0.0};
        Whale best{{-2.0}, 0.0};
        CHECK(encircle_update(current, best, 0.0, r, kWide) == std::vector<double>{-2.0});
    }

    SUBCASE("hand-evaluated 1-D case") {
        // current=0, best=1, r=0.5 -> A=0, C=1 -> D=|1*1-0|=1 -> 1 - 0*1 = 1
        Whale current{{0.0}, 0.0};
        Whale best{{1.0}, 0.0};
        CHECK(encircle_update(current, best, 1.0, half, kWide) == std::vector<double>{1.0});
    }
}

TEST_CASE("explore_update closed forms") {
    SUBCASE("random agent equal to current with C=1 leaves position unchanged") {
        ConstSource half{0.5};
        Whale w{{4.0}, 0.0};
        CHECK(explore_update(w, w, 1.0, half, kWide) == std::vector<double>{4.0});
    }

    SUBCASE("hand-evaluated 1-D case with clamping") {
        // current=2, rand=0, a=2, r=1 -> A=2, C=2 -> 0 - 2*|0-2| = -4, clamped
        ConstSource one{1.0};
        Whale current{{2.0}, 0.0};
        Whale rand_agent{{0.0}, 0.0};
        const std::vector<Bounds> unit = {Bounds{-1.0, 1.0}};
        CHECK(explore_update(current, rand_agent, 2.0, one, unit) == std::vector<double>{-1.0});
    }

    SUBCASE("raw update above the box clamps to the upper bound") {
        ConstSource half{0.5};  // A=0 -> new position = rand_agent position = 3.5
        Whale current{{0.0}, 0.0};
        Whale rand_agent{{3.5}, 0.0};
        const std::vector<Bounds> unit = {Bounds{-1.0, 1.0}};
        CHECK(explore_update(current, rand_agent, 1.0, half, unit) == std::vector<double>{1.0});
    }
}

TEST_CASE("spiral_update closed forms") {
    SUBCASE("current equal to best collapses onto best") {
        ConstSource r{0.25};
        Whale w{{2.0}, 0.0};
        CHECK(spiral_update(w, w, r, 1.0, kWide) == std::vector<double>{2.0});
    }

    SUBCASE("l = 0 gives distance plus best exactly") {
        CHECK(spiral_around({1.0}, {0.0}, 0.0, 1.0, kWide) == std::vector<double>{2.0});
    }

    SUBCASE("hand-evaluated 1-D case") {
        // current=0, best=1, b=1, l=0.5 -> |1|*e^{0.5}*cos(pi) + 1 = 1 - e^{0.5}
        const auto pos = spiral_around({1.0}, {0.0}, 0.5, 1.0, kWide);
        CHECK(pos[0] == doctest::Approx(1.0 - std::exp(0.5)).epsilon(1e-12));
    }
}

TEST_CASE("optimize drives the sphere function toward zero") {
    WoaConfig cfg = WoaConfig::boxed(10, -5.0, 5.0);
    cfg.population = 30;
    cfg.max_iters = 200;
    cfg.seed = 1;

    const Objective sphere = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };

    const WoaResult res = optimize(sphere, cfg);
    CHECK(res.fitness < 1e-3);

    for (std::size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i] <= res.history[i - 1]);

    const WoaResult res2 = optimize(sphere, cfg);
    CHECK(res2.history == res.history);
    CHECK(res2.position == res.position);
}

TEST_CASE("optimize on a constant objective keeps a flat history") {
    WoaConfig cfg = WoaConfig::boxed(3, -1.0, 1.0);
    cfg.population = 5;
    cfg.max_iters = 50;
    cfg.seed = 9;

    const WoaResult res = optimize([](const std::vector<double>&) { return 7.5; }, cfg);
    CHECK(res.fitness == 7.5);
    for (double h : res.history) CHECK(h == 7.5);
    // early stop: 20 stagnant iterations plus the initial entry
    CHECK(res.history.size() == 21);
}

TEST_CASE("optimize keeps every whale inside the box") {
    WoaConfig cfg = WoaConfig::boxed(4, -2.0, 3.0);
    cfg.population = 8;
    cfg.max_iters = 40;
    cfg.seed = 4;

    bool in_bounds = true;
    const Objective probe = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) {
            if (v < -2.0 || v > 3.0) in_bounds = false;
            s += (v - 1.0) * (v - 1.0);
        }
        return s;
    };
    optimize(probe, cfg);
    CHECK(in_bounds);
}

TEST_CASE("optimize reports a non-finite objective with the position") {
    WoaConfig cfg = WoaConfig::boxed(2, -1.0, 1.0);
    cfg.population = 4;
    cfg.max_iters = 5;
    cfg.seed = 2;

    try {
        optimize([](const std::vector<double>&) { return std::nan(""); }, cfg);
        FAIL("expected an error for non-finite fitness");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
        CHECK(std::string(e.what()).find('[') != std::string::npos);
    }
}

TEST_CASE("tanh transfer value") {
    CHECK(tanh_transfer(0.0) == 0.0);
    CHECK(tanh_transfer(-3.0) == doctest::Approx(0.99505475368673).epsilon(1e-10));
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double x = rng.next_in(-6.0, 6.0);
        CHECK(tanh_transfer(x) == tanh_transfer(-x));
        CHECK(tanh_transfer(x) >= 0.0);
        CHECK(tanh_transfer(x) < 1.0);
    }
}

TEST_CASE("binarize follows the transfer rule") {
    Rng rng(11);

    SUBCASE("zero positions always select everything") {
        const auto m = binarize(std::vector<double>(16, 0.0), rng);
        CHECK(m.popcount() == 16);
    }

    SUBCASE("saturated positions deselect almost surely, then repair") {
        const auto m = binarize(std::vector<double>(32, 10.0), rng);
        CHECK(m.popcount() == 1);  // all bits drop, repair sets one
    }

    SUBCASE("bit frequency tracks 1 - |tanh x|") {
        std::size_t ones = 0;
        const std::vector<double> pos(10000, 1.0);
        const auto m = binarize(pos, rng);
        for (auto b : m.bits) ones += b;
        const double expected = 1.0 - std::tanh(1.0);
        CHECK(static_cast<double>(ones) / 10000.0 == doctest::Approx(expected).epsilon(0.08));
    }
}

namespace {

// Ten features; feature 0 carries the label, the rest are constant.
Dataset separable_ten_feature_set() {
    Dataset d;
    for (int i = 0; i < 10; ++i) d.schema.feature_names.push_back("f" + std::to_string(i));
    d.schema.label_map = {{"benign", 0}, {"attack", 1}};
    d.schema.positive_class = 1;
    for (int r = 0; r < 20; ++r) {
        Row row;
        row.label = r < 10 ? 0 : 1;
        row.features.assign(10, 0.0);
        row.features[0] = row.label;
        d.rows.push_back(row);
    }
    recompute_minmax(d);
    d.normalized = true;
    return d;
}

}  // namespace

TEST_CASE("subset_fitness combines error rate and subset size") {
    BinaryWoaConfig cfg;
    cfg.validation_fraction = 0.5;

    SUBCASE("perfect surrogate, single feature") {
        const Dataset d = separable_ten_feature_set();
        std::vector<std::uint8_t> bits(10, 0);
        bits[0] = 1;
        Rng rng(3);
        const double fit = subset_fitness(d, FeatureMask(std::move(bits)), cfg, rng);
        CHECK(fit == doctest::Approx(0.001).epsilon(1e-12));
    }

    SUBCASE("known error rate, five features") {
        // validation: 10 rows, exactly one poisoned -> error 0.1
        Dataset train = separable_ten_feature_set();
        Dataset val;
        val.schema = train.schema;
        for (int r = 0; r < 10; ++r) {
            Row row;
            row.label = r < 5 ? 0 : 1;
            row.features.assign(10, 0.0);
            row.features[0] = row.label;
            val.rows.push_back(row);
        }
        val.rows[9].features[0] = 0.0;  // labeled attack, looks benign
        recompute_minmax(val);

        std::vector<std::uint8_t> bits(10, 0);
        for (int i = 0; i < 5; ++i) bits[i] = 1;
        const double fit = masked_subset_fitness(train, val, FeatureMask(std::move(bits)), cfg);
        CHECK(fit == doctest::Approx(0.99 * 0.1 + 0.01 * 0.5).epsilon(1e-12));
    }

    SUBCASE("weight extremes reduce to the individual terms") {
        const Dataset d = separable_ten_feature_set();
        std::vector<std::uint8_t> bits(10, 0);
        bits[0] = 1;
        bits[3] = 1;
        const FeatureMask m(std::move(bits));

        BinaryWoaConfig pure_error = cfg;
        pure_error.lambda_weight = 1.0;
        pure_error.beta_weight = 0.0;
        Rng r1(3);
        CHECK(subset_fitness(d, m, pure_error, r1) == 0.0);

        BinaryWoaConfig pure_size = cfg;
        pure_size.lambda_weight = 0.0;
        pure_size.beta_weight = 1.0;
        Rng r2(3);
        CHECK(subset_fitness(d, m, pure_size, r2) == doctest::Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("informative-only masks beat noise-only masks") {
    const auto synth = synth_generate(300, 5, 15, 2, 77);
    const Dataset d = normalize(synth.data);

    std::vector<std::uint8_t> informative(20, 0);
    std::vector<std::uint8_t> noise(20, 0);
    for (std::size_t i = 0; i < 20; ++i) (i < 5 ? informative[i] : noise[i]) = 1;

    BinaryWoaConfig cfg;
    Rng r1(8);
    Rng r2(8);
    const double good = subset_fitness(d, FeatureMask(std::move(informative)), cfg, r1);
    const double bad = subset_fitness(d, FeatureMask(std::move(noise)), cfg, r2);
    CHECK(good < bad);
}

TEST_CASE("select_features recovers planted informative features") {
    // Six classes make each informative column the only witness for one
    // class, so dropping any of them costs real surrogate error.
    const auto synth = synth_generate(400, 5, 15, 6, 101);
    const Dataset d = normalize(synth.data);

    BinaryWoaConfig cfg;
    cfg.woa.population = 30;
    cfg.woa.max_iters = 80;
    cfg.woa.seed = 13;

    const SelectionResult sel = select_features(d, cfg);
    std::size_t hits = 0;
    for (auto i : synth.informative_indices) hits += sel.mask.bits[i];
    CHECK(hits >= 4);
    CHECK(sel.mask.popcount() <= 10);

    for (std::size_t i = 1; i < sel.history.size(); ++i) CHECK(sel.history[i] <= sel.history[i - 1]);

    const SelectionResult again = select_features(d, cfg);
    CHECK(again.mask == sel.mask);
    CHECK(again.fitness == sel.fitness);
}

TEST_CASE("select_features on a single-column dataset returns the only mask") {
    const auto synth = synth_generate(40, 1, 0, 2, 5);
    const Dataset d = normalize(synth.data);
    BinaryWoaConfig cfg;
    cfg.woa.population = 4;
    cfg.woa.max_iters = 3;
    cfg.woa.seed = 1;
    const SelectionResult sel = select_features(d, cfg);
    CHECK(sel.mask.bits == std::vector<std::uint8_t>{1});
}
