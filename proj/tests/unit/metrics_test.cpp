#include <doctest.h>

#include <cmath>
#include <numbers>

#include "medguard/core/knn.hpp"
#include "medguard/core/synth.hpp"
#include "medguard/nn/train.hpp"
#include "medguard/stats/crossval.hpp"
#include "medguard/stats/metrics.hpp"
#include "medguard/stats/tests.hpp"
#include "medguard/util/rng.hpp"

using namespace medguard;

TEST_CASE("confusion counts a small example") {
    const ConfusionCounts c = confusion({1, 0, 1, 1}, {1, 0, 0, 1}, 1);
    CHECK(c == ConfusionCounts{2, 1, 0, 1});

    const ConfusionCounts perfect = confusion({1, 0, 1}, {1, 0, 1}, 1);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    CHECK_THROWS(confusion({1, 0}, {1}, 1));
}

TEST_CASE("confusion matches an independent tally on random labels") {
    Rng rng(19);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<int> y_true(50);
        std::vector<int> y_pred(50);
        for (int i = 0; i < 50; ++i) {
            y_true[i] = static_cast<int>(rng.next_below(3));
            y_pred[i] = static_cast<int>(rng.next_below(3));
        }
        const int positive = static_cast<int>(rng.next_below(3));
        const ConfusionCounts c = confusion(y_true, y_pred, positive);

        std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
        for (int i = 0; i < 50; ++i) {
            if (y_true[i] == positive)
                (y_pred[i] == positive ? tp : fn)++;
            else
                (y_pred[i] == positive ? fp : tn)++;
        }
        CHECK(c == ConfusionCounts{tp, tn, fp, fn});
        CHECK(c.total() == 50);
    }
}

TEST_CASE("metric formulas on a hand-checked confusion") {
    const ConfusionCounts c{2, 1, 0, 1};
    CHECK(precision(c).value == 1.0);
    CHECK(recall(c).value == doctest::Approx(2.0 / 3.0));
    CHECK(f1(c).value == doctest::Approx(0.8));
    CHECK(accuracy(c).value == 0.75);
    CHECK(detection_rate(c).value == doctest::Approx(2.0 / 3.0));
    CHECK(false_alarm_rate(c).value == 0.0);
}

TEST_CASE("zero denominators flag the metric undefined") {
    const ConfusionCounts no_positive_predictions{0, 3, 0, 2};
    const MetricValue p = precision(no_positive_predictions);
    CHECK(p.value == 0.0);
    CHECK_FALSE(p.defined);

    const ConfusionCounts no_negatives{2, 0, 0, 1};
    CHECK_FALSE(false_alarm_rate(no_negatives).defined);
}

TEST_CASE("reported precision and recall reproduce the reported f1") {
    // 97.8 precision and 98.5 recall combine to 98.1 within 0.1
    const double f = 2.0 * 0.978 * 0.985 / (0.978 + 0.985);
    CHECK(f * 100.0 == doctest::Approx(98.1).epsilon(0.001));
}

TEST_CASE("detection rate equals recall bit-for-bit and f1 sits between them") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const ConfusionCounts c{rng.next_below(20), rng.next_below(20), rng.next_below(20),
                                rng.next_below(20)};
        CHECK(detection_rate(c).value == recall(c).value);
        CHECK(detection_rate(c).defined == recall(c).defined);
        const MetricValue p = precision(c);
        const MetricValue r = recall(c);
        const MetricValue f = f1(c);
        if (f.defined) {
            CHECK(f.value >= std::min(p.value, r.value) - 1e-12);
            CHECK(f.value <= std::max(p.value, r.value) + 1e-12);
        }
        const MetricValue vals[6] = {p, r, f, accuracy(c), detection_rate(c), false_alarm_rate(c)};
        for (const auto& v : vals) {
            CHECK(v.value >= 0.0);
            CHECK(v.value <= 1.0);
        }
    }
}

TEST_CASE("multiclass report averages one-vs-rest metrics") {
    const std::vector<int> y_true{0, 0, 1, 1, 2, 2};
    const std::vector<int> y_pred{0, 1, 1, 1, 2, 0};
    const MulticlassReport r = multiclass_report(y_true, y_pred, {"normal", "dos", "probe"});
    REQUIRE(r.per_class.size() == 3);
    CHECK(r.per_class[1].counts.tp == 2);
    CHECK(r.per_class[1].counts.fp == 1);
    CHECK(r.per_class[2].counts.tp == 1);
    CHECK(r.per_class[2].counts.fn == 1);
    // one-vs-rest accuracies: 4/6, 5/6, 5/6
    CHECK(r.macro.accuracy.value == doctest::Approx(14.0 / 18.0));
}

namespace {

// Independent tail integration of the t density, Simpson panels.
double t_tail_two_sided(double t, double df) {
    const double norm = std::exp(std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0)) /
                        std::sqrt(df * std::numbers::pi);
    const auto density = [&](double s) { return norm * std::pow(1.0 + s * s / df, -(df + 1.0) / 2.0); };
    const double lo = std::abs(t);
    const double hi = lo + 400.0;
    const int panels = 200000;
    const double h = (hi - lo) / panels;
    double sum = density(lo) + density(hi);
    for (int i = 1; i < panels; ++i) sum += density(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return 2.0 * sum * h / 3.0;
}

}  // namespace

TEST_CASE("paired t-test closed forms and oracle") {
    SUBCASE("identical samples") {
        const StatTestResult r = paired_t_test({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
        CHECK_FALSE(r.significant);
    }

    SUBCASE("alternating differences cancel") {
        const StatTestResult r = paired_t_test({1.0, 0.0, 1.0, 0.0}, {0.0, 1.0, 0.0, 1.0});
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }

    SUBCASE("d = (1,2,3,4,5)") {
        const StatTestResult r = paired_t_test({1.0, 2.0, 3.0, 4.0, 5.0}, {0.0, 0.0, 0.0, 0.0, 0.0});
        CHECK(r.statistic == doctest::Approx(3.0 * std::sqrt(5.0) / std::sqrt(2.5)).epsilon(1e-12));
        CHECK(r.p_value == doctest::Approx(0.0132).epsilon(0.04));
        CHECK(r.p_value == doctest::Approx(t_tail_two_sided(r.statistic, 4.0)).epsilon(1e-6));
        CHECK(r.significant);
    }

    SUBCASE("constant nonzero difference degenerates to p = 0") {
        const StatTestResult r = paired_t_test({2.0, 2.0, 2.0}, {1.0, 1.0, 1.0});
        CHECK(r.p_value == 0.0);
        CHECK(std::isinf(r.statistic));
    }

    SUBCASE("swapping the samples negates t and keeps p") {
        Rng rng(3);
        std::vector<double> a(8);
        std::vector<double> b(8);
        for (int i = 0; i < 8; ++i) {
            a[i] = rng.next_double();
            b[i] = rng.next_double();
        }
        const StatTestResult fwd = paired_t_test(a, b);
        const StatTestResult rev = paired_t_test(b, a);
        CHECK(fwd.statistic == doctest::Approx(-rev.statistic).epsilon(1e-12));
        CHECK(fwd.p_value == doctest::Approx(rev.p_value).epsilon(1e-12));
    }
}

namespace {

// Independent exact Wilcoxon oracle: its own ranking (stable sort over
// pairs) and a recursive walk over sign assignments.
double wilcoxon_exact_oracle(const std::vector<double>& d) {
    std::vector<double> mags;
    std::vector<bool> positive;
    for (double v : d)
        if (v != 0.0) {
            mags.push_back(std::abs(v));
            positive.push_back(v > 0.0);
        }
    const std::size_t m = mags.size();
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    const auto rank_of = [&](double mag) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (sorted[i] == mag) {
                sum += static_cast<double>(i + 1);
                ++count;
            }
        return sum / count;
    };
    std::vector<double> ranks(m);
    for (std::size_t i = 0; i < m; ++i) ranks[i] = rank_of(mags[i]);

    double w_plus = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total += ranks[i];
        if (positive[i]) w_plus += ranks[i];
    }
    const double w_min = std::min(w_plus, total - w_plus);

    std::size_t at_most = 0;
    std::size_t all = 0;
    const std::function<void(std::size_t, double)> walk = [&](std::size_t i, double acc) {
        if (i == m) {
            ++all;
            if (acc <= w_min + 1e-9) ++at_most;
            return;
        }
        walk(i + 1, acc);
        walk(i + 1, acc + ranks[i]);
    };
    walk(0, 0.0);
    return std::min(1.0, 2.0 * static_cast<double>(at_most) / static_cast<double>(all));
}

}  // namespace

TEST_CASE("wilcoxon signed-rank closed forms") {
    SUBCASE("single pair") {
        const StatTestResult r = wilcoxon_signed_rank({1.0}, {0.0});
        CHECK(r.p_value == 1.0);
        CHECK(r.n_pairs == 1);
    }

    SUBCASE("five positive differences") {
        const StatTestResult r =
            wilcoxon_signed_rank({1.0, 2.0, 3.0, 4.0, 5.0}, {0.0, 0.0, 0.0, 0.0, 0.0});
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == doctest::Approx(2.0 / 32.0).epsilon(1e-12));
    }

    SUBCASE("zero differences are dropped") {
        const StatTestResult r = wilcoxon_signed_rank({1.0, 5.0, 3.0}, {1.0, 2.0, 1.0});
        CHECK(r.n_pairs == 2);
    }

    SUBCASE("all-zero differences are undefined") {
        CHECK_THROWS_WITH(wilcoxon_signed_rank({1.0, 2.0}, {1.0, 2.0}),
                          "wilcoxon_signed_rank: test undefined, all differences are zero");
    }
}

TEST_CASE("special function values") {
    CHECK(incomplete_beta(1.0, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(2,3) = x^2 (6 - 8x + 3x^2), closed form for small integer params
    const double x = 0.3;
    CHECK(incomplete_beta(2.0, 3.0, x) ==
          doctest::Approx(x * x * (6.0 - 8.0 * x + 3.0 * x * x)).epsilon(1e-10));

    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));

    // critical value from the t table: t(0.025, df=4) = 2.776445
    CHECK(student_t_two_sided(2.776445105, 4.0) == doctest::Approx(0.05).epsilon(1e-7));
    CHECK(student_t_two_sided(0.0, 7.0) == 1.0);
}

TEST_CASE("wilcoxon normal approximation tracks the exact tail beyond 20 pairs") {
    // m = 21 crosses into the approximation branch; enumeration is still
    // feasible as the oracle
    Rng rng(67);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> a(21);
        std::vector<double> b(21, 0.0);
        for (auto& v : a) {
            v = static_cast<double>(rng.next_below(9)) - 4.0;
            if (v == 0.0) v = 1.0;
        }
        const StatTestResult r = wilcoxon_signed_rank(a, b);
        const double exact = wilcoxon_exact_oracle(a);
        CHECK(r.p_value == doctest::Approx(exact).epsilon(0.15));
        CHECK(std::abs(r.p_value - exact) < 0.02);
    }
}

TEST_CASE("wilcoxon exact p matches the enumeration oracle for m <= 10") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 1 + rng.next_below(10);
        std::vector<double> a(m);
        std::vector<double> b(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            // small integer differences so magnitude ties occur often
            a[i] = static_cast<double>(rng.next_below(9)) - 4.0;
        }
        bool all_zero = true;
        for (double v : a) all_zero = all_zero && v == 0.0;
        if (all_zero) a[0] = 1.0;

        const StatTestResult r = wilcoxon_signed_rank(a, b);
        CHECK(r.p_value == doctest::Approx(wilcoxon_exact_oracle(a)).epsilon(1e-12));
    }
}

TEST_CASE("crossval_report on a constant majority predictor") {
    const auto synth = synth_generate(120, 2, 2, 2, 47);
    const Dataset d = normalize(synth.data);

    const Pipeline majority = [](const Dataset& train, const Dataset& test) {
        std::vector<std::size_t> counts = train.class_counts();
        const int winner = counts[0] >= counts[1] ? 0 : 1;
        return std::vector<int>(test.rows.size(), winner);
    };

    const CrossvalReport r = crossval_report(d, majority, 5, 3);
    CHECK(r.accuracy.mean == doctest::Approx(0.5).epsilon(0.02));

    const auto comparisons = compare_pipelines(d, majority, majority, 5, 3);
    for (const auto& cmp : comparisons) {
        CHECK(cmp.t_test.p_value == 1.0);
        CHECK(cmp.wilcoxon.p_value == 1.0);
    }
}

TEST_CASE("10-fold crossval of the trained classifier separates the synth fixture") {
    const auto synth = synth_generate(250, 4, 2, 2, 59);
    const Dataset d = normalize(synth.data);
    const FeatureMask mask = FeatureMask::all_ones(6);

    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 32;
    cfg.learning_rate = 0.01;
    cfg.units_per_layer = 8;
    cfg.num_layers = 1;
    cfg.sequence_chunks = 3;
    cfg.seed = 4;
    cfg.validation_fraction = 0.0;

    const Pipeline pipeline = [&](const Dataset& tr, const Dataset& te) {
        const TrainResult fitted = train(tr, mask, cfg);
        std::vector<int> labels;
        for (const auto& p : predict(fitted.model, te, mask)) labels.push_back(p.label);
        return labels;
    };

    const CrossvalReport r = crossval_report(d, pipeline, 10, 21);
    REQUIRE(r.per_fold.size() == 10);
    for (const auto& fold : r.per_fold) CHECK(fold.accuracy.value >= 0.9);
}

TEST_CASE("crossval_report with a knn pipeline separates the synth fixture") {
    const auto synth = synth_generate(100, 3, 2, 2, 53);
    const Dataset d = normalize(synth.data);
    const auto informative = synth.informative_indices;

    const Pipeline knn = [&](const Dataset& train, const Dataset& test) {
        std::vector<int> out;
        for (const auto& r : test.rows) out.push_back(knn_predict(train, r.features, 3, informative));
        return out;
    };

    const CrossvalReport r = crossval_report(d, knn, 5, 9);
    for (const auto& fold : r.per_fold) CHECK(fold.accuracy.value >= 0.9);
}
