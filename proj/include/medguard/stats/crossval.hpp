#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "medguard/core/split.hpp"
#include "medguard/stats/metrics.hpp"
#include "medguard/stats/tests.hpp"

namespace medguard {

// A training procedure under evaluation: fit on train, predict test labels.
using Pipeline = std::function<std::vector<int>(const Dataset& train, const Dataset& test)>;

struct MetricAggregate {
    double mean = 0.0;
    double sd = 0.0;
};

struct CrossvalReport {
    std::vector<BinaryMetrics> per_fold;
    MetricAggregate precision;
    MetricAggregate recall;
    MetricAggregate f1;
    MetricAggregate accuracy;
    MetricAggregate detection_rate;
    MetricAggregate false_alarm_rate;
};

namespace detail {

inline double metric_of(const BinaryMetrics& m, int which) {
    switch (which) {
        case 0: return m.precision.value;
        case 1: return m.recall.value;
        case 2: return m.f1.value;
        case 3: return m.accuracy.value;
        case 4: return m.detection_rate.value;
        default: return m.false_alarm_rate.value;
    }
}

inline MetricAggregate aggregate(const std::vector<BinaryMetrics>& folds, int which) {
    const auto n = static_cast<double>(folds.size());
    double mean = 0.0;
    for (const auto& f : folds) mean += metric_of(f, which);
    mean /= n;
    double ss = 0.0;
    for (const auto& f : folds) {
        const double d = metric_of(f, which) - mean;
        ss += d * d;
    }
    return {mean, folds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

}  // namespace detail

inline std::vector<double> metric_series(const CrossvalReport& r, const std::string& name) {
    const int which = name == "precision"        ? 0
                      : name == "recall"         ? 1
                      : name == "f1"             ? 2
                      : name == "accuracy"       ? 3
                      : name == "detection_rate" ? 4
                      : name == "false_alarm_rate"
                          ? 5
                          : throw std::invalid_argument("unknown metric '" + name + "'");
    std::vector<double> out;
    out.reserve(r.per_fold.size());
    for (const auto& f : r.per_fold) out.push_back(detail::metric_of(f, which));
    return out;
}

// Stratified k-fold evaluation of one pipeline; metrics are scored against
// the schema's positive class and summarized as mean +/- sample sd.
inline CrossvalReport crossval_report(const Dataset& d, const Pipeline& pipeline, std::size_t k,
                                      std::uint64_t seed) {
    CrossvalReport report;
    for (const auto& [train, test] : kfold_split(d, k, seed)) {
        const std::vector<int> y_pred = pipeline(train, test);
        std::vector<int> y_true;
        y_true.reserve(test.rows.size());
        for (const auto& r : test.rows) y_true.push_back(r.label);
        report.per_fold.push_back(BinaryMetrics::from(confusion(y_true, y_pred, d.schema.positive_class)));
    }
    report.precision = detail::aggregate(report.per_fold, 0);
    report.recall = detail::aggregate(report.per_fold, 1);
    report.f1 = detail::aggregate(report.per_fold, 2);
    report.accuracy = detail::aggregate(report.per_fold, 3);
    report.detection_rate = detail::aggregate(report.per_fold, 4);
    report.false_alarm_rate = detail::aggregate(report.per_fold, 5);
    return report;
}

struct MetricComparison {
    std::string metric;
    StatTestResult t_test;
    StatTestResult wilcoxon;
};

// Paired method-vs-method comparison over identical folds. A degenerate
// Wilcoxon (all per-fold differences zero) is reported as p = 1 instead of
// propagating the error, so full sweeps stay total.
inline std::vector<MetricComparison> compare_pipelines(const Dataset& d, const Pipeline& a, const Pipeline& b,
                                                       std::size_t k, std::uint64_t seed) {
    const CrossvalReport ra = crossval_report(d, a, k, seed);
    const CrossvalReport rb = crossval_report(d, b, k, seed);
    std::vector<MetricComparison> out;
    for (const std::string name :
         {"precision", "recall", "f1", "accuracy", "detection_rate", "false_alarm_rate"}) {
        MetricComparison cmp;
        cmp.metric = name;
        const auto series_a = metric_series(ra, name);
        const auto series_b = metric_series(rb, name);
        cmp.t_test = paired_t_test(series_a, series_b);
        try {
            cmp.wilcoxon = wilcoxon_signed_rank(series_a, series_b);
        } catch (const std::runtime_error&) {
            cmp.wilcoxon = {0.0, 1.0, false, 0};
        }
        out.push_back(std::move(cmp));
    }
    return out;
}

}  // namespace medguard
