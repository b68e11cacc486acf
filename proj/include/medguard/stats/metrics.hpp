#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace medguard {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

inline ConfusionCounts confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 int positive_class) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("confusion: label vectors must be nonempty and of equal length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool actual = y_true[i] == positive_class;
        const bool predicted = y_pred[i] == positive_class;
        if (actual && predicted)
            ++c.tp;
        else if (!actual && !predicted)
            ++c.tn;
        else if (predicted)
            ++c.fp;
        else
            ++c.fn;
    }
    return c;
}

// A score in [0,1]; `defined` is false when the denominator was zero and the
// value was pinned to 0 so sweep reports stay total.
struct MetricValue {
    double value = 0.0;
    bool defined = true;

    bool operator==(const MetricValue&) const = default;
};

namespace detail {
inline MetricValue ratio(std::size_t num, std::size_t den) {
    if (den == 0) return {0.0, false};
    return {static_cast<double>(num) / static_cast<double>(den), true};
}
}  // namespace detail

inline MetricValue precision(const ConfusionCounts& c) { return detail::ratio(c.tp, c.fp + c.tp); }

// Recall is TP/(TP+FN) — the same ratio the detection rate reports.
// TP/(FP+FN) is a recurring misprint of this formula and is not a metric here.
inline MetricValue recall(const ConfusionCounts& c) { return detail::ratio(c.tp, c.tp + c.fn); }

inline MetricValue f1(const ConfusionCounts& c) {
    const MetricValue p = precision(c);
    const MetricValue r = recall(c);
    if (!p.defined || !r.defined || p.value + r.value == 0.0) return {0.0, false};
    return {2.0 * p.value * r.value / (p.value + r.value), true};
}

inline MetricValue accuracy(const ConfusionCounts& c) { return detail::ratio(c.tp + c.tn, c.total()); }

// Same formula as recall, reported under the intrusion-detection name.
inline MetricValue detection_rate(const ConfusionCounts& c) { return recall(c); }

inline MetricValue false_alarm_rate(const ConfusionCounts& c) { return detail::ratio(c.fp, c.fp + c.tn); }

struct BinaryMetrics {
    MetricValue precision;
    MetricValue recall;
    MetricValue f1;
    MetricValue accuracy;
    MetricValue detection_rate;
    MetricValue false_alarm_rate;

    static BinaryMetrics from(const ConfusionCounts& c) {
        return {medguard::precision(c), medguard::recall(c),     medguard::f1(c),
                medguard::accuracy(c),  medguard::detection_rate(c), medguard::false_alarm_rate(c)};
    }
};

struct ClassReport {
    int class_index = 0;
    std::string class_name;
    ConfusionCounts counts;
    BinaryMetrics metrics;
};

struct MulticlassReport {
    std::vector<ClassReport> per_class;  // one-vs-rest, ordered by class index
    BinaryMetrics macro;                 // unweighted mean over classes
};

inline MulticlassReport multiclass_report(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                          const std::vector<std::string>& class_names) {
    MulticlassReport report;
    const auto n = static_cast<int>(class_names.size());
    double sums[6] = {};
    bool all_defined[6] = {true, true, true, true, true, true};
    for (int c = 0; c < n; ++c) {
        ClassReport cr;
        cr.class_index = c;
        cr.class_name = class_names[static_cast<std::size_t>(c)];
        cr.counts = confusion(y_true, y_pred, c);
        cr.metrics = BinaryMetrics::from(cr.counts);
        const MetricValue vals[6] = {cr.metrics.precision,      cr.metrics.recall,
                                     cr.metrics.f1,             cr.metrics.accuracy,
                                     cr.metrics.detection_rate, cr.metrics.false_alarm_rate};
        for (int m = 0; m < 6; ++m) {
            sums[m] += vals[m].value;
            all_defined[m] = all_defined[m] && vals[m].defined;
        }
        report.per_class.push_back(std::move(cr));
    }
    const auto mean = [&](int m) { return MetricValue{sums[m] / n, all_defined[m]}; };
    report.macro = {mean(0), mean(1), mean(2), mean(3), mean(4), mean(5)};
    return report;
}

}  // namespace medguard
