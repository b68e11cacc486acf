#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "medguard/stats/special.hpp"

namespace medguard {

struct StatTestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool significant = false;  // at alpha = 0.05
    std::size_t n_pairs = 0;
};

namespace detail {
inline std::vector<double> paired_differences(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired test: samples must have equal length");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

inline StatTestResult finish(double statistic, double p, std::size_t n) {
    return {statistic, p, p < 0.05, n};
}
}  // namespace detail

// Two-sided paired t-test on the differences a - b (sample sd, n-1 dof).
inline StatTestResult paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    const auto d = detail::paired_differences(a, b);
    const auto n = d.size();
    if (n < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");

    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    if (sd == 0.0) {
        if (mean == 0.0) return detail::finish(0.0, 1.0, n);
        const double inf = std::numeric_limits<double>::infinity();
        return detail::finish(mean > 0.0 ? inf : -inf, 0.0, n);
    }
    const double t = mean * std::sqrt(static_cast<double>(n)) / sd;
    return detail::finish(t, student_t_two_sided(t, static_cast<double>(n - 1)), n);
}

// Wilcoxon signed-rank test. Zero differences are dropped, tied magnitudes
// get average ranks, and the statistic is W = min(W+, W-). The two-sided p
// is exact (full sign enumeration) for m <= 20 pairs and a normal
// approximation with continuity correction beyond that.
inline StatTestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> diffs;
    for (double v : detail::paired_differences(a, b))
        if (v != 0.0) diffs.push_back(v);
    const std::size_t m = diffs.size();
    if (m == 0) throw std::runtime_error("wilcoxon_signed_rank: test undefined, all differences are zero");

    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });

    // average ranks for tied magnitudes
    std::vector<double> rank(m);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double w_plus = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        total += rank[k];
        if (diffs[k] > 0.0) w_plus += rank[k];
    }
    const double w_minus = total - w_plus;
    const double w = std::min(w_plus, w_minus);

    double p;
    if (m <= 20) {
        // count sign assignments whose W+ does not exceed the observed minimum
        std::size_t at_most = 0;
        const auto assignments = std::uint64_t{1} << m;
        for (std::uint64_t mask = 0; mask < assignments; ++mask) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k)
                if (mask & (std::uint64_t{1} << k)) s += rank[k];
            if (s <= w + 1e-9) ++at_most;
        }
        p = std::min(1.0, 2.0 * static_cast<double>(at_most) / static_cast<double>(assignments));
    } else {
        double var = 0.0;
        for (std::size_t k = 0; k < m; ++k) var += rank[k] * rank[k];
        var /= 4.0;
        const double mu = total / 2.0;
        const double z = (w - mu + 0.5) / std::sqrt(var);
        p = std::min(1.0, 2.0 * normal_cdf(z));
    }
    return detail::finish(w, p, m);
}

}  // namespace medguard
