#pragma once

#include <cmath>
#include <stdexcept>

namespace medguard {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction,
// accurate to ~1e-12 so p-values are stable across platforms.
inline double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("incomplete_beta: x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    const auto contfrac = [](double aa, double bb, double xx) {
        constexpr int max_iter = 300;
        constexpr double eps = 1e-14;
        constexpr double tiny = 1e-300;
        const double qab = aa + bb;
        const double qap = aa + 1.0;
        const double qam = aa - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * xx / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= max_iter; ++m) {
            const int m2 = 2 * m;
            double num = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            num = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
            d = 1.0 + num * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + num / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double delta = d * c;
            h *= delta;
            if (std::abs(delta - 1.0) < eps) break;
        }
        return h;
    };

    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) on the slowly converging side.
    if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * contfrac(a, b, x) / a;
    return 1.0 - std::exp(log_front) * contfrac(b, a, 1.0 - x) / b;
}

// Two-sided p-value of a Student t statistic with the given degrees of freedom.
inline double student_t_two_sided(double t, double df) {
    if (df <= 0.0) throw std::invalid_argument("student_t_two_sided: df must be positive");
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace medguard
