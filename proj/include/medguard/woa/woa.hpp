#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "medguard/util/rng.hpp"

namespace medguard {

struct Bounds {
    double low = 0.0;
    double high = 1.0;
};

struct WoaConfig {
    std::size_t population = 50;  // N
    std::size_t max_iters = 200;  // T
    std::size_t dimension = 1;    // D
    std::vector<Bounds> bounds;   // one entry per dimension
    double convergence_eps = 1e-6;
    std::uint64_t seed = 0;
    double spiral_b = 1.0;  // logarithmic spiral shape constant

    static WoaConfig boxed(std::size_t dim, double low, double high) {
        WoaConfig cfg;
        cfg.dimension = dim;
        cfg.bounds.assign(dim, Bounds{low, high});
        return cfg;
    }

    void validate() const {
        if (population < 2) throw std::invalid_argument("population must be at least 2");
        if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
        if (dimension == 0 || bounds.size() != dimension)
            throw std::invalid_argument("bounds must cover every dimension");
        for (const auto& b : bounds)
            if (!(b.low < b.high)) throw std::invalid_argument("bounds require low < high");
        if (!(convergence_eps > 0.0)) throw std::invalid_argument("convergence_eps must be positive");
    }
};

struct Whale {
    std::vector<double> position;
    double fitness = 0.0;
};

struct WoaResult {
    std::vector<double> position;
    double fitness = 0.0;
    std::vector<double> history;  // best-so-far per iteration, non-increasing
};

using Objective = std::function<double(const std::vector<double>&)>;

// Shrinking coefficient a: linear decay from 2 at t=0 to 0 at t=T.
inline double shrink_factor(std::size_t t, std::size_t total_iters) {
    return 2.0 - static_cast<double>(t) * (2.0 / static_cast<double>(total_iters));
}

inline double clamp_to(double v, const Bounds& b) { return std::min(std::max(v, b.low), b.high); }

// Shared form of the encircling and searching moves:
// new_i = target_i - A * |C * target_i - current_i|, clamped to the box.
inline std::vector<double> position_toward(const std::vector<double>& target, const std::vector<double>& current,
                                           double coeff_a, double coeff_c, const std::vector<Bounds>& bounds) {
    std::vector<double> out(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        const double dist = std::abs(coeff_c * target[i] - current[i]);
        out[i] = clamp_to(target[i] - coeff_a * dist, bounds[i]);
    }
    return out;
}

// Log-spiral move around the best agent: |best - current| * e^{b l} cos(2 pi l) + best.
inline std::vector<double> spiral_around(const std::vector<double>& best, const std::vector<double>& current,
                                         double l, double b, const std::vector<Bounds>& bounds) {
    const double swirl = std::exp(b * l) * std::cos(2.0 * std::numbers::pi * l);
    std::vector<double> out(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        const double dist = std::abs(best[i] - current[i]);
        out[i] = clamp_to(dist * swirl + best[i], bounds[i]);
    }
    return out;
}

// Exploitation move toward the best agent (|A| < 1 branch). One draw feeds
// A = 2ar - a, a second feeds C = 2r.
template <RandomSource R>
std::vector<double> encircle_update(const Whale& current, const Whale& best, double a, R& rng,
                                    const std::vector<Bounds>& bounds) {
    const double coeff_a = 2.0 * a * rng.next_double() - a;
    const double coeff_c = 2.0 * rng.next_double();
    return position_toward(best.position, current.position, coeff_a, coeff_c, bounds);
}

// Exploration move toward a random agent (|A| >= 1 branch).
template <RandomSource R>
std::vector<double> explore_update(const Whale& current, const Whale& rand_agent, double a, R& rng,
                                   const std::vector<Bounds>& bounds) {
    const double coeff_a = 2.0 * a * rng.next_double() - a;
    const double coeff_c = 2.0 * rng.next_double();
    return position_toward(rand_agent.position, current.position, coeff_a, coeff_c, bounds);
}

// Spiral move (p >= 0.5 branch); l is uniform in [-1, 1].
template <RandomSource R>
std::vector<double> spiral_update(const Whale& current, const Whale& best, R& rng, double b,
                                  const std::vector<Bounds>& bounds) {
    const double l = -1.0 + 2.0 * rng.next_double();
    return spiral_around(best.position, current.position, l, b, bounds);
}

namespace detail {

inline std::string format_position(const std::vector<double>& pos) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) out << ", ";
        out << pos[i];
    }
    out << ']';
    return out.str();
}

inline double evaluate_checked(const Objective& f, const std::vector<double>& pos) {
    const double fit = f(pos);
    if (!std::isfinite(fit))
        throw std::runtime_error("objective returned non-finite fitness at " + format_position(pos));
    return fit;
}

}  // namespace detail

// Whale optimization over a bounded box (minimization). Per agent and
// iteration: draw A, C, p; branch on p < 0.5 then |A| < 1 for the encircle /
// explore / spiral moves; positions update in agent order and the whole
// population is re-evaluated afterwards. Stops early after 20 consecutive
// iterations whose best improvement falls below convergence_eps.
inline WoaResult optimize(const Objective& f, const WoaConfig& cfg, Rng& rng) {
    cfg.validate();
    constexpr std::size_t kStagnationWindow = 20;

    std::vector<Whale> pod(cfg.population);
    for (auto& w : pod) {
        w.position.resize(cfg.dimension);
        for (std::size_t d = 0; d < cfg.dimension; ++d)
            w.position[d] = rng.next_in(cfg.bounds[d].low, cfg.bounds[d].high);
        w.fitness = detail::evaluate_checked(f, w.position);
    }

    Whale best = pod.front();
    for (const auto& w : pod)
        if (w.fitness < best.fitness) best = w;

    WoaResult result;
    result.history.push_back(best.fitness);

    std::size_t stagnant = 0;
    for (std::size_t t = 1; t <= cfg.max_iters; ++t) {
        const double a = shrink_factor(t, cfg.max_iters);
        for (auto& w : pod) {
            const double coeff_a = 2.0 * a * rng.next_double() - a;
            const double coeff_c = 2.0 * rng.next_double();
            const double p = rng.next_double();
            if (p < 0.5) {
                if (std::abs(coeff_a) < 1.0) {
                    w.position = position_toward(best.position, w.position, coeff_a, coeff_c, cfg.bounds);
                } else {
                    const auto& mate = pod[rng.next_below(cfg.population)];
                    w.position = position_toward(mate.position, w.position, coeff_a, coeff_c, cfg.bounds);
                }
            } else {
                const double l = -1.0 + 2.0 * rng.next_double();
                w.position = spiral_around(best.position, w.position, l, cfg.spiral_b, cfg.bounds);
            }
        }
        for (auto& w : pod) {
            w.fitness = detail::evaluate_checked(f, w.position);
            if (w.fitness < best.fitness) best = w;
        }
        const double improvement = result.history.back() - best.fitness;
        result.history.push_back(best.fitness);
        stagnant = improvement < cfg.convergence_eps ? stagnant + 1 : 0;
        if (stagnant >= kStagnationWindow) break;
    }

    result.position = best.position;
    result.fitness = best.fitness;
    return result;
}

inline WoaResult optimize(const Objective& f, const WoaConfig& cfg) {
    Rng rng(cfg.seed);
    return optimize(f, cfg, rng);
}

}  // namespace medguard
