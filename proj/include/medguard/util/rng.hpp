#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <utility>
#include <vector>

namespace medguard {

// Anything that yields uniform doubles in [0,1). Lets tests substitute
// fixed-value sources for the closed-form position-update checks.
template <class R>
concept RandomSource = requires(R r) {
    { r.next_double() } -> std::convertible_to<double>;
};

// xoshiro256** seeded via splitmix64. The standard library engines are
// portable but its distributions are not; all sampling here is hand-rolled
// so that a seed pins byte-identical behaviour on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0,1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [low, high).
    double next_in(double low, double high) { return low + (high - low) * next_double(); }

    // Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

    // Standard normal via Box-Muller; the spare value is cached.
    double next_gaussian();

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            using std::swap;
            swap(v[i - 1], v[next_below(i)]);
        }
    }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t state_[4]{};
    double spare_gaussian_ = 0.0;
    bool has_spare_ = false;
};

inline double Rng::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_gaussian_;
    }
    double u;
    double v;
    double s;
    do {
        u = next_in(-1.0, 1.0);
        v = next_in(-1.0, 1.0);
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_gaussian_ = v * m;
    has_spare_ = true;
    return u * m;
}

}  // namespace medguard
