#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace proximix {

// splitmix64 finalizer, used to derive independent seeds from a master seed
// plus stream tags. The bit-level recipe is fixed so that seeded runs stay
// reproducible across platforms.
inline std::uint64_t seed_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t seed_combine(std::uint64_t a, std::uint64_t b) {
    return seed_mix(a ^ seed_mix(b));
}

inline std::uint64_t seed_of(double v) {
    return std::bit_cast<std::uint64_t>(v);
}

// Deterministic random source. The engine is std::mt19937_64 (its output
// sequence is specified by the standard); every transform below is written
// out explicitly instead of relying on std:: distributions, whose results
// are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // uniform in [0, 1) with 53 random bits
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n) via masked rejection
    std::size_t uniform_index(std::size_t n) {
        if (n <= 1) return 0;
        std::uint64_t range = static_cast<std::uint64_t>(n);
        std::uint64_t mask = ~0ULL >> std::countl_zero(range - 1);
        std::uint64_t draw;
        do {
            draw = engine_() & mask;
        } while (draw >= range);
        return static_cast<std::size_t>(draw);
    }

    // Box-Muller, two uniforms per call, no cached spare
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Marsaglia-Tsang for shape >= 1; boosted by u^(1/shape) below 1
    double gamma(double shape) {
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            double u = uniform();
            while (u == 0.0) u = uniform();
            return g * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double t = 1.0 + c * x;
            if (t <= 0.0) continue;
            double v = t * t * t;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // symmetric Beta(alpha, alpha); alpha = 1 is the uniform case
    double beta(double alpha) {
        if (alpha == 1.0) return uniform();
        double a = gamma(alpha);
        double b = gamma(alpha);
        double s = a + b;
        if (s <= 0.0) return 0.5;
        return a / s;
    }

    // Fisher-Yates over [0, n)
    template <typename Index>
    void shuffle(std::vector<Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace proximix
