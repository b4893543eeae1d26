#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace swmc {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seeded random stream. Streams are splittable: split(master, k) yields an
/// independent stream determined by (master, k), so concurrent chains are
/// reproducible. All draws are computed from raw 64-bit outputs so that a
/// given seed produces the same sequence in every translation unit.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    static RandomStream split(std::uint64_t master, std::uint64_t stream_index) {
        std::uint64_t s = master;
        splitmix64_next(s);
        s ^= 0xD1B54A32D192ED03ull * (stream_index + 1);
        return RandomStream(splitmix64_next(s));
    }

    std::uint64_t bits() { return eng_(); }

    /// Uniform on the open interval (0, 1); safe to take logarithms.
    double uniform01() {
        return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Marsaglia polar; the spare deviate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Standard Cauchy (half width 1).
    double cauchy() { return std::tan(std::numbers::pi * (uniform01() - 0.5)); }

    /// Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = bits();
        } while (r >= limit);
        return r % n;
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace swmc
