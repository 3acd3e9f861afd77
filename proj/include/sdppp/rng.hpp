#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace sdppp {

// Bit-portable RNG stack. std::mt19937_64 plus <random> distributions are not
// reproducible across standard libraries, and every table in this project is
// supposed to be replayable from (config, seed) alone, so the generator and
// all variate transforms live here.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stream derivation: master seed fanned out by a documented hash chain.
// derive_seed(master, a, b, c) feeds each tag through splitmix64 so that
// adding grid cells or replicas never reshuffles existing streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0, std::uint64_t tag_c = 0) {
    std::uint64_t h = master;
    h = splitmix64(h) ^ (tag_a * 0xD1B54A32D192ED03ULL);
    h = splitmix64(h) ^ (tag_b * 0xABCC5167CCAD925FULL);
    h = splitmix64(h) ^ (tag_c * 0x2545F4914F6CDD1DULL);
    return splitmix64(h);
}

// xoshiro256++ (Blackman & Vigna), public-domain reference constants.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        have_cached_normal_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1), 53-bit mantissa
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0,1]
    double u01_pos() { return 1.0 - u01(); }

    double exponential(double mean = 1.0) { return -std::log(u01_pos()) * mean; }

    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        // Marsaglia polar method
        double u, v, s;
        do {
            u = 2.0 * u01() - 1.0;
            v = 2.0 * u01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_normal_ = v * m;
        have_cached_normal_ = true;
        return u * m;
    }

    // Exact Poisson: Knuth product below 10, Hormann's PTRS above.
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean < 10.0) {
            const double limit = std::exp(-mean);
            double prod = 1.0;
            std::uint64_t n = 0;
            while (true) {
                prod *= u01_pos();
                if (prod <= limit) return n;
                ++n;
            }
        }
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        while (true) {
            const double u = u01() - 0.5;
            const double v = u01();
            const double us = 0.5 - std::abs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (kf < 0.0) continue;
            if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
            if (us < 0.013 && v > us) continue;
            const double k = kf;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * loglam - mean - std::lgamma(k + 1.0)) {
                return static_cast<std::uint64_t>(kf);
            }
        }
    }

    // Marsaglia-Tsang; shape >= 1 is all this project needs.
    double gamma(double shape) {
        if (!(shape >= 1.0)) throw std::domain_error("gamma: shape must be >= 1");
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = u01_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

}  // namespace sdppp
