#pragma once

#include <cmath>
#include <cstdint>

namespace boolvis {

// SplitMix64; used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Collapse a (root, tag...) tuple into one well-mixed 64-bit value.
inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = root;
    std::uint64_t h = splitmix64(s);
    s ^= a + 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(s);
    s ^= b + 0xbf58476d1ce4e5b9ULL;
    h ^= splitmix64(s);
    s ^= c + 0x94d049bb133111ebULL;
    h ^= splitmix64(s);
    return h;
}

// xoshiro256++ with splitmix-derived substreams.  Streams obtained through
// child() with distinct tags are statistically independent, which is what the
// per-obstacle / per-replicate seeding scheme relies on: any worker can
// reconstruct stream (root, a, b, c) without coordination.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
    }

    static Rng child(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) {
        return Rng(mix_seed(root, a, b, c));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform_pos()); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double m = std::sqrt(-2.0 * std::log(u1));
        spare_ = m * std::sin(6.283185307179586476925286766559 * u2);
        have_spare_ = true;
        return m * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Poisson variate; exact inversion for small means, Hormann's PTRD
    // transformed rejection for large ones.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) return poisson_inversion(mean);
        return poisson_ptrd(mean);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    long poisson_inversion(double mean) {
        double p = std::exp(-mean);
        double cum = p;
        double u = uniform();
        long k = 0;
        while (u > cum) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
            if (k > 1000) break;  // p underflow guard; unreachable for mean < 30
        }
        return k;
    }

    long poisson_ptrd(double mu) {
        const double smu = std::sqrt(mu);
        const double b = 0.931 + 2.53 * smu;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform() - 0.5;
            double v = uniform_pos();
            double us = 0.5 - std::fabs(u);
            double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            double k = kf;
            double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            double rhs = k * std::log(mu) - mu - std::lgamma(k + 1.0);
            if (lhs <= rhs) return static_cast<long>(kf);
        }
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace boolvis
