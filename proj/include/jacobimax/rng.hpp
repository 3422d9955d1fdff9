#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace jacobimax {

// Counter-based stream: output i is a pure function of (key, i), so entries
// can be drawn out of order and substreams never interleave. The mixer is the
// 64-bit finalizer of SplitMix64.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// Derives an independent stream key from a master seed and up to three
/// lane identifiers (replica, purpose, entry index).
inline std::uint64_t derive_key(std::uint64_t master, std::uint64_t s0 = 0,
                                std::uint64_t s1 = 0, std::uint64_t s2 = 0) {
    std::uint64_t k = mix64(master + kGolden);
    k = mix64(k ^ (s0 + 0x7f4a7c15u) * kGolden);
    k = mix64(k ^ (s1 + 0x1ce4e5b9u) * kGolden);
    k = mix64(k ^ (s2 + 0x33111ebbu) * kGolden);
    return k;
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

    /// Uniform on (0,1), 53-bit mantissa, never exactly 0 or 1.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    /// Standard normal via the Marsaglia polar method (second value cached).
    double next_gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * next_unit() - 1.0;
            v = 2.0 * next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang squeeze/rejection; shapes below 1
    /// use the boost Gamma(shape+1)*U^{1/shape}.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            const double g = next_gamma(shape + 1.0);
            return g * std::pow(next_unit(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = next_gauss();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_unit();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Compensated (Kahan) accumulator for long sums of O(1) terms.
class KahanSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }
    KahanSum& operator+=(double x) {
        add(x);
        return *this;
    }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace jacobimax
