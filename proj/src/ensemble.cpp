#include "jacobimax/ensemble.hpp"

#include <cmath>

namespace jacobimax {

namespace {
constexpr std::uint64_t kLaneB = 1;
constexpr std::uint64_t kLaneA = 2;
constexpr std::uint64_t kLaneTrunc = 3;
constexpr int kMaxResample = 1000000;
constexpr double kSqrt3 = 1.7320508075688772;

double draw_b(const EnsembleSpec& spec, CounterRng& rng) {
    const double v = spec.noise_variance();
    if (spec.kind == EnsembleKind::GaussianBeta) return std::sqrt(v) * rng.next_gauss();
    return std::sqrt(v) * rng.next_uniform(-kSqrt3, kSqrt3);
}

// Draws a_k^2 for index k >= 1.
double draw_a2(const EnsembleSpec& spec, std::size_t k, CounterRng& rng) {
    if (spec.kind == EnsembleKind::GaussianBeta)
        return (2.0 / spec.beta) * rng.next_gamma(spec.beta * static_cast<double>(k) / 2.0);
    const double kk = static_cast<double>(k);
    for (;;) {
        const double x = kk + std::sqrt(spec.v * kk) * rng.next_uniform(-kSqrt3, kSqrt3);
        if (x > 0.0) return x;
    }
}
}  // namespace

EnsembleSpec EnsembleSpec::gaussian_beta(double beta, bool truncate, double exponent) {
    EnsembleSpec s;
    s.kind = EnsembleKind::GaussianBeta;
    s.beta = beta;
    s.v = 2.0 / beta;
    s.truncate = truncate;
    s.truncation_exponent = exponent;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::generic(double v, const std::string& family, bool truncate,
                                   double exponent) {
    EnsembleSpec s;
    s.kind = EnsembleKind::Generic;
    s.v = v;
    s.family = family;
    s.truncate = truncate;
    s.truncation_exponent = exponent;
    s.validate();
    return s;
}

void EnsembleSpec::validate() const {
    if (kind == EnsembleKind::GaussianBeta) {
        if (!(beta > 0.0)) throw ParameterError("ensemble: beta must be positive");
    } else {
        // v = 0 is the degenerate noise-free member of the family.
        if (!(v >= 0.0)) throw ParameterError("ensemble: v must be nonnegative");
        if (family != "uniform") throw ParameterError("ensemble: unsupported family '" + family + "'");
    }
    if (truncate && !(truncation_exponent >= 1.0))
        throw ParameterError("ensemble: truncation_exponent must be >= 1");
}

double truncation_bound(std::size_t n, double exponent) {
    return std::pow(std::log(static_cast<double>(n)), exponent);
}

bool satisfies_truncation(const JacobiCoefficients& c, const CoefficientMoments& m, double bound) {
    for (std::size_t k = 1; k <= c.n; ++k) {
        if (std::abs(c.b[k - 1]) > bound) return false;
        if (k >= 2) {
            const double dev = std::abs(c.a2(k - 1) - m.mean_a2(k - 1)) / std::sqrt(static_cast<double>(k));
            if (dev > bound) return false;
        }
    }
    return true;
}

static JacobiCoefficients sample_raw(const EnsembleSpec& spec, std::size_t n, const SeedSpec& seed) {
    if (n < 1) throw ParameterError("ensemble: n must be >= 1");
    spec.validate();
    JacobiCoefficients c;
    c.n = n;
    c.b.resize(n);
    c.a.resize(n - 1);
    // One keyed stream per entry: draws are independent of generation order.
    for (std::size_t k = 1; k <= n; ++k) {
        CounterRng rng(derive_key(seed.master_seed, seed.stream_id, kLaneB, k));
        c.b[k - 1] = draw_b(spec, rng);
    }
    for (std::size_t k = 1; k + 1 <= n; ++k) {
        CounterRng rng(derive_key(seed.master_seed, seed.stream_id, kLaneA, k));
        c.a[k - 1] = std::sqrt(draw_a2(spec, k, rng));
    }
    return c;
}

JacobiCoefficients sample_gbe(double beta, std::size_t n, const SeedSpec& seed) {
    return sample_raw(EnsembleSpec::gaussian_beta(beta), n, seed);
}

JacobiCoefficients sample_generic(const EnsembleSpec& spec, std::size_t n, const SeedSpec& seed) {
    if (spec.kind != EnsembleKind::Generic)
        throw ParameterError("sample_generic: spec.kind must be Generic");
    return sample_raw(spec, n, seed);
}

JacobiCoefficients truncate_coefficients(const EnsembleSpec& spec, const JacobiCoefficients& coeffs,
                                         const SeedSpec& seed) {
    const double bound = truncation_bound(coeffs.n, spec.truncation_exponent);
    JacobiCoefficients out = coeffs;
    for (std::size_t k = 1; k <= out.n; ++k) {
        if (std::abs(out.b[k - 1]) <= bound) continue;
        CounterRng rng(derive_key(seed.master_seed, seed.stream_id, kLaneTrunc, 2 * k));
        int tries = 0;
        double x;
        do {
            if (++tries > kMaxResample) throw SamplingError("truncate: resample cap hit for b");
            x = draw_b(spec, rng);
        } while (std::abs(x) > bound);
        out.b[k - 1] = x;
    }
    const CoefficientMoments m{spec.noise_variance()};
    for (std::size_t k = 1; k + 1 <= out.n; ++k) {
        const double scale = std::sqrt(static_cast<double>(k + 1));
        if (std::abs(out.a2(k) - m.mean_a2(k)) <= bound * scale) continue;
        CounterRng rng(derive_key(seed.master_seed, seed.stream_id, kLaneTrunc, 2 * k + 1));
        int tries = 0;
        double a2;
        do {
            if (++tries > kMaxResample) throw SamplingError("truncate: resample cap hit for a");
            a2 = draw_a2(spec, k, rng);
        } while (std::abs(a2 - m.mean_a2(k)) > bound * scale);
        out.a[k - 1] = std::sqrt(a2);
    }
    return out;
}

JacobiCoefficients sample_ensemble(const EnsembleSpec& spec, std::size_t n, const SeedSpec& seed) {
    JacobiCoefficients c = sample_raw(spec, n, seed);
    if (spec.truncate) c = truncate_coefficients(spec, c, seed);
    return c;
}

}  // namespace jacobimax
