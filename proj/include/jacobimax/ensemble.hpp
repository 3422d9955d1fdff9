#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jacobimax/rng.hpp"

namespace jacobimax {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class EnsembleKind { GaussianBeta, Generic };

/// Coefficient law for the random tridiagonal matrix. GaussianBeta draws
/// b_k ~ N(0, 2/beta) and a_k^2 ~ (2/beta) Gamma(beta k / 2); the generic
/// family uses bounded uniform noise with the same first two moments.
struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::GaussianBeta;
    double beta = 2.0;           // GaussianBeta
    double v = 1.0;              // Generic noise variance; 2/beta otherwise
    std::string family = "uniform";
    bool truncate = false;
    double truncation_exponent = 2.0;

    static EnsembleSpec gaussian_beta(double beta, bool truncate = false,
                                      double exponent = 2.0);
    static EnsembleSpec generic(double v, const std::string& family = "uniform",
                                bool truncate = false, double exponent = 2.0);

    double noise_variance() const { return kind == EnsembleKind::GaussianBeta ? 2.0 / beta : v; }
    void validate() const;
};

/// One realization: off-diagonal entries a_1..a_{n-1} and diagonal b_1..b_n.
struct JacobiCoefficients {
    std::size_t n = 0;
    std::vector<double> a;  // a[k-1] = a_k, k = 1..n-1
    std::vector<double> b;  // b[k-1] = b_k, k = 1..n

    double a2(std::size_t k) const { return k == 0 ? 0.0 : a[k - 1] * a[k - 1]; }
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

/// Exact first/second moments of the coefficient law, used by the
/// deterministic variance profiles.
struct CoefficientMoments {
    double v = 1.0;
    double mean_b(std::size_t) const { return 0.0; }
    double var_b(std::size_t) const { return v; }
    double mean_a2(std::size_t k) const { return static_cast<double>(k); }
    double var_a2(std::size_t k) const { return v * static_cast<double>(k); }
};

JacobiCoefficients sample_gbe(double beta, std::size_t n, const SeedSpec& seed);
JacobiCoefficients sample_generic(const EnsembleSpec& spec, std::size_t n, const SeedSpec& seed);

/// Per-entry rejection resampling onto the event that every |b_k| and every
/// k^{-1/2}|a_{k-1}^2 - E a_{k-1}^2| stays below (log n)^exponent. Entries
/// already inside the bound are returned untouched.
JacobiCoefficients truncate_coefficients(const EnsembleSpec& spec, const JacobiCoefficients& coeffs,
                                         const SeedSpec& seed);

/// sample_gbe / sample_generic followed by truncation when the spec asks for it.
JacobiCoefficients sample_ensemble(const EnsembleSpec& spec, std::size_t n, const SeedSpec& seed);

/// Truncation bound (log n)^exponent.
double truncation_bound(std::size_t n, double exponent);

/// True iff the realization satisfies the truncation bound everywhere.
bool satisfies_truncation(const JacobiCoefficients& c, const CoefficientMoments& m, double bound);

}  // namespace jacobimax
