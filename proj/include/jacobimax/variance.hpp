#pragma once

#include <cstddef>
#include <vector>

#include "jacobimax/ensemble.hpp"
#include "jacobimax/regimes.hpp"

namespace jacobimax {

/// Exact second moments of the noise functionals driving the conjugated
/// recursion at one step.
struct NoiseFunctionals {
    double var_g = 0;          // contraction-side noise variance (k <= k0 - ell0)
    double var_c = 0;          // rotation-side noise, first component
    double var_d = 0;          // rotation-side noise, second component
    double cov_cd = 0;
    double theta = 0;
    double sigma2_display = 0; // aligned-phase combination as displayed
    double sigma2_cycle = 0;   // averaged over one rotation cycle of the phase
};

/// Variance of the contraction-regime noise g_k from the exact coefficient
/// moments. Domain: 1 <= k <= k0 - ell0.
double sigma2_hyperbolic(std::size_t k, double z, std::size_t n, const CoefficientMoments& m);

/// Rotation-regime per-step variance, aligned-phase combination
/// (Ec^2+Ed^2)(1 + sin^2(theta)/2) + E(cd)(sin 2theta - cos^2(theta)/2).
/// Domain: k >= k0 + ell0.
double sigma2_elliptic(std::size_t k, double z, std::size_t n, const CoefficientMoments& m);

/// Rotation-regime per-step variance averaged over the rotation phase; this
/// is the variance the accumulated profile and time change are built on (its
/// near-window limit is v / (4(k-k0)), matching the approximate profile).
double sigma2_elliptic_cycle(std::size_t k, double z, std::size_t n, const CoefficientMoments& m);

NoiseFunctionals noise_functionals(std::size_t k, double z, std::size_t n,
                                   const CoefficientMoments& m);

/// Per-step and accumulated variance profiles plus the variance time change.
struct VarianceProfile {
    double z = 0;
    std::size_t n = 0;
    double v = 1.0;

    std::vector<double> sigma2;      // index k-1; zero inside the window
    std::vector<double> Sigma2;      // compensated prefix sums of sigma2
    std::vector<double> hat_sigma2;  // v/(2(k0-k)), 0, v/(4(k-k0))
    std::vector<double> hat_Sigma2;

    std::vector<std::size_t> time_change;  // n_t for t = 1..T_z
    std::size_t T_z = 0;

    /// First k with Sigma2_k >= v t / 2, clamped to n (t may be fractional).
    std::size_t n_of(double t) const;
};

VarianceProfile build_profile(const RegimeSchedule& s, const CoefficientMoments& m);

}  // namespace jacobimax
