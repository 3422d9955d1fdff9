#pragma once

#include <cstddef>
#include <vector>

#include "jacobimax/ensemble.hpp"

namespace jacobimax {

/// Sorted spectrum of the unscaled tridiagonal matrix J_n.
struct Spectrum {
    std::size_t n = 0;
    std::vector<double> eigenvalues;  // nondecreasing
};

/// det(z sqrt(n) I_k - J_k) by dense LU with partial pivoting. Intended for
/// small k as an independent cross-check of the minor recursion.
double dense_det(const JacobiCoefficients& coeffs, double z, std::size_t k);

/// All eigenvalues of J_n by Sturm-count bisection inside Gershgorin bounds.
/// Each eigenvalue is bracketed to +-tolerance and its index certified by the
/// sign-change count of the LDL^T pivots.
Spectrum eigen_tridiag(const JacobiCoefficients& coeffs, double tolerance = 0.0);

/// Number of eigenvalues of J_n strictly below x (Sturm count).
std::size_t sturm_count(const JacobiCoefficients& coeffs, double x);

/// Gershgorin interval [lo, hi] enclosing the spectrum of J_n.
void gershgorin_bounds(const JacobiCoefficients& coeffs, double& lo, double& hi);

/// sum_i log|z - lambda_i / sqrt(n)|; -inf if z hits a scaled eigenvalue.
double log_potential(const Spectrum& spectrum, double z);

/// Kolmogorov-Smirnov distance between the empirical law of lambda_i/sqrt(n)
/// and the semicircle distribution on [-2, 2].
double semicircle_distance(const Spectrum& spectrum);

/// Semicircle CDF at x.
double semicircle_cdf(double x);

}  // namespace jacobimax
