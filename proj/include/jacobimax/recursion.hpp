#pragma once

#include <cstddef>
#include <vector>

#include "jacobimax/ensemble.hpp"

namespace jacobimax {

/// Evaluation point z in the bulk window eta <= |z| <= 2 - eta.
struct EvalPoint {
    double z = 0.0;
    std::size_t n = 0;
};

/// log|p_n(z)| of the characteristic polynomial of J_n / sqrt(n), its sign,
/// and the centered value log|p_n(z)| - n (z^2/4 - 1/2).
struct CharPolyResult {
    double z = 0.0;
    double log_abs_p = 0.0;
    int sign = 1;
    double centered = 0.0;
    bool finite = true;  // false when the state vector hit exact zero
};

/// Unscaled minor determinant q_k(z) = det(z sqrt(n) I_k - J_k) via the plain
/// three-term recursion. Grows like n^{k/2}; overflow surfaces as +-inf.
double raw_charpoly(const JacobiCoefficients& coeffs, double z, std::size_t k);

/// log|p_n(z)| through the factorial-scaled two-vector recursion with
/// per-step renormalization; stable for any n that fits in memory.
/// renorm_every is a testing knob (accuracy must not depend on it).
CharPolyResult log_abs_charpoly(const JacobiCoefficients& coeffs, double z,
                                std::size_t renorm_every = 1);

/// Batched evaluation over an ordered grid, one independent recursion per z.
/// Result order matches the grid; the parallel version is value-identical to
/// the serial one point by point.
std::vector<CharPolyResult> eval_grid_serial(const JacobiCoefficients& coeffs,
                                             const std::vector<double>& grid);
std::vector<CharPolyResult> eval_grid(const JacobiCoefficients& coeffs,
                                      const std::vector<double>& grid);

/// Zero-noise coefficients (b = 0, a_k^2 = k): the recursion then reproduces
/// probabilists' Hermite polynomials He_k(z sqrt(n)).
JacobiCoefficients zero_noise_coefficients(std::size_t n);

}  // namespace jacobimax
