#pragma once

#include <cstddef>
#include <vector>

#include "jacobimax/ensemble.hpp"

namespace jacobimax {

enum class Regime { Hyperbolic, Parabolic, Elliptic };

struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
                x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
    }
    static Mat2 identity() { return {1, 0, 0, 1}; }
    double op_norm() const;
};

/// Block decomposition of one evaluation point: critical index k0 = floor(z^2 n/4),
/// window half-width ell0 = floor(kappa n^{1/3}), start of the contributing
/// contraction range k_delta = k0 - floor(delta n), and the two block ladders
/// (contraction blocks descending from k0 - ell0, rotation blocks ascending
/// from k0 + ell0).
struct RegimeSchedule {
    double z = 0;
    std::size_t n = 0;
    double kappa = 4.0;
    double delta = 0.00125;
    double eta = 0.1;

    std::size_t k0 = 0;
    std::size_t ell0 = 0;
    std::size_t k_delta = 0;

    // Contraction-side boundaries m[j] for block index i = i_lo + j; block i
    // covers (m[j+1], m[j]]. Empty when floor(delta n) <= ell0.
    long i_lo = 0, i_hi = 0;
    std::vector<std::size_t> m;

    // Rotation-side boundaries kb[j] for block index i = j_lo + j; block i
    // covers [kb[j], kb[j+1]).
    long j_lo = 0, j_hi = 0;
    std::vector<std::size_t> kb;

    Regime regime_at(std::size_t k) const {
        if (k <= k0 - ell0) return Regime::Hyperbolic;
        if (k >= k0 + ell0) return Regime::Elliptic;
        return Regime::Parabolic;
    }
};

RegimeSchedule build_schedule(double z, std::size_t n, double kappa = 4.0, double delta = 0.0,
                              double eta = 0.1);

/// Spectral radius of the mean transition matrix for k <= k0 (value >= 1), or
/// its rotation angle in [0, 2pi) for k > k0.
struct AlphaTheta {
    Regime regime;
    double value;
};
AlphaTheta alpha_theta(std::size_t k, double z, std::size_t n);

double alpha_of(double z, std::size_t n, std::size_t k);
double theta_of(double z, std::size_t n, std::size_t k);

/// Piecewise-constant boundary curve i^{-2/3} on contraction block i.
double eta_curve(const RegimeSchedule& s, std::size_t k);

/// Basis that diagonalizes (k below the window) or rotates (k above it) the
/// mean transition matrix; frozen at k0 - ell0 inside the window.
struct BasisAtStep {
    Regime regime;
    double alpha = 0;  // hyperbolic only
    double theta = 0;  // elliptic only
    Mat2 P, P_inv;
};
BasisAtStep basis_at(const RegimeSchedule& s, std::size_t k);

/// Mean transition matrix [[z_k, -1], [1, 0]].
Mat2 mean_transfer(double z, std::size_t n, std::size_t k);

struct TrajectoryPoint {
    std::size_t k;
    double psi, W, zeta, log_norm_Y, M;
};

struct Trajectory {
    std::vector<TrajectoryPoint> checkpoints;  // every `stride` steps, plus k = 1 and k = n
    std::size_t stride = 1;
    bool valid = true;                // false after an exact-zero state vector
    double W1 = 0;                    // weight on e2 at k = 1
    double max_W_negligible = 0;      // max W over k <= k_delta
    double final_psi = 0;
    double final_log_norm_Y = 0;
    double final_u0 = 0, final_u1 = 0;  // unit direction of Y_n (sign carrying)
    std::vector<double> probe_psi;    // psi at requested k values
    double resid_abs_mean = 0;        // mean |dpsi - g - dW/2| over the contributing range
    std::size_t resid_count = 0;
};

struct TrajectoryOptions {
    std::size_t stride = 1;
    std::vector<std::size_t> probes;  // sorted k values at which to record psi
    bool track_residual = false;
    CoefficientMoments moments{1.0};  // centering for the residual decomposition
};

/// Runs the conjugated recursion Y_{k+1} = P_{k+1}^{-1} T_{k+1} P_k Y_k with
/// per-step renormalization, recording the centered log-norm psi_k, the angle
/// weight W_k and the phase zeta_k.
Trajectory conjugated_trajectory(const JacobiCoefficients& coeffs, const RegimeSchedule& s,
                                 const TrajectoryOptions& opt = {});

struct BlockFlag {
    long index;   // block index i
    bool good;
    double worst;  // max W (contraction) or max |phase deviation| (rotation)
};

struct BlockFlags {
    std::vector<BlockFlag> hyperbolic;  // W_l <= 2 r i^{-2/3} throughout block i
    std::vector<BlockFlag> elliptic;    // phase tracks the deterministic rotation within i^{-q}
};

/// Requires stride-1 checkpoints across the evaluated block ranges.
BlockFlags good_block_flags(const Trajectory& traj, const RegimeSchedule& s, double r = 1.0,
                            double delta_exponent = 0.25);

struct TailProduct {
    double op_norm = 0;
    double entry_error = 0;
    std::size_t k = 0;  // product runs over A_n ... A_k
};

/// Product of the deterministic transfer matrices over the final delta-fraction
/// of the recursion, with the closed-form prediction for its (1,1) entry.
TailProduct deterministic_tail_product(double z, std::size_t n, double delta);

}  // namespace jacobimax
