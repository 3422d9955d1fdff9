#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "jacobimax/ensemble.hpp"
#include "jacobimax/recursion.hpp"
#include "jacobimax/regimes.hpp"
#include "jacobimax/variance.hpp"

namespace jacobimax {

enum class NetKind { Chebyshev, Uniform };

struct EvalNet {
    NetKind kind = NetKind::Chebyshev;
    std::vector<double> points;  // sorted, distinct, inside eta <= |z| <= 2 - eta
};

/// Chebyshev-type net {2 cos(pi (k-1) / (2 degree))} intersected with the bulk
/// window. On [-1,1] (unscaled, unfiltered) the same construction dominates
/// the sup of any degree-`degree` polynomial within a factor 14.
EvalNet chebyshev_net(std::size_t degree, double eta);

/// The raw m-point net on [-1, 1] used by the domination check.
std::vector<double> chebyshev_net_unit(std::size_t degree);

/// `count` equally spaced points split between [-(2-eta), -eta] and [eta, 2-eta].
EvalNet uniform_net(std::size_t count, double eta);

struct MaxRecord {
    std::size_t n = 0;
    double beta_or_v = 0;
    std::uint64_t stream_id = 0;
    double max_centered = 0;
    double argmax_z = 0;
    double runtime_ms = 0;
};

/// Maximum of the centered field over the net for one realization; ties break
/// to the smallest z and non-finite points are never selected.
MaxRecord max_centered(const JacobiCoefficients& coeffs, const EvalNet& net);

struct ExperimentPlan {
    EnsembleSpec spec;
    std::vector<std::size_t> n_values;
    std::size_t replicas = 0;
    NetKind net_kind = NetKind::Chebyshev;
    std::size_t net_max_points = 16385;
    std::size_t uniform_count = 64;
    double eta = 0.1;
    std::uint64_t master_seed = 1;
};

/// Replica loop (sample -> optional truncation -> grid evaluation -> max),
/// parallel over (n, replica) with deterministic output order.
std::vector<MaxRecord> run_experiment(const ExperimentPlan& plan);

struct RegressionFit {
    double slope_logn = 0;
    double slope_loglogn = 0;
    double intercept = 0;
    double stderr_logn = 0, stderr_loglogn = 0, stderr_intercept = 0;
    std::size_t groups = 0;
};

/// OLS of the per-n mean of max_centered on (log n, log log n, 1).
RegressionFit fit_leading(const std::vector<MaxRecord>& records);

/// psi evaluated at the variance-clock times t = 1..T_z for one (z, replica).
struct TimeChangedField {
    double z = 0;
    std::size_t T_z = 0;
    std::vector<double> psi_t;  // index t-1
};

struct BarrierReport {
    double C = 0, q = 0;
    std::size_t replicas = 0;
    std::size_t times_tested = 0;  // size of the restricted time set, summed over z
    double crossing_fraction = 0;
    double worst_excess = -1e300;  // max over (z, t, replica) of psi_t - barrier
    std::size_t crossings = 0;
    // Worst excess per (z, t) across replicas; only restricted times are filled.
    std::vector<double> z_values;
    std::vector<std::vector<double>> worst_excess_zt;
};

/// Counts replicas whose field exceeds sqrt(v) t + C log log n at some time in
/// the restricted set [1, t_q^-] u [t_q^+, T_z], t_q^± = floor(2tau/3 ± q log tau).
BarrierReport barrier_scan(const std::vector<std::vector<TimeChangedField>>& runs, double C,
                           double q, std::size_t n, double v);

struct TruncationWindow {
    std::size_t first = 0, last = 0;  // product over steps first..last
    double t_eps = 0, tau_eps = 0;
};

/// Step range [n_{t_eps}+1, n_{tau_eps}] of the restarted recursion, where
/// t_eps = floor(eps log log n) and tau_eps = log n - t_eps.
TruncationWindow truncation_window(const VarianceProfile& profile, double epsilon);

/// Log-norm of the product of mean-normalized transfer matrices applied to e1
/// over the truncation window (recursion restarted at e1, stopped early).
double truncated_field(const JacobiCoefficients& coeffs, const RegimeSchedule& s,
                       const VarianceProfile& profile, double epsilon);

/// Empirical frequency of |<e1, X_n>| <= delta^{5/6} ||X_m||, m = floor((1-delta) n).
double anticoncentration_check(const EnsembleSpec& spec, std::size_t n, double z, double delta,
                               std::size_t replicas, std::uint64_t master_seed);

struct CovarianceResult {
    double covariance = 0;
    double var_s = 0, var_t = 0;
    std::size_t replicas = 0;
    bool low_replica_warning = false;
};

/// Empirical covariance across replicas of (psi at clock time s, psi at clock time t).
CovarianceResult field_covariance(const std::vector<double>& psi_s,
                                  const std::vector<double>& psi_t);

}  // namespace jacobimax
