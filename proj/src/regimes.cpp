#include "jacobimax/regimes.hpp"

#include <algorithm>
#include <cmath>

namespace jacobimax {

namespace {
constexpr double kPi = 3.14159265358979323846;

double zk_of(double z, std::size_t n, std::size_t k) {
    return z * std::sqrt(static_cast<double>(n) / static_cast<double>(k));
}

double wrap_pi(double x) {
    x = std::fmod(x, 2.0 * kPi);
    if (x > kPi) x -= 2.0 * kPi;
    if (x <= -kPi) x += 2.0 * kPi;
    return x;
}
}  // namespace

double Mat2::op_norm() const {
    // Largest singular value of a 2x2 matrix, closed form.
    const double f = a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22;
    const double det = a11 * a22 - a12 * a21;
    const double d = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
    return std::sqrt(0.5 * (f + d));
}

double alpha_of(double z, std::size_t n, std::size_t k) {
    const double t = std::abs(zk_of(z, n, k));
    return 0.5 * (t + std::sqrt(std::max(0.0, t * t - 4.0)));
}

double theta_of(double z, std::size_t n, std::size_t k) {
    const double t = zk_of(z, n, k);
    return std::atan2(std::sqrt(std::max(0.0, 4.0 - t * t)), t);
}

AlphaTheta alpha_theta(std::size_t k, double z, std::size_t n) {
    if (k < 1 || k > n) throw ParameterError("alpha_theta: k out of range");
    const auto k0 = static_cast<std::size_t>(std::floor(z * z * static_cast<double>(n) / 4.0));
    if (k <= k0) return {Regime::Hyperbolic, alpha_of(z, n, k)};
    return {Regime::Elliptic, theta_of(z, n, k)};
}

RegimeSchedule build_schedule(double z, std::size_t n, double kappa, double delta, double eta) {
    RegimeSchedule s;
    s.z = z;
    s.n = n;
    s.eta = eta;
    if (!(eta > 0.0) || std::abs(z) < eta || std::abs(z) > 2.0 - eta)
        throw ParameterError("schedule: z outside the bulk window [eta, 2-eta]");
    if (kappa < 1.0) throw ParameterError("schedule: kappa must be >= 1");
    if (delta <= 0.0) delta = eta * eta / 8.0;
    s.kappa = kappa;
    s.delta = delta;

    const double nn = static_cast<double>(n);
    s.k0 = static_cast<std::size_t>(std::floor(z * z * nn / 4.0));
    s.ell0 = static_cast<std::size_t>(std::floor(kappa * std::cbrt(nn)));
    if (s.k0 < 1 || s.ell0 < 1 || s.k0 <= s.ell0 || s.k0 + s.ell0 > n)
        throw ParameterError("schedule: window k0 +- ell0 does not fit inside [1, n]");

    const auto dn = static_cast<std::size_t>(std::floor(delta * nn));
    if (dn >= s.k0) throw ParameterError("schedule: delta too large for this z");
    s.k_delta = s.k0 - dn;
    if (static_cast<double>(s.k_delta) < delta * nn)
        throw ParameterError("schedule: delta violates k0 - delta n >= delta n");

    const double cbrt_k0 = std::cbrt(static_cast<double>(s.k0));
    auto hyp_gap = [&](long i) {
        return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(i), 2.0 / 3.0) * cbrt_k0));
    };
    long i = 1;
    while (hyp_gap(i) < s.ell0) ++i;
    s.i_lo = i;
    while (hyp_gap(i) < dn) ++i;
    s.i_hi = i;
    if (s.i_hi > s.i_lo) {
        s.m.push_back(s.k0 - s.ell0);
        for (long j = s.i_lo + 1; j < s.i_hi; ++j) s.m.push_back(s.k0 - hyp_gap(j));
        s.m.push_back(s.k_delta);
        for (std::size_t j = 0; j + 1 < s.m.size(); ++j)
            if (s.m[j] < s.m[j + 1]) throw NumericalError("schedule: non-monotone contraction boundaries");
    }

    auto ell_gap = [&](long i2) {
        return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(i2), 4.0) * cbrt_k0));
    };
    long j = 1;
    while (ell_gap(j + 1) <= s.ell0) ++j;
    s.j_lo = j;
    while (s.k0 + ell_gap(j) < n) ++j;
    s.j_hi = j;
    s.kb.push_back(s.k0 + s.ell0);
    for (long i2 = s.j_lo + 1; i2 < s.j_hi; ++i2) s.kb.push_back(s.k0 + ell_gap(i2));
    s.kb.push_back(n);
    for (std::size_t q = 0; q + 1 < s.kb.size(); ++q)
        if (s.kb[q] > s.kb[q + 1]) throw NumericalError("schedule: non-monotone rotation boundaries");
    return s;
}

double eta_curve(const RegimeSchedule& s, std::size_t k) {
    if (s.m.empty() || k < s.k_delta || k > s.k0 - s.ell0)
        throw ParameterError("eta_curve: k outside the contributing range");
    // Block i = i_lo + j covers (m[j+1], m[j]]; the deepest block is closed on
    // the left so that k = k_delta has a value.
    std::size_t j = 0;
    while (j + 1 < s.m.size() && k <= s.m[j + 1]) ++j;
    const double i = static_cast<double>(s.i_lo + static_cast<long>(std::min(j, s.m.size() - 2)));
    return std::pow(i, -2.0 / 3.0);
}

Mat2 mean_transfer(double z, std::size_t n, std::size_t k) {
    return {zk_of(z, n, k), -1.0, 1.0, 0.0};
}

BasisAtStep basis_at(const RegimeSchedule& s, std::size_t k) {
    std::size_t kb = k;
    Regime reg = s.regime_at(k);
    if (reg == Regime::Parabolic) kb = s.k0 - s.ell0;  // frozen basis inside the window
    BasisAtStep out;
    out.regime = reg;
    if (kb <= s.k0 - s.ell0) {
        const double a = alpha_of(s.z, s.n, kb);
        const double sg = s.z >= 0.0 ? 1.0 : -1.0;
        out.alpha = a;
        out.P = {1.0, sg / a, sg / a, 1.0};
        const double det = 1.0 - 1.0 / (a * a);
        out.P_inv = {1.0 / det, -sg / (a * det), -sg / (a * det), 1.0 / det};
    } else {
        const double t = zk_of(s.z, s.n, kb);
        const double root = std::sqrt(std::max(0.0, 4.0 - t * t));
        out.theta = theta_of(s.z, s.n, kb);
        out.P = {root / 2.0, t / 2.0, 0.0, 1.0};
        out.P_inv = {2.0 / root, -t / root, 0.0, 1.0};
    }
    return out;
}

namespace {
double mu_at(const RegimeSchedule& s, std::size_t k, double v) {
    if (k <= s.k0 - s.ell0)
        return std::log(alpha_of(s.z, s.n, k)) - (v - 1.0) / (4.0 * static_cast<double>(s.k0 - k));
    if (k >= s.k0 + s.ell0) return (v - 1.0) / (4.0 * static_cast<double>(k - s.k0));
    return 0.0;
}
}  // namespace

Trajectory conjugated_trajectory(const JacobiCoefficients& coeffs, const RegimeSchedule& s,
                                 const TrajectoryOptions& opt) {
    if (coeffs.n != s.n) throw ParameterError("trajectory: coefficient size does not match schedule");
    const std::size_t n = s.n;
    const double nn = static_cast<double>(n);
    const double v = opt.moments.v;

    Trajectory out;
    out.stride = std::max<std::size_t>(1, opt.stride);
    out.probe_psi.assign(opt.probes.size(), 0.0);
    if (out.stride == 1)
        out.checkpoints.reserve(n);
    else
        out.checkpoints.reserve(n / out.stride + 2);

    BasisAtStep basis = basis_at(s, 1);
    double x0 = s.z * std::sqrt(nn) - coeffs.b[0];
    double x1 = 1.0;
    double u0 = basis.P_inv.a11 * x0 + basis.P_inv.a12 * x1;
    double u1 = basis.P_inv.a21 * x0 + basis.P_inv.a22 * x1;
    KahanSum log_norm, M;
    {
        const double r = std::hypot(u0, u1);
        u0 /= r;
        u1 /= r;
        log_norm.add(std::log(r));
    }
    M.add(mu_at(s, 1, v));

    double W = u1 * u1;
    out.W1 = W;
    out.max_W_negligible = (1 <= s.k_delta) ? W : 0.0;
    double psi = log_norm.value() - M.value();
    double psi_prev = psi, W_prev = W;
    KahanSum resid;
    std::size_t probe_idx = 0;

    auto record = [&](std::size_t k) {
        const double zeta = std::fmod(std::atan2(u1, u0) + 2.0 * kPi, 2.0 * kPi);
        out.checkpoints.push_back({k, psi, W, zeta, log_norm.value(), M.value()});
    };
    auto probe = [&](std::size_t k) {
        while (probe_idx < opt.probes.size() && opt.probes[probe_idx] == k)
            out.probe_psi[probe_idx++] = psi;
    };
    probe(1);
    record(1);

    Mat2 Pprev = basis.P;
    for (std::size_t k = 2; k <= n; ++k) {
        basis = basis_at(s, k);
        const double kk = static_cast<double>(k);
        const double t11 = zk_of(s.z, n, k) - coeffs.b[k - 1] / std::sqrt(kk);
        const double t12 = -coeffs.a2(k - 1) / std::sqrt(kk * (kk - 1.0));
        // w = P_{k-1} u, then T_k w, then P_k^{-1}.
        const double w0 = Pprev.a11 * u0 + Pprev.a12 * u1;
        const double w1 = Pprev.a21 * u0 + Pprev.a22 * u1;
        const double s0 = t11 * w0 + t12 * w1;
        const double s1 = w0;
        double y0 = basis.P_inv.a11 * s0 + basis.P_inv.a12 * s1;
        double y1 = basis.P_inv.a21 * s0 + basis.P_inv.a22 * s1;
        const double r = std::hypot(y0, y1);
        if (r == 0.0 || !std::isfinite(r)) {
            out.valid = false;
            break;
        }
        u0 = y0 / r;
        u1 = y1 / r;
        log_norm.add(std::log(r));
        M.add(mu_at(s, k, v));
        W = u1 * u1;
        psi = log_norm.value() - M.value();
        if (k <= s.k_delta) out.max_W_negligible = std::max(out.max_W_negligible, W);
        if (opt.track_residual && k >= s.k_delta && k <= s.k0 - s.ell0) {
            const double a = alpha_of(s.z, n, k);
            const double ai = 1.0 / a;
            const double bc = (coeffs.b[k - 1] - opt.moments.mean_b(k)) / std::sqrt(kk);
            const double ac = (coeffs.a2(k - 1) - opt.moments.mean_a2(k - 1)) / std::sqrt(kk * (kk - 1.0));
            const double g = (ai * bc + ai * ai * ac) / (1.0 - ai * ai);
            resid.add(std::abs(psi - psi_prev - g - 0.5 * (W - W_prev)));
            ++out.resid_count;
        }
        psi_prev = psi;
        W_prev = W;
        Pprev = basis.P;
        probe(k);
        if (k % out.stride == 0 || k == n) record(k);
    }
    out.final_psi = psi;
    out.final_log_norm_Y = log_norm.value();
    out.final_u0 = u0;
    out.final_u1 = u1;
    out.resid_abs_mean = out.resid_count ? resid.value() / static_cast<double>(out.resid_count) : 0.0;
    return out;
}

BlockFlags good_block_flags(const Trajectory& traj, const RegimeSchedule& s, double r,
                            double delta_exponent) {
    if (traj.stride != 1)
        throw ParameterError("good_block_flags: stride-1 checkpoints required");
    BlockFlags out;
    auto point = [&](std::size_t k) -> const TrajectoryPoint& {
        const std::size_t idx = k - 1;
        if (idx >= traj.checkpoints.size() || traj.checkpoints[idx].k != k)
            throw ParameterError("good_block_flags: checkpoint coverage too sparse");
        return traj.checkpoints[idx];
    };

    // Contraction blocks: block i covers (m[j+1], m[j]].
    for (std::size_t j = 0; j + 1 < s.m.size(); ++j) {
        const long i = s.i_lo + static_cast<long>(j);
        const double bound = 2.0 * r * std::pow(static_cast<double>(i), -2.0 / 3.0);
        double worst = 0.0;
        for (std::size_t k = s.m[j + 1] + 1; k <= s.m[j]; ++k)
            worst = std::max(worst, point(k).W);
        out.hyperbolic.push_back({i, worst <= bound, worst});
    }

    // Rotation blocks: block i covers [kb[j], kb[j+1]); the phase must track
    // the accumulated deterministic rotation within i^{-delta_exponent} mod 2pi.
    for (std::size_t j = 0; j + 1 < s.kb.size(); ++j) {
        const long i = s.j_lo + static_cast<long>(j);
        const double delta_i = std::pow(static_cast<double>(i), -delta_exponent);
        const std::size_t klo = s.kb[j], khi = s.kb[j + 1];
        if (khi <= klo) {
            out.elliptic.push_back({i, true, 0.0});
            continue;
        }
        const double zeta0 = point(klo).zeta;
        double sum_theta = 0.0;
        double worst = 0.0;
        for (std::size_t k = klo + 1; k < khi; ++k) {
            sum_theta += theta_of(s.z, s.n, k);
            const double dev = wrap_pi(point(k).zeta - zeta0 - sum_theta);
            worst = std::max(worst, std::abs(dev));
        }
        out.elliptic.push_back({i, worst <= delta_i, worst});
    }
    return out;
}

TailProduct deterministic_tail_product(double z, std::size_t n, double delta) {
    if (!(delta > 0.0) || delta >= 1.0) throw ParameterError("tail_product: delta in (0,1) required");
    const double nn = static_cast<double>(n);
    const auto k = static_cast<std::size_t>(std::ceil((1.0 - delta) * nn));
    const auto k0 = static_cast<std::size_t>(std::floor(z * z * nn / 4.0));
    const auto ell0 = static_cast<std::size_t>(std::floor(4.0 * std::cbrt(nn)));
    if (k <= k0 + ell0) throw ParameterError("tail_product: range [k, n] not fully elliptic");

    // M = A_n A_{n-1} ... A_k, accumulated with the phase sum of the factors.
    Mat2 M = Mat2::identity();
    KahanSum sum_theta;
    for (std::size_t j = k; j <= n; ++j) {
        M = mean_transfer(z, n, j) * M;
        sum_theta.add(theta_of(z, n, j));
    }
    const double theta_n = theta_of(z, n, n);
    const double pred = 2.0 / std::sqrt(4.0 - z * z) * std::sin(sum_theta.value() + theta_n);
    TailProduct out;
    out.k = k;
    out.op_norm = M.op_norm();
    out.entry_error = std::abs(M.a11 - pred);
    return out;
}

}  // namespace jacobimax
