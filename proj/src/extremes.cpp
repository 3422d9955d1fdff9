#include "jacobimax/extremes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jacobimax {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<double> chebyshev_net_unit(std::size_t degree) {
    std::vector<double> pts(2 * degree + 1);
    for (std::size_t k = 1; k <= 2 * degree + 1; ++k)
        pts[k - 1] = std::cos(kPi * static_cast<double>(k - 1) / (2.0 * static_cast<double>(degree)));
    std::sort(pts.begin(), pts.end());
    return pts;
}

EvalNet chebyshev_net(std::size_t degree, double eta) {
    if (degree < 1 || !(eta > 0.0) || eta >= 1.0)
        throw ParameterError("chebyshev_net: need degree >= 1 and 0 < eta < 1");
    EvalNet net;
    net.kind = NetKind::Chebyshev;
    for (double x : chebyshev_net_unit(degree)) {
        const double z = 2.0 * x;
        if (std::abs(z) >= eta && std::abs(z) <= 2.0 - eta) net.points.push_back(z);
    }
    net.points.erase(std::unique(net.points.begin(), net.points.end()), net.points.end());
    return net;
}

EvalNet uniform_net(std::size_t count, double eta) {
    if (count < 2) throw ParameterError("uniform_net: need at least 2 points");
    EvalNet net;
    net.kind = NetKind::Uniform;
    const double lo = eta, hi = 2.0 - eta;
    auto fill = [&](std::size_t m, double sign) {
        for (std::size_t i = 0; i < m; ++i) {
            const double z =
                m == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
            net.points.push_back(sign * z);
        }
    };
    fill(count - count / 2, -1.0);
    fill(count / 2, 1.0);
    std::sort(net.points.begin(), net.points.end());
    return net;
}

MaxRecord max_centered(const JacobiCoefficients& coeffs, const EvalNet& net) {
    if (net.points.empty()) throw ParameterError("max_centered: empty net");
    const auto t0 = std::chrono::steady_clock::now();
    const auto results = eval_grid(coeffs, net.points);
    MaxRecord rec;
    rec.n = coeffs.n;
    bool found = false;
    for (const auto& r : results) {
        if (!r.finite) continue;
        if (!found || r.centered > rec.max_centered) {
            rec.max_centered = r.centered;
            rec.argmax_z = r.z;
            found = true;
        }
    }
    if (!found) throw NumericalError("max_centered: every net point was singular");
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<MaxRecord> run_experiment(const ExperimentPlan& plan) {
    plan.spec.validate();
    struct Unit {
        std::size_t n;
        std::uint64_t stream;
    };
    std::vector<Unit> units;
    for (std::size_t n : plan.n_values)
        for (std::uint64_t r = 0; r < plan.replicas; ++r) units.push_back({n, r});

    std::vector<MaxRecord> out(units.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(units.size()); ++i) {
        const auto& u = units[i];
        MaxRecord rec;
        rec.n = u.n;
        rec.stream_id = u.stream;
        rec.beta_or_v =
            plan.spec.kind == EnsembleKind::GaussianBeta ? plan.spec.beta : plan.spec.v;
        // A failing replica is recorded as NaN rather than aborting the batch.
        try {
            EvalNet net;
            if (plan.net_kind == NetKind::Chebyshev) {
                std::size_t degree = u.n;
                if (2 * degree + 1 > plan.net_max_points && plan.net_max_points >= 3)
                    degree = (plan.net_max_points - 1) / 2;
                net = chebyshev_net(degree, plan.eta);
            } else {
                net = uniform_net(plan.uniform_count, plan.eta);
            }
            const auto coeffs = sample_ensemble(plan.spec, u.n, {plan.master_seed, u.stream});
            // Inner grid loop stays serial inside one unit; units carry the parallelism.
            const auto t0 = std::chrono::steady_clock::now();
            const auto results = eval_grid_serial(coeffs, net.points);
            bool found = false;
            for (const auto& r : results) {
                if (!r.finite) continue;
                if (!found || r.centered > rec.max_centered) {
                    rec.max_centered = r.centered;
                    rec.argmax_z = r.z;
                    found = true;
                }
            }
            if (!found) throw NumericalError("every net point was singular");
            rec.runtime_ms = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - t0)
                                 .count();
        } catch (const std::exception&) {
            rec.max_centered = std::numeric_limits<double>::quiet_NaN();
            rec.argmax_z = std::numeric_limits<double>::quiet_NaN();
            rec.runtime_ms = -1.0;
        }
        out[i] = rec;
    }
    std::sort(out.begin(), out.end(), [](const MaxRecord& a, const MaxRecord& b) {
        return a.n != b.n ? a.n < b.n : a.stream_id < b.stream_id;
    });
    return out;
}

RegressionFit fit_leading(const std::vector<MaxRecord>& records) {
    std::set<std::size_t> ns;
    for (const auto& r : records) ns.insert(r.n);
    if (ns.size() < 3) throw ParameterError("fit_leading: need at least 3 distinct n");

    std::vector<double> x1, x2, y;
    for (std::size_t n : ns) {
        KahanSum s;
        std::size_t c = 0;
        for (const auto& r : records)
            if (r.n == n && std::isfinite(r.max_centered)) {
                s.add(r.max_centered);
                ++c;
            }
        if (c == 0) throw NumericalError("fit_leading: a group has no finite records");
        x1.push_back(std::log(static_cast<double>(n)));
        x2.push_back(std::log(std::log(static_cast<double>(n))));
        y.push_back(s.value() / static_cast<double>(c));
    }

    // Normal equations for the 3-column design (log n, log log n, 1).
    const std::size_t g = y.size();
    double A[3][3] = {{0}}, rhs[3] = {0};
    for (std::size_t i = 0; i < g; ++i) {
        const double row[3] = {x1[i], x2[i], 1.0};
        for (int a = 0; a < 3; ++a) {
            rhs[a] += row[a] * y[i];
            for (int b = 0; b < 3; ++b) A[a][b] += row[a] * row[b];
        }
    }
    // Gaussian elimination with partial pivoting.
    double M[3][4];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) M[a][b] = A[a][b];
        M[a][3] = rhs[a];
    }
    for (int c = 0; c < 3; ++c) {
        int p = c;
        for (int r2 = c + 1; r2 < 3; ++r2)
            if (std::abs(M[r2][c]) > std::abs(M[p][c])) p = r2;
        if (std::abs(M[p][c]) < 1e-12) throw NumericalError("fit_leading: rank-deficient design");
        if (p != c)
            for (int j = 0; j < 4; ++j) std::swap(M[c][j], M[p][j]);
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == c) continue;
            const double f = M[r2][c] / M[c][c];
            for (int j = c; j < 4; ++j) M[r2][j] -= f * M[c][j];
        }
    }
    RegressionFit fit;
    fit.groups = g;
    fit.slope_logn = M[0][3] / M[0][0];
    fit.slope_loglogn = M[1][3] / M[1][1];
    fit.intercept = M[2][3] / M[2][2];

    if (g > 3) {
        double rss = 0;
        for (std::size_t i = 0; i < g; ++i) {
            const double e = y[i] - fit.slope_logn * x1[i] - fit.slope_loglogn * x2[i] - fit.intercept;
            rss += e * e;
        }
        const double s2 = rss / static_cast<double>(g - 3);
        // Diagonal of (X^T X)^{-1} via solves against unit vectors.
        for (int c = 0; c < 3; ++c) {
            double Mi[3][4];
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) Mi[a][b] = A[a][b];
                Mi[a][3] = (a == c) ? 1.0 : 0.0;
            }
            for (int cc = 0; cc < 3; ++cc) {
                int p = cc;
                for (int r2 = cc + 1; r2 < 3; ++r2)
                    if (std::abs(Mi[r2][cc]) > std::abs(Mi[p][cc])) p = r2;
                if (p != cc)
                    for (int j = 0; j < 4; ++j) std::swap(Mi[cc][j], Mi[p][j]);
                for (int r2 = 0; r2 < 3; ++r2) {
                    if (r2 == cc) continue;
                    const double f = Mi[r2][cc] / Mi[cc][cc];
                    for (int j = cc; j < 4; ++j) Mi[r2][j] -= f * Mi[cc][j];
                }
            }
            const double d = Mi[c][3] / Mi[c][c];
            const double se = std::sqrt(std::max(0.0, s2 * d));
            if (c == 0) fit.stderr_logn = se;
            if (c == 1) fit.stderr_loglogn = se;
            if (c == 2) fit.stderr_intercept = se;
        }
    }
    return fit;
}

BarrierReport barrier_scan(const std::vector<std::vector<TimeChangedField>>& runs, double C,
                           double q, std::size_t n, double v) {
    BarrierReport rep;
    rep.C = C;
    rep.q = q;
    rep.replicas = runs.size();
    const double tau = std::log(static_cast<double>(n));
    const double loglogn = std::log(tau);
    const long tqm = static_cast<long>(std::floor(2.0 / 3.0 * tau - q * std::log(tau)));
    const long tqp = static_cast<long>(std::floor(2.0 / 3.0 * tau + q * std::log(tau)));

    if (!runs.empty()) {
        for (const auto& f : runs.front()) {
            rep.z_values.push_back(f.z);
            rep.worst_excess_zt.emplace_back(f.T_z, -1e300);
        }
    }
    for (const auto& replica : runs) {
        bool crossed = false;
        for (std::size_t iz = 0; iz < replica.size(); ++iz) {
            const auto& f = replica[iz];
            if (f.psi_t.size() < f.T_z)
                throw ParameterError("barrier_scan: field missing clock-time checkpoints");
            for (std::size_t t = 1; t <= f.T_z && t <= f.psi_t.size(); ++t) {
                const auto lt = static_cast<long>(t);
                if (lt > tqm && lt < tqp) continue;  // excluded middle window
                ++rep.times_tested;
                const double excess = f.psi_t[t - 1] - (std::sqrt(v) * static_cast<double>(t) + C * loglogn);
                rep.worst_excess = std::max(rep.worst_excess, excess);
                if (iz < rep.worst_excess_zt.size() && t <= rep.worst_excess_zt[iz].size())
                    rep.worst_excess_zt[iz][t - 1] = std::max(rep.worst_excess_zt[iz][t - 1], excess);
                if (excess > 0.0) crossed = true;
            }
        }
        if (crossed) ++rep.crossings;
    }
    rep.crossing_fraction =
        rep.replicas ? static_cast<double>(rep.crossings) / static_cast<double>(rep.replicas) : 0.0;
    return rep;
}

TruncationWindow truncation_window(const VarianceProfile& profile, double epsilon) {
    const double tau = std::log(static_cast<double>(profile.n));
    const double t_eps = std::floor(epsilon * std::log(tau));
    const double tau_eps = tau - t_eps;
    if (t_eps < 1.0 || tau_eps <= t_eps)
        throw ParameterError("truncation_window: epsilon gives an empty window");
    if (tau_eps > static_cast<double>(profile.T_z))
        throw ParameterError("truncation_window: tau_eps beyond the clock horizon T_z");
    TruncationWindow w;
    w.t_eps = t_eps;
    w.tau_eps = tau_eps;
    w.first = profile.n_of(t_eps) + 1;
    w.last = profile.n_of(tau_eps);
    if (w.first >= w.last) throw ParameterError("truncation_window: degenerate step range");
    return w;
}

double truncated_field(const JacobiCoefficients& coeffs, const RegimeSchedule& s,
                       const VarianceProfile& profile, double epsilon) {
    if (coeffs.n != s.n) throw ParameterError("truncated_field: size mismatch");
    const auto w = truncation_window(profile, epsilon);
    const double nn = static_cast<double>(s.n);
    const double v = profile.v;

    // Restart at e1 in the conjugated basis and run mean-normalized steps.
    double u0 = 1.0, u1 = 0.0;
    KahanSum log_norm;
    Mat2 Pprev = basis_at(s, w.first - 1).P;
    for (std::size_t k = w.first; k <= w.last; ++k) {
        const auto basis = basis_at(s, k);
        const double kk = static_cast<double>(k);
        const double t11 = s.z * std::sqrt(nn / kk) - coeffs.b[k - 1] / std::sqrt(kk);
        const double t12 = -coeffs.a2(k - 1) / std::sqrt(kk * (kk - 1.0));
        const double w0 = Pprev.a11 * u0 + Pprev.a12 * u1;
        const double w1 = Pprev.a21 * u0 + Pprev.a22 * u1;
        const double s0 = t11 * w0 + t12 * w1;
        const double s1 = w0;
        const double y0 = basis.P_inv.a11 * s0 + basis.P_inv.a12 * s1;
        const double y1 = basis.P_inv.a21 * s0 + basis.P_inv.a22 * s1;
        const double r = std::hypot(y0, y1);
        if (r == 0.0) return -std::numeric_limits<double>::infinity();
        u0 = y0 / r;
        u1 = y1 / r;
        double mu = 0.0;
        if (k <= s.k0 - s.ell0)
            mu = std::log(alpha_of(s.z, s.n, k)) - (v - 1.0) / (4.0 * static_cast<double>(s.k0 - k));
        else if (k >= s.k0 + s.ell0)
            mu = (v - 1.0) / (4.0 * static_cast<double>(k - s.k0));
        log_norm.add(std::log(r) - mu);
        Pprev = basis.P;
    }
    return log_norm.value();
}

double anticoncentration_check(const EnsembleSpec& spec, std::size_t n, double z, double delta,
                               std::size_t replicas, std::uint64_t master_seed) {
    if (!(delta > 0.0) || delta > 1.0) throw ParameterError("anticoncentration: bad delta");
    const auto m = static_cast<std::size_t>(std::floor((1.0 - delta) * static_cast<double>(n)));
    std::size_t hits = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : hits)
#endif
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(replicas); ++r) {
        const auto coeffs = sample_ensemble(spec, n, {master_seed, static_cast<std::uint64_t>(r)});
        const double nn = static_cast<double>(n);
        double u0 = z * std::sqrt(nn) - coeffs.b[0];
        double u1 = 1.0;
        double rad = std::hypot(u0, u1);
        u0 /= rad;
        u1 /= rad;
        KahanSum log_norm;
        log_norm.add(std::log(rad));
        double log_m = 0.0;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double y0 = (z * std::sqrt(nn / kk) - coeffs.b[k - 1] / std::sqrt(kk)) * u0 -
                              coeffs.a2(k - 1) / std::sqrt(kk * (kk - 1.0)) * u1;
            u1 = u0;
            u0 = y0;
            rad = std::hypot(u0, u1);
            u0 /= rad;
            u1 /= rad;
            log_norm.add(std::log(rad));
            if (k == m) log_m = log_norm.value();
        }
        const double lhs = log_norm.value() + std::log(std::abs(u0));
        if (lhs <= 5.0 / 6.0 * std::log(delta) + log_m) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(replicas);
}

CovarianceResult field_covariance(const std::vector<double>& psi_s,
                                  const std::vector<double>& psi_t) {
    if (psi_s.size() != psi_t.size() || psi_s.size() < 2)
        throw ParameterError("field_covariance: need matched replica vectors");
    CovarianceResult res;
    res.replicas = psi_s.size();
    res.low_replica_warning = res.replicas < 100;
    const double N = static_cast<double>(res.replicas);
    KahanSum ms, mt;
    for (std::size_t i = 0; i < res.replicas; ++i) {
        ms.add(psi_s[i]);
        mt.add(psi_t[i]);
    }
    const double mus = ms.value() / N, mut = mt.value() / N;
    KahanSum c, vs, vt;
    for (std::size_t i = 0; i < res.replicas; ++i) {
        const double ds = psi_s[i] - mus, dt = psi_t[i] - mut;
        c.add(ds * dt);
        vs.add(ds * ds);
        vt.add(dt * dt);
    }
    res.covariance = c.value() / (N - 1.0);
    res.var_s = vs.value() / (N - 1.0);
    res.var_t = vt.value() / (N - 1.0);
    return res;
}

}  // namespace jacobimax
