#include "jacobimax/variance.hpp"

#include <algorithm>
#include <cmath>

namespace jacobimax {

namespace {
double zk_of(double z, std::size_t n, std::size_t k) {
    return z * std::sqrt(static_cast<double>(n) / static_cast<double>(k));
}

std::size_t k0_of(double z, std::size_t n) {
    return static_cast<std::size_t>(std::floor(z * z * static_cast<double>(n) / 4.0));
}

struct EllipticMoments {
    double Ec2, Ed2, Ecd, theta;
};

EllipticMoments elliptic_moments(std::size_t k, double z, std::size_t n,
                                 const CoefficientMoments& m) {
    const double kk = static_cast<double>(k);
    const double t = zk_of(z, n, k);
    const double s = 4.0 - t * t;
    if (s <= 0.0) throw ParameterError("elliptic moments: k is on the contraction side");
    EllipticMoments em;
    em.Ec2 = (4.0 / s) * (t * t * m.var_b(k) / (4.0 * kk) + m.var_a2(k - 1) / (kk * (kk - 1.0)));
    em.Ed2 = m.var_b(k) / kk;
    em.Ecd = t * m.var_b(k) / (kk * std::sqrt(s));
    em.theta = std::atan2(std::sqrt(std::max(0.0, s)), t);
    return em;
}
}  // namespace

double sigma2_hyperbolic(std::size_t k, double z, std::size_t n, const CoefficientMoments& m) {
    const std::size_t k0 = k0_of(z, n);
    const auto ell0 = static_cast<std::size_t>(std::floor(4.0 * std::cbrt(static_cast<double>(n))));
    if (k < 1 || k + ell0 > k0) throw ParameterError("sigma2_hyperbolic: k within ell0 of k0");
    const double kk = static_cast<double>(k);
    const double a = alpha_of(z, n, k);
    const double ai2 = 1.0 / (a * a);
    const double w = 1.0 - ai2;
    double s = ai2 * m.var_b(k) / kk;
    if (k >= 2) s += ai2 * ai2 * m.var_a2(k - 1) / (kk * (kk - 1.0));
    return s / (w * w);
}

double sigma2_elliptic(std::size_t k, double z, std::size_t n, const CoefficientMoments& m) {
    const std::size_t k0 = k0_of(z, n);
    const auto ell0 = static_cast<std::size_t>(std::floor(4.0 * std::cbrt(static_cast<double>(n))));
    if (k < k0 + ell0) throw ParameterError("sigma2_elliptic: k below k0 + ell0");
    const auto em = elliptic_moments(k, z, n, m);
    const double s2 = std::sin(em.theta) * std::sin(em.theta);
    const double c2 = std::cos(em.theta) * std::cos(em.theta);
    return (em.Ec2 + em.Ed2) * (1.0 + 0.5 * s2) + em.Ecd * (std::sin(2.0 * em.theta) - 0.5 * c2);
}

double sigma2_elliptic_cycle(std::size_t k, double z, std::size_t n, const CoefficientMoments& m) {
    const auto em = elliptic_moments(k, z, n, m);
    const double s2 = std::sin(em.theta) * std::sin(em.theta);
    return (em.Ec2 * (1.0 + 2.0 * s2) + em.Ed2 * (3.0 - 2.0 * s2)) / 8.0 +
           em.Ecd * std::sin(2.0 * em.theta) / 4.0;
}

NoiseFunctionals noise_functionals(std::size_t k, double z, std::size_t n,
                                   const CoefficientMoments& m) {
    NoiseFunctionals f;
    const std::size_t k0 = k0_of(z, n);
    const auto ell0 = static_cast<std::size_t>(std::floor(4.0 * std::cbrt(static_cast<double>(n))));
    if (k + ell0 <= k0) f.var_g = sigma2_hyperbolic(k, z, n, m);
    if (k >= k0 + ell0) {
        const auto em = elliptic_moments(k, z, n, m);
        f.var_c = em.Ec2;
        f.var_d = em.Ed2;
        f.cov_cd = em.Ecd;
        f.theta = em.theta;
        f.sigma2_display = sigma2_elliptic(k, z, n, m);
        f.sigma2_cycle = sigma2_elliptic_cycle(k, z, n, m);
    }
    return f;
}

std::size_t VarianceProfile::n_of(double t) const {
    const double target = v * t / 2.0;
    const auto it = std::lower_bound(Sigma2.begin(), Sigma2.end(), target);
    if (it == Sigma2.end()) return n;
    return static_cast<std::size_t>(it - Sigma2.begin()) + 1;
}

VarianceProfile build_profile(const RegimeSchedule& s, const CoefficientMoments& m) {
    VarianceProfile p;
    p.z = s.z;
    p.n = s.n;
    p.v = m.v;
    const std::size_t n = s.n;
    p.sigma2.assign(n, 0.0);
    p.hat_sigma2.assign(n, 0.0);
    p.Sigma2.resize(n);
    p.hat_Sigma2.resize(n);

    for (std::size_t k = 1; k <= s.k0 - s.ell0; ++k) {
        const double kk = static_cast<double>(k);
        const double a = alpha_of(s.z, n, k);
        const double ai2 = 1.0 / (a * a);
        const double w = 1.0 - ai2;
        double v2 = ai2 * m.var_b(k) / kk;
        if (k >= 2) v2 += ai2 * ai2 * m.var_a2(k - 1) / (kk * (kk - 1.0));
        p.sigma2[k - 1] = v2 / (w * w);
        p.hat_sigma2[k - 1] = m.v / (2.0 * static_cast<double>(s.k0 - k));
    }
    for (std::size_t k = s.k0 + s.ell0; k <= n; ++k) {
        p.sigma2[k - 1] = sigma2_elliptic_cycle(k, s.z, n, m);
        if (k > s.k0 + s.ell0)
            p.hat_sigma2[k - 1] = m.v / (4.0 * static_cast<double>(k - s.k0));
    }

    KahanSum acc, hacc;
    for (std::size_t k = 1; k <= n; ++k) {
        acc.add(p.sigma2[k - 1]);
        hacc.add(p.hat_sigma2[k - 1]);
        p.Sigma2[k - 1] = acc.value();
        p.hat_Sigma2[k - 1] = hacc.value();
    }

    p.T_z = static_cast<std::size_t>(std::ceil(2.0 / m.v * p.Sigma2[n - 1]));
    p.time_change.resize(p.T_z);
    for (std::size_t t = 1; t <= p.T_z; ++t)
        p.time_change[t - 1] = p.n_of(static_cast<double>(t));
    return p;
}

}  // namespace jacobimax
