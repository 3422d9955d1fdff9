#include "jacobimax/recursion.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jacobimax {

double raw_charpoly(const JacobiCoefficients& coeffs, double z, std::size_t k) {
    if (k > coeffs.n) throw ParameterError("raw_charpoly: k exceeds n");
    const double x = z * std::sqrt(static_cast<double>(coeffs.n));
    double qm1 = 0.0, q0 = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
        const double q1 = (x - coeffs.b[j - 1]) * q0 - coeffs.a2(j - 1) * qm1;
        qm1 = q0;
        q0 = q1;
    }
    return q0;
}

CharPolyResult log_abs_charpoly(const JacobiCoefficients& coeffs, double z,
                                std::size_t renorm_every) {
    const std::size_t n = coeffs.n;
    if (n < 1) throw ParameterError("log_abs_charpoly: empty coefficients");
    if (renorm_every < 1) renorm_every = 1;
    const double nn = static_cast<double>(n);

    // State (phi_k, phi_{k-1}) / exp(log_norm), phi_k = q_k / sqrt(k!).
    double u0 = z * std::sqrt(nn) - coeffs.b[0];
    double u1 = 1.0;
    KahanSum log_norm;
    {
        const double r = std::hypot(u0, u1);
        u0 /= r;
        u1 /= r;
        log_norm.add(std::log(r));
    }
    for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double zk = z * std::sqrt(nn / kk);
        const double y0 = (zk - coeffs.b[k - 1] / std::sqrt(kk)) * u0 -
                          coeffs.a2(k - 1) / std::sqrt(kk * (kk - 1.0)) * u1;
        u1 = u0;
        u0 = y0;
        if (k % renorm_every == 0 || k == n) {
            const double r = std::hypot(u0, u1);
            if (r == 0.0) {
                CharPolyResult res;
                res.z = z;
                res.log_abs_p = -std::numeric_limits<double>::infinity();
                res.sign = 0;
                res.centered = res.log_abs_p;
                res.finite = false;
                return res;
            }
            u0 /= r;
            u1 /= r;
            log_norm.add(std::log(r));
        }
    }

    CharPolyResult res;
    res.z = z;
    // q_n = n^{n/2} p_n and phi_n = q_n / sqrt(n!).
    const double half_log_nfact = 0.5 * std::lgamma(nn + 1.0);
    res.log_abs_p = log_norm.value() + std::log(std::abs(u0)) + half_log_nfact - (nn / 2.0) * std::log(nn);
    res.sign = u0 > 0.0 ? 1 : (u0 < 0.0 ? -1 : 0);
    res.centered = res.log_abs_p - nn * (z * z / 4.0 - 0.5);
    res.finite = std::isfinite(res.log_abs_p);
    return res;
}

std::vector<CharPolyResult> eval_grid_serial(const JacobiCoefficients& coeffs,
                                             const std::vector<double>& grid) {
    std::vector<CharPolyResult> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = log_abs_charpoly(coeffs, grid[i]);
    return out;
}

std::vector<CharPolyResult> eval_grid(const JacobiCoefficients& coeffs,
                                      const std::vector<double>& grid) {
    std::vector<CharPolyResult> out(grid.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(grid.size()); ++i)
        out[i] = log_abs_charpoly(coeffs, grid[i]);
    return out;
}

JacobiCoefficients zero_noise_coefficients(std::size_t n) {
    JacobiCoefficients c;
    c.n = n;
    c.b.assign(n, 0.0);
    c.a.resize(n - 1);
    for (std::size_t k = 1; k + 1 <= n; ++k) c.a[k - 1] = std::sqrt(static_cast<double>(k));
    return c;
}

}  // namespace jacobimax
