#include "jacobimax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jacobimax {

double dense_det(const JacobiCoefficients& coeffs, double z, std::size_t k) {
    if (k > coeffs.n) throw ParameterError("dense_det: k exceeds n");
    if (k == 0) return 1.0;
    const double x = z * std::sqrt(static_cast<double>(coeffs.n));
    // M = x I_k - J_k with diagonal b_1..b_k.
    std::vector<double> M(k * k, 0.0);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return M[i * k + j]; };
    for (std::size_t i = 0; i < k; ++i) at(i, i) = x - coeffs.b[i];
    for (std::size_t i = 0; i + 1 < k; ++i) {
        at(i, i + 1) = -coeffs.a[i];
        at(i + 1, i) = -coeffs.a[i];
    }
    double det = 1.0;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(at(r, c)) > std::abs(at(p, c))) p = r;
        if (p != c) {
            for (std::size_t j = c; j < k; ++j) std::swap(at(c, j), at(p, j));
            det = -det;
        }
        const double piv = at(c, c);
        if (piv == 0.0) return 0.0;
        det *= piv;
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = at(r, c) / piv;
            if (f == 0.0) continue;
            for (std::size_t j = c; j < k; ++j) at(r, j) -= f * at(c, j);
        }
    }
    return det;
}

std::size_t sturm_count(const JacobiCoefficients& coeffs, double x) {
    // Sign changes of the LDL^T pivots d_k = (b_k - x) - a_{k-1}^2 / d_{k-1};
    // this is the minor recursion of det(J_k - x I) in quotient form.
    const std::size_t n = coeffs.n;
    std::size_t count = 0;
    double d = coeffs.b[0] - x;
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
    for (std::size_t k = 2; k <= n; ++k) {
        d = (coeffs.b[k - 1] - x) - coeffs.a2(k - 1) / d;
        if (d == 0.0) d = -1e-300;
        if (d < 0.0) ++count;
    }
    return count;
}

namespace {
// Division-free variant on the raw minor sequence q_k = det(x I_k - J_k),
// rescaled when it leaves the representable range. The pivot ratio
// d_k / d_{k-1} is negative exactly when q_k / q_{k-1} is positive, so the
// count below x equals the number of sign agreements along the sequence.
std::size_t sturm_count_fast(const std::vector<double>& b, const std::vector<double>& a2pad,
                             double x) {
    const std::size_t n = b.size();
    std::size_t count = 0;
    double qm1 = 1.0;
    double q0 = x - b[0];
    if (q0 == 0.0) q0 = -1e-300;
    if (q0 > 0.0) ++count;
    for (std::size_t k = 2; k <= n; ++k) {
        double q1 = (x - b[k - 1]) * q0 - a2pad[k - 1] * qm1;
        if (q1 == 0.0) q1 = -1e-300 * (q0 > 0.0 ? 1.0 : -1.0);
        if ((q1 > 0.0) == (q0 > 0.0)) ++count;
        const double m = std::abs(q1);
        if (m > 1e150 || m < 1e-150) {
            const double s = m > 1e150 ? 1e-150 : 1e150;
            q1 *= s;
            q0 *= s;
        }
        qm1 = q0;
        q0 = q1;
    }
    return count;
}
}  // namespace

void gershgorin_bounds(const JacobiCoefficients& coeffs, double& lo, double& hi) {
    const std::size_t n = coeffs.n;
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t k = 1; k <= n; ++k) {
        const double r = (k >= 2 ? std::abs(coeffs.a[k - 2]) : 0.0) +
                         (k < n ? std::abs(coeffs.a[k - 1]) : 0.0);
        lo = std::min(lo, coeffs.b[k - 1] - r);
        hi = std::max(hi, coeffs.b[k - 1] + r);
    }
}

Spectrum eigen_tridiag(const JacobiCoefficients& coeffs, double tolerance) {
    const std::size_t n = coeffs.n;
    double lo, hi;
    gershgorin_bounds(coeffs, lo, hi);
    const double diam = std::max(hi - lo, 1e-300);
    // A hair of slack so the Sturm counts at the ends are exactly 0 and n.
    lo -= 1e-12 * diam + 1e-300;
    hi += 1e-12 * diam;
    if (tolerance <= 0.0) tolerance = 1e-12 * diam;

    // Padded squared off-diagonal a2pad[k-1] = a_{k-1}^2 for the fast count.
    std::vector<double> a2pad(n, 0.0);
    for (std::size_t k = 2; k <= n; ++k) a2pad[k - 1] = coeffs.a2(k - 1);

    Spectrum s;
    s.n = n;
    s.eigenvalues.resize(n);
    bool failed = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        // Bisect for the (i+1)-th smallest eigenvalue: count(x) <= i on the
        // left of it and >= i+1 on the right.
        double a = lo, b = hi;
        int iter = 0;
        while (b - a > tolerance) {
            if (++iter > 200) {
                failed = true;
                break;
            }
            const double mid = 0.5 * (a + b);
            if (sturm_count_fast(coeffs.b, a2pad, mid) >= static_cast<std::size_t>(i) + 1)
                b = mid;
            else
                a = mid;
        }
        s.eigenvalues[i] = 0.5 * (a + b);
    }
    if (failed) throw NumericalError("eigen_tridiag: bisection did not converge");
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

double log_potential(const Spectrum& spectrum, double z) {
    const double rn = std::sqrt(static_cast<double>(spectrum.n));
    KahanSum sum;
    for (double lam : spectrum.eigenvalues) {
        const double d = z - lam / rn;
        if (d == 0.0) return -std::numeric_limits<double>::infinity();
        sum.add(std::log(std::abs(d)));
    }
    return sum.value();
}

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    constexpr double pi = 3.14159265358979323846;
    return 0.5 + (x * std::sqrt(4.0 - x * x) / 2.0 + 2.0 * std::asin(x / 2.0)) / (2.0 * pi);
}

double semicircle_distance(const Spectrum& spectrum) {
    const std::size_t n = spectrum.n;
    const double rn = std::sqrt(static_cast<double>(n));
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = semicircle_cdf(spectrum.eigenvalues[i] / rn);
        d = std::max(d, std::abs(F - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
    }
    return d;
}

}  // namespace jacobimax
