#include "jacobimax/verify.hpp"

#include <cmath>

#include "jacobimax/oracle.hpp"
#include "jacobimax/recursion.hpp"

namespace jacobimax {

namespace {
// He_3 and He_4 (probabilists' normalization).
double he3(double x) { return x * x * x - 3.0 * x; }
double he4(double x) { return x * x * x * x - 6.0 * x * x + 3.0; }

// Roots of He_n by sign-change bisection of the explicit three-term recursion,
// independent of the production eigensolver.
double he_eval(int n, double x) {
    double p0 = 1.0, p1 = x;
    if (n == 0) return p0;
    for (int k = 2; k <= n; ++k) {
        const double p2 = x * p1 - (k - 1) * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

std::vector<double> he_roots(int n) {
    // All roots lie inside [-2 sqrt(n), 2 sqrt(n)].
    const double lim = 2.0 * std::sqrt(static_cast<double>(n)) + 1.0;
    const int grid = 20000;
    std::vector<double> roots;
    double prev_x = -lim, prev_f = he_eval(n, prev_x);
    for (int i = 1; i <= grid; ++i) {
        const double x = -lim + 2.0 * lim * i / grid;
        const double f = he_eval(n, x);
        if (prev_f == 0.0) roots.push_back(prev_x);
        if (prev_f * f < 0.0) {
            double a = prev_x, b = x;
            for (int it = 0; it < 200 && b - a > 1e-14 * lim; ++it) {
                const double m = 0.5 * (a + b);
                if (he_eval(n, a) * he_eval(n, m) <= 0.0)
                    b = m;
                else
                    a = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    return roots;
}
}  // namespace

VerifyReport run_verification(std::uint64_t master_seed) {
    VerifyReport rep;

    {  // Minor determinants vs dense LU.
        VerifyCheck c{"determinant identity (minor recursion vs dense LU)", 0, 1e-9, false};
        const double zs[5] = {-1.5, -0.7, 0.3, 1.0, 1.8};
        for (std::size_t n = 2; n <= 12; ++n) {
            for (std::uint64_t r = 0; r < 100; ++r) {
                const auto coeffs = sample_gbe(2.0, n, {master_seed, r});
                for (double z : zs) {
                    const double q = raw_charpoly(coeffs, z, n);
                    const double d = dense_det(coeffs, z, n);
                    const double err = std::abs(q - d) / std::max(1.0, std::abs(d));
                    c.max_error = std::max(c.max_error, err);
                }
            }
        }
        c.pass = c.max_error <= c.tolerance;
        rep.checks.push_back(c);
    }

    {  // Zero-noise closed forms at n = 3, 4.
        VerifyCheck c{"zero-noise closed forms (degree 3, 4)", 0, 1e-12, false};
        for (int deg = 3; deg <= 4; ++deg) {
            const auto coeffs = zero_noise_coefficients(deg);
            for (int i = 0; i < 20; ++i) {
                const double z = -1.9 + 3.8 * i / 19.0;
                const double x = z * std::sqrt(static_cast<double>(deg));
                const double ref = deg == 3 ? he3(x) : he4(x);
                if (std::abs(ref) < 1e-8) continue;  // avoid a root of the reference
                const auto res = log_abs_charpoly(coeffs, z);
                const double want = std::log(std::abs(ref)) - deg / 2.0 * std::log(static_cast<double>(deg));
                c.max_error = std::max(c.max_error, std::abs(res.log_abs_p - want) / std::abs(want));
            }
        }
        c.pass = c.max_error <= c.tolerance;
        rep.checks.push_back(c);
    }

    {  // Zero-noise spectrum vs independent root finder at n = 20.
        VerifyCheck c{"zero-noise spectrum vs independent degree-20 roots", 0, 1e-10, false};
        const auto coeffs = zero_noise_coefficients(20);
        const auto sp = eigen_tridiag(coeffs, 1e-13);
        const auto roots = he_roots(20);
        if (roots.size() != 20) {
            c.max_error = 1.0;
        } else {
            for (int i = 0; i < 20; ++i)
                c.max_error = std::max(c.max_error, std::abs(sp.eigenvalues[i] - roots[i]));
        }
        c.pass = c.max_error <= c.tolerance;
        rep.checks.push_back(c);
    }

    {  // log|p_n| vs eigenvalue log-potential.
        VerifyCheck c{"log-potential identity (recursion vs eigenvalues)", 0, 1e-8, false};
        const double zs[5] = {-1.4, -0.6, 0.5, 1.0, 1.7};
        for (double beta : {1.0, 2.0, 4.0}) {
            for (std::uint64_t r = 0; r < 3; ++r) {
                const auto coeffs = sample_gbe(beta, 256, {master_seed + 1, r});
                const auto sp = eigen_tridiag(coeffs);
                for (double z : zs) {
                    const double lhs = log_abs_charpoly(coeffs, z).log_abs_p;
                    const double rhs = log_potential(sp, z);
                    c.max_error =
                        std::max(c.max_error, std::abs(lhs - rhs) / (std::abs(rhs) + 1.0));
                }
            }
        }
        c.pass = c.max_error <= c.tolerance;
        rep.checks.push_back(c);
    }

    {  // Sign of p_n vs eigenvalue counts.
        VerifyCheck c{"sign consistency (recursion vs eigenvalue counts)", 0, 0.0, false};
        int bad = 0;
        for (std::uint64_t r = 0; r < 10; ++r) {
            const auto coeffs = sample_gbe(2.0, 64, {master_seed + 2, r});
            const auto sp = eigen_tridiag(coeffs);
            for (double z : {-1.1, 0.4, 0.9, 1.6}) {
                const auto res = log_abs_charpoly(coeffs, z);
                int above = 0;
                for (double lam : sp.eigenvalues)
                    if (lam / 8.0 > z) ++above;
                const int want = (above % 2 == 0) ? 1 : -1;
                if (res.sign != want) ++bad;
            }
        }
        c.max_error = bad;
        c.pass = bad == 0;
        rep.checks.push_back(c);
    }

    {  // Sampler sanity: spectral law close to the semicircle.
        VerifyCheck c{"semicircle distance of the sampled spectrum", 0, 0.03, false};
        double acc = 0;
        const int seeds = 8;
        for (std::uint64_t r = 0; r < seeds; ++r) {
            const auto coeffs = sample_gbe(2.0, 2000, {master_seed + 3, r});
            acc += semicircle_distance(eigen_tridiag(coeffs));
        }
        c.max_error = acc / seeds;
        c.pass = c.max_error <= c.tolerance;
        rep.checks.push_back(c);
    }

    return rep;
}

}  // namespace jacobimax
