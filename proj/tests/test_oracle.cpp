#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jacobimax/oracle.hpp"
#include "jacobimax/recursion.hpp"

using namespace jacobimax;

TEST_CASE("dense determinant closed forms") {
    JacobiCoefficients c;
    c.n = 2;
    c.b = {0.0, 0.0};
    c.a = {1.0};
    const double x = 0.9 * std::sqrt(2.0);
    CHECK(dense_det(c, 0.9, 1) == doctest::Approx(x).epsilon(1e-14));
    CHECK(dense_det(c, 0.9, 2) == doctest::Approx(x * x - 1.0).epsilon(1e-13));
}

TEST_CASE("tridiagonal eigenvalues in tiny closed-form cases") {
    JacobiCoefficients c1;
    c1.n = 1;
    c1.b = {0.37};
    const auto s1 = eigen_tridiag(c1);
    CHECK(s1.eigenvalues[0] == doctest::Approx(0.37).epsilon(1e-10));

    JacobiCoefficients c2;
    c2.n = 2;
    c2.b = {0.0, 0.0};
    c2.a = {1.0};
    const auto s2 = eigen_tridiag(c2);
    CHECK(s2.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(s2.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Sturm counts at the Gershgorin bounds") {
    const auto c = sample_gbe(2.0, 200, {404, 0});
    double lo, hi;
    gershgorin_bounds(c, lo, hi);
    CHECK(sturm_count(c, lo - 1e-9) == 0);
    CHECK(sturm_count(c, hi + 1e-9) == 200);
}

TEST_CASE("spectrum flips sign with the matrix when the diagonal vanishes") {
    const auto c = zero_noise_coefficients(33);
    const auto s = eigen_tridiag(c);
    for (std::size_t i = 0; i < 33; ++i)
        CHECK(s.eigenvalues[i] == doctest::Approx(-s.eigenvalues[32 - i]).epsilon(1e-9));
}

TEST_CASE("eigenvalues sit inside the certified brackets") {
    const auto c = sample_gbe(1.0, 128, {21, 2});
    const auto s = eigen_tridiag(c, 1e-10);
    for (std::size_t i = 0; i < s.n; ++i) {
        CHECK(sturm_count(c, s.eigenvalues[i] - 1e-8) <= i);
        CHECK(sturm_count(c, s.eigenvalues[i] + 1e-8) >= i + 1);
    }
}

TEST_CASE("log potential conventions") {
    Spectrum s;
    s.n = 1;
    s.eigenvalues = {0.0};
    CHECK(log_potential(s, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    s.eigenvalues = {0.5};
    CHECK(std::isinf(log_potential(s, 0.5)));
    CHECK(log_potential(s, 0.5) < 0.0);
}

TEST_CASE("log potential equals the recursion across beta and n") {
    for (std::size_t n : {64, 256, 1024}) {
        for (double beta : {1.0, 2.0, 4.0}) {
            const auto c = sample_gbe(beta, n, {606, n + (std::size_t)beta});
            const auto sp = eigen_tridiag(c);
            for (double z : {-1.2, 0.7, 1.5}) {
                const double lhs = log_abs_charpoly(c, z).log_abs_p;
                const double rhs = log_potential(sp, z);
                CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs) + 1e-8);
            }
        }
    }
}

TEST_CASE("semicircle distance floors and degenerate spectra") {
    // Exact quantile placement sits at the discretization floor.
    const std::size_t n = 1000;
    Spectrum s;
    s.n = n;
    for (std::size_t i = 1; i <= n; ++i) {
        const double p = (static_cast<double>(i) - 0.5) / n;
        double lo = -2.0, hi = 2.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (semicircle_cdf(mid) < p ? lo : hi) = mid;
        }
        s.eigenvalues.push_back(0.5 * (lo + hi) * std::sqrt(static_cast<double>(n)));
    }
    CHECK(semicircle_distance(s) <= 1.0 / n + 1e-9);

    Spectrum atom;
    atom.n = 4;
    atom.eigenvalues = {0.0, 0.0, 0.0, 0.0};
    CHECK(semicircle_distance(atom) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sampled spectra approach the semicircle law") {
    double acc = 0;
    const int seeds = 20;
    for (std::uint64_t r = 0; r < seeds; ++r) {
        const auto c = sample_gbe(2.0, 10000, {2718, r});
        const auto sp = eigen_tridiag(c, 1e-7 * 4.0 * std::sqrt(10000.0));
        acc += semicircle_distance(sp);
    }
    CHECK(acc / seeds <= 0.02);
}
