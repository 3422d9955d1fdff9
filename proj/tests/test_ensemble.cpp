#include <doctest.h>

#include <cmath>

#include "jacobimax/ensemble.hpp"

using namespace jacobimax;

TEST_CASE("sampling is bit-for-bit deterministic in (spec, n, seed)") {
    const auto a = sample_gbe(2.0, 64, {123, 5});
    const auto b = sample_gbe(2.0, 64, {123, 5});
    CHECK(a.b == b.b);
    CHECK(a.a == b.a);
    const auto c = sample_gbe(2.0, 64, {123, 6});
    CHECK(a.b != c.b);
}

TEST_CASE("reference draw frozen at build time") {
    // Golden coefficients recorded once from this sampler; any change to the
    // stream derivation or the variate algorithms must be deliberate.
    const auto c = sample_gbe(2.0, 4, {20240811, 0});
    const double b_ref[4] = {0.16312174474578534, -1.2226725190272651, -0.38007614466967427,
                             0.60902011214463492};
    const double a_ref[3] = {0.69367294466980878, 1.7348919467928572, 1.1103347810593984};
    for (int i = 0; i < 4; ++i) CHECK(c.b[i] == b_ref[i]);
    for (int i = 0; i < 3; ++i) CHECK(c.a[i] == a_ref[i]);
}

TEST_CASE("noise-free generic member is exact") {
    const auto spec = EnsembleSpec::generic(0.0);
    const auto c = sample_generic(spec, 16, {4, 0});
    for (double b : c.b) CHECK(b == 0.0);
    for (std::size_t k = 1; k <= 15; ++k) CHECK(c.a2(k) == doctest::Approx((double)k).epsilon(1e-15));
}

TEST_CASE("rejects invalid ensemble parameters") {
    CHECK_THROWS_AS(sample_gbe(-1.0, 8, {1, 0}), ParameterError);
    CHECK_THROWS_AS(sample_gbe(0.0, 8, {1, 0}), ParameterError);
    CHECK_THROWS_AS(EnsembleSpec::generic(1.0, "cauchy"), ParameterError);
}

TEST_CASE("squared off-diagonal moments match k and v k") {
    // E a_k^2 = k and Var a_k^2 = v k, checked with 4-sigma CLT bands.
    const double beta = 2.0, v = 2.0 / beta;
    const std::size_t k = 5;
    const int N = 100000;
    double s = 0, s2 = 0, s4 = 0;
    for (int r = 0; r < N; ++r) {
        const auto c = sample_gbe(beta, k + 1, {777, (std::uint64_t)r});
        const double x = c.a2(k);
        s += x;
        s2 += x * x;
    }
    const double mean = s / N;
    const double var = s2 / N - mean * mean;
    CHECK(std::abs(mean - 5.0) < 4.0 * std::sqrt(10.0 / N));
    // Var(chi^2-type sample variance) uses mu4 = (8 beta k + 12 (beta k)^2)/beta^4 * ...;
    // a generous multiple of the Gaussian band is enough here.
    CHECK(std::abs(var - v * k) < 8.0 * std::sqrt(2.0) * v * k / std::sqrt((double)N));
    (void)s4;
}

TEST_CASE("diagonal entries are centered with variance v") {
    const int N = 100000;
    const auto spec = EnsembleSpec::generic(1.3);
    double s = 0, s2 = 0;
    for (int r = 0; r < N; ++r) {
        const auto c = sample_generic(spec, 1, {31, (std::uint64_t)r});
        s += c.b[0];
        s2 += c.b[0] * c.b[0];
    }
    const double mean = s / N;
    CHECK(std::abs(mean) < 4.0 * std::sqrt(1.3 / N));
    CHECK(std::abs(s2 / N - 1.3) < 4.0 * std::sqrt(2.0 * 1.3 * 1.3 / N));
}

TEST_CASE("generic family reproduces the prescribed a^2 moments") {
    // Var(a_k^2) = v k exactly for the bounded uniform family; the band uses
    // its fourth moment E U^4 = 9/5.
    const double v = 1.0;
    const std::size_t k = 100;
    const int N = 100000;
    const auto spec = EnsembleSpec::generic(v);
    double s = 0, s2 = 0;
    for (int r = 0; r < N; ++r) {
        const auto c = sample_generic(spec, k + 1, {32, (std::uint64_t)r});
        const double x = c.a2(k);
        s += x;
        s2 += x * x;
    }
    const double mean = s / N;
    const double var = s2 / N - mean * mean;
    CHECK(std::abs(mean - (double)k) < 4.0 * std::sqrt(v * k / N));
    const double mu4 = (9.0 / 5.0) * v * k * v * k;
    CHECK(std::abs(var / k - v) < 4.0 * std::sqrt((mu4 - v * v * k * k) / N) / k);
}

TEST_CASE("independence across k: lag-1 correlation of a_k^2 - k") {
    const int N = 50000;
    double sxy = 0, sx = 0, sy = 0, sx2 = 0, sy2 = 0;
    for (int r = 0; r < N; ++r) {
        const auto c = sample_gbe(2.0, 3, {55, (std::uint64_t)r});
        const double x = c.a2(1) - 1.0, y = c.a2(2) - 2.0;
        sx += x; sy += y; sxy += x * y; sx2 += x * x; sy2 += y * y;
    }
    const double cx = sx / N, cy = sy / N;
    const double corr = (sxy / N - cx * cy) /
                        std::sqrt((sx2 / N - cx * cx) * (sy2 / N - cy * cy));
    CHECK(std::abs(corr) < 4.0 / std::sqrt((double)N));
}

TEST_CASE("truncation bound holds as a hard assertion and is law preserving") {
    const auto spec = EnsembleSpec::gaussian_beta(1.0, true, 1.0);  // aggressive bound
    const std::size_t n = 4096;
    const CoefficientMoments m{2.0};
    const double bound = truncation_bound(n, 1.0);
    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto c = sample_ensemble(spec, n, {99, r});
        CHECK(satisfies_truncation(c, m, bound));
    }
}

TEST_CASE("truncation leaves conforming realizations untouched") {
    // Zero noise satisfies the bound with margin.
    const auto spec = EnsembleSpec::generic(1.0, "uniform", true, 2.0);
    JacobiCoefficients zero;
    zero.n = 32;
    zero.b.assign(32, 0.0);
    zero.a.resize(31);
    for (std::size_t k = 1; k <= 31; ++k) zero.a[k - 1] = std::sqrt((double)k);
    const auto out = truncate_coefficients(spec, zero, {1, 0});
    CHECK(out.b == zero.b);
    CHECK(out.a == zero.a);

    // A realization that already satisfies the bound comes back identical.
    const auto spec2 = EnsembleSpec::gaussian_beta(2.0, true, 2.0);
    const auto c = sample_gbe(2.0, 256, {12, 3});
    const CoefficientMoments m{1.0};
    if (satisfies_truncation(c, m, truncation_bound(256, 2.0))) {
        const auto t = truncate_coefficients(spec2, c, {12, 3});
        CHECK(t.b == c.b);
        CHECK(t.a == c.a);
    }
}

TEST_CASE("resampling is rare at the default exponent") {
    // At n = 10^6 and beta = 2 the bound is (log n)^2 ~ 191 standard
    // deviations; no entry should ever be resampled.
    const std::size_t n = 1000000;
    const auto raw = sample_gbe(2.0, n, {2024, 0});
    const CoefficientMoments m{1.0};
    CHECK(satisfies_truncation(raw, m, truncation_bound(n, 2.0)));
}
