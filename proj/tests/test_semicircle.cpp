#include "oracles.hpp"

#include <wigner/semicircle.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace wigner;

namespace {

long double density_ld(long double x) { return std::fabs(x) >= 2 ? 0.0L : std::sqrt(4.0L - x * x) / (2.0L * M_PIl); }

// CDF by quadrature of the density; x = 2 sin t removes the square-root cusp.
long double cdf_by_quadrature(long double x) {
  if (x <= -2) return 0;
  if (x >= 2) return 1;
  const long double t1 = std::asin(x / 2.0L);
  return oracle::simpson([](long double t) { return 2.0L * std::cos(t) * std::cos(t) / M_PIl; }, -M_PIl / 2, t1,
                         1e-16L);
}

double quantile_by_bisection(double p) {
  long double lo = -2, hi = 2;
  for (int i = 0; i < 100; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (cdf_by_quadrature(mid) < p) lo = mid;
    else hi = mid;
  }
  return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace

TEST(Semicircle, DensityIntegratesToOneAndVanishesOutside) {
  const long double total = oracle::simpson(density_ld, -2.0L, 2.0L, 1e-14L);
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-8);
  EXPECT_EQ(semicircle_density(2.5), 0.0);
  EXPECT_EQ(semicircle_density(-2.0), 0.0);
  EXPECT_NEAR(semicircle_density(0.0), 1.0 / M_PI, 1e-15);
}

TEST(Semicircle, CdfAgreesWithQuadrature) {
  for (double x = -2.2; x <= 2.2; x += 0.137)
    EXPECT_NEAR(semicircle_cdf(x), static_cast<double>(cdf_by_quadrature(x)), 1e-12) << x;
  EXPECT_EQ(semicircle_cdf(0.0), 0.5);
}

TEST(Semicircle, QuantileMatchesBisectionOracle) {
  for (double p : {1e-9, 1e-4, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.999, 1 - 1e-9}) {
    const double q = semicircle_quantile(p);
    EXPECT_NEAR(q, quantile_by_bisection(p), 1e-9) << p;
    EXPECT_NEAR(semicircle_cdf(q), p, 1e-12) << p;
  }
  EXPECT_EQ(semicircle_quantile(1.0), 2.0);
  EXPECT_NEAR(semicircle_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(semicircle_quantile(0.25), -0.80795, 5e-5);
}

TEST(Semicircle, QuantileRejectsOutOfRange) {
  EXPECT_THROW(semicircle_quantile(0.0), DomainError);
  EXPECT_THROW(semicircle_quantile(-0.1), DomainError);
  EXPECT_THROW(semicircle_quantile(1.5), DomainError);
  EXPECT_THROW(semicircle_quantile(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Semicircle, QuantileTableIsIncreasingAndSymmetric) {
  const auto t = quantile_table(101);
  ASSERT_EQ(t.gamma.size(), 101u);
  for (std::size_t j = 1; j < 101; ++j) EXPECT_LT(t.gamma[j - 1], t.gamma[j]);
  EXPECT_EQ(t.gamma.back(), 2.0);
  // gamma_j = -gamma_{n-j}: symmetric law.
  for (std::size_t j = 1; j < 101; ++j) EXPECT_NEAR(t.gamma[j - 1], -t.gamma[101 - j - 1], 1e-12);
}

TEST(Semicircle, EdgeRatioStaysBounded) {
  // (2 + gamma(x)) / x^{2/3} tends to (3 pi / 2)^{2/3} at the edge.
  const double edge_limit = std::cbrt(std::pow(1.5 * M_PI, 2));
  EXPECT_NEAR(quantile_edge_ratio(1e-9), edge_limit, 1e-4);
  for (double x = 1e-6; x <= 0.5; x *= 1.3) {
    const double r = quantile_edge_ratio(x);
    EXPECT_GE(r, edge_limit - 1e-6) << x;
    EXPECT_LE(r, 3.2) << x;
  }
}

TEST(Semicircle, StieltjesTransformMatchesQuadrature) {
  for (auto [u, v] : {std::pair{0.3, 1.0}, {-1.7, 0.2}, {2.5, 0.05}, {0.0, 5.0}, {1.99, 0.01}, {-3.0, 0.3}}) {
    const ComplexPoint p(u, v);
    auto part = [&](bool imag) {
      return oracle::simpson(
          [&](long double t) {
            const long double x = 2.0L * std::sin(t);
            const std::complex<long double> g = 1.0L / (x - std::complex<long double>(u, v));
            return (imag ? g.imag() : g.real()) * 2.0L * std::cos(t) * std::cos(t) / M_PIl;
          },
          -M_PIl / 2, M_PIl / 2, 1e-14L);
    };
    const complex s = stieltjes_s(p);
    EXPECT_NEAR(s.real(), static_cast<double>(part(false)), 1e-9) << u << "," << v;
    EXPECT_NEAR(s.imag(), static_cast<double>(part(true)), 1e-9) << u << "," << v;
  }
}

TEST(Semicircle, StieltjesTransformSolvesQuadratic) {
  for (double u = -4; u <= 4; u += 0.25)
    for (double v : {1e-8, 1e-3, 0.1, 1.0, 10.0}) {
      const ComplexPoint p(u, v);
      const complex s = stieltjes_s(p);
      EXPECT_GT(s.imag(), 0.0) << u << "," << v;
      EXPECT_LT(std::abs(s * s + p.z() * s + 1.0), 1e-12 * std::max(1.0, std::abs(p.z()))) << u << "," << v;
      EXPECT_LE(std::abs(s), 1.0 + 1e-12);
    }
}

TEST(Semicircle, ComplexPointRequiresUpperHalfPlane) {
  EXPECT_THROW(ComplexPoint(0.0, 0.0), DomainError);
  EXPECT_THROW(ComplexPoint(0.0, -1.0), DomainError);
  EXPECT_THROW(ComplexPoint(std::numeric_limits<double>::quiet_NaN(), 1.0), DomainError);
  EXPECT_THROW(ComplexPoint(0.0, std::numeric_limits<double>::infinity()), DomainError);
}

TEST(Semicircle, EvenMomentsAreCatalanNumbers) {
  const double known[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  for (unsigned m = 0; m < 9; ++m) {
    EXPECT_EQ(catalan(m), known[m]);
    const long double q = oracle::simpson(
        [m](long double x) { return std::pow(x, 2.0L * m) * density_ld(x); }, -2.0L, 2.0L, 1e-13L);
    EXPECT_NEAR(semicircle_moment(m), static_cast<double>(q), 1e-6 * known[m]) << m;
    EXPECT_EQ(semicircle_raw_moment(2 * m + 1), 0.0);
    EXPECT_EQ(semicircle_raw_moment(2 * m), known[m]);
  }
}
