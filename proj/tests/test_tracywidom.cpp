#include "oracles.hpp"

#include <wigner/tracywidom.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wigner;

TEST(TracyWidom, GammaApproximationMatchesThreeMoments) {
  const auto g = tw1_gamma_params();
  EXPECT_NEAR(g.mean(), -1.2065335745820, 1e-12);
  EXPECT_NEAR(g.variance(), 1.607781034581, 1e-12);
  EXPECT_NEAR(g.skewness(), 0.2934645240, 1e-10);
  EXPECT_NEAR(g.shape, 46.446, 1e-3);
  EXPECT_NEAR(g.mode(), -1.3926, 1e-3);
}

TEST(TracyWidom, DensityIntegratesToCdf) {
  const auto g = tw1_gamma_params();
  const long double lo = -g.shift + 1e-9L;
  const long double total = oracle::simpson([](long double x) { return tw1_pdf(static_cast<double>(x)); }, lo, 12.0L, 1e-12L);
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-8);
  for (double x : {-4.0, -2.0, -1.2, 0.0, 1.5, 3.0}) {
    const long double part = oracle::simpson([](long double t) { return tw1_pdf(static_cast<double>(t)); }, lo, x, 1e-13L);
    EXPECT_NEAR(tw1_cdf(x), static_cast<double>(part), 1e-8) << x;
  }
  EXPECT_EQ(tw1_cdf(-g.shift - 1.0), 0.0);
  EXPECT_EQ(tw1_pdf(-g.shift - 1.0), 0.0);
}

TEST(TracyWidom, KsDistanceAgainstBruteForce) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(300);
  for (auto& v : x) v = u(gen);
  auto cdf = [](double t) { return std::clamp(t, 0.0, 1.0); };
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  double brute = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i)
    brute = std::max({brute, std::abs((i + 1) / 300.0 - sorted[i]), std::abs(i / 300.0 - sorted[i])});
  EXPECT_NEAR(ks_distance(x, cdf), brute, 1e-15);
  EXPECT_LT(brute, 0.1);
  EXPECT_THROW(ks_distance(std::vector<double>{}, cdf), PreconditionError);
}

TEST(TracyWidom, GoeTridiagonalEdgeMatchesConstants) {
  // The moments are literature constants; confirm them on simulated GOE edges.
  std::mt19937_64 gen(20240601);
  const std::size_t n = 2000, trials = 2000;
  std::vector<double> z(trials);
  double s1 = 0, s2 = 0;
  for (auto& x : z) {
    x = oracle::goe_edge_sample(n, gen);
    s1 += x;
    s2 += x * x;
  }
  const double mean = s1 / trials;
  const double sd = std::sqrt(s2 / trials - mean * mean);
  EXPECT_NEAR(mean, Tw1Moments::mean, 0.1);
  EXPECT_NEAR(sd, std::sqrt(Tw1Moments::variance), 0.05);
  EXPECT_LE(ks_distance(z, tw1_cdf), 0.05);
}
