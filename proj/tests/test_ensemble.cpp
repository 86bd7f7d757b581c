#include <wigner/ensemble.hpp>
#include <wigner/experiments/seed.hpp>
#include <wigner/rng.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>
#include <set>

using namespace wigner;

TEST(RandomStream, UniformStaysInUnitInterval) {
  RandomStream r(42);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(RandomStream, NormalMomentsMatchStandardGaussian) {
  RandomStream r(7);
  const int m = 400000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < m; ++i) {
    const double g = r.normal();
    s1 += g;
    s2 += g * g;
    s4 += g * g * g * g;
  }
  EXPECT_NEAR(s1 / m, 0.0, 0.01);
  EXPECT_NEAR(s2 / m, 1.0, 0.01);
  EXPECT_NEAR(s4 / m, 3.0, 0.05);
}

TEST(RandomStream, SameSeedSameSequence) {
  RandomStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(DeriveSeed, NoCollisionsOverExperimentGrid) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL, 12345ULL})
    for (std::uint64_t n = 100; n <= 5000; n += 100)
      for (std::uint64_t t = 0; t < 200; ++t) seeds.push_back(derive_seed(master, t, n));
  EXPECT_EQ(count_seed_collisions(seeds), 0u);
}

TEST(DeriveSeed, SingleBitFlipChangesAboutHalfTheOutput) {
  double total = 0;
  int cases = 0;
  for (std::uint64_t t = 0; t < 64; ++t) {
    const auto base = derive_seed(1, t, 500);
    for (int bit = 0; bit < 64; ++bit) {
      total += std::popcount(base ^ derive_seed(1ULL << bit | 1, t, 500)) * (bit == 0 ? 0 : 1);
      cases += bit == 0 ? 0 : 1;
    }
  }
  EXPECT_NEAR(total / cases, 32.0, 1.0);
}

TEST(DeriveSeed, CountsDuplicates) {
  const std::vector<std::uint64_t> s = {1, 2, 2, 3, 3, 3};
  EXPECT_EQ(count_seed_collisions(s), 3u);
}

TEST(EntryLaw, ParetoRequiresFiniteVariance) {
  EXPECT_THROW(EntryLaw::pareto(3.0), DomainError);
  EXPECT_THROW(EntryLaw::pareto(2.5), DomainError);
  EXPECT_NO_THROW(EntryLaw::pareto(3.1));
}

TEST(EntryLaw, StandardizedParetoMomentsByMonteCarlo) {
  for (double mu : {5.1, 9.1}) {
    const auto law = EntryLaw::pareto(mu);
    RandomStream r(11);
    const int m = 1000000;
    double s1 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < m; ++i) {
      const double x = sample_raw_entry(r, law);
      s1 += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    EXPECT_NEAR(s1 / m, 0.0, 5e-3) << mu;
    EXPECT_NEAR(s2 / m, 1.0, 3e-2) << mu;
    if (mu > 9) {
      EXPECT_NEAR(s4 / m, law.fourth_moment(), 0.1 * law.fourth_moment()) << mu;
    }
  }
}

TEST(EntryLaw, TailProbabilityAgreesWithEmpiricalFrequency) {
  const auto law = EntryLaw::pareto(5.1);
  RandomStream r(5);
  const int m = 1000000;
  int hits = 0;
  for (int i = 0; i < m; ++i) hits += std::abs(sample_raw_entry(r, law)) > 4.0;
  const double p = law.tail_probability(4.0);
  EXPECT_NEAR(static_cast<double>(hits) / m, p, 5.0 * std::sqrt(p / m));
  EXPECT_NEAR(EntryLaw::gaussian().tail_probability(1.96), 0.05, 1e-3);
}

TEST(EntryLaw, TruncatedMomentsMatchMonteCarlo) {
  // Closed form against 10^6 variates.
  for (double mu : {4.1, 5.1, 9.1}) {
    const auto law = EntryLaw::pareto(mu);
    const double c = std::pow(2000.0, 0.375);
    RandomStream r(3);
    const int m = 1000000;
    long double s1 = 0, s2 = 0;
    for (int i = 0; i < m; ++i) {
      const double x = sample_raw_entry(r, law);
      if (std::abs(x) <= c) {
        s1 += x;
        s2 += x * x;
      }
    }
    const auto tm = law.truncated_moments(c);
    EXPECT_NEAR(tm.first, static_cast<double>(s1 / m), 3e-3) << mu;
    EXPECT_NEAR(tm.second, static_cast<double>(s2 / m), 1.5e-2) << mu;
    const double sigma_sq = tm.second - tm.first * tm.first;
    // mu = 4.1 keeps only about 80% of the variance at this cutoff.
    EXPECT_GT(sigma_sq, mu > 5 ? 0.9 : 0.75);
    EXPECT_LT(sigma_sq, 1.0);
  }
  // Gaussian: E[X^2 1(|X| <= c)] by quadrature of the density.
  const double c = 1.3;
  double acc = 0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const double x = -c + 2 * c * (i + 0.5) / steps;
    acc += x * x * std::exp(-x * x / 2) / std::sqrt(2 * M_PI) * (2 * c / steps);
  }
  EXPECT_NEAR(EntryLaw::gaussian().truncated_moments(c).second, acc, 1e-7);
  EXPECT_EQ(EntryLaw::gaussian().truncated_moments(c).first, 0.0);
}

TEST(SampleWigner, SymmetricScaledAndDeterministic) {
  const auto a = sample_wigner({50, EntryLaw::pareto(5.1), 77});
  const auto b = sample_wigner({50, EntryLaw::pareto(5.1), 77});
  EXPECT_EQ(a, b);
  const auto d = a.dense();
  for (std::size_t j = 0; j < 50; ++j)
    for (std::size_t k = 0; k < 50; ++k) ASSERT_EQ(d[j * 50 + k], d[k * 50 + j]);
  EXPECT_NE(a, sample_wigner({50, EntryLaw::pareto(5.1), 78}));
  EXPECT_THROW(sample_wigner({1, EntryLaw::gaussian(), 1}), ConfigError);
}

TEST(SampleWigner, FrobeniusNormConcentratesNearN) {
  // E ||W||_F^2 = (n^2) / n = n for unit-variance entries.
  const std::size_t n = 400;
  const auto w = sample_wigner({n, EntryLaw::gaussian(), 1});
  EXPECT_NEAR(w.frobenius_sq() / n, 1.0, 0.02);
}

TEST(SymmetricMatrix, WithoutRemovesRowAndColumn) {
  const auto w = sample_wigner({6, EntryLaw::gaussian(), 2});
  const auto m = w.without(2);
  ASSERT_EQ(m.size(), 5u);
  EXPECT_EQ(m(1, 3), w(1, 4));
  EXPECT_EQ(m(2, 2), w(3, 3));
  EXPECT_EQ(m(0, 0), w(0, 0));
}

TEST(Truncation, ChainInvariants) {
  const std::size_t n = 300;
  const auto law = EntryLaw::pareto(4.1);
  const auto w = sample_wigner({n, law, 9});
  const auto t = truncate(w, TruncationSpec{}, law);
  const double rn = std::sqrt(static_cast<double>(n));
  std::size_t zeroed = 0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j; k < n; ++k) {
      ASSERT_LE(std::abs(t.hat(j, k) * rn), t.cutoff);
      if (t.hat(j, k) != w(j, k)) ++zeroed;
      ASSERT_NEAR(t.tilde(j, k), (t.hat(j, k) * rn - t.centering) / rn, 1e-15);
      ASSERT_NEAR(t.breve(j, k), t.tilde(j, k) / std::sqrt(t.sigma_sq), 1e-15);
    }
  EXPECT_EQ(zeroed, t.clipped);
  EXPECT_GT(t.sigma_sq, 0.0);
  EXPECT_LE(t.sigma_sq, 1.0);
  EXPECT_EQ(t.cutoff, std::pow(300.0, 0.375));
}

TEST(Truncation, HighCutoffLeavesHatUnchanged) {
  const auto law = EntryLaw::gaussian();
  const auto w = sample_wigner({40, law, 4});
  const auto t = truncate(w, {0.5, 100.0}, law);
  EXPECT_EQ(t.hat, w);
  EXPECT_EQ(t.clipped, 0u);
  EXPECT_NEAR(t.sigma_sq, 1.0, 1e-15);
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t k = j; k < 40; ++k) ASSERT_NEAR(t.breve(j, k), w(j, k), 1e-15);
}

TEST(Truncation, DeterministicAndRejectsBadSpecs) {
  const auto law = EntryLaw::pareto(5.1);
  const auto w = sample_wigner({30, law, 4});
  const auto a = truncate(w, {}, law), b = truncate(w, {}, law);
  EXPECT_EQ(a.breve, b.breve);
  EXPECT_EQ(a.sigma_sq, b.sigma_sq);
  EXPECT_THROW(truncate(w, {0.0, 1.0}, law), ConfigError);
  EXPECT_THROW(truncate(w, {0.6, 1.0}, law), ConfigError);
  EXPECT_THROW(truncate(w, {0.375, 0.0}, law), ConfigError);
  // Gaussian cutoff at 1e-9: the kept mass vanishes.
  EXPECT_THROW(truncate(sample_wigner({30, EntryLaw::gaussian(), 1}), {0.1, 1e-9}, EntryLaw::gaussian()),
               DegenerateTruncationError);
}

TEST(Truncation, ClippingFrequencyTracksUnionBound) {
  // P(W != hat W) against n^2/2 P(|X| > c): within a factor of 3 where the
  // bound is small enough to be informative.
  const auto law = EntryLaw::pareto(5.1);
  const std::size_t n = 100, trials = 400;
  for (double d : {1.5, 2.0, 3.0}) {
    const TruncationSpec spec{0.375, d};
    std::size_t any = 0;
    for (std::size_t t = 0; t < trials; ++t)
      any += truncate(sample_wigner({n, law, derive_seed(17, t, n)}), spec, law).clipped > 0;
    const double observed = static_cast<double>(any) / trials;
    const double entries = n * (n + 1) / 2.0;
    const double p = law.tail_probability(spec.cutoff(n));
    const double exact = 1.0 - std::pow(1.0 - p, entries);
    const double bound = entries * p;
    EXPECT_LE(observed, std::min(1.0, 3.0 * bound) + 0.05) << d;
    EXPECT_NEAR(observed, exact, 4.0 * std::sqrt(exact * (1 - exact) / trials) + 0.01) << d;
    if (bound < 0.5) {
      EXPECT_GE(observed, bound / 3.0) << d;
    }
  }
  // Frequency falls as D grows.
  std::size_t prev = trials + 1;
  for (double d : {1.0, 2.0, 4.0}) {
    std::size_t any = 0;
    for (std::size_t t = 0; t < trials; ++t)
      any += truncate(sample_wigner({n, law, derive_seed(18, t, n)}), {0.375, d}, law).clipped > 0;
    EXPECT_LE(any, prev);
    prev = any;
  }
}
