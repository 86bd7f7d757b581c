#pragma once

#include <wigner/errors.hpp>
#include <wigner/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace wigner {

struct ParetoMoments {
  double mean;
  double variance;
};

/// Mean and variance of the Pareto law with density (mu-1) x^-mu on [1, inf).
inline ParetoMoments pareto_moments(double mu) {
  if (!(mu > 3.0)) {
    throw DomainError("pareto_moments: mu must exceed 3 (variance is infinite), got " +
                      std::to_string(mu));
  }
  const double mean = (mu - 1.0) / (mu - 2.0);
  const double second = (mu - 1.0) / (mu - 3.0);
  return {mean, second - mean * mean};
}

/// Inverse CDF of the Pareto law: F(x) = 1 - x^-(mu-1).
inline double pareto_from_uniform(double u, double mu) {
  return std::pow(1.0 - u, -1.0 / (mu - 1.0));
}

/// I.i.d. entry distribution, always standardized to mean 0 and variance 1.
class EntryLaw {
 public:
  enum class Kind { gaussian, pareto };

  static EntryLaw gaussian() { return EntryLaw(Kind::gaussian, 0.0); }
  static EntryLaw pareto(double mu) {
    if (!(mu > 3.0)) {
      throw DomainError("pareto law requires mu > 3, got " + std::to_string(mu));
    }
    return EntryLaw(Kind::pareto, mu);
  }

  Kind kind() const noexcept { return kind_; }
  double mu() const noexcept { return mu_; }
  bool is_pareto() const noexcept { return kind_ == Kind::pareto; }

  double mean() const noexcept { return 0.0; }
  double variance() const noexcept { return 1.0; }

  std::string name() const {
    if (kind_ == Kind::gaussian) return "gaussian";
    return "pareto(" + format_mu() + ")";
  }

  std::string format_mu() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", mu_);
    return buf;
  }

  /// E X^4 of the standardized law; +inf when mu <= 5.
  double fourth_moment() const {
    if (kind_ == Kind::gaussian) return 3.0;
    if (!(mu_ > 5.0)) return std::numeric_limits<double>::infinity();
    const auto [m, var] = pareto_moments(mu_);
    auto raw = [&](int k) { return (mu_ - 1.0) / (mu_ - 1.0 - k); };
    const double central4 =
        raw(4) - 4.0 * m * raw(3) + 6.0 * m * m * raw(2) - 3.0 * m * m * m * m;
    return central4 / (var * var);
  }

  /// P(|X| > c) for the standardized variable.
  double tail_probability(double c) const {
    if (kind_ == Kind::gaussian) return std::erfc(c / std::numbers::sqrt2);
    const auto [m, s] = location_scale();
    const double lo = m - c * s;
    const double hi = m + c * s;
    double p = std::pow(hi, 1.0 - mu_);
    if (lo > 1.0) p += 1.0 - std::pow(lo, 1.0 - mu_);
    return p;
  }

  struct TruncatedMoments {
    double first;   // E[X 1(|X| <= c)]
    double second;  // E[X^2 1(|X| <= c)]
  };

  /// Closed-form partial moments of the standardized law over |X| <= c.
  TruncatedMoments truncated_moments(double c) const {
    if (kind_ == Kind::gaussian) {
      const double phi = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
      return {0.0, std::erf(c / std::numbers::sqrt2) - 2.0 * c * phi};
    }
    // Work with the complement |X| > c; the full moments are 0 and 1.
    const auto [m, s] = location_scale();
    const double lo = m - c * s;
    const double hi = m + c * s;
    // Integrals of xi^k f over (hi, inf) and [1, lo).
    auto upper = [&](int k) { return (mu_ - 1.0) / (mu_ - 1.0 - k) * std::pow(hi, k + 1.0 - mu_); };
    auto lower = [&](int k) {
      if (lo <= 1.0) return 0.0;
      return (mu_ - 1.0) / (mu_ - 1.0 - k) * (1.0 - std::pow(lo, k + 1.0 - mu_));
    };
    auto tail = [&](int k) { return upper(k) + lower(k); };
    const double t0 = tail(0), t1 = tail(1), t2 = tail(2);
    const double first_tail = (t1 - m * t0) / s;
    const double second_tail = (t2 - 2.0 * m * t1 + m * m * t0) / (s * s);
    return {-first_tail, 1.0 - second_tail};
  }

  bool operator==(const EntryLaw&) const = default;

 private:
  EntryLaw(Kind kind, double mu) : kind_(kind), mu_(mu) {}

  struct LocationScale {
    double mean;
    double sd;
  };
  LocationScale location_scale() const {
    const auto pm = pareto_moments(mu_);
    return {pm.mean, std::sqrt(pm.variance)};
  }

  Kind kind_;
  double mu_;
};

/// Draws one standardized entry. Pareto variates use the inverse CDF on a
/// single uniform; Gaussian variates use the stream's Box-Muller generator.
inline double sample_raw_entry(RandomStream& rng, const EntryLaw& law) {
  if (law.kind() == EntryLaw::Kind::gaussian) return rng.normal();
  const auto pm = pareto_moments(law.mu());
  const double xi = pareto_from_uniform(rng.uniform(), law.mu());
  return (xi - pm.mean) / std::sqrt(pm.variance);
}

/// Dense real symmetric matrix, upper triangle stored row by row.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

  static SymmetricMatrix from_dense(std::size_t n, const std::vector<double>& row_major) {
    SymmetricMatrix m(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = j; k < n; ++k) m.set(j, k, row_major[j * n + k]);
    return m;
  }

  static SymmetricMatrix diagonal(const std::vector<double>& d) {
    SymmetricMatrix m(d.size());
    for (std::size_t j = 0; j < d.size(); ++j) m.set(j, j, d[j]);
    return m;
  }

  std::size_t size() const noexcept { return n_; }

  double operator()(std::size_t j, std::size_t k) const noexcept { return packed_[index(j, k)]; }
  void set(std::size_t j, std::size_t k, double value) noexcept { packed_[index(j, k)] = value; }

  /// Matrix with row and column j removed.
  SymmetricMatrix without(std::size_t j) const {
    SymmetricMatrix m(n_ - 1);
    for (std::size_t a = 0, ra = 0; a < n_; ++a) {
      if (a == j) continue;
      for (std::size_t b = a, rb = ra; b < n_; ++b) {
        if (b == j) continue;
        m.set(ra, rb, (*this)(a, b));
        ++rb;
      }
      ++ra;
    }
    return m;
  }

  std::vector<double> dense() const {
    std::vector<double> out(n_ * n_);
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = 0; k < n_; ++k) out[j * n_ + k] = (*this)(j, k);
    return out;
  }

  double trace() const noexcept {
    double t = 0.0;
    for (std::size_t j = 0; j < n_; ++j) t += (*this)(j, j);
    return t;
  }

  double frobenius_sq() const noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      for (std::size_t k = j; k < n_; ++k) {
        const double x = (*this)(j, k);
        s += (j == k ? 1.0 : 2.0) * x * x;
      }
    return s;
  }

  bool all_finite() const noexcept {
    for (double x : packed_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  const std::vector<double>& packed() const noexcept { return packed_; }

  bool operator==(const SymmetricMatrix&) const = default;

 private:
  std::size_t index(std::size_t j, std::size_t k) const noexcept {
    if (j > k) std::swap(j, k);
    return j * n_ - j * (j - 1) / 2 + (k - j);
  }

  std::size_t n_ = 0;
  std::vector<double> packed_;
};

struct WignerConfig {
  std::size_t n;
  EntryLaw law;
  std::uint64_t seed;
};

/// W = X / sqrt(n); entries on and above the diagonal are drawn row by row
/// (j = 0..n-1, k = j..n-1) from a single stream seeded with config.seed.
inline SymmetricMatrix sample_wigner(const WignerConfig& config) {
  if (config.n < 2) {
    throw ConfigError("sample_wigner: n must be at least 2, got " + std::to_string(config.n));
  }
  RandomStream rng(config.seed);
  SymmetricMatrix w(config.n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(config.n));
  for (std::size_t j = 0; j < config.n; ++j)
    for (std::size_t k = j; k < config.n; ++k) w.set(j, k, sample_raw_entry(rng, config.law) * scale);
  return w;
}

/// Cutoff D * n^a applied to the unscaled entries X.
struct TruncationSpec {
  double level_exponent = 0.375;
  double d_constant = 1.0;

  double cutoff(std::size_t n) const {
    if (!(level_exponent > 0.0 && level_exponent <= 0.5)) {
      throw ConfigError("truncation exponent must lie in (0, 1/2], got " +
                        std::to_string(level_exponent));
    }
    if (!(d_constant > 0.0)) {
      throw ConfigError("truncation constant D must be positive, got " + std::to_string(d_constant));
    }
    return d_constant * std::pow(static_cast<double>(n), level_exponent);
  }

  bool operator==(const TruncationSpec&) const = default;
};

struct TruncatedTriple {
  SymmetricMatrix hat;    // entries with |X| > cutoff zeroed
  SymmetricMatrix tilde;  // hat recentered by E[X 1(|X| <= cutoff)]
  SymmetricMatrix breve;  // tilde / sigma
  double sigma_sq = 1.0;
  double cutoff = 0.0;
  double centering = 0.0;
  std::size_t clipped = 0;  // entries on and above the diagonal that were zeroed
};

/// Truncation chain hat -> tilde -> breve. The centering constant and
/// sigma^2 = E|X 1(|X|<=c) - E X 1(|X|<=c)|^2 come from closed-form integrals of the law.
inline TruncatedTriple truncate(const SymmetricMatrix& w, const TruncationSpec& spec,
                                const EntryLaw& law) {
  const std::size_t n = w.size();
  TruncatedTriple out;
  out.cutoff = spec.cutoff(n);
  const auto tm = law.truncated_moments(out.cutoff);
  out.centering = tm.first;
  out.sigma_sq = tm.second - tm.first * tm.first;
  if (!(out.sigma_sq > 0.0)) {
    throw DegenerateTruncationError("truncation at cutoff " + std::to_string(out.cutoff) +
                                    " leaves zero variance");
  }
  out.sigma_sq = std::min(out.sigma_sq, 1.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  const double sigma = std::sqrt(out.sigma_sq);
  out.hat = SymmetricMatrix(n);
  out.tilde = SymmetricMatrix(n);
  out.breve = SymmetricMatrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = j; k < n; ++k) {
      const double entry = w(j, k);
      const double raw = entry * root_n;
      const bool keep = std::abs(raw) <= out.cutoff;
      if (!keep) ++out.clipped;
      out.hat.set(j, k, keep ? entry : 0.0);
      const double centered = ((keep ? raw : 0.0) - out.centering) / root_n;
      out.tilde.set(j, k, centered);
      out.breve.set(j, k, centered / sigma);
    }
  }
  return out;
}

}  // namespace wigner
