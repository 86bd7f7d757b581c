#pragma once

#include <wigner/errors.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace wigner {

using complex = std::complex<double>;

/// Point z = u + iv of the open upper half-plane.
class ComplexPoint {
 public:
  ComplexPoint(double u, double v) : u_(u), v_(v) {
    if (!(v > 0.0) || !std::isfinite(u) || !std::isfinite(v)) {
      throw DomainError("ComplexPoint requires finite u and v > 0, got u=" + std::to_string(u) +
                        " v=" + std::to_string(v));
    }
  }
  double u() const noexcept { return u_; }
  double v() const noexcept { return v_; }
  complex z() const noexcept { return {u_, v_}; }

 private:
  double u_;
  double v_;
};

/// Semicircle density on [-2, 2].
inline double semicircle_density(double x) {
  if (!(std::abs(x) < 2.0)) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

/// Semicircle distribution function.
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double v =
      0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) + std::asin(0.5 * x) / std::numbers::pi;
  return std::clamp(v, 0.0, 1.0);
}

/// Inverse of semicircle_cdf on (0, 1]. Newton steps are kept inside a
/// shrinking bracket and replaced by bisection when they leave it.
inline double semicircle_quantile(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw DomainError("semicircle_quantile: p must lie in (0, 1], got " + std::to_string(p));
  }
  if (p == 1.0) return 2.0;
  double lo = -2.0, hi = 2.0;
  // Start from the edge asymptotics G(-2 + t) ~ 2 t^{3/2} / (3 pi), mirrored for the upper half.
  const double q = std::min(p, 1.0 - p);
  double t = std::cbrt(1.5 * std::numbers::pi * q);
  t = std::min(t * t, 2.0);
  double x = p <= 0.5 ? -2.0 + t : 2.0 - t;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = semicircle_cdf(x) - p;
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    const double d = semicircle_density(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
  }
  return x;
}

struct QuantileTable {
  std::size_t n = 0;
  std::vector<double> gamma;  // gamma[j-1] solves G(gamma) = j / n
};

inline QuantileTable quantile_table(std::size_t n) {
  if (n < 1) throw DomainError("quantile_table: n must be at least 1");
  QuantileTable t;
  t.n = n;
  t.gamma.resize(n);
  for (std::size_t j = 1; j <= n; ++j)
    t.gamma[j - 1] = semicircle_quantile(static_cast<double>(j) / static_cast<double>(n));
  return t;
}

/// (2 + quantile(x)) / x^{2/3}; bounded above and below on (0, 1/2].
inline double quantile_edge_ratio(double x) {
  return (2.0 + semicircle_quantile(x)) / std::cbrt(x * x);
}

/// Stieltjes transform of the semicircle law, the root of 1 + z s + s^2 = 0
/// with Im s > 0. The large root is formed first and inverted, which avoids
/// cancellation for large |z|.
inline complex stieltjes_s(const ComplexPoint& p) {
  const complex z = p.z();
  complex r = 0.5 * std::sqrt(z * z - 4.0);
  if ((std::conj(z) * r).real() < 0.0) r = -r;
  const complex s = 1.0 / (-0.5 * z - r);
  return s;
}

inline complex b_of_z(const ComplexPoint& p) { return p.z() + 2.0 * stieltjes_s(p); }

inline double edge_gap(double u) { return std::abs(std::abs(u) - 2.0); }

inline double catalan(unsigned m) {
  double c = 1.0;
  for (unsigned k = 0; k < m; ++k) c = c * 2.0 * (2.0 * k + 1.0) / (k + 2.0);
  return std::round(c);
}

/// Even moment of order 2m of the semicircle law.
inline double semicircle_moment(unsigned m) { return catalan(m); }

/// Moment of arbitrary order k; zero for odd k.
inline double semicircle_raw_moment(unsigned k) { return k % 2 ? 0.0 : catalan(k / 2); }

}  // namespace wigner
