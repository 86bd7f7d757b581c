#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/errors.hpp>
#include <wigner/resolvent.hpp>
#include <wigner/semicircle.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace wigner {

namespace detail {
inline void require_sorted(std::span<const double> x, const char* what) {
  if (!std::is_sorted(x.begin(), x.end()))
    throw PreconditionError(std::string(what) + ": eigenvalues must be sorted ascending");
}
inline double n_two_thirds(double n) { return std::cbrt(n * n); }
}  // namespace detail

/// sup_x |F_n(x) - G(x)| for the empirical distribution of sorted values.
/// Both sides of every jump are compared.
inline double kolmogorov_distance(std::span<const double> eigenvalues) {
  detail::require_sorted(eigenvalues, "kolmogorov_distance");
  const double n = static_cast<double>(eigenvalues.size());
  double d = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    const double g = semicircle_cdf(eigenvalues[k]);
    d = std::max({d, std::abs((k + 1) / n - g), std::abs(k / n - g)});
  }
  return d;
}

/// n * delta / sqrt(log n).
inline double t_statistic(double delta_star, std::size_t n) {
  if (n < 2) throw DomainError("t_statistic: n must be at least 2");
  const double nn = static_cast<double>(n);
  return nn * delta_star / std::sqrt(std::log(nn));
}

enum class EdgeSide { upper, lower };

/// n^{2/3} (lambda - 2) at the upper edge; the lower edge is mirrored,
/// n^{2/3} (-lambda - 2), so both sides share one limit law.
inline double zeta_statistic(double edge_eigenvalue, std::size_t n, EdgeSide side = EdgeSide::upper) {
  if (n < 1) throw DomainError("zeta_statistic: n must be at least 1");
  const double x = side == EdgeSide::upper ? edge_eigenvalue : -edge_eigenvalue;
  return detail::n_two_thirds(static_cast<double>(n)) * (x - 2.0);
}

struct RigidityProfile {
  std::vector<double> deviations;  // |lambda_j - gamma_j|
  std::vector<double> normalized;  // deviation * n^{2/3} * min(j, n-j+1)^{1/3}
};

inline RigidityProfile rigidity_profile(std::span<const double> eigenvalues, const QuantileTable& table) {
  const std::size_t n = eigenvalues.size();
  if (table.gamma.size() != n) throw PreconditionError("rigidity_profile: table size does not match");
  RigidityProfile r;
  r.deviations.resize(n);
  r.normalized.resize(n);
  const double scale = detail::n_two_thirds(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double j = static_cast<double>(i + 1);
    const double dev = std::abs(eigenvalues[i] - table.gamma[i]);
    r.deviations[i] = dev;
    r.normalized[i] = dev * scale * std::cbrt(std::min(j, static_cast<double>(n) - j + 1.0));
  }
  return r;
}

/// Largest normalized deviation over 1-based indices ceil(lo n) .. floor(hi n).
inline double max_bulk_rigidity(const RigidityProfile& r, double lo = 0.05, double hi = 0.95) {
  const double n = static_cast<double>(r.normalized.size());
  const auto first = static_cast<std::size_t>(std::max(1.0, std::ceil(lo * n)));
  const auto last = static_cast<std::size_t>(std::min(n, std::floor(hi * n)));
  double m = 0.0;
  for (std::size_t j = first; j <= last; ++j) m = std::max(m, r.normalized[j - 1]);
  return m;
}

/// C1 K min(j, n-j+1)^{-1/3} n^{-2/3}, j 1-based.
inline double rigidity_bound(std::size_t j, std::size_t n, double K, double C1) {
  if (j < 1 || j > n) throw DomainError("rigidity_bound: need 1 <= j <= n");
  if (!(K > 0.0 && C1 > 0.0)) throw DomainError("rigidity_bound: K and C1 must be positive");
  const double m = static_cast<double>(std::min(j, n - j + 1));
  return C1 * K / (std::cbrt(m) * detail::n_two_thirds(static_cast<double>(n)));
}

/// n * max_{j,k} u_k[j]^2.
inline double delocalization_stat(const SpectralData& s) {
  if (!s.has_vectors()) throw PreconditionError("delocalization_stat: spectral data carries no eigenvectors");
  double m = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k)
    for (double c : s.eigenvector(k)) m = std::max(m, c * c);
  return static_cast<double>(s.size()) * m;
}

struct WindowMass {
  double value;          // largest weighted mass in a closed window of the given width
  double left_endpoint;  // eigenvalue at which that window starts
};

/// Concentration function of the weighted distribution F_nj, maximized over
/// windows [lambda_i, lambda_i + width].
inline WindowMass q_nj(const SpectralData& s, std::size_t j, double width) {
  detail::check_index(j, s.size(), "q_nj");
  if (!(width > 0.0)) throw DomainError("q_nj: window must be positive");
  if (!s.has_vectors()) throw PreconditionError("q_nj: spectral data carries no eigenvectors");
  const std::size_t n = s.size();
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = s.component(j, k) * s.component(j, k);
  WindowMass best{0.0, s.eigenvalue(0)};
  long double mass = 0.0L;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < n; ++lo) {
    while (hi < n && s.eigenvalue(hi) <= s.eigenvalue(lo) + width) mass += w[hi++];
    if (static_cast<double>(mass) > best.value) best = {static_cast<double>(mass), s.eigenvalue(lo)};
    mass -= w[lo];
  }
  return best;
}

/// Number of sorted values in [a, b].
inline std::size_t counting(std::span<const double> eigenvalues, double a, double b) {
  if (!(a <= b)) throw PreconditionError("counting: need a <= b");
  const auto lo = std::lower_bound(eigenvalues.begin(), eigenvalues.end(), a);
  const auto hi = std::upper_bound(eigenvalues.begin(), eigenvalues.end(), b);
  return static_cast<std::size_t>(hi - lo);
}

/// N[x - xi/(2n), x + xi/(2n)] / xi, which tracks the density at x.
inline double local_density(std::span<const double> eigenvalues, double x, double xi) {
  const double half = xi / (2.0 * static_cast<double>(eigenvalues.size()));
  return static_cast<double>(counting(eigenvalues, x - half, x + half)) / xi;
}

inline double psi_bound(double kappa, double v, std::size_t n) {
  if (!(kappa > 0.0 && v > 0.0 && n > 0)) throw DomainError("psi_bound: arguments must be positive");
  const double nn = static_cast<double>(n);
  const double kv = kappa + v;
  const double nv = nn * v;
  return 1.0 / (nn * kv) + 1.0 / (nv * nv * std::sqrt(kv)) + 1.0 / (nn * std::sqrt(v) * std::sqrt(kv)) +
         1.0 / (std::pow(nv, 1.5) * std::pow(kv, 0.25));
}

struct EdgeGridPoint {
  double kappa;  // (K + j) / n^{2/3}
  double v;      // (K + j)^{1/5} / n^{2/3}
  double x;      // -2 - kappa
};

/// Points outside the left edge, stopping at the first kappa with 2 + kappa >= u0.
inline std::vector<EdgeGridPoint> edge_grid(double K, std::size_t n, double u0) {
  if (!(K > 0.0)) throw DomainError("edge_grid: K must be positive");
  if (!(u0 > 2.0)) throw DomainError("edge_grid: u0 must exceed 2");
  if (n < 1) throw DomainError("edge_grid: n must be positive");
  const double scale = detail::n_two_thirds(static_cast<double>(n));
  std::vector<EdgeGridPoint> g;
  for (std::size_t j = 0;; ++j) {
    const double t = K + static_cast<double>(j);
    const double kappa = t / scale;
    g.push_back({kappa, std::pow(t, 0.2) / scale, -2.0 - kappa});
    if (2.0 + kappa >= u0) break;
  }
  return g;
}

/// Four-term moment bound for |Im m_n - Im s| with a caller-supplied constant C.
inline double calE_p(int p, std::size_t n, double v, double gamma_u, double C) {
  if (p < 1) throw DomainError("calE_p: p must be at least 1");
  if (!(n > 0 && v > 0.0 && gamma_u >= 0.0 && C > 0.0))
    throw DomainError("calE_p: n, v, C must be positive and gamma nonnegative");
  const double pp = p;
  const double nn = static_cast<double>(n);
  const double gv = gamma_u + v;
  const double nv = nn * v;
  const double cp = std::pow(C, pp);
  return cp * std::pow(pp, pp) / std::pow(nn * gv, pp) +
         cp * std::pow(pp, 3.0 * pp) / (std::pow(nv, 2.0 * pp) * std::pow(gv, pp / 2.0)) +
         cp / (std::pow(nn, pp) * std::pow(v * gv, pp / 2.0)) +
         cp * std::pow(pp, pp) / (std::pow(nv, 1.5 * pp) * std::pow(gv, pp / 4.0));
}

/// Half-width a of the Cauchy window holding mass 3/4.
inline double smoothing_window_a() { return std::tan(3.0 * std::numbers::pi / 8.0); }

struct SmoothingRhs {
  double outer_integral;  // integral over u of |m_n(u+iV) - s(u+iV)|
  double v0_term;         // C1 v0
  double eps_term;        // C2 eps^{3/2}
  double inner_sup;       // sup over the grid of |integral_{v'}^{V} (m_n - s) dv|
  double inner_argsup;    // grid point attaining inner_sup
  double total() const noexcept { return outer_integral + v0_term + eps_term + inner_sup; }
};

/// Right side of the smoothing inequality bounding the Kolmogorov distance
/// through Stieltjes transforms. Requires 2 v0 a <= eps^{3/2}, 0 < eps < 1/2, V > 0.
inline SmoothingRhs smoothing_rhs(const SpectralData& spectral, double v0, double eps, double V,
                                  double C1, double C2, std::size_t grid_points = 2001) {
  const double a = smoothing_window_a();
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("smoothing_rhs: need 0 < eps < 1/2");
  if (!(v0 >= 0.0)) throw PreconditionError("smoothing_rhs: need v0 >= 0");
  if (!(V > 0.0)) throw PreconditionError("smoothing_rhs: need V > 0");
  if (!(2.0 * v0 * a <= std::pow(eps, 1.5)))
    throw PreconditionError("smoothing_rhs: constraint 2 v0 a <= eps^{3/2} violated");
  if (grid_points < 2) throw PreconditionError("smoothing_rhs: need at least two grid points");
  using boost::math::quadrature::gauss_kronrod;
  constexpr double half_pi = std::numbers::pi / 2.0;

  // Plain double sums here; this path runs millions of times and is a
  // diagnostic, not an identity check.
  const auto eig = spectral.eigenvalues();
  const double inv_n = 1.0 / static_cast<double>(eig.size());
  auto lambda_at = [&](double u, double v) {
    double re = 0.0, im = 0.0;
    const double v2 = v * v;
    for (double lam : eig) {
      const double d = lam - u;
      const double inv = 1.0 / (d * d + v2);
      re += d * inv;
      im += inv;
    }
    return complex(re * inv_n, im * v * inv_n) - stieltjes_s(ComplexPoint(u, v));
  };

  SmoothingRhs out{};
  // u = tan(theta) maps the real line onto a finite interval; the integrand
  // decays like u^-2, so the transformed integrand stays bounded.
  auto outer = [&](double theta) {
    const double c = std::cos(theta);
    if (c < 1e-300) return 0.0;
    const double val = std::abs(lambda_at(std::tan(theta), V)) / (c * c);
    return val < 1e-12 ? 0.0 : val;
  };
  out.outer_integral = gauss_kronrod<double, 61>::integrate(outer, -half_pi, half_pi, 15, 1e-10);
  out.v0_term = C1 * v0;
  out.eps_term = C2 * std::pow(eps, 1.5);

  // J' = {x : 2 - |x| >= eps / 2}; v'(x) = v0 / sqrt(2 - |x|).
  const double edge = 2.0 - 0.5 * eps;
  constexpr double v_floor = 1e-10;
  out.inner_sup = 0.0;
  out.inner_argsup = -edge;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = -edge + 2.0 * edge * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double v_low = std::max(v0 / std::sqrt(2.0 - std::abs(x)), v_floor);
    if (v_low >= V) continue;
    // Integrate in t = log v to resolve the near-axis behaviour.
    auto integrand = [&](double t) {
      const double v = std::exp(t);
      return lambda_at(x, v) * v;
    };
    const complex val = gauss_kronrod<double, 31>::integrate(integrand, std::log(v_low), std::log(V), 12, 1e-9);
    const double mag = std::abs(val);
    if (mag > out.inner_sup) {
      out.inner_sup = mag;
      out.inner_argsup = x;
    }
  }
  return out;
}

struct StatSummary {
  double delta_star;
  double t_stat;
  double zeta;
  double v_stat;  // NaN when eigenvectors were not computed
  double max_bulk_rigidity;
};

inline StatSummary summarize(const SpectralData& s) {
  const std::size_t n = s.size();
  StatSummary out;
  out.delta_star = kolmogorov_distance(s.eigenvalues());
  out.t_stat = t_statistic(out.delta_star, n);
  out.zeta = zeta_statistic(s.lambda_max(), n);
  out.v_stat = s.has_vectors() ? delocalization_stat(s) : std::numeric_limits<double>::quiet_NaN();
  out.max_bulk_rigidity = max_bulk_rigidity(rigidity_profile(s.eigenvalues(), quantile_table(n)));
  return out;
}

}  // namespace wigner
