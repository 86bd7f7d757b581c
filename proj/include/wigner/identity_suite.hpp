#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/resolvent.hpp>
#include <wigner/semicircle.hpp>
#include <wigner/statistics.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace wigner {

/// Worst-case residuals and slacks of the exact resolvent identities and
/// inequalities for one matrix over a set of evaluation points.
struct IdentityReport {
  double schur = 0.0;          // max |R_jj - 1/(Schur denominator)|
  double trace_minor = 0.0;    // max |Tr R - Tr R^(j) - (1 + eta_j) R_jj|
  double lambda = 0.0;         // max |Lambda_n - T_n / b_n|
  double frobenius_slack = std::numeric_limits<double>::infinity();
  double column_slack = std::numeric_limits<double>::infinity();
  double square_trace_slack = std::numeric_limits<double>::infinity();
  double window_slack = std::numeric_limits<double>::infinity();  // 2 w Im R_jj(u* + iw) - Q_nj(w)
  std::size_t degenerate = 0;  // points with |b_n| < 1e-12, skipped for the lambda identity

  void merge(const IdentityReport& o) {
    schur = std::max(schur, o.schur);
    trace_minor = std::max(trace_minor, o.trace_minor);
    lambda = std::max(lambda, o.lambda);
    frobenius_slack = std::min(frobenius_slack, o.frobenius_slack);
    column_slack = std::min(column_slack, o.column_slack);
    square_trace_slack = std::min(square_trace_slack, o.square_trace_slack);
    window_slack = std::min(window_slack, o.window_slack);
    degenerate += o.degenerate;
  }

  bool residuals_ok(double tol = 1e-8) const noexcept {
    return schur <= tol && trace_minor <= tol && lambda <= tol;
  }
  bool slacks_ok(double tol = 1e-12) const noexcept {
    return frobenius_slack >= -tol && column_slack >= -tol && square_trace_slack >= -tol &&
           window_slack >= -tol;
  }
};

/// Evaluation points with heights spread over [v_min, v_max] and abscissae
/// over [-u_max, u_max], deterministic in the count.
inline std::vector<ComplexPoint> identity_grid(std::size_t count, double v_min = 0.1, double v_max = 4.0,
                                               double u_max = 2.5) {
  std::vector<ComplexPoint> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(count - 1);
    // Heights log-spaced; abscissae visit the grid in a scrambled order so
    // small and large v both meet bulk and edge positions.
    const double v = v_min * std::pow(v_max / v_min, t);
    const double s = std::fmod(0.618033988749895 * static_cast<double>(i) + 0.5, 1.0);
    pts.emplace_back(-u_max + 2.0 * u_max * s, v);
  }
  return pts;
}

inline IdentityReport run_identity_suite(const SymmetricMatrix& w, const std::vector<ComplexPoint>& points) {
  const std::size_t n = w.size();
  const SpectralData full = decompose(w);
  std::vector<SpectralData> minors;
  minors.reserve(n);
  for (std::size_t j = 0; j < n; ++j) minors.push_back(minor_spectral(w, j));

  IdentityReport rep;
  for (const auto& z : points) {
    const auto lam = lambda_identity(w, z, full, minors);
    if (lam.degenerate) ++rep.degenerate;
    else rep.lambda = std::max(rep.lambda, lam.residual);
    for (std::size_t j = 0; j < n; ++j) {
      rep.schur = std::max(rep.schur, schur_residual(w, j, z, minors[j], full));
      rep.trace_minor = std::max(rep.trace_minor, trace_minor_residual(w, j, z, minors[j], full));
      const auto ineq = resolvent_inequalities(n, minors[j], z);
      rep.frobenius_slack = std::min(rep.frobenius_slack, ineq.frobenius_slack);
      rep.column_slack = std::min(rep.column_slack, ineq.column_slack);
      rep.square_trace_slack = std::min(rep.square_trace_slack, ineq.square_trace_slack);
      const double width = z.v();
      const auto q = q_nj(full, j, width);
      const double im = r_entry({full, ComplexPoint(q.left_endpoint, width)}, j, j).imag();
      rep.window_slack = std::min(rep.window_slack, 2.0 * width * im - q.value);
    }
  }
  return rep;
}

}  // namespace wigner
