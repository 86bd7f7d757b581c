#pragma once

#include <wigner/eigensolver.hpp>
#include <wigner/ensemble.hpp>
#include <wigner/errors.hpp>
#include <wigner/semicircle.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wigner {

namespace detail {
inline void check_index(std::size_t j, std::size_t n, const char* what) {
  if (j >= n) {
    throw std::out_of_range(std::string(what) + ": index " + std::to_string(j) +
                            " out of range for dimension " + std::to_string(n));
  }
}
}  // namespace detail

/// Empirical Stieltjes transform (1/n) sum_k 1/(lambda_k - z).
inline complex m_n(const SpectralData& spectral, const ComplexPoint& p) {
  const complex z = p.z();
  std::complex<long double> acc = 0.0L;
  for (double lambda : spectral.eigenvalues()) acc += 1.0L / (static_cast<long double>(lambda) - std::complex<long double>(z));
  return complex(acc / static_cast<long double>(spectral.size()));
}

/// Resolvent (W - z)^{-1} of a decomposed matrix at a fixed point z.
struct ResolventView {
  const SpectralData& spectral;
  ComplexPoint z;
};

/// R_jk(z) = sum_m u_m[j] u_m[k] / (lambda_m - z).
inline complex r_entry(const ResolventView& view, std::size_t j, std::size_t k) {
  const SpectralData& s = view.spectral;
  const std::size_t n = s.size();
  detail::check_index(j, n, "r_entry");
  detail::check_index(k, n, "r_entry");
  if (!s.has_vectors()) throw PreconditionError("r_entry: spectral data carries no eigenvectors");
  const complex z = view.z.z();
  std::complex<long double> acc = 0.0L;
  for (std::size_t m = 0; m < n; ++m) {
    const long double w = static_cast<long double>(s.component(j, m)) * s.component(k, m);
    acc += w / (static_cast<long double>(s.eigenvalue(m)) - std::complex<long double>(z));
  }
  return complex(acc);
}

/// Eigendecomposition of W with row and column j removed.
inline SpectralData minor_spectral(const SymmetricMatrix& w, std::size_t j) {
  detail::check_index(j, w.size(), "minor_spectral");
  if (w.size() < 3) throw PreconditionError("minor_spectral: n must be at least 3");
  return decompose(w.without(j));
}

/// Row j of W with the diagonal entry removed, in the index order of the minor.
inline std::vector<double> coupling_row(const SymmetricMatrix& w, std::size_t j) {
  std::vector<double> y;
  y.reserve(w.size() - 1);
  for (std::size_t k = 0; k < w.size(); ++k)
    if (k != j) y.push_back(w(j, k));
  return y;
}

/// Quadratic forms of a coupling row y against functions of the minor
/// resolvent, reduced to O(n) work per z by projecting y on the minor's
/// eigenvectors once.
///
/// With y_k = X_jk / sqrt(n):
///   full(z)  = sum_{k,l} y_k y_l R_kl,  diag(z) = sum_k y_k^2 R_kk
/// and the same with R replaced by R^2.
class MinorCoupling {
 public:
  MinorCoupling(const SpectralData& minor, std::span<const double> row, std::size_t n)
      : minor_(minor), n_(n), proj_sq_(minor.size()), diag_weight_(minor.size()) {
    const std::size_t m = minor.size();
    if (row.size() != m) throw PreconditionError("MinorCoupling: row length must match the minor");
    if (!minor.has_vectors()) throw PreconditionError("MinorCoupling: minor carries no eigenvectors");
    for (std::size_t e = 0; e < m; ++e) {
      const auto u = minor.eigenvector(e);
      long double p = 0.0L, d = 0.0L;
      for (std::size_t k = 0; k < m; ++k) {
        p += static_cast<long double>(u[k]) * row[k];
        d += static_cast<long double>(u[k]) * u[k] * row[k] * row[k];
      }
      proj_sq_[e] = p * p;
      diag_weight_[e] = d;
    }
  }

  struct Forms {
    complex full;       // sum_{k,l} y_k y_l F_kl
    complex diag;       // sum_k y_k^2 F_kk
    complex trace_n;    // (1/n) Tr F
  };

  /// Forms with F = R^{(j)}(z)^power, power 1 or 2.
  Forms forms(const ComplexPoint& p, int power) const {
    using lc = std::complex<long double>;
    const lc z(p.z());
    lc full = 0.0L, diag = 0.0L, tr = 0.0L;
    for (std::size_t e = 0; e < minor_.size(); ++e) {
      lc g = 1.0L / (static_cast<long double>(minor_.eigenvalue(e)) - z);
      if (power == 2) g *= g;
      full += proj_sq_[e] * g;
      diag += diag_weight_[e] * g;
      tr += g;
    }
    return {complex(full), complex(diag), complex(tr / static_cast<long double>(n_))};
  }

 private:
  const SpectralData& minor_;
  std::size_t n_;
  std::vector<long double> proj_sq_;
  std::vector<long double> diag_weight_;
};

struct EpsilonTerms {
  complex e1;  // X_jj / sqrt(n), real
  complex e2;  // off-diagonal quadratic form
  complex e3;  // diagonal fluctuation
  complex e4;  // (Tr R - Tr R^{(j)}) / n
  complex sum() const noexcept { return e1 + e2 + e3 + e4; }
};

/// Decomposition of 1/R_jj = -(z + m_n) + eps_j into its four parts.
/// The minor trace is normalized by the full dimension n.
inline EpsilonTerms epsilon_terms(const SymmetricMatrix& w, std::size_t j, const ComplexPoint& z,
                                  const SpectralData& minor, const SpectralData& full) {
  detail::check_index(j, w.size(), "epsilon_terms");
  const auto row = coupling_row(w, j);
  const MinorCoupling mc(minor, row, w.size());
  const auto f = mc.forms(z, 1);
  EpsilonTerms t;
  t.e1 = w(j, j);
  t.e2 = -(f.full - f.diag);
  t.e3 = -(f.diag - f.trace_n);
  t.e4 = m_n(full, z) - f.trace_n;
  return t;
}

/// Same terms for a free-standing coupling row, with e1 and e4 left at zero.
/// Used by moment checks that pair one fixed minor with many fresh rows.
inline EpsilonTerms epsilon_terms_for_row(const MinorCoupling& mc, const ComplexPoint& z) {
  const auto f = mc.forms(z, 1);
  return {0.0, -(f.full - f.diag), -(f.diag - f.trace_n), 0.0};
}

/// |R_jj - 1/(-z + W_jj - sum_{k,l} W_jk W_jl R^{(j)}_kl)|, infinite when the
/// denominator vanishes.
inline double schur_residual(const SymmetricMatrix& w, std::size_t j, const ComplexPoint& z,
                             const SpectralData& minor, const SpectralData& full) {
  detail::check_index(j, w.size(), "schur_residual");
  const auto row = coupling_row(w, j);
  const MinorCoupling mc(minor, row, w.size());
  const complex denom = -z.z() + w(j, j) - mc.forms(z, 1).full;
  if (denom == complex(0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(r_entry({full, z}, j, j) - 1.0 / denom);
}

struct EtaTerms {
  complex eta0;  // (1/n) Tr (R^{(j)})^2, the derivative of the minor transform
  complex eta1;  // off-diagonal quadratic form in (R^{(j)})^2
  complex eta2;  // diagonal fluctuation in (R^{(j)})^2
  complex sum() const noexcept { return eta0 + eta1 + eta2; }
};

inline EtaTerms eta_terms(const SymmetricMatrix& w, std::size_t j, const ComplexPoint& z,
                          const SpectralData& minor) {
  detail::check_index(j, w.size(), "eta_terms");
  const auto row = coupling_row(w, j);
  const MinorCoupling mc(minor, row, w.size());
  const auto f = mc.forms(z, 2);
  return {f.trace_n, f.full - f.diag, f.diag - f.trace_n};
}

/// |Tr R - Tr R^{(j)} - (1 + eta_j) R_jj|.
inline double trace_minor_residual(const SymmetricMatrix& w, std::size_t j, const ComplexPoint& z,
                                   const SpectralData& minor, const SpectralData& full) {
  const auto eta = eta_terms(w, j, z, minor);
  const double n = static_cast<double>(w.size());
  const complex tr_full = n * m_n(full, z);
  const complex tr_minor = static_cast<double>(minor.size()) * m_n(minor, z);
  return std::abs(tr_full - tr_minor - (1.0 + eta.sum()) * r_entry({full, z}, j, j));
}

/// Proof quantity T_n = (1/n) sum_j eps_j R_jj, not to be confused with the
/// Kolmogorov statistic of the statistics module.
struct ProofTermT {
  complex t_n;
  complex b_n;        // z + m_n + s
  complex lambda_n;   // m_n - s
  double residual;    // |lambda_n - t_n / b_n|
  bool degenerate;    // |b_n| < 1e-12; residual is then not evaluated
};

inline ProofTermT lambda_identity(const SymmetricMatrix& w, const ComplexPoint& z,
                                  const SpectralData& full, std::span<const SpectralData> minors) {
  const std::size_t n = w.size();
  if (minors.size() != n) throw PreconditionError("lambda_identity: need one minor per row");
  std::complex<long double> acc = 0.0L;
  for (std::size_t j = 0; j < n; ++j) {
    const auto eps = epsilon_terms(w, j, z, minors[j], full);
    acc += std::complex<long double>(eps.sum() * r_entry({full, z}, j, j));
  }
  ProofTermT out;
  out.t_n = complex(acc / static_cast<long double>(n));
  const complex mn = m_n(full, z);
  const complex s = stieltjes_s(z);
  out.b_n = z.z() + mn + s;
  out.lambda_n = mn - s;
  out.degenerate = std::abs(out.b_n) < 1e-12;
  out.residual = out.degenerate ? std::numeric_limits<double>::infinity()
                                : std::abs(out.lambda_n - out.t_n / out.b_n);
  return out;
}

inline double lambda_identity_residual(const SymmetricMatrix& w, const ComplexPoint& z,
                                       const SpectralData& full, std::span<const SpectralData> minors) {
  const auto r = lambda_identity(w, z, full, minors);
  if (r.degenerate) throw PreconditionError("lambda_identity_residual: |b_n| below 1e-12");
  return r.residual;
}

/// Slacks (right side minus left side) of three deterministic bounds for
/// the minor resolvent; each is nonnegative in exact arithmetic.
///   frobenius: (1/n) sum_{k,l} |R_kl|^2 <= Im m^{(j)} / v
///   column:    sum_k |R_kl|^2 <= Im R_ll / v  (smallest slack over l)
///   square:    (1/n) |Tr R^2| <= Im m^{(j)} / v
struct InequalityReport {
  double frobenius_slack;
  double column_slack;
  double square_trace_slack;
  bool frobenius_ok(double tol = 0.0) const noexcept { return frobenius_slack >= -tol; }
  bool column_ok(double tol = 0.0) const noexcept { return column_slack >= -tol; }
  bool square_trace_ok(double tol = 0.0) const noexcept { return square_trace_slack >= -tol; }
  bool all_ok(double tol = 0.0) const noexcept {
    return frobenius_ok(tol) && column_ok(tol) && square_trace_ok(tol);
  }
};

/// Left sides come from explicitly formed resolvent entries, right sides
/// from the spectral sums, so the two routes share no intermediate values.
inline InequalityReport resolvent_inequalities(std::size_t n, const SpectralData& minor,
                                               const ComplexPoint& z) {
  const std::size_t m = minor.size();
  if (!minor.has_vectors()) throw PreconditionError("resolvent_inequalities: minor carries no eigenvectors");
  const complex zz = z.z();
  const double v = z.v();
  std::vector<double> gre(m), gim(m);
  for (std::size_t e = 0; e < m; ++e) {
    const complex g = 1.0 / (minor.eigenvalue(e) - zz);
    gre[e] = g.real();
    gim[e] = g.imag();
  }
  // Entries R_kl for k <= l; rows of u^T stored contiguously.
  std::vector<double> ut(m * m);
  for (std::size_t e = 0; e < m; ++e)
    for (std::size_t k = 0; k < m; ++k) ut[k * m + e] = minor.component(k, e);
  std::vector<long double> col_sq(m, 0.0L);
  std::vector<double> ar(m), ai(m);
  long double total_sq = 0.0L;
  std::complex<long double> tr_sq = 0.0L;
  for (std::size_t k = 0; k < m; ++k) {
    const double* uk = ut.data() + k * m;
    for (std::size_t e = 0; e < m; ++e) {
      ar[e] = uk[e] * gre[e];
      ai[e] = uk[e] * gim[e];
    }
    for (std::size_t l = k; l < m; ++l) {
      const double* ul = ut.data() + l * m;
      double re = 0.0, im = 0.0;
      for (std::size_t e = 0; e < m; ++e) {
        re += ar[e] * ul[e];
        im += ai[e] * ul[e];
      }
      const long double sq = static_cast<long double>(re) * re + static_cast<long double>(im) * im;
      const std::complex<long double> r(re, im);
      if (l == k) {
        col_sq[k] += sq;
        total_sq += sq;
        tr_sq += r * r;
      } else {
        col_sq[k] += sq;
        col_sq[l] += sq;
        total_sq += 2.0L * sq;
        tr_sq += 2.0L * r * r;
      }
    }
  }
  const double nn = static_cast<double>(n);
  const double im_mj = m_n(minor, z).imag() * static_cast<double>(m) / nn;
  InequalityReport rep;
  rep.frobenius_slack = im_mj / v - static_cast<double>(total_sq / nn);
  rep.square_trace_slack = im_mj / v - static_cast<double>(std::abs(tr_sq) / nn);
  rep.column_slack = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < m; ++l) {
    // Im R_ll from the spectral sum, independent of the entry loop above.
    long double im_rll = 0.0L;
    for (std::size_t e = 0; e < m; ++e)
      im_rll += static_cast<long double>(minor.component(l, e)) * minor.component(l, e) * gim[e];
    rep.column_slack = std::min(rep.column_slack, static_cast<double>(im_rll / v - col_sq[l]));
  }
  return rep;
}

/// F_nj(x) = sum_k u_k[j]^2 1[lambda_k <= x].
inline double weighted_esd(const SpectralData& spectral, std::size_t j, double x) {
  detail::check_index(j, spectral.size(), "weighted_esd");
  long double acc = 0.0L;
  for (std::size_t k = 0; k < spectral.size() && spectral.eigenvalue(k) <= x; ++k)
    acc += static_cast<long double>(spectral.component(j, k)) * spectral.component(j, k);
  return static_cast<double>(acc);
}

}  // namespace wigner
