#pragma once

#include <wigner/ensemble.hpp>
#include <wigner/errors.hpp>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace wigner {

/// Ascending eigenvalues and (optionally) the matching orthonormal eigenvectors.
///
/// Eigenvector k is stored contiguously; component(j, k) is its j-th entry,
/// i.e. the (j, k) element of the orthogonal matrix U with W = U diag(lambda) U^T.
/// Each eigenvector is signed so that its largest-magnitude component is
/// positive (lowest index wins ties).
class SpectralData {
 public:
  SpectralData() = default;
  SpectralData(std::vector<double> eigenvalues, std::vector<double> vectors_by_row)
      : values_(std::move(eigenvalues)), vectors_(std::move(vectors_by_row)) {}

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> eigenvalues() const noexcept { return values_; }
  double eigenvalue(std::size_t k) const noexcept { return values_[k]; }
  double lambda_min() const noexcept { return values_.front(); }
  double lambda_max() const noexcept { return values_.back(); }

  bool has_vectors() const noexcept { return !vectors_.empty(); }
  std::span<const double> eigenvector(std::size_t k) const noexcept {
    return {vectors_.data() + k * size(), size()};
  }
  double component(std::size_t j, std::size_t k) const noexcept { return vectors_[k * size() + j]; }

 private:
  std::vector<double> values_;
  std::vector<double> vectors_;
};

namespace detail {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> sub;  // sub[i] couples i and i+1; sub[n-1] = 0
};

struct Rotation {
  std::size_t row;
  double c;
  double s;
};

/// Builds the Householder vector for row i of the working matrix (columns
/// 0..i-1, lower storage). The vector overwrites that row; returns h = v.v/2,
/// or 0 when the row is already reduced. Sets the coupling e_i.
inline double make_reflector(double* row, std::size_t i, double& coupling) {
  double scale = 0.0;
  for (std::size_t c = 0; c < i; ++c) scale += std::abs(row[c]);
  if (scale == 0.0 || i < 2) {
    coupling = row[i - 1];
    return 0.0;
  }
  double h = 0.0;
  for (std::size_t c = 0; c < i; ++c) {
    row[c] /= scale;
    h += row[c] * row[c];
  }
  const double f = row[i - 1];
  const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
  coupling = scale * g;
  h -= f * g;
  row[i - 1] = f - g;
  return h;
}

/// p = A v over the leading m x m block (lower storage, leading dimension ld).
inline void lower_symv(const double* a, std::size_t ld, std::size_t m, const double* v,
                       double* __restrict p) {
  std::fill(p, p + m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    const double* __restrict row = a + r * ld;
    const double vr = v[r];
    double acc = 0.0;
    for (std::size_t c = 0; c < r; ++c) {
      acc += row[c] * v[c];
      p[c] += row[c] * vr;
    }
    p[r] += acc + row[r] * vr;
  }
}

/// Householder reduction of the symmetric matrix held in the lower triangle
/// of `a` (row-major, n x n). On return row i holds the reflector for step i
/// and hvals[i] its normaliser (0 when no reflection was applied).
inline Tridiagonal tridiagonalize(std::vector<double>& a, std::size_t n, std::vector<double>& hvals) {
  Tridiagonal t;
  t.diag.assign(n, 0.0);
  t.sub.assign(n, 0.0);
  hvals.assign(n, 0.0);
  std::vector<double> e(n, 0.0);  // e[i] couples i-1 and i
  std::vector<double> p(n), q(n);

  // The rank-2 update of step i is fused with the matrix-vector product of
  // step i-1, so the trailing block is streamed once per step.
  bool have_p = false;
  double h = 0.0;
  std::size_t i = n - 1;
  if (n >= 2) h = make_reflector(a.data() + i * n, i, e[i]);
  while (i >= 1) {
    double* v = a.data() + i * n;
    hvals[i] = h;
    t.diag[i] = a[i * n + i];
    if (h == 0.0) {
      --i;
      have_p = false;
      if (i >= 1) h = make_reflector(a.data() + i * n, i, e[i]);
      continue;
    }
    if (!have_p) lower_symv(a.data(), n, i, v, p.data());
    double k = 0.0;
    for (std::size_t c = 0; c < i; ++c) {
      p[c] /= h;
      k += v[c] * p[c];
    }
    k /= 2.0 * h;
    for (std::size_t c = 0; c < i; ++c) q[c] = p[c] - k * v[c];

    // Row i-1 becomes the next step's input.
    const std::size_t last = i - 1;
    double* row_last = a.data() + last * n;
    for (std::size_t c = 0; c <= last; ++c) row_last[c] -= v[last] * q[c] + q[last] * v[c];

    double h_next = 0.0;
    if (last >= 1) h_next = make_reflector(row_last, last, e[last]);
    if (h_next != 0.0) {
      const double* __restrict vn = row_last;
      double* __restrict pn = p.data();
      std::fill(pn, pn + last, 0.0);
      for (std::size_t r = 0; r < last; ++r) {
        double* __restrict row = a.data() + r * n;
        const double vr = v[r], qr = q[r], vnr = vn[r];
        double acc = 0.0;
        for (std::size_t c = 0; c < r; ++c) {
          const double updated = row[c] - (vr * q[c] + qr * v[c]);
          row[c] = updated;
          acc += updated * vn[c];
          pn[c] += updated * vnr;
        }
        row[r] -= 2.0 * vr * qr;
        pn[r] += acc + row[r] * vnr;
      }
      have_p = true;
    } else {
      for (std::size_t r = 0; r < last; ++r) {
        double* __restrict row = a.data() + r * n;
        const double vr = v[r], qr = q[r];
        for (std::size_t c = 0; c <= r; ++c) row[c] -= vr * q[c] + qr * v[c];
      }
      have_p = false;
    }
    h = h_next;
    i = last;
  }
  t.diag[0] = a[0];
  for (std::size_t r = 1; r < n; ++r) t.sub[r - 1] = e[r];
  t.sub[n - 1] = 0.0;
  return t;
}

/// Column-panel copy of a row-major n x n matrix: panel p holds columns
/// [p*width, (p+1)*width) of every row contiguously, zero padded.
struct PanelMatrix {
  static constexpr std::size_t width = 64;
  std::size_t n = 0;
  std::vector<double> data;

  std::size_t panels() const noexcept { return (n + width - 1) / width; }

  static PanelMatrix from_rows(const std::vector<double>& rows, std::size_t n) {
    PanelMatrix pm;
    pm.n = n;
    pm.data.assign(pm.panels() * n * width, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) pm.data[(c / width) * n * width + r * width + c % width] = rows[r * n + c];
    return pm;
  }

  void to_rows(std::vector<double>& rows) const {
    rows.resize(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) rows[r * n + c] = data[(c / width) * n * width + r * width + c % width];
  }
};

/// Accumulates Q = P_{n-1} ... P_2 column panel by column panel (each panel
/// stays cache resident across all reflectors) and returns Q^T in panel form.
inline PanelMatrix form_q_transpose(const std::vector<double>& a, std::size_t n,
                                    const std::vector<double>& hvals) {
  constexpr std::size_t w = PanelMatrix::width;
  PanelMatrix q;
  q.n = n;
  q.data.assign(q.panels() * n * w, 0.0);
  std::vector<double> u(w);
  for (std::size_t p = 0; p < q.panels(); ++p) {
    double* base = q.data.data() + p * n * w;
    const std::size_t c0 = p * w;
    for (std::size_t c = c0; c < std::min(n, c0 + w); ++c) base[c * w + (c - c0)] = 1.0;
    // Q[r][c] is still the identity for c >= i, so reflectors i <= c0 leave this panel untouched.
    for (std::size_t i = std::max<std::size_t>(2, c0 + 1); i < n; ++i) {
      const double h = hvals[i];
      if (h == 0.0) continue;
      const double* __restrict v = a.data() + i * n;
      double* __restrict acc = u.data();
      std::fill(acc, acc + w, 0.0);
      for (std::size_t r = 0; r < i; ++r) {
        const double* __restrict row = base + r * w;
        const double vr = v[r];
        for (std::size_t k = 0; k < w; ++k) acc[k] += vr * row[k];
      }
      for (std::size_t r = 0; r < i; ++r) {
        double* __restrict row = base + r * w;
        const double g = v[r] / h;
        for (std::size_t k = 0; k < w; ++k) row[k] -= g * acc[k];
      }
    }
  }
  // Transpose into the panel layout of Q^T.
  PanelMatrix qt;
  qt.n = n;
  qt.data.assign(q.data.size(), 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      qt.data[(c / w) * n * w + r * w + c % w] = q.data[(r / w) * n * w + c * w + r % w];
  return qt;
}

/// Applies the recorded rotations, in order, to rows of z, one panel at a time.
inline void apply_rotations(PanelMatrix& z, const std::vector<Rotation>& rots) {
  constexpr std::size_t w = PanelMatrix::width;
  for (std::size_t p = 0; p < z.panels(); ++p) {
    double* base = z.data.data() + p * z.n * w;
    for (const Rotation& rot : rots) {
      double* __restrict lo = base + rot.row * w;
      double* __restrict hi = lo + w;
      const double c = rot.c, s = rot.s;
      for (std::size_t k = 0; k < w; ++k) {
        const double t = hi[k];
        hi[k] = s * lo[k] + c * t;
        lo[k] = c * lo[k] - s * t;
      }
    }
  }
}

/// Implicit QL with Wilkinson-type shifts on (d, e). When `z` is non-null the
/// rotations are accumulated into its rows.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, PanelMatrix* z) {
  const std::size_t n = d.size();
  const std::size_t max_iterations = 50 * std::max<std::size_t>(n, 1);
  constexpr std::size_t batch_limit = 1 << 16;
  std::vector<Rotation> pending;
  std::size_t total_iterations = 0;
  double shift = 0.0;
  double tst1 = 0.0;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n - 1 && std::abs(e[m]) > DBL_EPSILON * tst1) ++m;
    if (m > l) {
      do {
        if (++total_iterations > max_iterations) {
          throw SolverError("tridiagonal QL did not converge", l);
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double hshift = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= hshift;
        shift += hshift;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[ii];
          hshift = c * p;
          r = std::hypot(p, e[ii]);
          e[ii + 1] = s * r;
          s = e[ii] / r;
          c = p / r;
          p = c * d[ii] - s * g;
          d[ii + 1] = hshift + s * (c * g + s * d[ii]);
          if (z) pending.push_back({ii, c, s});
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
        if (z && pending.size() >= batch_limit) {
          apply_rotations(*z, pending);
          pending.clear();
        }
      } while (std::abs(e[l]) > DBL_EPSILON * tst1);
    }
    d[l] += shift;
    e[l] = 0.0;
  }
  if (z && !pending.empty()) apply_rotations(*z, pending);
}

inline void canonical_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  if (v[best] < 0)
    for (double& x : v) x = -x;
}

inline std::vector<double> lower_working_copy(const SymmetricMatrix& w) {
  const std::size_t n = w.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c <= r; ++c) a[r * n + c] = w(c, r);
  return a;
}

inline void require_finite(const SymmetricMatrix& w) {
  if (w.size() == 0) throw PreconditionError("decompose: empty matrix");
  if (!w.all_finite()) throw PreconditionError("decompose: matrix has non-finite entries");
}

}  // namespace detail

/// Full eigendecomposition: Householder tridiagonalization followed by
/// implicit-shift QL with eigenvector accumulation.
inline SpectralData decompose(const SymmetricMatrix& w) {
  detail::require_finite(w);
  const std::size_t n = w.size();
  if (n == 1) return SpectralData({w(0, 0)}, {1.0});

  std::vector<double> a = detail::lower_working_copy(w);
  std::vector<double> hvals;
  auto tri = detail::tridiagonalize(a, n, hvals);
  auto panels = detail::form_q_transpose(a, n, hvals);
  a.clear();
  a.shrink_to_fit();
  detail::tridiagonal_ql(tri.diag, tri.sub, &panels);
  std::vector<double> zt;
  panels.to_rows(zt);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return tri.diag[x] < tri.diag[y]; });
  std::vector<double> values(n), vectors(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = tri.diag[order[k]];
    std::copy_n(zt.data() + order[k] * n, n, vectors.data() + k * n);
    detail::canonical_sign({vectors.data() + k * n, n});
  }
  return SpectralData(std::move(values), std::move(vectors));
}

/// Eigenvalues only (ascending); same reduction without vector accumulation.
inline std::vector<double> eigenvalues(const SymmetricMatrix& w) {
  detail::require_finite(w);
  const std::size_t n = w.size();
  if (n == 1) return {w(0, 0)};
  std::vector<double> a = detail::lower_working_copy(w);
  std::vector<double> hvals;
  auto tri = detail::tridiagonalize(a, n, hvals);
  detail::tridiagonal_ql(tri.diag, tri.sub, nullptr);
  std::sort(tri.diag.begin(), tri.diag.end());
  return tri.diag;
}

/// Decomposition without eigenvectors, packaged as SpectralData.
inline SpectralData decompose_values(const SymmetricMatrix& w) { return SpectralData(eigenvalues(w), {}); }

/// ||W|| = max |lambda_k|.
inline double operator_norm(const SpectralData& s) {
  if (s.size() == 0) return 0.0;
  return std::max(std::abs(s.lambda_min()), std::abs(s.lambda_max()));
}

}  // namespace wigner
