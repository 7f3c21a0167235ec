#pragma once

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/tolerances.hpp"

// Deterministic dense Hermitian eigensolver and the few factorizations built
// on top of it. The pipeline is Householder reduction to Hermitian tridiagonal
// form, a diagonal phase change to make the subdiagonal real, then an
// implicit-shift QL iteration. No architecture-dependent branching, so a given
// input produces the same output on every run.

namespace fsq {

struct HermitianEig {
  std::vector<double> values;  // ascending
  Matrix vectors;              // columns; a == V diag(values) V^*
};

namespace detail {

// Reduce the Hermitian matrix held in b to tridiagonal form. On return d holds
// the (real) diagonal and e_sub the complex subdiagonal; if q is non-null it
// receives the accumulated unitary with input == Q T Q^*. Columns whose
// below-subdiagonal part is exactly zero are skipped, which makes already
// banded inputs cheap.
inline void householder_tridiagonalize(Matrix& b, std::vector<double>& d,
                                       std::vector<cplx>& e_sub, Matrix* q) {
  const std::size_t n = b.rows();
  if (q) *q = Matrix::identity(n);
  std::vector<cplx> v(n), p(n), u(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double tail = 0.0;
    for (std::size_t i = k + 2; i < n; ++i) tail += std::norm(b(i, k));
    if (tail == 0.0) continue;

    const cplx alpha = b(k + 1, k);
    const double xnorm = std::sqrt(std::norm(alpha) + tail);
    const double amag = std::abs(alpha);
    const cplx phase = amag > 0.0 ? alpha / amag : cplx{1.0, 0.0};
    const cplx beta = -phase * xnorm;

    // Reflector v (unit norm), supported on rows k+1..n-1.
    v[k + 1] = alpha - beta;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = b(i, k);
    double vn2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vn2 += std::norm(v[i]);
    const double vninv = 1.0 / std::sqrt(vn2);
    for (std::size_t i = k + 1; i < n; ++i) v[i] *= vninv;

    // Rank-2 update of the trailing block: T <- T - 2 v u^* - 2 u v^*,
    // with p = T v and u = p - (v^* p) v.
    for (std::size_t i = k + 1; i < n; ++i) {
      cplx acc{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) acc += b(i, j) * v[j];
      p[i] = acc;
    }
    cplx kappa{0.0, 0.0};
    for (std::size_t i = k + 1; i < n; ++i) kappa += std::conj(v[i]) * p[i];
    for (std::size_t i = k + 1; i < n; ++i) u[i] = p[i] - kappa * v[i];
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        b(i, j) -= 2.0 * (v[i] * std::conj(u[j]) + u[i] * std::conj(v[j]));
      }
    }
    // The pivot column/row collapse to the single subdiagonal entry beta.
    b(k + 1, k) = beta;
    b(k, k + 1) = std::conj(beta);
    for (std::size_t i = k + 2; i < n; ++i) {
      b(i, k) = cplx{0.0, 0.0};
      b(k, i) = cplx{0.0, 0.0};
    }

    if (q) {
      for (std::size_t i = 0; i < n; ++i) {
        cplx s{0.0, 0.0};
        for (std::size_t l = k + 1; l < n; ++l) s += (*q)(i, l) * v[l];
        s *= 2.0;
        for (std::size_t l = k + 1; l < n; ++l) (*q)(i, l) -= s * std::conj(v[l]);
      }
    }
  }

  d.resize(n);
  e_sub.assign(n >= 1 ? n - 1 : 0, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) d[i] = b(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) e_sub[i] = b(i + 1, i);
}

// Fold the diagonal phase change that makes the subdiagonal real nonnegative
// into q (if present), returning the real subdiagonal.
inline std::vector<double> realify_subdiagonal(const std::vector<cplx>& e_sub,
                                               Matrix* q) {
  const std::size_t n = e_sub.size() + 1;
  std::vector<double> e(e_sub.size(), 0.0);
  cplx delta{1.0, 0.0};
  std::vector<cplx> deltas(n, cplx{1.0, 0.0});
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = std::abs(e_sub[i]);
    e[i] = a;
    const cplx ph = a > 0.0 ? e_sub[i] / a : cplx{1.0, 0.0};
    delta *= ph;
    deltas[i + 1] = delta;
  }
  if (q) {
    for (std::size_t j = 0; j < n; ++j) {
      if (deltas[j] == cplx{1.0, 0.0}) continue;
      for (std::size_t i = 0; i < q->rows(); ++i) (*q)(i, j) *= deltas[j];
    }
  }
  return e;
}

// Implicit-shift QL on a real symmetric tridiagonal matrix (classic tql2).
// d: diagonal (overwritten with eigenvalues, unsorted); e: subdiagonal of
// length n (last slot is workspace). If z is non-null its columns are rotated
// along, so z_in * (tridiag eigenvectors) comes out.
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e,
                           Matrix* z, int max_sweeps) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      std::size_t m = l;
      while (m + 1 < n) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
        ++m;
      }
      if (m == l) break;
      if (iter++ >= max_sweeps)
        throw std::runtime_error("tridiagonal_ql: no convergence");

      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (std::size_t ii = m; ii-- > l;) {
        const std::size_t i = ii;
        double f = s * e[i];
        const double bb = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * bb;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - bb;
        if (z) {
          for (std::size_t krow = 0; krow < z->rows(); ++krow) {
            const cplx zf = (*z)(krow, i + 1);
            (*z)(krow, i + 1) = s * (*z)(krow, i) + c * zf;
            (*z)(krow, i) = c * (*z)(krow, i) - s * zf;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

inline void sort_ascending(std::vector<double>& d, Matrix* z) {
  const std::size_t n = d.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  std::vector<double> ds(n);
  for (std::size_t j = 0; j < n; ++j) ds[j] = d[idx[j]];
  d = std::move(ds);
  if (z) {
    Matrix zs(z->rows(), z->cols());
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < z->rows(); ++i) zs(i, j) = (*z)(i, idx[j]);
    *z = std::move(zs);
  }
}

}  // namespace detail

inline double hermitian_defect(const Matrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

inline bool is_hermitian(const Matrix& a,
                         const Tolerances& tol = default_tolerances()) {
  if (!a.square()) return false;
  const double scale = std::max(1.0, max_abs(a));
  return hermitian_defect(a) <= tol.hermitian_rtol * scale;
}

inline void require_hermitian(const Matrix& a, const Tolerances& tol,
                              const char* who) {
  if (!a.square()) throw std::invalid_argument(std::string(who) + ": not square");
  if (!is_hermitian(a, tol))
    throw std::domain_error(std::string(who) + ": matrix is not Hermitian");
}

// Eigenvalues of (a + a^*)/2, ascending. Throws if a is not Hermitian within
// tolerance.
inline std::vector<double> hermitian_eigenvalues(
    const Matrix& a, const Tolerances& tol = default_tolerances()) {
  require_hermitian(a, tol, "hermitian_eigenvalues");
  Matrix b = (a + a.adjoint()) * 0.5;
  std::vector<double> d;
  std::vector<cplx> e_sub;
  detail::householder_tridiagonalize(b, d, e_sub, nullptr);
  std::vector<double> e = detail::realify_subdiagonal(e_sub, nullptr);
  detail::tridiagonal_ql(d, e, nullptr, tol.eig_max_sweeps);
  detail::sort_ascending(d, nullptr);
  return d;
}

inline HermitianEig hermitian_eig(const Matrix& a,
                                  const Tolerances& tol = default_tolerances()) {
  require_hermitian(a, tol, "hermitian_eig");
  Matrix b = (a + a.adjoint()) * 0.5;
  HermitianEig out;
  Matrix q;
  std::vector<cplx> e_sub;
  detail::householder_tridiagonalize(b, out.values, e_sub, &q);
  std::vector<double> e = detail::realify_subdiagonal(e_sub, &q);
  detail::tridiagonal_ql(out.values, e, &q, tol.eig_max_sweeps);
  detail::sort_ascending(out.values, &q);
  out.vectors = std::move(q);
  return out;
}

// Eigenvalues of the real symmetric tridiagonal matrix with the given
// diagonal/subdiagonal, ascending.
inline std::vector<double> symmetric_tridiagonal_eigenvalues(
    std::vector<double> diag, std::vector<double> sub, int max_sweeps = 64) {
  if (!diag.empty() && sub.size() + 1 != diag.size())
    throw std::invalid_argument("symmetric_tridiagonal_eigenvalues: size mismatch");
  std::vector<double> e = std::move(sub);
  detail::tridiagonal_ql(diag, e, nullptr, max_sweeps);
  detail::sort_ascending(diag, nullptr);
  return diag;
}

// f applied through the spectral decomposition: V f(Lambda) V^*.
inline Matrix hermitian_function(const Matrix& a,
                                 const std::function<double(double)>& f,
                                 const Tolerances& tol = default_tolerances()) {
  HermitianEig eig = hermitian_eig(a, tol);
  const std::size_t n = a.rows();
  Matrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double fj = f(eig.values[j]);
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
  }
  return scaled * eig.vectors.adjoint();
}

// Unique positive square root of a positive semidefinite matrix. Eigenvalues
// below -psd_rtol * scale raise a domain error; small negatives are clamped.
inline Matrix positive_sqrt(const Matrix& a,
                            const Tolerances& tol = default_tolerances()) {
  HermitianEig eig = hermitian_eig(a, tol);
  double scale = 1.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  for (double v : eig.values)
    if (v < -tol.psd_rtol * scale)
      throw std::domain_error("positive_sqrt: matrix is not positive semidefinite");
  const std::size_t n = a.rows();
  Matrix scaled = eig.vectors;
  for (std::size_t j = 0; j < n; ++j) {
    const double fj = std::sqrt(std::max(0.0, eig.values[j]));
    for (std::size_t i = 0; i < n; ++i) scaled(i, j) *= fj;
  }
  return scaled * eig.vectors.adjoint();
}

// Singular values, descending. Computed from the smaller Gram matrix.
inline std::vector<double> singular_values(
    const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (a.empty()) return {};
  Tolerances t = tol;
  t.hermitian_rtol = 1e-9;  // Gram matrices are Hermitian by construction
  Matrix gram = a.rows() >= a.cols() ? a.adjoint() * a : a * a.adjoint();
  std::vector<double> ev = hermitian_eigenvalues(gram, t);
  std::vector<double> s(ev.size());
  for (std::size_t i = 0; i < ev.size(); ++i)
    s[i] = std::sqrt(std::max(0.0, ev[ev.size() - 1 - i]));
  return s;
}

inline double operator_norm(const Matrix& a,
                            const Tolerances& tol = default_tolerances()) {
  if (a.empty()) return 0.0;
  std::vector<double> s = singular_values(a, tol);
  return s.front();
}

inline double smallest_singular_value(
    const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (!a.square())
    throw std::invalid_argument("smallest_singular_value: not square");
  if (a.empty()) return 0.0;
  std::vector<double> s = singular_values(a, tol);
  return s.back();
}

// Trace norm (sum of singular values). Hermitian inputs take the exact
// eigenvalue route.
inline double trace_norm(const Matrix& a,
                         const Tolerances& tol = default_tolerances()) {
  if (a.square() && is_hermitian(a, tol)) {
    double s = 0.0;
    for (double v : hermitian_eigenvalues(a, tol)) s += std::abs(v);
    return s;
  }
  double s = 0.0;
  for (double v : singular_values(a, tol)) s += v;
  return s;
}

// ||a^{-1}||, or nullopt when a is singular per the relative threshold
// s_min <= singular_rtol * s_max.
inline std::optional<double> inverse_norm(
    const Matrix& a, const Tolerances& tol = default_tolerances()) {
  if (!a.square()) throw std::invalid_argument("inverse_norm: not square");
  if (a.empty()) return std::nullopt;
  std::vector<double> s = singular_values(a, tol);
  const double smax = s.front(), smin = s.back();
  if (smin <= tol.singular_rtol * std::max(smax, 1e-300)) return std::nullopt;
  return 1.0 / smin;
}

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
  if (!u.square()) return false;
  Matrix g = u.adjoint() * u;
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) -= 1.0;
  return max_abs(g) <= tol;
}

// ---- LU with partial pivoting (for linear solves) ----

struct LuFactor {
  Matrix lu;              // packed L (unit diagonal) and U
  std::vector<std::size_t> piv;
  bool singular = false;
  double min_pivot = 0.0;
  double max_pivot = 0.0;
};

inline LuFactor lu_factor(Matrix a) {
  if (!a.square()) throw std::invalid_argument("lu_factor: not square");
  const std::size_t n = a.rows();
  LuFactor f;
  f.piv.resize(n);
  std::iota(f.piv.begin(), f.piv.end(), std::size_t{0});
  f.min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    double bestmag = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(a(i, k));
      if (m > bestmag) {
        bestmag = m;
        best = i;
      }
    }
    if (best != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(best, j));
      std::swap(f.piv[k], f.piv[best]);
    }
    f.min_pivot = std::min(f.min_pivot, bestmag);
    f.max_pivot = std::max(f.max_pivot, bestmag);
    if (bestmag == 0.0) {
      f.singular = true;
      continue;
    }
    const cplx pivot = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = a(i, k) / pivot;
      a(i, k) = m;
      if (m == cplx{0.0, 0.0}) continue;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= m * a(k, j);
    }
  }
  if (n == 0) f.min_pivot = 0.0;
  f.lu = std::move(a);
  return f;
}

inline Vector lu_solve(const LuFactor& f, const Vector& b) {
  const std::size_t n = f.lu.rows();
  if (b.size() != n) throw std::invalid_argument("lu_solve: size mismatch");
  if (f.singular) throw std::domain_error("lu_solve: singular matrix");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.piv[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu(i, j) * x[j];
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = ii + 1; j < n; ++j) x[ii] -= f.lu(ii, j) * x[j];
    x[ii] /= f.lu(ii, ii);
  }
  return x;
}

// Solve a x = b, or nullopt when the factorization hits a zero (or relatively
// negligible) pivot.
inline std::optional<Vector> solve(const Matrix& a, const Vector& b,
                                   const Tolerances& tol = default_tolerances()) {
  LuFactor f = lu_factor(a);
  if (f.singular || f.min_pivot <= tol.singular_rtol * std::max(1e-300, f.max_pivot))
    return std::nullopt;
  return lu_solve(f, b);
}

// Unitary factor of a QR decomposition by modified Gram-Schmidt with one
// re-orthogonalization pass; the R diagonal is kept positive, so Gaussian
// input yields a Haar-distributed unitary.
inline Matrix qr_unitary_factor(const Matrix& a) {
  if (!a.square()) throw std::invalid_argument("qr_unitary_factor: not square");
  const std::size_t n = a.rows();
  Matrix q = a;
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        cplx proj{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(q(i, k)) * q(i, j);
        for (std::size_t i = 0; i < n; ++i) q(i, j) -= proj * q(i, k);
      }
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    if (nrm == 0.0)
      throw std::domain_error("qr_unitary_factor: rank deficient input");
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

}  // namespace fsq
