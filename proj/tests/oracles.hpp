#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"

// Independent numerical oracles for the test suite. Nothing here touches the
// library's Householder/QL eigensolver path: eigenvalues come from the
// characteristic polynomial (Faddeev-LeVerrier + bisection), singular values
// from one-sided Jacobi, quadrature from Simpson, banded solves from the
// Thomas recursion, and Jacobi-Toeplitz spectra from the closed form.

namespace oracle {

using fsq::cplx;
using fsq::Matrix;

// Characteristic polynomial det(xI - A) = sum_k a_k x^{n-k} by the
// Faddeev-LeVerrier recursion (matrix products and traces only).
inline std::vector<double> charpoly(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> coeff{1.0};
  Matrix m(n, n);  // M_0 = 0
  for (std::size_t k = 1; k <= n; ++k) {
    // M_k = A M_{k-1} + a_{k-1} I
    m = a * m;
    for (std::size_t i = 0; i < n; ++i) m(i, i) += coeff.back();
    const cplx t = (a * m).trace();
    coeff.push_back(-t.real() / static_cast<double>(k));
  }
  return coeff;  // size n+1, leading 1
}

inline double polyval(const std::vector<double>& coeff, double x) {
  double acc = 0.0;
  for (double c : coeff) acc = acc * x + c;
  return acc;
}

// All real roots of the characteristic polynomial of a Hermitian matrix,
// located by sign scan + bisection. Multiple roots may be missed (no sign
// change); callers use well-separated spectra or subset semantics.
inline std::vector<double> charpoly_eigenvalues(const Matrix& a,
                                                long samples = 20000) {
  const std::size_t n = a.rows();
  const std::vector<double> p = charpoly(a);
  double r = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r = std::max(r, std::abs(a(i, j)));
  r = r * static_cast<double>(n) + 1.0;
  std::vector<double> roots;
  double x0 = -r, f0 = polyval(p, x0);
  for (long s = 1; s <= samples; ++s) {
    const double x1 = -r + 2.0 * r * static_cast<double>(s) / static_cast<double>(samples);
    const double f1 = polyval(p, x1);
    if (f0 == 0.0) roots.push_back(x0);
    else if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = x0, hi = x1, flo = f0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = polyval(p, mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((flo < 0.0) != (fm < 0.0)) hi = mid;
        else { lo = mid; flo = fm; }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Singular values by one-sided (Hestenes) Jacobi with complex phase folding.
// Each step is an exact unitary column operation; on convergence the columns
// are orthogonal and their norms are the singular values.
inline std::vector<double> jacobi_singular_values(Matrix a, int max_sweeps = 60) {
  const std::size_t rows = a.rows(), cols = a.cols();
  if (rows < cols) a = a.adjoint();
  const std::size_t m = a.rows(), n = a.cols();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        double app = 0.0, aqq = 0.0;
        cplx apq{0.0, 0.0};
        for (std::size_t k = 0; k < m; ++k) {
          app += std::norm(a(k, i));
          aqq += std::norm(a(k, j));
          apq += std::conj(a(k, i)) * a(k, j);
        }
        const double g = std::abs(apq);
        if (g <= 1e-300) continue;
        off = std::max(off, g / std::max(1e-300, std::sqrt(app * aqq)));
        if (g <= 1e-15 * std::sqrt(app * aqq)) continue;
        const cplx phase = apq / g;
        const double tau = (aqq - app) / (2.0 * g);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < m; ++k) {
          const cplx ci = a(k, i);
          const cplx cj = std::conj(phase) * a(k, j);  // phase-aligned
          a(k, i) = c * ci - s * cj;
          a(k, j) = s * ci + c * cj;
        }
      }
    if (off < 1e-13) break;
  }
  std::vector<double> sv(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += std::norm(a(k, j));
    sv[j] = std::sqrt(acc);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      long n = 2000) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / static_cast<double>(n);
  double acc = f(a) + f(b);
  for (long k = 1; k < n; ++k)
    acc += f(a + h * static_cast<double>(k)) * (k % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Tridiagonal solve (Thomas recursion), no pivoting; diagonally dominant use.
inline std::vector<cplx> thomas_solve(const std::vector<cplx>& sub,
                                      const std::vector<cplx>& diag,
                                      const std::vector<cplx>& sup,
                                      std::vector<cplx> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n - 1 || sup.size() != n - 1 || rhs.size() != n)
    throw std::invalid_argument("thomas_solve: size mismatch");
  std::vector<cplx> c(n - 1), d = diag;
  for (std::size_t i = 0; i + 1 < n; ++i) c[i] = sup[i];
  for (std::size_t i = 1; i < n; ++i) {
    const cplx w = sub[i - 1] / d[i - 1];
    d[i] -= w * c[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<cplx> x(n);
  x[n - 1] = rhs[n - 1] / d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - c[i] * x[i + 1]) / d[i];
  return x;
}

// Spectrum of the n x n symmetric tridiagonal Toeplitz (a0 on the diagonal,
// a1 off): a0 + 2 a1 cos(k pi / (n+1)), k = 1..n (ascending for a1 > 0
// after sort).
inline std::vector<double> jacobi_toeplitz_eigenvalues(long n, double a0,
                                                       double a1) {
  std::vector<double> ev;
  const double pi = 3.14159265358979323846264338327950288;
  for (long k = 1; k <= n; ++k)
    ev.push_back(a0 + 2.0 * a1 * std::cos(pi * static_cast<double>(k) /
                                          static_cast<double>(n + 1)));
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Real value of a Hermitian banded Toeplitz symbol at angle theta:
// a(theta) = sum_{|k| <= band} a_k e^{i k theta}, coefficients a_{-band}..a_{band}.
inline double toeplitz_symbol(const std::vector<cplx>& coeff, long band,
                              double theta) {
  cplx acc{0.0, 0.0};
  for (long k = -band; k <= band; ++k) {
    const cplx e{std::cos(static_cast<double>(k) * theta),
                 std::sin(static_cast<double>(k) * theta)};
    acc += coeff[static_cast<std::size_t>(k + band)] * e;
  }
  return acc.real();
}

}  // namespace oracle
