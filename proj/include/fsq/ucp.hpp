#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"
#include "fsq/tolerances.hpp"

// Constructive u.c.p./trace toolbox: Powers-Stormer gap, compression
// multiplicativity defect, conditional expectations from matrix units,
// trace-preserving multiplicity embeddings, unitalization of cp maps and
// block-diagonal padding.

namespace fsq {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// ---- Powers-Stormer ----

struct PowersStormer {
  double lhs = 0.0;  // ||a - b||_HS^2
  double rhs = 0.0;  // ||a^2 - b^2||_1
  double gap = 0.0;  // rhs - lhs
};

inline void require_psd(const Matrix& a, const Tolerances& tol, const char* who) {
  std::vector<double> ev = hermitian_eigenvalues(a, tol);
  double scale = 1.0;
  for (double v : ev) scale = std::max(scale, std::abs(v));
  for (double v : ev)
    if (v < -tol.psd_rtol * scale)
      throw std::domain_error(std::string(who) + ": input is not positive semidefinite");
}

inline PowersStormer powers_stormer_gap(const Matrix& a, const Matrix& b,
                                        const Tolerances& tol = default_tolerances()) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("powers_stormer_gap: shape mismatch");
  require_psd(a, tol, "powers_stormer_gap");
  require_psd(b, tol, "powers_stormer_gap");
  PowersStormer out;
  const double hs = frobenius_norm(a - b);
  out.lhs = hs * hs;
  out.rhs = trace_norm(a * a - b * b, tol);
  out.gap = out.rhs - out.lhs;
  return out;
}

// ---- compression multiplicativity defect (2-norm w.r.t. the corner trace) ----

struct CompressionDefect {
  double lhs = 0.0;  // ||phi(ab) - phi(a)phi(b)||_2
  double rhs = 0.0;  // ||b|| (tr(phi(aa*)-phi(a)phi(a*)) + tr(phi(a*a)-phi(a*)phi(a)))^{1/2}
};

inline void require_projection(const Matrix& p, const Tolerances& tol,
                               const char* who) {
  if (!p.square()) throw std::domain_error(std::string(who) + ": P not square");
  const double scale = std::max(1.0, max_abs(p));
  if (max_abs_diff(p * p, p) > tol.projection_tol * scale ||
      max_abs_diff(p, p.adjoint()) > tol.projection_tol * scale)
    throw std::domain_error(std::string(who) + ": P is not an orthogonal projection");
}

inline CompressionDefect compression_defect(const Matrix& p, const Matrix& a,
                                            const Matrix& b,
                                            const Tolerances& tol = default_tolerances()) {
  require_projection(p, tol, "compression_defect");
  const double rank = p.trace().real();
  if (rank < 0.5)
    throw std::domain_error("compression_defect: zero projection");
  auto phi = [&](const Matrix& x) { return p * x * p; };
  const Matrix fa = phi(a), fb = phi(b);
  const Matrix delta = phi(a * b) - fa * fb;
  CompressionDefect out;
  out.lhs = frobenius_norm(delta) / std::sqrt(rank);
  const double d1 = (phi(a * a.adjoint()) - fa * phi(a.adjoint())).trace().real();
  const double d2 = (phi(a.adjoint() * a) - phi(a.adjoint()) * fa).trace().real();
  out.rhs = operator_norm(b, tol) *
            std::sqrt(std::max(0.0, (d1 + d2) / rank));
  return out;
}

// ---- conditional expectation from matrix units ----

struct MatrixUnitSummand {
  std::size_t m = 0;           // units form an m x m system
  std::vector<Matrix> units;   // index i*m + j holds e_{ij}

  const Matrix& unit(std::size_t i, std::size_t j) const { return units[i * m + j]; }
};

struct MatrixUnits {
  std::size_t ambient = 0;
  std::vector<MatrixUnitSummand> summands;
};

// B = diagonal subalgebra of M_n (n summands of size 1).
inline MatrixUnits diagonal_units(std::size_t n) {
  MatrixUnits b;
  b.ambient = n;
  for (std::size_t i = 0; i < n; ++i) {
    MatrixUnitSummand s;
    s.m = 1;
    Matrix e(n, n);
    e(i, i) = 1.0;
    s.units.push_back(std::move(e));
    b.summands.push_back(std::move(s));
  }
  return b;
}

// B = all of M_n.
inline MatrixUnits full_units(std::size_t n) {
  MatrixUnits b;
  b.ambient = n;
  MatrixUnitSummand s;
  s.m = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Matrix e(n, n);
      e(i, j) = 1.0;
      s.units.push_back(std::move(e));
    }
  b.summands.push_back(std::move(s));
  return b;
}

// B = M_m tensor 1_r inside M_{m r}.
inline MatrixUnits tensor_units(std::size_t m, std::size_t r) {
  MatrixUnits b;
  b.ambient = m * r;
  MatrixUnitSummand s;
  s.m = m;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Matrix e(m * r, m * r);
      for (std::size_t t = 0; t < r; ++t) e(i * r + t, j * r + t) = 1.0;
      s.units.push_back(std::move(e));
    }
  b.summands.push_back(std::move(s));
  return b;
}

inline void validate_matrix_units(const MatrixUnits& b,
                                  const Tolerances& tol = default_tolerances()) {
  const double utol = std::max(tol.projection_tol, 1e-10);
  for (const auto& s : b.summands) {
    if (s.units.size() != s.m * s.m)
      throw std::domain_error("matrix units: wrong unit count");
    for (const auto& e : s.units)
      if (e.rows() != b.ambient || e.cols() != b.ambient)
        throw std::domain_error("matrix units: wrong ambient dimension");
    for (std::size_t i = 0; i < s.m; ++i)
      for (std::size_t j = 0; j < s.m; ++j) {
        if (max_abs_diff(s.unit(i, j).adjoint(), s.unit(j, i)) > utol)
          throw std::domain_error("matrix units: adjoint relation fails");
        for (std::size_t k = 0; k < s.m; ++k)
          for (std::size_t l = 0; l < s.m; ++l) {
            Matrix prod = s.unit(i, j) * s.unit(k, l);
            const Matrix& want =
                j == k ? s.unit(i, l) : Matrix::zero(b.ambient, b.ambient);
            if (max_abs_diff(prod, want) > utol)
              throw std::domain_error("matrix units: product relation fails");
          }
      }
  }
  // Cross-summand products vanish.
  for (std::size_t s1 = 0; s1 < b.summands.size(); ++s1)
    for (std::size_t s2 = s1 + 1; s2 < b.summands.size(); ++s2) {
      const Matrix z = b.summands[s1].unit(0, 0) * b.summands[s2].unit(0, 0);
      if (max_abs(z) > utol)
        throw std::domain_error("matrix units: summands are not orthogonal");
    }
}

// tau given as diagonal weights: tau(x) = sum_i w_i x_ii.
inline cplx weighted_trace(const Matrix& x, const std::vector<double>& w) {
  if (x.rows() != w.size())
    throw std::invalid_argument("weighted_trace: size mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x(i, i);
  return s;
}

inline std::vector<double> uniform_trace_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

// Conditional expectation onto span(B) w.r.t. the trace vector tau. Summands
// with tau(e_ii) below the null threshold are dropped (the B_0 + B_f split for
// non-faithful tau).
inline Matrix conditional_expectation(const Matrix& x, const MatrixUnits& b,
                                      const std::vector<double>& tau,
                                      const Tolerances& tol = default_tolerances(),
                                      double null_threshold = 1e-14) {
  if (x.rows() != b.ambient || x.cols() != b.ambient)
    throw std::invalid_argument("conditional_expectation: shape mismatch");
  if (tau.size() != b.ambient)
    throw std::invalid_argument("conditional_expectation: trace vector size mismatch");
  Matrix out(b.ambient, b.ambient);
  for (const auto& s : b.summands) {
    // tau must be constant on the diagonal units of the summand.
    const double t0 = weighted_trace(s.unit(0, 0), tau).real();
    for (std::size_t i = 1; i < s.m; ++i) {
      const double ti = weighted_trace(s.unit(i, i), tau).real();
      if (std::abs(ti - t0) > 1e-10 * std::max(1.0, std::abs(t0)))
        throw std::domain_error(
            "conditional_expectation: trace is not constant on summand units");
    }
    if (t0 <= null_threshold) continue;  // null summand under tau
    for (std::size_t i = 0; i < s.m; ++i)
      for (std::size_t j = 0; j < s.m; ++j) {
        const cplx coeff = weighted_trace(x * s.unit(i, j), tau) / t0;
        if (coeff == cplx{0.0, 0.0}) continue;
        out += coeff * s.unit(j, i);
      }
  }
  return out;
}

// ---- trace-preserving multiplicity embedding ----

struct EmbeddingPlan {
  long n = 0;
  std::vector<long> multiplicities;  // r_s; rho(x) = direct sum of x_s repeated r_s times
  bool exact = false;
  double weight_error = 0.0;  // sum_s |t_s - r_s m_s / n|
};

namespace detail {

// Best continued-fraction convergent p/q of t with q <= cap and
// |t - p/q| <= target (or the last convergent under the cap).
inline bool cf_approximate(double t, double target, long cap, long& p_out,
                           long& q_out) {
  long h1 = 1, h2 = 0;  // numerator recurrence h_n = a h_{n-1} + h_{n-2}
  long k1 = 0, k2 = 1;  // denominator recurrence
  double x = t;
  bool found = false;
  for (int iter = 0; iter < 64; ++iter) {
    const double fa = std::floor(x);
    if (fa > 1e17) break;
    const long a = static_cast<long>(fa);
    const long h = a * h1 + h2;
    const long k = a * k1 + k2;
    if (k > cap || k <= 0) break;
    h2 = h1; h1 = h;
    k2 = k1; k1 = k;
    p_out = h;
    q_out = k;
    found = true;
    if (std::abs(t - static_cast<double>(h) / static_cast<double>(k)) <= target)
      return true;
    const double frac = x - fa;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  return found && std::abs(t - static_cast<double>(p_out) / static_cast<double>(q_out)) <= target;
}

inline cpp_int lcm_int(const cpp_int& a, const cpp_int& b) {
  return a / boost::multiprecision::gcd(a, b) * b;
}

}  // namespace detail

// Choose n and multiplicities r_s with r_s m_s / n ~ t_s. Exact recovery of
// rational weights when their denominators fit under the cap; otherwise
// continued-fraction approximation with total weight error < eps.
inline EmbeddingPlan trace_preserving_embedding(const std::vector<long>& m,
                                                const std::vector<double>& t,
                                                double eps,
                                                long den_cap = 1000000) {
  if (!(eps > 0.0))
    throw std::domain_error("trace_preserving_embedding: eps must be > 0");
  if (m.size() != t.size() || m.empty())
    throw std::invalid_argument("trace_preserving_embedding: size mismatch");
  double total = 0.0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (m[s] < 1)
      throw std::invalid_argument("trace_preserving_embedding: summand size < 1");
    if (t[s] < -1e-12)
      throw std::domain_error("trace_preserving_embedding: negative weight");
    total += t[s];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::domain_error("trace_preserving_embedding: weights must sum to 1");

  const std::size_t S = m.size();
  std::vector<cpp_rational> w(S);
  bool exact = true;
  for (std::size_t s = 0; s < S && exact; ++s) {
    long p = 0, q = 1;
    if (detail::cf_approximate(t[s], 1e-14, den_cap, p, q))
      w[s] = cpp_rational(p, q);
    else
      exact = false;
  }
  if (exact) {
    // Force the exact sum to 1 through the last component.
    cpp_rational acc = 0;
    for (std::size_t s = 0; s + 1 < S; ++s) acc += w[s];
    w[S - 1] = cpp_rational(1) - acc;
    if (w[S - 1] < 0) exact = false;
  }
  if (!exact) {
    // Approximate path: budget eps/(2S) per leading component.
    const double budget = eps / (2.0 * static_cast<double>(S));
    cpp_rational acc = 0;
    for (std::size_t s = 0; s + 1 < S; ++s) {
      long p = 0, q = 1;
      if (!detail::cf_approximate(t[s], budget, den_cap, p, q))
        throw std::domain_error(
            "trace_preserving_embedding: cannot reach tolerance under denominator cap");
      w[s] = cpp_rational(p, q);
      acc += w[s];
    }
    w[S - 1] = cpp_rational(1) - acc;
    if (w[S - 1] < 0)
      throw std::domain_error("trace_preserving_embedding: degenerate weights");
  }

  // n = lcm_s ( den(w_s) * m_s / gcd(num(w_s), den(w_s) * m_s) ).
  cpp_int n = 1;
  for (std::size_t s = 0; s < S; ++s) {
    const cpp_int num = boost::multiprecision::numerator(w[s]);
    const cpp_int den = boost::multiprecision::denominator(w[s]) * m[s];
    if (num == 0) continue;
    n = detail::lcm_int(n, den / boost::multiprecision::gcd(num, den));
  }
  EmbeddingPlan plan;
  plan.exact = exact;
  if (n > 1000000000)
    throw std::domain_error("trace_preserving_embedding: plan size overflow");
  plan.n = static_cast<long>(n);
  long check = 0;
  for (std::size_t s = 0; s < S; ++s) {
    const cpp_rational r = w[s] * n / m[s];
    if (boost::multiprecision::denominator(r) != 1)
      throw std::logic_error("trace_preserving_embedding: internal rounding");
    plan.multiplicities.push_back(static_cast<long>(boost::multiprecision::numerator(r)));
    check += plan.multiplicities.back() * m[s];
    plan.weight_error += std::abs(
        t[s] - static_cast<double>(plan.multiplicities.back() * m[s]) /
                   static_cast<double>(plan.n));
  }
  if (check != plan.n)
    throw std::logic_error("trace_preserving_embedding: dimensions do not add up");
  return plan;
}

// Materialize rho(x) = direct sum over s of x_s repeated r_s times.
inline Matrix embedding_apply(const EmbeddingPlan& plan,
                              const std::vector<Matrix>& xs) {
  if (xs.size() != plan.multiplicities.size())
    throw std::invalid_argument("embedding_apply: summand count mismatch");
  Matrix out(static_cast<std::size_t>(plan.n), static_cast<std::size_t>(plan.n));
  std::size_t off = 0;
  for (std::size_t s = 0; s < xs.size(); ++s) {
    for (long r = 0; r < plan.multiplicities[s]; ++r) {
      out.set_block(off, off, xs[s]);
      off += xs[s].rows();
    }
  }
  return out;
}

// ---- cp maps, unitalization, block padding ----

// phi(x) = sum_t K_t x K_t^*, mapping M_d -> M_q with q x d Kraus blocks.
struct CpMap {
  std::vector<Matrix> kraus;

  std::size_t dom() const { return kraus.empty() ? 0 : kraus.front().cols(); }
  std::size_t cod() const { return kraus.empty() ? 0 : kraus.front().rows(); }

  Matrix apply(const Matrix& x) const {
    if (kraus.empty()) throw std::logic_error("CpMap: empty");
    Matrix out(cod(), cod());
    for (const auto& k : kraus) out += k * x * k.adjoint();
    return out;
  }

  Matrix unit_image() const {
    if (kraus.empty()) throw std::logic_error("CpMap: empty");
    Matrix out(cod(), cod());
    for (const auto& k : kraus) out += k * k.adjoint();
    return out;
  }
};

struct UnitalizeResult {
  CpMap psi;  // unital; phi(a) = c psi(a) c
  Matrix c;   // phi(1)^{1/2}
};

inline UnitalizeResult unitalize(const CpMap& phi, double floor_eps,
                                 const Tolerances& tol = default_tolerances()) {
  const Matrix u = phi.unit_image();
  std::vector<double> ev = hermitian_eigenvalues(u, tol);
  if (ev.front() < floor_eps)
    throw std::domain_error("unitalize: phi(1) is below the declared floor");
  UnitalizeResult out;
  out.c = positive_sqrt(u, tol);
  const Matrix cinv =
      hermitian_function(u, [](double v) { return 1.0 / std::sqrt(v); }, tol);
  for (const auto& k : phi.kraus) out.psi.kraus.push_back(cinv * k);
  return out;
}

// Theta(x) = phi(x) repeated s times, then psi(x); target M_{s l + k}.
inline Matrix pad_block_diagonal_apply(const CpMap& phi, const CpMap& psi, long s,
                                       const Matrix& x) {
  if (s < 1) throw std::invalid_argument("pad_block_diagonal: s must be >= 1");
  const std::size_t l = phi.cod(), k = psi.cod();
  Matrix out(static_cast<std::size_t>(s) * l + k, static_cast<std::size_t>(s) * l + k);
  const Matrix fx = phi.apply(x);
  const Matrix gx = psi.apply(x);
  std::size_t off = 0;
  for (long r = 0; r < s; ++r) {
    out.set_block(off, off, fx);
    off += l;
  }
  out.set_block(off, off, gx);
  return out;
}

inline double pad_trace_weight(long s, long l, long k) {
  return static_cast<double>(s * l) / static_cast<double>(s * l + k);
}

}  // namespace fsq
