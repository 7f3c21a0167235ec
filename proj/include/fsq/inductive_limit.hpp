#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <functional>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"
#include "fsq/tolerances.hpp"

// Finite stages of the basic construction: the connecting map
//   rho(x) = 1 tensor diag(0_{n-k}, pi(x)) + x tensor diag(1_{n-k}, 0_k),
// its commuting-corner structure, and the exact integer stage planning
//   n(0) n(1) ... n(j-1) k(j) / n(j) < 2^{-j}
// with the cumulative trace-error coefficients lambda_{i,j}.

namespace fsq {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

// diag(0_{n-k}, y) in M_n for y in M_k.
inline Matrix rep_corner(const Matrix& y, std::size_t n) {
  if (!y.square()) throw std::invalid_argument("rep_corner: y not square");
  if (y.rows() > n) throw std::domain_error("rep_corner: k > n");
  Matrix out(n, n);
  out.set_block(n - y.rows(), n - y.rows(), y);
  return out;
}

inline Matrix corner_unit(std::size_t k, std::size_t n) {
  return rep_corner(Matrix::identity(k), n);
}

using Rep = std::function<Matrix(const Matrix&)>;

inline Matrix connecting_map(const Matrix& x, const Rep& pi, std::size_t k,
                             std::size_t n) {
  if (!x.square()) throw std::invalid_argument("connecting_map: x not square");
  if (k > n) throw std::domain_error("connecting_map: rep dimension k exceeds n");
  const Matrix px = pi(x);
  if (px.rows() != k || px.cols() != k)
    throw std::invalid_argument("connecting_map: pi(x) has wrong dimension");
  Matrix mask(n, n);
  for (std::size_t i = 0; i < n - k; ++i) mask(i, i) = 1.0;
  return kron(Matrix::identity(x.rows()), rep_corner(px, n)) + kron(x, mask);
}

// tau tensor tr_n of rho(x), with tau the normalized trace: equals
// ((n - k) tr(x) + Tr(pi(x))) / n in normalized terms.
inline double connecting_map_trace(const Matrix& rho_x) {
  return rho_x.trace().real() / static_cast<double>(rho_x.rows());
}

inline double normalized_trace(const Matrix& x) {
  return x.trace().real() / static_cast<double>(x.rows());
}

struct CornerReport {
  double commutator_norm = 0.0;  // ||[e, rho(x)]||
  double span_distance = 0.0;    // HS distance of e rho(x) e from span(1 (x) corner(pi(E)))
};

inline CornerReport commuting_corner_check(const Matrix& x, const Rep& pi,
                                           std::size_t k, std::size_t n,
                                           const Tolerances& tol = default_tolerances()) {
  const std::size_t m = x.rows();
  const Matrix rho = connecting_map(x, pi, k, n);
  const Matrix e = kron(Matrix::identity(m), corner_unit(k, n));
  CornerReport rep;
  rep.commutator_norm = operator_norm(e * rho - rho * e, tol);

  // Span of B = { 1 tensor diag(0, pi(y)) : y in M_m }, spanned by the images
  // of the matrix units; orthonormalized in the HS inner product.
  std::vector<Matrix> basis;
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      Matrix eab(m, m);
      eab(a, b) = 1.0;
      Matrix v = kron(Matrix::identity(m), rep_corner(pi(eab), n));
      for (const Matrix& u : basis) v -= hs_inner(u, v) * u;
      const double nrm = frobenius_norm(v);
      if (nrm > 1e-12) basis.push_back(v * (1.0 / nrm));
    }
  Matrix y = e * rho * e;
  for (const Matrix& u : basis) y -= hs_inner(u, y) * u;
  rep.span_distance = frobenius_norm(y);
  return rep;
}

// ---- exact stage plans ----

struct StagePlan {
  std::vector<cpp_int> k;        // k(1..J)
  std::vector<cpp_int> n;        // n(1..J)
  std::vector<cpp_rational> eps; // per-stage strict bounds (2^{-j} or user)
  bool scaled = false;

  std::size_t stages() const { return n.size(); }

  // Cumulative product n(1) ... n(j), with N(0) = 1.
  cpp_int cumulative(std::size_t j) const {
    cpp_int prod = 1;
    for (std::size_t t = 0; t < j; ++t) prod *= n[t];
    return prod;
  }

  // Stage factor f_t = (n(t) - N(t-1) k(t)) / n(t), t in 1..J.
  cpp_rational factor(std::size_t t) const {
    const cpp_int big_n = cumulative(t - 1);
    return cpp_rational(n[t - 1] - big_n * k[t - 1], n[t - 1]);
  }

  // lambda_{i,j} = 1 - prod_{t=i+1..j} f_t, for 0 <= i <= j <= J.
  cpp_rational lambda(std::size_t i, std::size_t j) const {
    if (i > j || j > stages())
      throw std::invalid_argument("StagePlan::lambda: bad indices");
    cpp_rational prod = 1;
    for (std::size_t t = i + 1; t <= j; ++t) prod *= factor(t);
    return cpp_rational(1) - prod;
  }
};

namespace detail {

inline StagePlan plan_stages_impl(const std::vector<long>& k_dims,
                                  const std::vector<cpp_rational>& eps,
                                  bool scaled, unsigned max_bits) {
  if (k_dims.size() != eps.size() || k_dims.empty())
    throw std::invalid_argument("plan_stages: stage count mismatch");
  StagePlan plan;
  plan.scaled = scaled;
  plan.eps = eps;
  cpp_int big_n = 1;  // N(j-1) = n(1) ... n(j-1)
  for (std::size_t j = 0; j < k_dims.size(); ++j) {
    if (k_dims[j] < 1) throw std::invalid_argument("plan_stages: k must be >= 1");
    if (!(eps[j] > 0)) throw std::invalid_argument("plan_stages: eps must be > 0");
    plan.k.emplace_back(k_dims[j]);
    // smallest n with N k / n < eps  <=>  n > N k / eps
    const cpp_int num = boost::multiprecision::numerator(eps[j]);
    const cpp_int den = boost::multiprecision::denominator(eps[j]);
    const cpp_int n_j = (big_n * k_dims[j] * den) / num + 1;
    if (boost::multiprecision::msb(n_j) + 1 > max_bits)
      throw std::range_error("plan_stages: stage size exceeds the bit bound");
    plan.n.push_back(n_j);
    big_n *= n_j;
    if (boost::multiprecision::msb(big_n) + 1 > max_bits)
      throw std::range_error("plan_stages: cumulative size exceeds the bit bound");
  }
  return plan;
}

}  // namespace detail

// The default schedule: eps_j = 2^{-j}, j = 1..J.
inline StagePlan plan_stages(const std::vector<long>& k_dims,
                             unsigned max_bits = 4096) {
  std::vector<cpp_rational> eps;
  cpp_int den = 1;
  for (std::size_t j = 0; j < k_dims.size(); ++j) {
    den *= 2;
    eps.emplace_back(cpp_int(1), den);
  }
  return detail::plan_stages_impl(k_dims, eps, false, max_bits);
}

// Scaled schedule with user tolerances; same machinery, flagged as scaled.
inline StagePlan plan_stages_scaled(const std::vector<long>& k_dims,
                                    const std::vector<cpp_rational>& eps,
                                    unsigned max_bits = 4096) {
  return detail::plan_stages_impl(k_dims, eps, true, max_bits);
}

struct StagePlanCheck {
  bool inequalities_hold = false;  // N(j-1) k(j) / n(j) < eps_j, all j
  bool minimal = false;            // n(j) - 1 violates the bound, all j
  bool lambda_bounds_hold = false; // |lambda_{i,j}| <= 2^{-i} (unscaled only)
};

inline StagePlanCheck verify_stage_plan(const StagePlan& plan) {
  StagePlanCheck out;
  out.inequalities_hold = true;
  out.minimal = true;
  for (std::size_t j = 1; j <= plan.stages(); ++j) {
    const cpp_int big_n = plan.cumulative(j - 1);
    const cpp_rational lhs(big_n * plan.k[j - 1], plan.n[j - 1]);
    if (!(lhs < plan.eps[j - 1])) out.inequalities_hold = false;
    if (plan.n[j - 1] > 1) {
      const cpp_rational prev(big_n * plan.k[j - 1], plan.n[j - 1] - 1);
      if (prev < plan.eps[j - 1]) out.minimal = false;
    }
  }
  out.lambda_bounds_hold = true;
  if (!plan.scaled) {
    cpp_int pow2 = 1;
    for (std::size_t i = 0; i <= plan.stages(); ++i) {
      const cpp_rational bound(cpp_int(1), pow2);
      for (std::size_t j = i; j <= plan.stages(); ++j) {
        cpp_rational l = plan.lambda(i, j);
        if (l < 0) l = -l;
        if (l > bound) out.lambda_bounds_hold = false;
      }
      pow2 *= 2;
    }
  }
  return out;
}

// ---- concrete stage towers (pi_j = id tensor 1_{r_j}) ----

// Realizes E_j = E tensor M_{n(1)} ... M_{n(j)} with the stage-j
// representation x -> x tensor 1_{r_j} of dimension k_j = dim(j-1) * r_j.
struct StageTower {
  std::size_t m0 = 1;
  std::vector<std::size_t> r;  // rep multiplicities
  std::vector<std::size_t> n;  // stage sizes; requires dim(j-1) * r_j <= n_j

  std::size_t stages() const { return n.size(); }

  std::size_t dim(std::size_t stage) const {  // dim of E_stage
    std::size_t d = m0;
    for (std::size_t t = 0; t < stage; ++t) d *= n[t];
    return d;
  }

  std::size_t rep_dim(std::size_t stage) const {  // k at stage (1-based)
    return dim(stage - 1) * r[stage - 1];
  }

  void validate() const {
    if (r.size() != n.size()) throw std::invalid_argument("StageTower: size mismatch");
    for (std::size_t j = 1; j <= stages(); ++j)
      if (rep_dim(j) > n[j - 1])
        throw std::domain_error("StageTower: rep dimension exceeds stage size");
  }

  // rho_stage : E_{stage-1} -> E_stage (stage is 1-based).
  Matrix lift_one(const Matrix& x, std::size_t stage) const {
    const std::size_t rj = r[stage - 1];
    Rep pi = [rj](const Matrix& y) { return kron(y, Matrix::identity(rj)); };
    return connecting_map(x, pi, x.rows() * rj, n[stage - 1]);
  }

  // Composite Phi_{to,from} : E_from -> E_to.
  Matrix lift(const Matrix& x, std::size_t from, std::size_t to) const {
    if (x.rows() != dim(from)) throw std::invalid_argument("StageTower: wrong input dim");
    Matrix y = x;
    for (std::size_t stage = from + 1; stage <= to; ++stage) y = lift_one(y, stage);
    return y;
  }

  // Exact rational lambda coefficients of this tower's schedule.  The plan's
  // raw stage dimension is m0 r_j; StagePlan::factor re-applies the
  // cumulative product, so rep_dim(j) = N(j-1) * (m0 r_j) is recovered there.
  StagePlan as_plan() const {
    StagePlan plan;
    plan.scaled = true;
    for (std::size_t j = 1; j <= stages(); ++j) {
      plan.k.emplace_back(static_cast<long>(m0 * r[j - 1]));
      plan.n.emplace_back(static_cast<long>(n[j - 1]));
      plan.eps.emplace_back(cpp_rational(static_cast<long>(rep_dim(j)) + 1,
                                         static_cast<long>(n[j - 1])));
    }
    return plan;
  }
};

}  // namespace fsq
