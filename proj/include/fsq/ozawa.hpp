#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"
#include "fsq/tolerances.hpp"

// The explicit matrix model phi(T) = P (T tensor 1) P attached to a positive
// finite-rank density with rational spectrum: h = sum (p_i / q) v_i v_i^*.
// P projects onto span{ v_i tensor w_j : j <= p_i } with the w-basis taken as
// standard coordinates, truncated to q_w = max p_i columns (the construction
// touches nothing beyond them). The range has dimension q, so phi lands in
// M_q, and tr_q(phi(T)) = Tr(hT) is an algebraic identity.

namespace fsq {

struct RationalDensity {
  long q = 0;            // common denominator
  std::vector<long> p;   // positive numerators, sum exactly q
  Matrix eigenvectors;   // d x k, orthonormal columns v_i

  std::size_t ambient_dim() const { return eigenvectors.rows(); }
  std::size_t rank() const { return p.size(); }

  Matrix density() const {
    const std::size_t d = ambient_dim();
    Matrix h(d, d);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double w = static_cast<double>(p[i]) / static_cast<double>(q);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
          h(r, c) += w * eigenvectors(r, i) * std::conj(eigenvectors(c, i));
    }
    return h;
  }
};

inline void validate_rational_density(const RationalDensity& h,
                                      const Tolerances& tol = default_tolerances()) {
  if (h.q <= 0) throw std::domain_error("RationalDensity: q must be positive");
  if (h.p.empty() || h.p.size() != h.eigenvectors.cols())
    throw std::domain_error("RationalDensity: eigenvalue/eigenvector count mismatch");
  long sum = 0;
  for (long pi : h.p) {
    if (pi <= 0) throw std::domain_error("RationalDensity: eigenvalues must be positive");
    sum += pi;
  }
  if (sum != h.q) throw std::domain_error("RationalDensity: eigenvalues must sum to q");
  if (h.eigenvectors.rows() < h.eigenvectors.cols())
    throw std::domain_error("RationalDensity: more eigenvectors than ambient dimension");
  const Matrix gram = h.eigenvectors.adjoint() * h.eigenvectors;
  Matrix defect = gram;
  for (std::size_t i = 0; i < defect.rows(); ++i) defect(i, i) -= 1.0;
  if (max_abs(defect) > tol.orthonormal_tol)
    throw std::domain_error("RationalDensity: eigenvectors are not orthonormal");
}

class OzawaModel {
 public:
  explicit OzawaModel(RationalDensity h,
                      const Tolerances& tol = default_tolerances())
      : h_(std::move(h)) {
    validate_rational_density(h_, tol);
    q_w_ = *std::max_element(h_.p.begin(), h_.p.end());
    for (std::size_t i = 0; i < h_.p.size(); ++i)
      for (long j = 0; j < h_.p[i]; ++j) labels_.push_back({i, j});
  }

  const RationalDensity& density() const { return h_; }
  std::size_t q() const { return labels_.size(); }  // == h.q
  long q_w() const { return q_w_; }
  std::size_t ambient_product_dim() const {
    return h_.ambient_dim() * static_cast<std::size_t>(q_w_);
  }

  // phi(T) in M_q: entry[(i,j),(i',j')] = <v_i, T v_{i'}> delta_{j j'}.
  Matrix phi(const Matrix& t) const {
    const std::size_t d = h_.ambient_dim();
    if (t.rows() != d || t.cols() != d)
      throw std::invalid_argument("OzawaModel: T has wrong dimension");
    const std::size_t k = h_.rank();
    // s(i, i') = v_i^* T v_{i'}
    Matrix tv = t * h_.eigenvectors;            // d x k
    Matrix s = h_.eigenvectors.adjoint() * tv;  // k x k
    Matrix out(q(), q());
    for (std::size_t r = 0; r < labels_.size(); ++r)
      for (std::size_t c = 0; c < labels_.size(); ++c)
        if (labels_[r].second == labels_[c].second)
          out(r, c) = s(labels_[r].first, labels_[c].first);
    return out;
  }

  // Isometry W : C^q -> C^d tensor C^{q_w} with phi(T) = W^* (T tensor 1) W.
  Matrix isometry() const {
    const std::size_t d = h_.ambient_dim();
    Matrix w(ambient_product_dim(), q());
    for (std::size_t c = 0; c < labels_.size(); ++c) {
      const std::size_t i = labels_[c].first;
      const long j = labels_[c].second;
      for (std::size_t a = 0; a < d; ++a)
        w(a * static_cast<std::size_t>(q_w_) + static_cast<std::size_t>(j), c) =
            h_.eigenvectors(a, i);
    }
    return w;
  }

  Matrix range_projection() const {
    Matrix w = isometry();
    return w * w.adjoint();
  }

  // tr_q(phi(T)); equals Tr(h T) identically.
  cplx model_trace(const Matrix& t) const {
    return phi(t).trace() / static_cast<double>(q());
  }

  cplx target_trace(const Matrix& t) const {
    return (h_.density() * t).trace();
  }

  // lhs and rhs of the hypertrace defect bound for a unitary u:
  // |tr_q(phi(u u*) - phi(u) phi(u*))| <= 2 ||u h u* - h||_1^{1/2}.
  struct DefectBound {
    double lhs = 0.0;
    double rhs = 0.0;
  };

  DefectBound hypertrace_defect(const Matrix& u,
                                const Tolerances& tol = default_tolerances()) const {
    DefectBound out;
    const Matrix fu = phi(u);
    const Matrix fus = phi(u.adjoint());
    const Matrix fuu = phi(u * u.adjoint());
    out.lhs = std::abs((fuu - fu * fus).trace() / static_cast<double>(q()));
    const Matrix h = h_.density();
    out.rhs = 2.0 * std::sqrt(trace_norm(u * h * u.adjoint() - h, tol));
    return out;
  }

 private:
  RationalDensity h_;
  long q_w_ = 0;
  std::vector<std::pair<std::size_t, long>> labels_;  // (i, j), j < p_i
};

}  // namespace fsq
