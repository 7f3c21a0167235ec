#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"

// Banded infinite operators given by entry rules, their coordinate
// filtrations, truncations P_n T P_n, and commutator (quasidiagonality /
// Folner) defects. Defects are evaluated on a window enlarged by the band,
// which the band bound makes exact: every nonzero entry of P T - T P and of
// the compressed products lives inside the enlarged window.

namespace fsq {

// A scalar sequence rule: periodic table, explicit table with a default tail,
// or a + b/(k+1) (indexing from 0; negatives use |k|).
struct PeriodicRule {
  std::vector<cplx> values;
};
struct TableRule {
  std::vector<cplx> values;  // index 0, 1, 2, ...
  cplx fallback{0.0, 0.0};
};
struct HarmonicRule {
  double a = 0.0;
  double b = 0.0;
};
using SequenceRule = std::variant<PeriodicRule, TableRule, HarmonicRule>;

inline cplx eval_rule(const SequenceRule& rule, long k) {
  if (const auto* p = std::get_if<PeriodicRule>(&rule)) {
    if (p->values.empty()) return cplx{0.0, 0.0};
    const long m = static_cast<long>(p->values.size());
    long r = k % m;
    if (r < 0) r += m;
    return p->values[static_cast<std::size_t>(r)];
  }
  if (const auto* t = std::get_if<TableRule>(&rule)) {
    const long i = k < 0 ? -k : k;
    if (i < static_cast<long>(t->values.size()))
      return t->values[static_cast<std::size_t>(i)];
    return t->fallback;
  }
  const auto& h = std::get<HarmonicRule>(rule);
  const long i = k < 0 ? -k : k;
  return cplx{h.a + h.b / static_cast<double>(i + 1), 0.0};
}

enum class Support { one_sided, two_sided };

struct ToeplitzKind {
  std::vector<cplx> coefficients;  // a_{-band} .. a_{band}; t(i,j) = a_{i-j}
};
struct WeightedShiftKind {
  SequenceRule weights;
  int direction = 1;  // +1: e_j -> w(j) e_{j+1} (lower); -1: e_j -> w(j) e_{j-1}
};
struct DiagonalKind {
  SequenceRule diagonal;
};
struct DirectSumKind {
  std::vector<Matrix> blocks;  // repeated cyclically along the diagonal
};

class OperatorModel {
 public:
  using Kind = std::variant<ToeplitzKind, WeightedShiftKind, DiagonalKind, DirectSumKind>;

  OperatorModel(Kind kind, Support support, long band, double entry_bound,
                std::string name = "")
      : kind_(std::move(kind)),
        support_(support),
        band_(band),
        entry_bound_(entry_bound),
        name_(std::move(name)) {
    validate();
  }

  const Kind& kind() const { return kind_; }
  Support support() const { return support_; }
  long band() const { return band_; }
  double entry_bound() const { return entry_bound_; }
  const std::string& name() const { return name_; }

  bool in_domain(long i) const { return support_ == Support::two_sided || i >= 0; }

  // Entry rule t(i, j); zero outside the declared band and the support.
  cplx entry(long i, long j) const {
    if (!in_domain(i) || !in_domain(j)) return cplx{0.0, 0.0};
    if (std::labs(i - j) > band_) return cplx{0.0, 0.0};
    if (const auto* t = std::get_if<ToeplitzKind>(&kind_)) {
      return t->coefficients[static_cast<std::size_t>(i - j + band_)];
    }
    if (const auto* w = std::get_if<WeightedShiftKind>(&kind_)) {
      if (i == j + w->direction) return eval_rule(w->weights, j);
      return cplx{0.0, 0.0};
    }
    if (const auto* d = std::get_if<DiagonalKind>(&kind_)) {
      if (i == j) return eval_rule(d->diagonal, i);
      return cplx{0.0, 0.0};
    }
    const auto& ds = std::get<DirectSumKind>(kind_);
    long period = 0;
    for (const auto& b : ds.blocks) period += static_cast<long>(b.rows());
    long ci = floordiv(i, period), cj = floordiv(j, period);
    if (ci != cj) return cplx{0.0, 0.0};
    long oi = i - ci * period, oj = j - cj * period;
    for (const auto& b : ds.blocks) {
      const long s = static_cast<long>(b.rows());
      if (oi < s && oj < s) return b(static_cast<std::size_t>(oi), static_cast<std::size_t>(oj));
      if (oi < s || oj < s) return cplx{0.0, 0.0};
      oi -= s;
      oj -= s;
    }
    return cplx{0.0, 0.0};
  }

 private:
  static long floordiv(long a, long b) {
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
  }

  void validate() const {
    if (band_ < 0) throw std::invalid_argument("OperatorModel: negative band");
    if (!(entry_bound_ >= 0.0))
      throw std::invalid_argument("OperatorModel: entry_bound must be >= 0");
    if (const auto* t = std::get_if<ToeplitzKind>(&kind_)) {
      if (t->coefficients.size() != static_cast<std::size_t>(2 * band_ + 1))
        throw std::invalid_argument(
            "OperatorModel: toeplitz needs 2*band+1 coefficients");
    }
    if (const auto* w = std::get_if<WeightedShiftKind>(&kind_)) {
      if (w->direction != 1 && w->direction != -1)
        throw std::invalid_argument("OperatorModel: shift direction must be +-1");
      if (band_ < 1)
        throw std::invalid_argument("OperatorModel: weighted shift needs band >= 1");
    }
    if (const auto* ds = std::get_if<DirectSumKind>(&kind_)) {
      if (ds->blocks.empty())
        throw std::invalid_argument("OperatorModel: direct_sum needs blocks");
      long maxdim = 0;
      for (const auto& b : ds->blocks) {
        if (!b.square() || b.rows() == 0)
          throw std::invalid_argument("OperatorModel: direct_sum blocks must be square");
        maxdim = std::max(maxdim, static_cast<long>(b.rows()));
      }
      if (band_ < maxdim - 1)
        throw std::invalid_argument(
            "OperatorModel: band must cover the largest direct_sum block");
    }
  }

  Kind kind_;
  Support support_;
  long band_;
  double entry_bound_;
  std::string name_;
};

// Increasing window sizes d_1 < d_2 < ...; two-sided windows are centred,
// index range [-(d/2), -(d/2) + d - 1].
class Filtration {
 public:
  explicit Filtration(std::vector<long> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("Filtration: empty");
    long prev = 0;
    for (long d : dims_) {
      if (d <= prev)
        throw std::invalid_argument("Filtration: dims must be strictly increasing");
      prev = d;
    }
  }

  static Filtration linear(long n_max) {
    std::vector<long> dims;
    for (long d = 1; d <= n_max; ++d) dims.push_back(d);
    return Filtration(std::move(dims));
  }

  static Filtration arithmetic(long start, long step, long count) {
    std::vector<long> dims;
    for (long i = 0; i < count; ++i) dims.push_back(start + i * step);
    return Filtration(std::move(dims));
  }

  std::size_t size() const { return dims_.size(); }
  long dim(std::size_t n) const { return dims_.at(n); }
  const std::vector<long>& dims() const { return dims_; }

  long window_lo(std::size_t n, Support support) const {
    return support == Support::two_sided ? -(dims_.at(n) / 2) : 0;
  }

 private:
  std::vector<long> dims_;
};

struct Truncation {
  Matrix matrix;
  long lo = 0;   // model index of the first row/column
  long dim = 0;  // == matrix.rows()
};

// Matrix of the model over an arbitrary index window [lo, lo+dim).
inline Matrix window_matrix(const OperatorModel& model, long lo, long dim) {
  Matrix m(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  const long band = model.band();
  for (long i = 0; i < dim; ++i) {
    const long j0 = std::max<long>(0, i - band);
    const long j1 = std::min<long>(dim - 1, i + band);
    for (long j = j0; j <= j1; ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          model.entry(lo + i, lo + j);
  }
  return m;
}

inline Truncation truncate(const OperatorModel& model, const Filtration& filt,
                           std::size_t n) {
  Truncation t;
  t.dim = filt.dim(n);
  t.lo = filt.window_lo(n, model.support());
  t.matrix = window_matrix(model, t.lo, t.dim);
  return t;
}

namespace detail {

// Enlarged ambient window holding the window projection P and the model cut
// to the ambient indices. The pad equals `pad` on ends that are open (one
// sided support is closed at index 0).
struct AmbientWindow {
  Matrix a;   // model on the ambient window
  Matrix p;   // window projection (diagonal 0/1)
  long tr_p;  // rank of p
};

inline AmbientWindow ambient_window(const OperatorModel& model,
                                    const Filtration& filt, std::size_t n,
                                    long pad) {
  const long d = filt.dim(n);
  const long lo = filt.window_lo(n, model.support());
  const long hi = lo + d - 1;
  const long alo = model.support() == Support::two_sided ? lo - pad : 0;
  const long ahi = hi + pad;
  const long adim = ahi - alo + 1;
  AmbientWindow w;
  w.a = window_matrix(model, alo, adim);
  w.p = Matrix(static_cast<std::size_t>(adim), static_cast<std::size_t>(adim));
  for (long i = lo; i <= hi; ++i)
    w.p(static_cast<std::size_t>(i - alo), static_cast<std::size_t>(i - alo)) = 1.0;
  w.tr_p = d;
  return w;
}

}  // namespace detail

struct CommutatorDefects {
  double opnorm_direct = 0.0;    // ||P T - T P||
  double opnorm_identity = 0.0;  // max{||Paa*P - PaPa*P||^{1/2}, ||Pa*aP - Pa*PaP||^{1/2}}
  double hs_direct = 0.0;        // ||P T - T P||_HS / ||P||_HS
  double hs_identity = 0.0;      // via the trace identity
};

inline CommutatorDefects commutator_defects(const OperatorModel& model,
                                            const Filtration& filt,
                                            std::size_t n) {
  detail::AmbientWindow w =
      detail::ambient_window(model, filt, n, model.band());
  const Matrix& a = w.a;
  const Matrix& p = w.p;
  const Matrix astar = a.adjoint();
  const Matrix pa = p * a;
  const Matrix pastar = p * astar;

  const Matrix comm = pa - a * p;
  CommutatorDefects out;
  out.opnorm_direct = operator_norm(comm);

  const Matrix paap = pa * astar * p;          // P a a* P
  const Matrix papap = pa * p * astar * p;     // P a P a* P
  const Matrix pasap = pastar * a * p;         // P a* a P
  const Matrix paspap = pastar * p * a * p;    // P a* P a P
  const Matrix g1 = paap - papap;
  const Matrix g2 = pasap - paspap;
  out.opnorm_identity =
      std::sqrt(std::max(0.0, std::max(operator_norm(g1), operator_norm(g2))));

  const double hs2 = frobenius_norm(comm) * frobenius_norm(comm);
  out.hs_direct = std::sqrt(hs2 / static_cast<double>(w.tr_p));
  const double t1 = g1.trace().real();
  const double t2 = g2.trace().real();
  out.hs_identity =
      std::sqrt(std::max(0.0, (t1 + t2) / static_cast<double>(w.tr_p)));
  return out;
}

// tr_{d_n}(P_n X P_n) for X a word in the model (letter 'T') and its adjoint
// ('t'). The ambient pad band*len makes the compressed product exact.
inline cplx compression_trace(const OperatorModel& model, const Filtration& filt,
                              std::size_t n, const std::string& word) {
  for (char c : word)
    if (c != 'T' && c != 't')
      throw std::invalid_argument("compression_trace: word letters must be T or t");
  const long pad = model.band() * static_cast<long>(std::max<std::size_t>(word.size(), 1));
  detail::AmbientWindow w = detail::ambient_window(model, filt, n, pad);
  Matrix x = Matrix::identity(w.a.rows());
  for (char c : word) x = x * (c == 'T' ? w.a : w.a.adjoint());
  const Matrix pxp = w.p * x * w.p;
  return pxp.trace() / static_cast<double>(w.tr_p);
}

}  // namespace fsq
