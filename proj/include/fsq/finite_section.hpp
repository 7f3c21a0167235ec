#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/linalg.hpp"
#include "fsq/operator_model.hpp"
#include "fsq/parallel.hpp"
#include "fsq/tolerances.hpp"

// Finite-section machinery: stability scans, section solves, pseudospectrum
// grids, set limits of spectra, essential points and Szego functionals.

namespace fsq {

// ---- stability ----

struct StabilityRow {
  std::size_t n = 0;
  long dim = 0;
  bool invertible = false;
  double inverse_norm = std::numeric_limits<double>::infinity();
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  double cap = 0.0;
  bool stable = false;       // some tail is uniformly invertible under the cap
  std::size_t n0 = 0;        // first index of that tail (valid when stable)
  double sup_inverse_norm = 0.0;  // over the tail (valid when stable)
};

inline StabilityReport stability_scan(const OperatorModel& model,
                                      const Filtration& filt,
                                      double cap = 1e8,
                                      const Tolerances& tol = default_tolerances()) {
  StabilityReport rep;
  rep.cap = cap;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    StabilityRow row;
    row.n = n;
    row.dim = t.dim;
    std::optional<double> inv = inverse_norm(t.matrix, tol);
    row.invertible = inv.has_value();
    if (inv) row.inverse_norm = *inv;
    rep.rows.push_back(row);
  }
  // Longest suffix of invertible rows bounded by the cap.
  std::size_t start = rep.rows.size();
  while (start > 0 && rep.rows[start - 1].invertible &&
         rep.rows[start - 1].inverse_norm <= cap)
    --start;
  if (start < rep.rows.size()) {
    rep.stable = true;
    rep.n0 = start;
    rep.sup_inverse_norm = 0.0;
    for (std::size_t i = start; i < rep.rows.size(); ++i)
      rep.sup_inverse_norm = std::max(rep.sup_inverse_norm, rep.rows[i].inverse_norm);
  }
  return rep;
}

// ---- finite-section solves ----

struct SolveRow {
  std::size_t n = 0;
  long dim = 0;
  bool solved = false;
  double residual = 0.0;   // ||A w - v|| on the window
  double increment = 0.0;  // ||w_n - w_prev|| padded; NaN for the first solve
};

struct SolveReport {
  std::vector<SolveRow> rows;
  bool any_solved = false;
  Vector final_solution;  // last solved window, window coordinates
  long final_lo = 0;
  long final_dim = 0;
};

// rhs[i] sits at model index rhs_lo + i. The support must lie inside the
// final window.
inline SolveReport solve_finite_section(const OperatorModel& model,
                                        const Filtration& filt,
                                        const Vector& rhs, long rhs_lo = 0,
                                        const Tolerances& tol = default_tolerances()) {
  const std::size_t last = filt.size() - 1;
  const long flo = filt.window_lo(last, model.support());
  const long fhi = flo + filt.dim(last) - 1;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (rhs[i] == cplx{0.0, 0.0}) continue;
    const long idx = rhs_lo + static_cast<long>(i);
    if (idx < flo || idx > fhi)
      throw std::domain_error(
          "solve_finite_section: rhs support outside the final window");
  }

  SolveReport rep;
  Vector prev;
  long prev_lo = 0;
  bool have_prev = false;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    Vector v(static_cast<std::size_t>(t.dim), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      const long idx = rhs_lo + static_cast<long>(i);
      if (idx >= t.lo && idx < t.lo + t.dim)
        v[static_cast<std::size_t>(idx - t.lo)] = rhs[i];
    }
    SolveRow row;
    row.n = n;
    row.dim = t.dim;
    std::optional<Vector> w = solve(t.matrix, v, tol);
    if (w) {
      row.solved = true;
      Vector r = t.matrix * *w;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] -= v[i];
      row.residual = vec_norm(r);
      if (have_prev) {
        // Compare on the union of windows, treating w as 0 outside its own.
        const long lo = std::min(prev_lo, t.lo);
        const long hi = std::max(prev_lo + static_cast<long>(prev.size()),
                                 t.lo + t.dim) - 1;
        double s = 0.0;
        for (long idx = lo; idx <= hi; ++idx) {
          cplx a{0.0, 0.0}, b{0.0, 0.0};
          if (idx >= prev_lo && idx < prev_lo + static_cast<long>(prev.size()))
            a = prev[static_cast<std::size_t>(idx - prev_lo)];
          if (idx >= t.lo && idx < t.lo + t.dim)
            b = (*w)[static_cast<std::size_t>(idx - t.lo)];
          s += std::norm(a - b);
        }
        row.increment = std::sqrt(s);
      } else {
        row.increment = std::numeric_limits<double>::quiet_NaN();
      }
      prev = *w;
      prev_lo = t.lo;
      have_prev = true;
      rep.any_solved = true;
      rep.final_solution = std::move(*w);
      rep.final_lo = t.lo;
      rep.final_dim = t.dim;
    } else {
      row.increment = std::numeric_limits<double>::quiet_NaN();
    }
    rep.rows.push_back(row);
  }
  return rep;
}

// ---- pseudospectra ----

struct GridSpec {
  double re_min = 0.0, re_max = 0.0, re_step = 1.0;
  double im_min = 0.0, im_max = 0.0, im_step = 1.0;

  long re_count() const { return axis_count(re_min, re_max, re_step); }
  long im_count() const { return axis_count(im_min, im_max, im_step); }

  static long axis_count(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) return 0;
    return static_cast<long>(std::floor((hi - lo) / step + 1.0 + 1e-9));
  }
};

struct PseudospectrumGrid {
  double epsilon = 0.0;
  GridSpec spec;
  std::vector<double> smin;  // index = re_index * im_count + im_index

  double re_at(long ri) const { return spec.re_min + spec.re_step * static_cast<double>(ri); }
  double im_at(long ii) const { return spec.im_min + spec.im_step * static_cast<double>(ii); }
  bool member(std::size_t idx) const { return smin[idx] <= epsilon; }
  std::size_t member_count() const {
    std::size_t c = 0;
    for (double s : smin)
      if (s <= epsilon) ++c;
    return c;
  }
};

inline PseudospectrumGrid pseudospectrum(const Matrix& a, double epsilon,
                                         const GridSpec& spec, unsigned threads = 1,
                                         const Tolerances& tol = default_tolerances()) {
  if (!a.square()) throw std::domain_error("pseudospectrum: matrix not square");
  if (!(epsilon > 0.0)) throw std::domain_error("pseudospectrum: epsilon must be > 0");
  const long rc = spec.re_count(), ic = spec.im_count();
  if (rc <= 0 || ic <= 0) throw std::domain_error("pseudospectrum: empty grid");
  PseudospectrumGrid grid;
  grid.epsilon = epsilon;
  grid.spec = spec;
  grid.smin.assign(static_cast<std::size_t>(rc * ic), 0.0);
  const std::size_t n = a.rows();
  parallel_for(grid.smin.size(), threads, [&](std::size_t idx) {
    const long ri = static_cast<long>(idx) / ic;
    const long ii = static_cast<long>(idx) % ic;
    const cplx lambda{grid.re_at(ri), grid.im_at(ii)};
    Matrix m = a * (-1.0);
    for (std::size_t d = 0; d < n; ++d) m(d, d) += lambda;
    grid.smin[idx] = smallest_singular_value(m, tol);
  });
  return grid;
}

// ---- limsup / liminf of point sets ----

struct SetLimitOptions {
  double delta = 1e-2;            // match tolerance
  double limsup_fraction = 0.20;  // tail hit fraction for limsup membership
  double liminf_fraction = 0.95;  // tail hit fraction for liminf membership
};

struct SetLimitCluster {
  cplx rep;
  double hit_fraction = 0.0;
};

struct SetLimitSummary {
  SetLimitOptions opts;
  std::size_t tail_start = 0;  // index into the sample sequence
  std::vector<SetLimitCluster> clusters;
  std::vector<cplx> limsup_points;
  std::vector<cplx> liminf_points;
};

// Finite-sample surrogate for limsup/liminf of the sets X_n: cluster the tail
// points greedily (deterministic order), then keep representatives hit by at
// least the configured fraction of tail samples.
inline SetLimitSummary set_limits(const std::vector<std::vector<cplx>>& sets,
                                  const SetLimitOptions& opts = {}) {
  if (sets.empty()) throw std::invalid_argument("set_limits: no samples");
  SetLimitSummary out;
  out.opts = opts;
  out.tail_start = sets.size() / 2;
  const std::size_t tail_count = sets.size() - out.tail_start;

  std::vector<cplx> pts;
  for (std::size_t n = out.tail_start; n < sets.size(); ++n)
    for (const cplx& z : sets[n]) pts.push_back(z);
  std::sort(pts.begin(), pts.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  std::vector<cplx> reps;
  for (const cplx& z : pts) {
    bool assigned = false;
    for (const cplx& r : reps) {
      if (std::abs(z - r) <= opts.delta) {
        assigned = true;
        break;
      }
    }
    if (!assigned) reps.push_back(z);
  }

  for (const cplx& r : reps) {
    std::size_t hits = 0;
    for (std::size_t n = out.tail_start; n < sets.size(); ++n) {
      bool hit = false;
      for (const cplx& z : sets[n]) {
        if (std::abs(z - r) <= opts.delta) {
          hit = true;
          break;
        }
      }
      if (hit) ++hits;
    }
    SetLimitCluster c;
    c.rep = r;
    c.hit_fraction = static_cast<double>(hits) / static_cast<double>(tail_count);
    out.clusters.push_back(c);
    if (c.hit_fraction >= opts.limsup_fraction) out.limsup_points.push_back(r);
    if (c.hit_fraction >= opts.liminf_fraction) out.liminf_points.push_back(r);
  }
  return out;
}

inline std::vector<std::vector<cplx>> hermitian_spectra(
    const OperatorModel& model, const Filtration& filt,
    const Tolerances& tol = default_tolerances()) {
  std::vector<std::vector<cplx>> sets;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    if (!is_hermitian(t.matrix, tol))
      throw std::domain_error("hermitian_spectra: truncation is not Hermitian");
    std::vector<double> ev = hermitian_eigenvalues(t.matrix, tol);
    std::vector<cplx> set;
    set.reserve(ev.size());
    for (double v : ev) set.push_back(cplx{v, 0.0});
    sets.push_back(std::move(set));
  }
  return sets;
}

// Hermitian path: X_n = spectra of the truncations.
inline SetLimitSummary spectral_set_limits(const OperatorModel& model,
                                           const Filtration& filt,
                                           const SetLimitOptions& opts = {},
                                           const Tolerances& tol = default_tolerances()) {
  return set_limits(hermitian_spectra(model, filt, tol), opts);
}

// General path: X_n = epsilon-pseudospectrum lattice sets of the truncations.
inline SetLimitSummary pseudospectral_set_limits(
    const OperatorModel& model, const Filtration& filt, double epsilon,
    const GridSpec& spec, const SetLimitOptions& opts = {}, unsigned threads = 1,
    const Tolerances& tol = default_tolerances()) {
  std::vector<std::vector<cplx>> sets;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    PseudospectrumGrid g = pseudospectrum(t.matrix, epsilon, spec, threads, tol);
    const long ic = spec.im_count();
    std::vector<cplx> set;
    for (std::size_t idx = 0; idx < g.smin.size(); ++idx) {
      if (!g.member(idx)) continue;
      const long ri = static_cast<long>(idx) / ic;
      const long ii = static_cast<long>(idx) % ic;
      set.push_back(cplx{g.re_at(ri), g.im_at(ii)});
    }
    sets.push_back(std::move(set));
  }
  return set_limits(sets, opts);
}

// ---- essential points ----

struct EssentialOptions {
  long growth_threshold = 10;  // final count must reach this for every width
};

struct EssentialCandidate {
  double lambda = 0.0;
  // counts[w][n] = N_{d_n}([lambda - widths[w]/2, lambda + widths[w]/2])
  std::vector<std::vector<long>> counts;
  bool essential = false;
};

struct EssentialPointReport {
  std::vector<double> widths;
  std::vector<long> dims;
  std::vector<EssentialCandidate> candidates;
};

inline EssentialPointReport essential_points(
    const OperatorModel& model, const Filtration& filt,
    const std::vector<double>& candidates, const std::vector<double>& widths,
    const EssentialOptions& opts = {},
    const Tolerances& tol = default_tolerances()) {
  if (candidates.empty()) throw std::invalid_argument("essential_points: no candidates");
  if (widths.empty()) throw std::invalid_argument("essential_points: no widths");
  for (double w : widths)
    if (!(w > 0.0)) throw std::invalid_argument("essential_points: widths must be > 0");

  std::vector<std::vector<double>> spectra;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    if (!is_hermitian(t.matrix, tol))
      throw std::domain_error("essential_points: truncation is not Hermitian");
    spectra.push_back(hermitian_eigenvalues(t.matrix, tol));
  }

  EssentialPointReport rep;
  rep.widths = widths;
  rep.dims = filt.dims();
  for (double lambda : candidates) {
    EssentialCandidate cand;
    cand.lambda = lambda;
    bool essential = true;
    for (double w : widths) {
      std::vector<long> row;
      for (const auto& ev : spectra) {
        long c = 0;
        for (double v : ev)
          if (v >= lambda - w / 2.0 && v <= lambda + w / 2.0) ++c;
        row.push_back(c);
      }
      // The final count must reach the threshold with a nondecreasing tail.
      if (row.back() < opts.growth_threshold) essential = false;
      for (std::size_t n = row.size() / 2; n + 1 < row.size(); ++n)
        if (row[n + 1] < row[n]) essential = false;
      cand.counts.push_back(std::move(row));
    }
    cand.essential = essential;
    rep.candidates.push_back(std::move(cand));
  }
  return rep;
}

// ---- Szego functional ----

struct SzegoRow {
  std::size_t n = 0;
  long dim = 0;
  double value = 0.0;  // (1/d_n) sum_i f(lambda_i)
};

struct SzegoReport {
  std::vector<SzegoRow> rows;
  double limit_estimate = 0.0;  // mean over the last quarter
};

inline SzegoReport szego_functional(const OperatorModel& model,
                                    const Filtration& filt,
                                    const std::function<double(double)>& f,
                                    const Tolerances& tol = default_tolerances()) {
  SzegoReport rep;
  for (std::size_t n = 0; n < filt.size(); ++n) {
    Truncation t = truncate(model, filt, n);
    if (!is_hermitian(t.matrix, tol))
      throw std::domain_error("szego_functional: truncation is not Hermitian");
    std::vector<double> ev = hermitian_eigenvalues(t.matrix, tol);
    double s = 0.0;
    for (double v : ev) s += f(v);
    rep.rows.push_back({n, t.dim, s / static_cast<double>(t.dim)});
  }
  const std::size_t q = std::max<std::size_t>(1, rep.rows.size() / 4);
  double acc = 0.0;
  for (std::size_t i = rep.rows.size() - q; i < rep.rows.size(); ++i)
    acc += rep.rows[i].value;
  rep.limit_estimate = acc / static_cast<double>(q);
  return rep;
}

}  // namespace fsq
