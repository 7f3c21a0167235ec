#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsq/complex_matrix.hpp"
#include "fsq/finite_section.hpp"
#include "fsq/inductive_limit.hpp"
#include "fsq/linalg.hpp"
#include "fsq/operator_model.hpp"
#include "fsq/ozawa.hpp"
#include "fsq/rng.hpp"
#include "fsq/sanov.hpp"
#include "fsq/ucp.hpp"

// Seeded invariant suites behind `fsq verify`. Every suite draws its trials
// from per-trial child streams, so reports are reproducible and independent
// of evaluation order.

namespace fsq {

struct VerifyReport {
  std::string suite;
  long trials = 0;
  std::uint64_t seed = 0;
  long violations = 0;
  double worst_gap = 0.0;  // suite-specific: largest margin toward violation
  std::map<std::string, double> stats;
  bool pass = false;
};

namespace detail {

inline void finish(VerifyReport& rep) { rep.pass = rep.violations == 0; }

inline SequenceRule random_rule(Rng& r) {
  const long pick = r.uniform_int(0, 2);
  if (pick == 0) {
    PeriodicRule rule;
    const long len = r.uniform_int(1, 4);
    for (long i = 0; i < len; ++i) rule.values.push_back(r.cgaussian());
    return rule;
  }
  if (pick == 1) {
    TableRule rule;
    const long len = r.uniform_int(1, 6);
    for (long i = 0; i < len; ++i) rule.values.push_back(r.cgaussian());
    rule.fallback = r.cgaussian();
    return rule;
  }
  HarmonicRule rule;
  rule.a = r.gaussian();
  rule.b = r.gaussian();
  return rule;
}

inline double rule_bound(const SequenceRule& rule) {
  double b = 0.0;
  if (const auto* p = std::get_if<PeriodicRule>(&rule)) {
    for (const auto& v : p->values) b = std::max(b, std::abs(v));
  } else if (const auto* t = std::get_if<TableRule>(&rule)) {
    for (const auto& v : t->values) b = std::max(b, std::abs(v));
    b = std::max(b, std::abs(t->fallback));
  } else {
    const auto& h = std::get<HarmonicRule>(rule);
    b = std::abs(h.a) + std::abs(h.b);
  }
  return b;
}

// A random banded model covering every kind; entries O(1).
inline OperatorModel random_model(Rng& r) {
  const Support support = r.uniform_int(0, 1) == 0 ? Support::one_sided : Support::two_sided;
  const long pick = r.uniform_int(0, 3);
  if (pick == 0) {
    const long band = r.uniform_int(0, 3);
    ToeplitzKind kind;
    double bound = 0.0;
    for (long i = 0; i < 2 * band + 1; ++i) {
      kind.coefficients.push_back(r.cgaussian());
      bound = std::max(bound, std::abs(kind.coefficients.back()));
    }
    return OperatorModel(kind, support, band, bound, "fuzz-toeplitz");
  }
  if (pick == 1) {
    WeightedShiftKind kind;
    kind.weights = random_rule(r);
    kind.direction = r.uniform_int(0, 1) == 0 ? 1 : -1;
    return OperatorModel(kind, support, 1, rule_bound(kind.weights), "fuzz-shift");
  }
  if (pick == 2) {
    DiagonalKind kind;
    kind.diagonal = random_rule(r);
    return OperatorModel(kind, support, 0, rule_bound(kind.diagonal), "fuzz-diagonal");
  }
  DirectSumKind kind;
  const long blocks = r.uniform_int(1, 2);
  long maxdim = 1;
  double bound = 0.0;
  for (long b = 0; b < blocks; ++b) {
    const long s = r.uniform_int(1, 3);
    maxdim = std::max(maxdim, s);
    Matrix blk = r.gaussian_matrix(static_cast<std::size_t>(s), static_cast<std::size_t>(s));
    bound = std::max(bound, max_abs(blk));
    kind.blocks.push_back(std::move(blk));
  }
  return OperatorModel(kind, support, maxdim - 1, bound, "fuzz-direct-sum");
}

}  // namespace detail

// Powers-Stormer: ||a - b||_HS^2 <= ||a^2 - b^2||_1 on random psd pairs.
inline VerifyReport verify_powers_stormer(long trials, std::uint64_t seed,
                                          long max_dim = 8, double slack = 1e-10) {
  VerifyReport rep;
  rep.suite = "powers-stormer";
  rep.trials = trials;
  rep.seed = seed;
  rep.worst_gap = -1e300;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    const std::size_t d = static_cast<std::size_t>(r.uniform_int(1, max_dim));
    const double scale = std::exp(r.uniform() * 4.0 - 2.0);
    const Matrix a = r.psd_matrix(d) * scale;
    const Matrix b = r.psd_matrix(d) * scale;
    const PowersStormer ps = powers_stormer_gap(a, b);
    const double gap = ps.lhs - ps.rhs;  // must stay <= slack
    rep.worst_gap = std::max(rep.worst_gap, gap);
    if (gap > slack) ++rep.violations;
  }
  rep.stats["max_dim"] = static_cast<double>(max_dim);
  detail::finish(rep);
  return rep;
}

// Ozawa model: exact trace identity and the hypertrace defect bound.
inline VerifyReport verify_ozawa(long trials, std::uint64_t seed,
                                 double identity_tol = 1e-12,
                                 double defect_slack = 1e-9) {
  VerifyReport rep;
  rep.suite = "ozawa";
  rep.trials = trials;
  rep.seed = seed;
  double worst_identity = 0.0, worst_defect = -1e300;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    RationalDensity h;
    const long d = r.uniform_int(2, 6);
    const long k = r.uniform_int(1, d);
    h.q = r.uniform_int(k, 24);
    h.p.assign(static_cast<std::size_t>(k), 1);
    for (long extra = h.q - k; extra > 0; --extra)
      ++h.p[static_cast<std::size_t>(r.uniform_int(0, k - 1))];
    h.eigenvectors = r.orthonormal_columns(static_cast<std::size_t>(d),
                                           static_cast<std::size_t>(k));
    OzawaModel model(h);

    const Matrix x = r.gaussian_matrix(static_cast<std::size_t>(d),
                                       static_cast<std::size_t>(d));
    const double gap = std::abs(model.model_trace(x) - model.target_trace(x));
    worst_identity = std::max(worst_identity, gap);
    if (gap > identity_tol) ++rep.violations;

    const Matrix u = r.haar_unitary(static_cast<std::size_t>(d));
    const OzawaModel::DefectBound db = model.hypertrace_defect(u);
    const double margin = db.lhs - db.rhs;  // must stay <= defect_slack
    worst_defect = std::max(worst_defect, margin);
    if (margin > defect_slack) ++rep.violations;
  }
  rep.worst_gap = worst_identity;
  rep.stats["worst_identity_gap"] = worst_identity;
  rep.stats["worst_defect_margin"] = worst_defect;
  detail::finish(rep);
  return rep;
}

// Compression multiplicativity bound on fuzzed corners.
inline VerifyReport verify_estimate(long trials, std::uint64_t seed,
                                    long max_dim = 10, double slack = 1e-10) {
  VerifyReport rep;
  rep.suite = "estimate";
  rep.trials = trials;
  rep.seed = seed;
  rep.worst_gap = -1e300;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    const std::size_t d = static_cast<std::size_t>(r.uniform_int(2, max_dim));
    const std::size_t rank = static_cast<std::size_t>(r.uniform_int(1, static_cast<long>(d)));
    const Matrix p = r.projection(d, rank);
    const Matrix a = r.gaussian_matrix(d, d);
    const Matrix b = r.gaussian_matrix(d, d);
    const CompressionDefect cd = compression_defect(p, a, b);
    const double gap = cd.lhs - cd.rhs;  // must stay <= slack
    rep.worst_gap = std::max(rep.worst_gap, gap);
    if (gap > slack) ++rep.violations;
  }
  rep.stats["max_dim"] = static_cast<double>(max_dim);
  detail::finish(rep);
  return rep;
}

// Both commutator-defect identities on random banded models.
inline VerifyReport verify_commutator(long trials, std::uint64_t seed,
                                      double tol = 1e-10) {
  VerifyReport rep;
  rep.suite = "commutator";
  rep.trials = trials;
  rep.seed = seed;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    const OperatorModel model = detail::random_model(r);
    const Filtration filt = Filtration::arithmetic(r.uniform_int(4, 8),
                                                   r.uniform_int(3, 7), 3);
    const CommutatorDefects d =
        commutator_defects(model, filt, filt.size() - 1);
    const double mismatch =
        std::max(std::abs(d.opnorm_direct - d.opnorm_identity),
                 std::abs(d.hs_direct - d.hs_identity));
    rep.worst_gap = std::max(rep.worst_gap, mismatch);
    if (mismatch > tol) ++rep.violations;
  }
  detail::finish(rep);
  return rep;
}

// Conditional expectation: idempotent, trace preserving, B-bimodule map,
// and a contraction in operator norm.
inline VerifyReport verify_conditional_expectation(long trials, std::uint64_t seed,
                                                   double tol = 1e-10) {
  VerifyReport rep;
  rep.suite = "conditional-expectation";
  rep.trials = trials;
  rep.seed = seed;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    MatrixUnits b;
    const long shape = r.uniform_int(0, 2);
    if (shape == 0) {
      b = diagonal_units(static_cast<std::size_t>(r.uniform_int(1, 6)));
    } else if (shape == 1) {
      b = full_units(static_cast<std::size_t>(r.uniform_int(1, 4)));
    } else {
      b = tensor_units(static_cast<std::size_t>(r.uniform_int(1, 3)),
                       static_cast<std::size_t>(r.uniform_int(1, 3)));
    }
    const std::vector<double> tau = uniform_trace_weights(b.ambient);
    const Matrix x = r.gaussian_matrix(b.ambient, b.ambient);
    const Matrix fx = conditional_expectation(x, b, tau);

    double worst = max_abs_diff(conditional_expectation(fx, b, tau), fx);
    worst = std::max(worst,
                     std::abs(weighted_trace(fx, tau) - weighted_trace(x, tau)));
    const auto& s = b.summands[static_cast<std::size_t>(
        r.uniform_int(0, static_cast<long>(b.summands.size()) - 1))];
    const std::size_t i = static_cast<std::size_t>(r.uniform_int(0, static_cast<long>(s.m) - 1));
    const std::size_t j = static_cast<std::size_t>(r.uniform_int(0, static_cast<long>(s.m) - 1));
    const Matrix& e = s.unit(i, j);
    worst = std::max(worst, max_abs_diff(conditional_expectation(e * x, b, tau),
                                         e * fx));
    worst = std::max(worst, max_abs_diff(conditional_expectation(x * e, b, tau),
                                         fx * e));
    const double norm_gap = operator_norm(fx) - operator_norm(x);
    worst = std::max(worst, norm_gap);

    rep.worst_gap = std::max(rep.worst_gap, worst);
    if (worst > tol) ++rep.violations;
  }
  detail::finish(rep);
  return rep;
}

// Connecting map: *-homomorphism properties, the 2 k/n trace bound, and the
// commuting-corner structure.
inline VerifyReport verify_connecting_map(long trials, std::uint64_t seed,
                                          double tol = 1e-12) {
  VerifyReport rep;
  rep.suite = "connecting-map";
  rep.trials = trials;
  rep.seed = seed;
  Rng root(seed);
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    const std::size_t m = static_cast<std::size_t>(r.uniform_int(2, 3));
    const std::size_t mult = static_cast<std::size_t>(r.uniform_int(1, 3));
    const std::size_t k = m * mult;
    const std::size_t n = k + static_cast<std::size_t>(r.uniform_int(0, 8));
    Rep pi = [mult](const Matrix& y) { return kron(y, Matrix::identity(mult)); };
    const Matrix x = r.gaussian_matrix(m, m);
    const Matrix y = r.gaussian_matrix(m, m);
    const Matrix rx = connecting_map(x, pi, k, n);
    const Matrix ry = connecting_map(y, pi, k, n);

    double worst = max_abs_diff(connecting_map(x * y, pi, k, n), rx * ry);
    worst = std::max(worst, max_abs_diff(connecting_map(x.adjoint(), pi, k, n),
                                         rx.adjoint()));
    worst = std::max(
        worst, max_abs_diff(connecting_map(Matrix::identity(m), pi, k, n),
                            Matrix::identity(m * n)));
    rep.worst_gap = std::max(rep.worst_gap, worst);
    if (worst > tol) ++rep.violations;

    const double eps = static_cast<double>(k) / static_cast<double>(n);
    const double defect = std::abs(normalized_trace(rx) - normalized_trace(x));
    if (defect > 2.0 * eps * operator_norm(x) + tol) ++rep.violations;

    const CornerReport corner = commuting_corner_check(x, pi, k, n);
    rep.stats["worst_corner_commutator"] =
        std::max(rep.stats["worst_corner_commutator"], corner.commutator_norm);
    rep.stats["worst_corner_distance"] =
        std::max(rep.stats["worst_corner_distance"], corner.span_distance);
    if (corner.commutator_norm > 1e-10 || corner.span_distance > 1e-10)
      ++rep.violations;
  }
  detail::finish(rep);
  return rep;
}

// Exact stage plans: strict inequalities, minimality, lambda bounds.
inline VerifyReport verify_stage_plan(long stages, std::uint64_t seed = 0) {
  if (stages < 1) throw std::invalid_argument("verify_stage_plan: stages must be >= 1");
  VerifyReport rep;
  rep.suite = "stage-plan";
  rep.seed = seed;
  std::vector<std::vector<long>> patterns;
  const std::size_t js = static_cast<std::size_t>(stages);
  patterns.push_back(std::vector<long>(js, 1));
  patterns.push_back(std::vector<long>(js, 2));
  std::vector<long> ramp, alt;
  for (long j = 1; j <= stages; ++j) {
    ramp.push_back(j);
    alt.push_back(j % 2 == 1 ? 1 : 3);
  }
  patterns.push_back(ramp);
  patterns.push_back(alt);
  for (const auto& k : patterns) {
    ++rep.trials;
    const StagePlan plan = plan_stages(k);
    const StagePlanCheck chk = verify_stage_plan(plan);
    if (!chk.inequalities_hold || !chk.minimal || !chk.lambda_bounds_hold)
      ++rep.violations;
    for (std::size_t i = 0; i <= plan.stages(); ++i)
      if (plan.lambda(i, i) != 0) ++rep.violations;
    rep.stats["max_bits"] =
        std::max(rep.stats["max_bits"],
                 static_cast<double>(boost::multiprecision::msb(plan.n.back()) + 1));
  }
  // A scaled schedule must still satisfy its own inequalities.
  {
    ++rep.trials;
    std::vector<cpp_rational> eps;
    for (long j = 1; j <= stages; ++j) eps.emplace_back(1, 3 * j);
    const StagePlan plan = plan_stages_scaled(std::vector<long>(js, 2), eps);
    const StagePlanCheck chk = verify_stage_plan(plan);
    if (!chk.inequalities_hold || !chk.minimal) ++rep.violations;
  }
  detail::finish(rep);
  return rep;
}

// Sanov evaluation: homomorphism / reduction / inverse coherence mod p.
inline VerifyReport verify_sanov(long trials, std::uint64_t seed,
                                 long prime_bound = 200) {
  VerifyReport rep;
  rep.suite = "sanov";
  rep.trials = trials;
  rep.seed = seed;
  const std::vector<long> ps = primes_up_to(prime_bound);
  Rng root(seed);
  const char letters[4] = {'A', 'a', 'B', 'b'};
  auto random_word = [&](Rng& r) {
    std::string w;
    while (true) {
      w.clear();
      const long len = r.uniform_int(1, 5);
      for (long i = 0; i < len; ++i) w += letters[r.uniform_int(0, 3)];
      w = reduce_word(w);
      if (!w.empty()) return w;
    }
  };
  for (long t = 0; t < trials; ++t) {
    Rng r = root.child(static_cast<std::uint64_t>(t));
    const long p = ps[static_cast<std::size_t>(
        r.uniform_int(0, static_cast<long>(ps.size()) - 1))];
    const std::string w1 = random_word(r);
    const std::string w2 = random_word(r);

    const Mat2p prod = mat2p_mul(eval_word(w1, p), eval_word(w2, p), p);
    const Mat2p cat = eval_word(w1 + w2, p);
    const Mat2p red = eval_word(reduce_word(w1 + w2), p);
    if (prod.a != cat.a || prod.b != cat.b || prod.c != cat.c || prod.d != cat.d)
      ++rep.violations;
    if (prod.a != red.a || prod.b != red.b || prod.c != red.c || prod.d != red.d)
      ++rep.violations;

    const Mat2p inv = mat2p_mul(eval_word(w1, p), eval_word(invert_word(w1), p), p);
    if (!inv.is_identity()) ++rep.violations;
    if (sanov_trace(w1, p).trace != sanov_trace(invert_word(w1), p).trace)
      ++rep.violations;
  }
  rep.stats["primes"] = static_cast<double>(ps.size());
  detail::finish(rep);
  return rep;
}

// Dispatcher used by the CLI; unknown names raise invalid_argument (usage).
inline VerifyReport run_verify_suite(const std::string& name, long trials,
                                     std::uint64_t seed, long stages = 5) {
  if (name == "powers-stormer") return verify_powers_stormer(trials, seed);
  if (name == "ozawa") return verify_ozawa(trials, seed);
  if (name == "estimate") return verify_estimate(trials, seed);
  if (name == "commutator") return verify_commutator(trials, seed);
  if (name == "conditional-expectation")
    return verify_conditional_expectation(trials, seed);
  if (name == "connecting-map") return verify_connecting_map(trials, seed);
  if (name == "stage-plan") return verify_stage_plan(stages, seed);
  if (name == "sanov") return verify_sanov(trials, seed);
  throw std::invalid_argument("unknown verify suite: " + name);
}

}  // namespace fsq
