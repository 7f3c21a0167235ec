#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#include "fsq/fsq.hpp"
#include "oracles.hpp"

// Standalone acceptance gate: ten numbered criteria, one pass/fail line each,
// exit 1 if any fails. Every tolerance below is part of the contract.

namespace {

using Clock = std::chrono::steady_clock;
using fsq::cplx;
using fsq::Matrix;

int g_failures = 0;

std::string eng(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

struct Result {
  bool ok = false;
  std::string detail;
};

template <typename Fn>
void criterion(int index, const char* label, double budget, Fn body) {
  const auto t0 = Clock::now();
  Result res;
  try {
    res = body();
  } catch (const std::exception& e) {
    res.ok = false;
    res.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool ok = res.ok && secs < budget;
  std::printf("[%s] criterion %2d: %s (%s; %.2fs of %.0fs budget)\n",
              ok ? "PASS" : "FAIL", index, label, res.detail.c_str(), secs,
              budget);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

fsq::OperatorModel shift_model(fsq::Support support) {
  fsq::WeightedShiftKind kind;
  kind.weights = fsq::PeriodicRule{{cplx{1.0, 0.0}}};
  kind.direction = 1;
  return fsq::OperatorModel(kind, support, 1, 1.0, "shift");
}

fsq::OperatorModel free_jacobi() {
  fsq::ToeplitzKind kind;
  kind.coefficients = {cplx{1.0, 0.0}, cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  return fsq::OperatorModel(kind, fsq::Support::one_sided, 1, 1.0, "free-jacobi");
}

fsq::OperatorModel step_diagonal() {
  fsq::TableRule rule;
  rule.values = {cplx{0.0, 0.0}};
  rule.fallback = cplx{1.0, 0.0};
  return fsq::OperatorModel(fsq::DiagonalKind{rule}, fsq::Support::one_sided, 0,
                            1.0, "step-diagonal");
}

}  // namespace

int main() {
  criterion(1, "commutator identities on 500 banded models", 10.0, [] {
    const fsq::VerifyReport rep = fsq::verify_commutator(500, 101, 1e-10);
    Result r;
    r.ok = rep.pass;
    r.detail = "worst formula mismatch " + eng(rep.worst_gap) + " <= 1e-10";
    return r;
  });

  criterion(2, "Powers-Stormer on 10^4 positive pairs", 30.0, [] {
    const fsq::VerifyReport rep = fsq::verify_powers_stormer(10000, 202, 8, 1e-10);
    Result r;
    r.ok = rep.pass;
    r.detail = "worst lhs-rhs " + eng(rep.worst_gap) + " <= 1e-10";
    return r;
  });

  criterion(3, "Ozawa model trace identity and defect bound", 60.0, [] {
    const fsq::VerifyReport rep = fsq::verify_ozawa(1000, 303, 1e-12, 1e-9);
    Result r;
    r.ok = rep.pass;
    r.detail = "identity gap " + eng(rep.stats.at("worst_identity_gap")) +
               " <= 1e-12, defect margin " +
               eng(rep.stats.at("worst_defect_margin")) + " <= 1e-9";
    return r;
  });

  criterion(4, "compression estimate on 10^3 corners", 600.0, [] {
    const fsq::VerifyReport rep = fsq::verify_estimate(1000, 404, 10, 1e-10);
    Result r;
    r.ok = rep.pass && rep.violations == 0;
    r.detail = "violations " + std::to_string(rep.violations) + ", worst gap " +
               eng(rep.worst_gap);
    return r;
  });

  criterion(5, "worked set-limit example X_n = {(-1)^n + 1/n, 0}", 600.0, [] {
    std::vector<std::vector<cplx>> sets;
    for (int n = 1; n <= 200; ++n) {
      const double sign = n % 2 == 0 ? 1.0 : -1.0;
      sets.push_back({cplx{sign + 1.0 / n, 0.0}, cplx{0.0, 0.0}});
    }
    const fsq::SetLimitSummary s = fsq::set_limits(sets);  // delta = 1e-2
    Result r;
    r.ok = s.liminf_points.size() == 1 && std::abs(s.liminf_points[0]) <= 1e-12 &&
           s.limsup_points.size() == 3 &&
           std::abs(s.limsup_points[0] - cplx{-1.0, 0.0}) <= 1e-2 &&
           std::abs(s.limsup_points[1]) <= 1e-12 &&
           std::abs(s.limsup_points[2] - cplx{1.0, 0.0}) <= 1e-2;
    r.detail = "liminf {0} (" + std::to_string(s.liminf_points.size()) +
               " pt), limsup ~{-1,0,1} (" +
               std::to_string(s.limsup_points.size()) + " pts)";
    return r;
  });

  criterion(6, "shift truncations singular; eps-pseudospectrum fills the disk",
            120.0, [] {
    const fsq::Filtration scan = fsq::Filtration::arithmetic(2, 3, 14);
    bool all_singular = true;
    for (fsq::Support s : {fsq::Support::one_sided, fsq::Support::two_sided}) {
      const fsq::StabilityReport rep =
          fsq::stability_scan(shift_model(s), scan, 1e8);
      if (rep.stable) all_singular = false;
      for (const auto& row : rep.rows)
        if (row.invertible) all_singular = false;
    }

    const fsq::Filtration filt({200});
    const fsq::Truncation t = fsq::truncate(shift_model(fsq::Support::one_sided),
                                            filt, 0);
    fsq::GridSpec grid;
    grid.re_min = grid.im_min = -1.0;
    grid.re_max = grid.im_max = 1.0;
    grid.re_step = grid.im_step = 0.05;
    const fsq::PseudospectrumGrid g = fsq::pseudospectrum(
        t.matrix, 0.05, grid, fsq::resolve_threads(0));
    const long ic = grid.im_count();
    long inside = 0, covered = 0;
    for (long ri = 0; ri < grid.re_count(); ++ri)
      for (long ii = 0; ii < ic; ++ii) {
        const cplx lambda{g.re_at(ri), g.im_at(ii)};
        if (std::abs(lambda) > 0.8 + 1e-12) continue;
        ++inside;
        if (g.member(static_cast<std::size_t>(ri * ic + ii))) ++covered;
      }
    const double coverage =
        static_cast<double>(covered) / static_cast<double>(inside);
    Result r;
    r.ok = all_singular && coverage >= 0.95;
    std::ostringstream d;
    d << "all truncations singular: " << (all_singular ? "yes" : "no")
      << ", disk coverage " << covered << "/" << inside;
    r.detail = d.str();
    return r;
  });

  criterion(7, "Szego functional for a_{+-1} = 1, f = x^2", 60.0, [] {
    const fsq::SzegoReport rep = fsq::szego_functional(
        free_jacobi(), fsq::Filtration::arithmetic(50, 50, 10),
        [](double x) { return x * x; });
    const double s500 = rep.rows.back().value;
    const double integral =
        oracle::simpson([](double t) { return 4.0 * std::cos(t) * std::cos(t); },
                        0.0, 2.0 * 3.14159265358979323846, 4000) /
        (2.0 * 3.14159265358979323846);
    Result r;
    r.ok = std::abs(s500 - 2.0) <= 0.05 && std::abs(integral - 2.0) <= 1e-10 &&
           std::abs(s500 - 1.996) <= 1e-9;  // closed form 2(n-1)/n at n = 500
    r.detail = "s_500 = " + eng(s500) + ", quadrature oracle " + eng(integral);
    return r;
  });

  criterion(8, "essential points of diag(0,1,1,...) with direct recounts",
            600.0, [] {
    const fsq::OperatorModel model = step_diagonal();
    const fsq::Filtration filt = fsq::Filtration::arithmetic(5, 5, 10);
    const std::vector<double> widths{0.5, 0.1};
    const fsq::EssentialPointReport rep =
        fsq::essential_points(model, filt, {0.0, 1.0}, widths);
    bool tables_match = true;
    for (std::size_t c = 0; c < rep.candidates.size(); ++c) {
      const double lambda = rep.candidates[c].lambda;
      for (std::size_t w = 0; w < widths.size(); ++w)
        for (std::size_t i = 0; i < filt.size(); ++i) {
          const fsq::Truncation t = fsq::truncate(model, filt, i);
          long direct = 0;
          for (double v : fsq::hermitian_eigenvalues(t.matrix))
            if (v >= lambda - widths[w] / 2.0 && v <= lambda + widths[w] / 2.0)
              ++direct;
          // Closed form: one eigenvalue 0, dim - 1 eigenvalues 1.
          const long closed = lambda == 0.0 ? 1 : t.dim - 1;
          if (rep.candidates[c].counts[w][i] != direct || direct != closed)
            tables_match = false;
        }
    }
    Result r;
    r.ok = tables_match && !rep.candidates[0].essential &&
           rep.candidates[1].essential;
    r.detail = std::string("essential(1) ") +
               (rep.candidates[1].essential ? "yes" : "no") +
               ", essential(0) " +
               (rep.candidates[0].essential ? "yes" : "no") +
               ", tables match: " + (tables_match ? "yes" : "no");
    return r;
  });

  criterion(9, "Sanov quotient traces converge to delta_e", 5.0, [] {
    std::vector<std::string> words{""};
    for (auto& w : fsq::reduced_words_up_to(3)) words.push_back(std::move(w));
    const fsq::TraceTable table =
        fsq::trace_convergence_table(words, fsq::primes_up_to(200));
    bool rows_ok = table.converges_to_delta_e;
    for (const auto& row : table.rows) {
      if (row.is_identity_word) {
        for (int t : row.traces)
          if (t != 1) rows_ok = false;
      } else if (!row.eventually_zero) {
        rows_ok = false;
      }
    }
    Result r;
    r.ok = rows_ok && words.size() == 53;
    r.detail = "52 reduced words (all words of length <= 3) + identity over " +
               std::to_string(table.primes.size()) + " primes";
    return r;
  });

  criterion(10, "stage plan k = 2, J = 4 and the 2k/n trace bound", 30.0, [] {
    const fsq::StagePlan plan = fsq::plan_stages({2, 2, 2, 2});
    const fsq::StagePlanCheck chk = fsq::verify_stage_plan(plan);
    const bool plan_ok = chk.inequalities_hold && chk.minimal &&
                         chk.lambda_bounds_hold &&
                         plan.n == std::vector<fsq::cpp_int>{5, 41, 3281,
                                                             21523361};
    const std::size_t k = 2, n = 32;
    const double eps = static_cast<double>(k) / static_cast<double>(n);
    fsq::Rep id = [](const Matrix& y) { return y; };
    fsq::Rng root(505);
    double worst_residual = 0.0;
    bool trace_ok = true;
    for (int t = 0; t < 200; ++t) {
      fsq::Rng r = root.child(static_cast<std::uint64_t>(t));
      const Matrix x = r.gaussian_matrix(2, 2);
      const Matrix y = r.gaussian_matrix(2, 2);
      const Matrix rx = fsq::connecting_map(x, id, k, n);
      const Matrix ry = fsq::connecting_map(y, id, k, n);
      worst_residual = std::max(
          worst_residual,
          fsq::operator_norm(rx * ry - fsq::connecting_map(x * y, id, k, n)));
      worst_residual = std::max(
          worst_residual,
          fsq::operator_norm(rx.adjoint() -
                             fsq::connecting_map(x.adjoint(), id, k, n)));
      const double defect =
          std::abs(fsq::connecting_map_trace(rx) - fsq::normalized_trace(x));
      if (!(defect < 2.0 * eps * fsq::operator_norm(x))) trace_ok = false;
    }
    Result r;
    r.ok = plan_ok && worst_residual <= 1e-12 && trace_ok;
    r.detail = "plan exact: " + std::string(plan_ok ? "yes" : "no") +
               ", worst residual " + eng(worst_residual) +
               ", trace bound: " + (trace_ok ? "strict" : "violated");
    return r;
  });

  std::printf("acceptance: %d/10 criteria passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
