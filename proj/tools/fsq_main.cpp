#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fsq/fsq.hpp"

// Exit codes: 0 success, 1 verification failure, 2 usage, 3 domain error.

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* flag) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "cannot parse number '" + s + "'");
  }
}

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_double(part, flag));
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

// "lo:hi:step" (square grid) or "relo:rehi:restep:imlo:imhi:imstep".
fsq::GridSpec parse_grid(const std::string& s) {
  const auto parts = split(s, ':');
  fsq::GridSpec g;
  if (parts.size() == 3) {
    g.re_min = parse_double(parts[0], "--grid");
    g.re_max = parse_double(parts[1], "--grid");
    g.re_step = parse_double(parts[2], "--grid");
    g.im_min = g.re_min;
    g.im_max = g.re_max;
    g.im_step = g.re_step;
  } else if (parts.size() == 6) {
    g.re_min = parse_double(parts[0], "--grid");
    g.re_max = parse_double(parts[1], "--grid");
    g.re_step = parse_double(parts[2], "--grid");
    g.im_min = parse_double(parts[3], "--grid");
    g.im_max = parse_double(parts[4], "--grid");
    g.im_step = parse_double(parts[5], "--grid");
  } else {
    throw CLI::ValidationError("--grid", "expected lo:hi:step or 6-part form");
  }
  if (g.re_count() <= 0 || g.im_count() <= 0)
    throw CLI::ValidationError("--grid", "empty grid");
  return g;
}

// "id" | "x2" | "one" | "poly:c0,c1,..."
std::function<double(double)> parse_f(const std::string& s) {
  if (s == "id") return [](double x) { return x; };
  if (s == "x2") return [](double x) { return x * x; };
  if (s == "one") return [](double) { return 1.0; };
  if (s.rfind("poly:", 0) == 0) {
    const std::vector<double> c = parse_double_list(s.substr(5), "--f");
    return [c](double x) {
      double acc = 0.0, xp = 1.0;
      for (double ck : c) {
        acc += ck * xp;
        xp *= x;
      }
      return acc;
    };
  }
  throw CLI::ValidationError("--f", "expected id|x2|one|poly:c0,c1,...");
}

fsq::Filtration make_filtration(long nstart, long nstep, long nmax) {
  if (nstart < 1 || nstep < 1 || nmax < nstart)
    throw CLI::ValidationError("--nmax", "need 1 <= nstart <= nmax, nstep >= 1");
  std::vector<long> dims;
  for (long d = nstart; d <= nmax; d += nstep) dims.push_back(d);
  return fsq::Filtration(std::move(dims));
}

void emit(const std::string& out_base, const fsq::MetaList& meta,
          const std::vector<std::string>& columns,
          const std::vector<std::vector<std::string>>& rows,
          nlohmann::json summary) {
  summary["meta"] = fsq::meta_json(meta);
  const std::string doc = fsq::json_document(summary);
  if (out_base.empty()) {
    std::cout << doc;
    return;
  }
  if (!columns.empty())
    fsq::write_text_file(out_base + ".csv", fsq::csv_document(meta, columns, rows));
  fsq::write_text_file(out_base + ".json", doc);
}

std::string fmt(double v) { return fsq::format_double(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fsq: finite-section spectral approximation and trace-model laboratory"};
  app.require_subcommand(1);
  int exit_status = 0;

  // Shared option storage (one subcommand runs per process).
  std::string model_path, out_base, grid_str, f_str = "id", rhs_str, words_str,
              candidates_str, widths_str, suite;
  long n = 0, nstart = 2, nstep = 1, nmax = 0, trials = 500, stages = 5,
       pmax = 200, rhs_lo = 0;
  double eps = 0.0, cap = 1e8, delta = 1e-2;
  std::uint64_t seed = 0;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool with_model) {
    if (with_model)
      cmd->add_option("--model", model_path, "model JSON file")->required();
    cmd->add_option("--out", out_base, "output basename (BASE.csv, BASE.json)");
    cmd->add_option("--seed", seed, "run seed (echoed in outputs)");
    cmd->add_option("--threads", threads,
                    "worker threads (0 = FSQ_THREADS or hardware)");
  };

  // ---- pseudospec ----
  auto* ps = app.add_subcommand("pseudospec",
                                "epsilon-pseudospectrum of one finite section");
  add_common(ps, true);
  ps->add_option("--n", n, "truncation dimension")->required();
  ps->add_option("--eps", eps, "epsilon > 0")->required();
  ps->add_option("--grid", grid_str, "lo:hi:step or 6-part grid")->required();
  ps->callback([&]() {
    const fsq::OperatorModel model = fsq::load_model_file(model_path);
    const fsq::GridSpec grid = parse_grid(grid_str);
    const fsq::Filtration filt({n});
    const fsq::Truncation trunc = fsq::truncate(model, filt, 0);
    const fsq::PseudospectrumGrid g = fsq::pseudospectrum(
        trunc.matrix, eps, grid, fsq::resolve_threads(threads));
    fsq::MetaList meta = fsq::standard_meta("pseudospec", seed);
    meta.emplace_back("model", model_path);
    meta.emplace_back("n", std::to_string(n));
    meta.emplace_back("eps", fmt(eps));
    meta.emplace_back("grid", grid_str);
    std::vector<std::vector<std::string>> rows;
    const long ic = grid.im_count();
    for (long ri = 0; ri < grid.re_count(); ++ri)
      for (long ii = 0; ii < ic; ++ii) {
        const std::size_t idx = static_cast<std::size_t>(ri * ic + ii);
        rows.push_back({fmt(g.re_at(ri)), fmt(g.im_at(ii)), fmt(g.smin[idx]),
                        g.member(idx) ? "1" : "0"});
      }
    nlohmann::json summary;
    summary["epsilon"] = eps;
    summary["n"] = n;
    summary["re_count"] = grid.re_count();
    summary["im_count"] = grid.im_count();
    summary["member_count"] = g.member_count();
    emit(out_base, meta, {"re", "im", "smin", "member"}, rows, summary);
  });

  // ---- verify ----
  auto* vf = app.add_subcommand("verify", "seeded invariant suites");
  vf->add_option("suite", suite, "suite name")
      ->required()
      ->check(CLI::IsMember({"powers-stormer", "ozawa", "estimate", "commutator",
                             "conditional-expectation", "connecting-map",
                             "stage-plan", "sanov"}));
  vf->add_option("--trials", trials, "fuzz trials");
  vf->add_option("--stages", stages, "stage count (stage-plan)");
  add_common(vf, false);
  vf->callback([&]() {
    const fsq::VerifyReport rep =
        fsq::run_verify_suite(suite, trials, seed, stages);
    fsq::MetaList meta = fsq::standard_meta("verify", seed);
    meta.emplace_back("suite", suite);
    meta.emplace_back("trials", std::to_string(rep.trials));
    if (suite == "stage-plan")
      meta.emplace_back("stages", std::to_string(stages));
    nlohmann::json summary = fsq::verify_report_json(rep);
    if (suite == "stage-plan")
      summary["example_plan"] = fsq::stage_plan_json(
          fsq::plan_stages(std::vector<long>(static_cast<std::size_t>(stages), 2)));
    emit(out_base, meta, {}, {}, summary);
    if (!rep.pass) exit_status = 1;
  });

  // ---- szego ----
  auto* sz = app.add_subcommand("szego",
                                "Szego eigenvalue-distribution functional");
  add_common(sz, true);
  sz->add_option("--nmax", nmax, "largest truncation dimension")->required();
  sz->add_option("--nstart", nstart, "first truncation dimension");
  sz->add_option("--nstep", nstep, "dimension step");
  sz->add_option("--f", f_str, "test function: id|x2|one|poly:c0,c1,...");
  sz->callback([&]() {
    const fsq::OperatorModel model = fsq::load_model_file(model_path);
    const fsq::Filtration filt = make_filtration(nstart, nstep, nmax);
    const fsq::SzegoReport rep = fsq::szego_functional(model, filt, parse_f(f_str));
    fsq::MetaList meta = fsq::standard_meta("szego", seed);
    meta.emplace_back("model", model_path);
    meta.emplace_back("f", f_str);
    meta.emplace_back("nmax", std::to_string(nmax));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({std::to_string(r.n), std::to_string(r.dim), fmt(r.value)});
    nlohmann::json summary;
    summary["limit_estimate"] = rep.limit_estimate;
    summary["rows"] = rep.rows.size();
    emit(out_base, meta, {"n", "dim", "value"}, rows, summary);
  });

  // ---- stability ----
  auto* st = app.add_subcommand("stability", "finite-section stability scan");
  add_common(st, true);
  st->add_option("--nmax", nmax, "largest truncation dimension")->required();
  st->add_option("--nstart", nstart, "first truncation dimension");
  st->add_option("--nstep", nstep, "dimension step");
  st->add_option("--cap", cap, "inverse-norm cap for the verdict");
  st->callback([&]() {
    const fsq::OperatorModel model = fsq::load_model_file(model_path);
    const fsq::Filtration filt = make_filtration(nstart, nstep, nmax);
    const fsq::StabilityReport rep = fsq::stability_scan(model, filt, cap);
    fsq::MetaList meta = fsq::standard_meta("stability", seed);
    meta.emplace_back("model", model_path);
    meta.emplace_back("nmax", std::to_string(nmax));
    meta.emplace_back("cap", fmt(cap));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({std::to_string(r.n), std::to_string(r.dim),
                      r.invertible ? "1" : "0", fmt(r.inverse_norm)});
    nlohmann::json summary;
    summary["stable"] = rep.stable;
    summary["n0"] = rep.n0;
    summary["sup_inverse_norm"] = rep.sup_inverse_norm;
    emit(out_base, meta, {"n", "dim", "invertible", "inverse_norm"}, rows, summary);
  });

  // ---- solve ----
  auto* sv = app.add_subcommand("solve", "finite-section solves of T w = v");
  add_common(sv, true);
  sv->add_option("--nmax", nmax, "largest truncation dimension")->required();
  sv->add_option("--nstart", nstart, "first truncation dimension");
  sv->add_option("--nstep", nstep, "dimension step");
  sv->add_option("--rhs", rhs_str, "right-hand side entries v0,v1,...")->required();
  sv->add_option("--rhs-lo", rhs_lo, "model index of the first rhs entry");
  sv->callback([&]() {
    const fsq::OperatorModel model = fsq::load_model_file(model_path);
    const fsq::Filtration filt = make_filtration(nstart, nstep, nmax);
    fsq::Vector rhs;
    for (double v : parse_double_list(rhs_str, "--rhs")) rhs.push_back(v);
    const fsq::SolveReport rep = fsq::solve_finite_section(model, filt, rhs, rhs_lo);
    fsq::MetaList meta = fsq::standard_meta("solve", seed);
    meta.emplace_back("model", model_path);
    meta.emplace_back("nmax", std::to_string(nmax));
    meta.emplace_back("rhs", rhs_str);
    meta.emplace_back("rhs_lo", std::to_string(rhs_lo));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.rows)
      rows.push_back({std::to_string(r.n), std::to_string(r.dim),
                      r.solved ? "1" : "0", fmt(r.residual), fmt(r.increment)});
    nlohmann::json summary;
    summary["any_solved"] = rep.any_solved;
    summary["final_dim"] = rep.final_dim;
    summary["final_lo"] = rep.final_lo;
    emit(out_base, meta, {"n", "dim", "solved", "residual", "increment"}, rows,
         summary);
  });

  // ---- group-trace ----
  auto* gt = app.add_subcommand(
      "group-trace", "SL(2, Z/p) quotient traces of free-group words");
  add_common(gt, false);
  gt->add_option("--words", words_str,
                 "comma-separated words over A,B (lowercase = inverse); "
                 "use 'e' for the identity word")
      ->required();
  gt->add_option("--pmax", pmax, "scan primes p <= pmax");
  gt->callback([&]() {
    std::vector<std::string> words;
    for (auto w : split(words_str, ',')) {
      if (w == "e") w.clear();
      words.push_back(w);
    }
    if (words.empty()) throw CLI::ValidationError("--words", "empty word list");
    const std::vector<long> primes = fsq::primes_up_to(pmax);
    if (primes.empty()) throw CLI::ValidationError("--pmax", "no primes in range");
    const fsq::TraceTable table = fsq::trace_convergence_table(words, primes);
    fsq::MetaList meta = fsq::standard_meta("group-trace", seed);
    meta.emplace_back("words", words_str);
    meta.emplace_back("pmax", std::to_string(pmax));
    std::vector<std::vector<std::string>> rows;
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      const std::string label = row.word.empty() ? "e" : row.word;
      for (std::size_t i = 0; i < table.primes.size(); ++i)
        rows.push_back({label, std::to_string(table.primes[i]),
                        std::to_string(row.traces[i])});
      nlohmann::json jr;
      jr["word"] = label;
      jr["is_identity_word"] = row.is_identity_word;
      jr["eventually_zero"] = row.eventually_zero;
      jr["tail_start_prime"] = row.tail_start_prime;
      jrows.push_back(jr);
    }
    nlohmann::json summary;
    summary["rows"] = jrows;
    summary["converges_to_delta_e"] = table.converges_to_delta_e;
    emit(out_base, meta, {"word", "prime", "trace"}, rows, summary);
  });

  // ---- essential ----
  auto* es = app.add_subcommand(
      "essential", "essential-point surrogate via interval eigenvalue counts");
  add_common(es, true);
  es->add_option("--nmax", nmax, "largest truncation dimension")->required();
  es->add_option("--nstart", nstart, "first truncation dimension");
  es->add_option("--nstep", nstep, "dimension step");
  es->add_option("--candidates", candidates_str, "candidate points c0,c1,...")
      ->required();
  es->add_option("--widths", widths_str, "interval widths w0,w1,...");
  es->callback([&]() {
    const fsq::OperatorModel model = fsq::load_model_file(model_path);
    const fsq::Filtration filt = make_filtration(nstart, nstep, nmax);
    const std::vector<double> cands =
        parse_double_list(candidates_str, "--candidates");
    const std::vector<double> widths =
        widths_str.empty() ? std::vector<double>{0.1, 0.05, 0.01}
                           : parse_double_list(widths_str, "--widths");
    const fsq::EssentialPointReport rep =
        fsq::essential_points(model, filt, cands, widths);
    fsq::MetaList meta = fsq::standard_meta("essential", seed);
    meta.emplace_back("model", model_path);
    meta.emplace_back("nmax", std::to_string(nmax));
    meta.emplace_back("candidates", candidates_str);
    std::vector<std::vector<std::string>> rows;
    nlohmann::json jcands = nlohmann::json::array();
    for (const auto& c : rep.candidates) {
      for (std::size_t w = 0; w < rep.widths.size(); ++w)
        rows.push_back({fmt(c.lambda), fmt(rep.widths[w]),
                        std::to_string(c.counts[w].back()),
                        c.essential ? "1" : "0"});
      nlohmann::json jc;
      jc["lambda"] = c.lambda;
      jc["essential"] = c.essential;
      jcands.push_back(jc);
    }
    nlohmann::json summary;
    summary["candidates"] = jcands;
    emit(out_base, meta, {"candidate", "width", "final_count", "essential"},
         rows, summary);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_status;
}
