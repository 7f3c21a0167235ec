#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fsq/model_io.hpp"
#include "fsq/operator_model.hpp"

// End-to-end checks of the installed CLI binary (path injected by the build).

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string so = "cli_out_" + std::to_string(counter) + ".txt";
  const std::string se = "cli_err_" + std::to_string(counter) + ".txt";
  ++counter;
  const std::string cmd =
      std::string("\"") + FSQ_CLI_PATH + "\" " + args + " > " + so + " 2> " + se;
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

struct Csv {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const std::size_t eq = line.find('=');
      csv.meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header_seen) {
      csv.columns = cells;
      header_seen = true;
    } else if (!cells.empty()) {
      csv.rows.push_back(cells);
    }
  }
  return csv;
}

void write_diagonal_model(const std::string& path, fsq::SequenceRule rule,
                          fsq::Support support, double bound) {
  const fsq::OperatorModel m(fsq::DiagonalKind{std::move(rule)}, support, 0,
                             bound);
  fsq::save_model_file(m, path);
}

void write_models_once() {
  static bool done = false;
  if (done) return;
  done = true;
  write_diagonal_model("cli_zero.json", fsq::PeriodicRule{{fsq::cplx{0.0, 0.0}}},
                       fsq::Support::two_sided, 1.0);
  write_diagonal_model("cli_diag2.json", fsq::PeriodicRule{{fsq::cplx{2.0, 0.0}}},
                       fsq::Support::one_sided, 2.0);
  write_diagonal_model("cli_alt.json",
                       fsq::PeriodicRule{{fsq::cplx{0.0, 0.0}, fsq::cplx{1.0, 0.0}}},
                       fsq::Support::one_sided, 1.0);
  fsq::TableRule step;
  step.values = {fsq::cplx{0.0, 0.0}};
  step.fallback = fsq::cplx{1.0, 0.0};
  write_diagonal_model("cli_step.json", step, fsq::Support::one_sided, 1.0);
}

}  // namespace

TEST_CASE("cli: help exits 0, missing subcommand exits 2") {
  REQUIRE(run_cli("--help").code == 0);
  REQUIRE(run_cli("").code == 2);
  REQUIRE(run_cli("pseudospec").code == 2);  // missing required options
}

TEST_CASE("cli: pseudospectrum of the zero model is the eps-disk") {
  write_models_once();
  const std::string args =
      "pseudospec --model cli_zero.json --n 8 --eps 0.06 "
      "--grid \"-0.1:0.1:0.05\" --seed 7 --out cli_psA";
  REQUIRE(run_cli(args).code == 0);

  const auto doc = nlohmann::json::parse(slurp("cli_psA.json"));
  REQUIRE(doc.at("member_count").get<long>() == 5);
  REQUIRE(doc.at("re_count").get<long>() == 5);
  REQUIRE(doc.at("meta").at("seed").get<std::string>() == "7");
  REQUIRE(doc.at("meta").at("tool_version").get<std::string>() == "0.1.0");

  const Csv csv = parse_csv(slurp("cli_psA.csv"));
  REQUIRE(csv.meta.at("format_version") == "1");
  REQUIRE(csv.meta.at("command") == "pseudospec");
  REQUIRE(csv.columns ==
          std::vector<std::string>{"re", "im", "smin", "member"});
  REQUIRE(csv.rows.size() == 25);
  long members = 0;
  for (const auto& row : csv.rows) members += row[3] == "1";
  REQUIRE(members == 5);
}

TEST_CASE("cli: identical config and seed give byte-identical outputs") {
  write_models_once();
  const std::string common =
      "pseudospec --model cli_zero.json --n 8 --eps 0.06 "
      "--grid \"-0.1:0.1:0.05\" --seed 7 --out ";
  REQUIRE(run_cli(common + "cli_psB").code == 0);
  REQUIRE(run_cli(common + "cli_psC").code == 0);
  REQUIRE(slurp("cli_psB.csv") == slurp("cli_psC.csv"));
  REQUIRE(slurp("cli_psB.json") == slurp("cli_psC.json"));
  REQUIRE_FALSE(slurp("cli_psB.csv").empty());
}

TEST_CASE("cli: verify suites run and report") {
  const RunResult ps = run_cli("verify powers-stormer --trials 200 --seed 3");
  REQUIRE(ps.code == 0);
  const auto doc = nlohmann::json::parse(ps.out);
  REQUIRE(doc.at("pass").get<bool>());
  REQUIRE(doc.at("trials").get<long>() == 200);
  REQUIRE(doc.at("violations").get<long>() == 0);

  const RunResult sp = run_cli("verify stage-plan --stages 3");
  REQUIRE(sp.code == 0);
  const auto spd = nlohmann::json::parse(sp.out);
  REQUIRE(spd.at("example_plan").at("n") ==
          nlohmann::json::array({"5", "41", "3281"}));
}

TEST_CASE("cli: unknown verify suite is a usage error") {
  REQUIRE(run_cli("verify bogus-suite").code == 2);
}

TEST_CASE("cli: domain errors exit 3") {
  write_models_once();
  REQUIRE(run_cli("pseudospec --model cli_zero.json --n 8 --eps -1 "
                  "--grid \"-1:1:0.5\"")
              .code == 3);
  REQUIRE(run_cli("pseudospec --model cli_missing.json --n 8 --eps 0.1 "
                  "--grid \"-1:1:0.5\"")
              .code == 3);
}

TEST_CASE("cli: szego on the alternating diagonal converges to 1/2") {
  write_models_once();
  const RunResult r = run_cli(
      "szego --model cli_alt.json --nmax 40 --nstart 4 --nstep 2 --f id");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  REQUIRE(doc.at("limit_estimate").get<double>() == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("cli: stability of 2*identity") {
  write_models_once();
  const RunResult r = run_cli(
      "stability --model cli_diag2.json --nmax 20 --out cli_stab");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp("cli_stab.json"));
  REQUIRE(doc.at("stable").get<bool>());
  REQUIRE(doc.at("sup_inverse_norm").get<double>() ==
          Catch::Approx(0.5).margin(1e-12));
  const Csv csv = parse_csv(slurp("cli_stab.csv"));
  for (const auto& row : csv.rows) REQUIRE(row[2] == "1");
}

TEST_CASE("cli: group traces of A and the identity word") {
  const RunResult r =
      run_cli("group-trace --words A,e --pmax 50 --out cli_gt");
  REQUIRE(r.code == 0);
  const Csv csv = parse_csv(slurp("cli_gt.csv"));
  REQUIRE(csv.columns == std::vector<std::string>{"word", "prime", "trace"});
  for (const auto& row : csv.rows) {
    if (row[0] == "A")
      REQUIRE(row[2] == (row[1] == "2" ? "1" : "0"));
    else
      REQUIRE(row[2] == "1");  // identity word
  }
  const auto doc = nlohmann::json::parse(slurp("cli_gt.json"));
  REQUIRE(doc.at("converges_to_delta_e").get<bool>());
}

TEST_CASE("cli: essential points of the step diagonal") {
  write_models_once();
  const RunResult r = run_cli(
      "essential --model cli_step.json --candidates 0,1 --widths 0.5,0.1 "
      "--nmax 50 --nstart 5 --nstep 5");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const auto& cands = doc.at("candidates");
  REQUIRE(cands.size() == 2);
  REQUIRE(cands[0].at("lambda").get<double>() == 0.0);
  REQUIRE_FALSE(cands[0].at("essential").get<bool>());
  REQUIRE(cands[1].at("essential").get<bool>());
}

TEST_CASE("cli: finite-section solves against the constant-2 diagonal") {
  write_models_once();
  const RunResult r = run_cli(
      "solve --model cli_diag2.json --nmax 12 --rhs 1 --out cli_solve");
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(slurp("cli_solve.json"));
  REQUIRE(doc.at("any_solved").get<bool>());
  const Csv csv = parse_csv(slurp("cli_solve.csv"));
  REQUIRE_FALSE(csv.rows.empty());
  for (const auto& row : csv.rows) REQUIRE(row[2] == "1");
  REQUIRE(std::stod(csv.rows.back()[3]) <= 1e-12);
}
