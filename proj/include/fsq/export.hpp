#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fsq/inductive_limit.hpp"
#include "fsq/verify.hpp"
#include "fsq/version.hpp"

// Deterministic output assembly. CSV files carry "# key=value" metadata
// lines, then a column-name line, then rows; JSON reports embed the same
// metadata object. Identical config + seed => byte-identical files.

namespace fsq {

using MetaList = std::vector<std::pair<std::string, std::string>>;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::string(buf);
}

inline MetaList standard_meta(const std::string& command, std::uint64_t seed) {
  MetaList meta;
  meta.emplace_back("tool_version", tool_version);
  meta.emplace_back("format_version", std::to_string(format_version));
  meta.emplace_back("command", command);
  meta.emplace_back("seed", std::to_string(seed));
  return meta;
}

inline std::string csv_document(const MetaList& meta,
                                const std::vector<std::string>& columns,
                                const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& [k, v] : meta) out += "# " + k + "=" + v + "\n";
  for (std::size_t c = 0; c < columns.size(); ++c)
    out += (c ? "," : "") + columns[c];
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::logic_error("csv_document: ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
    out += "\n";
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline nlohmann::json meta_json(const MetaList& meta) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : meta) j[k] = v;
  return j;
}

inline nlohmann::json verify_report_json(const VerifyReport& rep) {
  nlohmann::json j;
  j["suite"] = rep.suite;
  j["trials"] = rep.trials;
  j["seed"] = rep.seed;
  j["violations"] = rep.violations;
  j["worst_gap"] = rep.worst_gap;
  j["pass"] = rep.pass;
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [k, v] : rep.stats) stats[k] = v;
  j["stats"] = stats;
  return j;
}

// Exact rationals as numerator/denominator strings.
inline nlohmann::json stage_plan_json(const StagePlan& plan) {
  nlohmann::json j;
  j["scaled"] = plan.scaled;
  nlohmann::json ks = nlohmann::json::array(), ns = nlohmann::json::array(),
                 es = nlohmann::json::array();
  for (const auto& k : plan.k) ks.push_back(k.str());
  for (const auto& n : plan.n) ns.push_back(n.str());
  for (const auto& e : plan.eps) {
    nlohmann::json r;
    r["num"] = boost::multiprecision::numerator(e).str();
    r["den"] = boost::multiprecision::denominator(e).str();
    es.push_back(r);
  }
  j["k"] = ks;
  j["n"] = ns;
  j["eps"] = es;
  nlohmann::json lambdas = nlohmann::json::array();
  for (std::size_t i = 0; i <= plan.stages(); ++i)
    for (std::size_t jj = i; jj <= plan.stages(); ++jj) {
      const cpp_rational l = plan.lambda(i, jj);
      nlohmann::json r;
      r["i"] = i;
      r["j"] = jj;
      r["num"] = boost::multiprecision::numerator(l).str();
      r["den"] = boost::multiprecision::denominator(l).str();
      lambdas.push_back(r);
    }
  j["lambda"] = lambdas;
  return j;
}

// dump(2) with a trailing newline; nlohmann objects iterate in key order, so
// serialization is deterministic.
inline std::string json_document(const nlohmann::json& j) {
  return j.dump(2) + "\n";
}

}  // namespace fsq
