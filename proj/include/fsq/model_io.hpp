#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fsq/operator_model.hpp"

// JSON schema for operator models (shared by the CLI and tests):
//
// {
//   "kind":        "toeplitz" | "weighted_shift" | "diagonal" | "direct_sum",
//   "support":     "one-sided" | "two-sided",
//   "band":        nonnegative integer,
//   "entry_bound": number >= sup |t(i,j)|,
//   "name":        optional string,
//   -- kind-specific --
//   "coefficients": [value x (2*band+1)]        (toeplitz; a_{-band}..a_{band})
//   "weights": rule, "direction": "down"|"up"   (weighted_shift)
//   "diagonal": rule                            (diagonal)
//   "blocks": [[[value,...],...], ...]          (direct_sum; square, row-major)
// }
//
// rule  := {"type":"periodic","values":[value,...]}
//        | {"type":"table","values":[value,...],"default":value}
//        | {"type":"harmonic","a":number,"b":number}   (a + b/(k+1))
// value := number | [re, im]

namespace fsq {

namespace detail {

inline cplx parse_value(const nlohmann::json& j, const char* where) {
  if (j.is_number()) return cplx{j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return cplx{j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument(std::string("model json: bad complex value in ") + where);
}

inline nlohmann::json dump_value(const cplx& v) {
  if (v.imag() == 0.0) return v.real();
  return nlohmann::json::array({v.real(), v.imag()});
}

inline std::vector<cplx> parse_values(const nlohmann::json& j, const char* where) {
  if (!j.is_array())
    throw std::invalid_argument(std::string("model json: expected array in ") + where);
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(parse_value(e, where));
  return out;
}

inline SequenceRule parse_rule(const nlohmann::json& j, const char* where) {
  if (!j.is_object() || !j.contains("type"))
    throw std::invalid_argument(std::string("model json: bad rule in ") + where);
  const std::string type = j.at("type").get<std::string>();
  if (type == "periodic") {
    PeriodicRule r{parse_values(j.at("values"), where)};
    if (r.values.empty())
      throw std::invalid_argument("model json: periodic rule needs values");
    return r;
  }
  if (type == "table") {
    TableRule r;
    r.values = parse_values(j.at("values"), where);
    r.fallback = j.contains("default") ? parse_value(j.at("default"), where)
                                       : cplx{0.0, 0.0};
    return r;
  }
  if (type == "harmonic") {
    HarmonicRule r;
    r.a = j.at("a").get<double>();
    r.b = j.at("b").get<double>();
    return r;
  }
  throw std::invalid_argument("model json: unknown rule type '" + type + "'");
}

inline nlohmann::json dump_rule(const SequenceRule& rule) {
  nlohmann::json j;
  if (const auto* p = std::get_if<PeriodicRule>(&rule)) {
    j["type"] = "periodic";
    auto arr = nlohmann::json::array();
    for (const auto& v : p->values) arr.push_back(dump_value(v));
    j["values"] = arr;
  } else if (const auto* t = std::get_if<TableRule>(&rule)) {
    j["type"] = "table";
    auto arr = nlohmann::json::array();
    for (const auto& v : t->values) arr.push_back(dump_value(v));
    j["values"] = arr;
    j["default"] = dump_value(t->fallback);
  } else {
    const auto& h = std::get<HarmonicRule>(rule);
    j["type"] = "harmonic";
    j["a"] = h.a;
    j["b"] = h.b;
  }
  return j;
}

}  // namespace detail

inline OperatorModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("model json: not an object");
  const std::string kind = j.at("kind").get<std::string>();
  const std::string support_str = j.at("support").get<std::string>();
  Support support;
  if (support_str == "one-sided")
    support = Support::one_sided;
  else if (support_str == "two-sided")
    support = Support::two_sided;
  else
    throw std::invalid_argument("model json: support must be one-sided or two-sided");
  const long band = j.at("band").get<long>();
  const double entry_bound = j.at("entry_bound").get<double>();
  const std::string name = j.contains("name") ? j.at("name").get<std::string>() : "";

  OperatorModel::Kind k;
  if (kind == "toeplitz") {
    k = ToeplitzKind{detail::parse_values(j.at("coefficients"), "coefficients")};
  } else if (kind == "weighted_shift") {
    WeightedShiftKind w;
    w.weights = detail::parse_rule(j.at("weights"), "weights");
    const std::string dir = j.at("direction").get<std::string>();
    if (dir == "down")
      w.direction = 1;
    else if (dir == "up")
      w.direction = -1;
    else
      throw std::invalid_argument("model json: direction must be down or up");
    k = std::move(w);
  } else if (kind == "diagonal") {
    k = DiagonalKind{detail::parse_rule(j.at("diagonal"), "diagonal")};
  } else if (kind == "direct_sum") {
    DirectSumKind ds;
    const auto& blocks = j.at("blocks");
    if (!blocks.is_array())
      throw std::invalid_argument("model json: blocks must be an array");
    for (const auto& bj : blocks) {
      if (!bj.is_array() || bj.empty())
        throw std::invalid_argument("model json: block must be a nonempty 2d array");
      const std::size_t dim = bj.size();
      Matrix b(dim, dim);
      for (std::size_t r = 0; r < dim; ++r) {
        if (!bj[r].is_array() || bj[r].size() != dim)
          throw std::invalid_argument("model json: block rows must be square");
        for (std::size_t c = 0; c < dim; ++c)
          b(r, c) = detail::parse_value(bj[r][c], "blocks");
      }
      ds.blocks.push_back(std::move(b));
    }
    k = std::move(ds);
  } else {
    throw std::invalid_argument("model json: unknown kind '" + kind + "'");
  }
  return OperatorModel(std::move(k), support, band, entry_bound, name);
}

inline nlohmann::json model_to_json(const OperatorModel& m) {
  nlohmann::json j;
  j["support"] = m.support() == Support::one_sided ? "one-sided" : "two-sided";
  j["band"] = m.band();
  j["entry_bound"] = m.entry_bound();
  if (!m.name().empty()) j["name"] = m.name();
  if (const auto* t = std::get_if<ToeplitzKind>(&m.kind())) {
    j["kind"] = "toeplitz";
    auto arr = nlohmann::json::array();
    for (const auto& v : t->coefficients) arr.push_back(detail::dump_value(v));
    j["coefficients"] = arr;
  } else if (const auto* w = std::get_if<WeightedShiftKind>(&m.kind())) {
    j["kind"] = "weighted_shift";
    j["weights"] = detail::dump_rule(w->weights);
    j["direction"] = w->direction == 1 ? "down" : "up";
  } else if (const auto* d = std::get_if<DiagonalKind>(&m.kind())) {
    j["kind"] = "diagonal";
    j["diagonal"] = detail::dump_rule(d->diagonal);
  } else {
    const auto& ds = std::get<DirectSumKind>(m.kind());
    j["kind"] = "direct_sum";
    auto blocks = nlohmann::json::array();
    for (const auto& b : ds.blocks) {
      auto bj = nlohmann::json::array();
      for (std::size_t r = 0; r < b.rows(); ++r) {
        auto row = nlohmann::json::array();
        for (std::size_t c = 0; c < b.cols(); ++c)
          row.push_back(detail::dump_value(b(r, c)));
        bj.push_back(row);
      }
      blocks.push_back(bj);
    }
    j["blocks"] = blocks;
  }
  return j;
}

inline OperatorModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("model file " + path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("model file " + path + ": " + e.what());
  }
}

inline void save_model_file(const OperatorModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << model_to_json(m).dump(2) << "\n";
}

}  // namespace fsq
