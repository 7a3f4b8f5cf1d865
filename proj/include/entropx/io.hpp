#pragma once

// JSON encodings of inputs and results.
//
// Distribution file: {"m": int, "probs": [{"id": string, "p": number}, ...]}

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "entropx/bounds.hpp"
#include "entropx/cnf.hpp"
#include "entropx/estimator.hpp"
#include "entropx/explicit_distribution.hpp"
#include "entropx/formula.hpp"

namespace entropx {

using json = nlohmann::ordered_json;

// Tolerance on Σp for distribution files.
inline constexpr double kDistributionFileTolerance = 1e-9;

inline ExplicitDistribution distribution_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("distribution JSON must be an object");
  if (!doc.contains("m") || !doc["m"].is_number_integer()) throw ParseError("distribution JSON: 'm' must be an integer");
  if (!doc.contains("probs") || !doc["probs"].is_array()) throw ParseError("distribution JSON: 'probs' must be an array");
  std::vector<std::pair<std::string, double>> rows;
  for (const auto& row : doc["probs"]) {
    if (!row.is_object() || !row.contains("id") || !row.contains("p") || !row["id"].is_string() ||
        !row["p"].is_number())
      throw ParseError("distribution JSON: each entry needs a string 'id' and a numeric 'p'");
    rows.emplace_back(row["id"].get<std::string>(), row["p"].get<double>());
  }
  return ExplicitDistribution::from_table(std::move(rows), doc["m"].get<int>(), kDistributionFileTolerance);
}

inline ExplicitDistribution parse_distribution_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("distribution JSON: ") + e.what());
  }
  return distribution_from_json(doc);
}

inline json to_json(const ExplicitDistribution& d) {
  json probs = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) probs.push_back({{"id", d.id(i)}, {"p", d.probability(i)}});
  return {{"m", d.universe_bits()}, {"probs", std::move(probs)}};
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

inline json to_json(const BoundReport& r) {
  json j = {{"kind", r.kind},
            {"m", r.m},
            {"n", optional_json(r.n)},
            {"H", r.H},
            {"second_moment", r.second_moment},
            {"ratio", optional_json(r.ratio)},
            {"bound_high_entropy", r.bound_high_entropy},
            {"bound_low_entropy", r.bound_low_entropy},
            {"qif_bound", optional_json(r.qif_bound)},
            {"satisfied", optional_json(r.satisfied)}};
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

inline json to_json(const CircuitFormula& f, const CircuitVerdict& v) {
  json j = {{"status", std::string(to_string(v.status))}, {"message", v.message}, {"n", f.n()}, {"m", f.m()}};
  if (v.witness) {
    auto encode = [&f](std::uint64_t tau) {
      std::string s;
      for (int var = 1; var <= f.num_vars; ++var) s.push_back((tau >> (var - 1)) & 1 ? '1' : '0');
      return s;
    };
    j["witness"] = {encode(v.witness->first), encode(v.witness->second)};
  }
  return j;
}

// Keys keep insertion order; wall_ms only when timing is requested,
// so that repeated runs are byte-identical by default.
inline json to_json(const EstimationResult& r, const EstimationParams& p, bool timing = false) {
  json j = json::object();
  j["entropy_estimate"] = r.h_hat;
  j["dominator_found"] = r.dominator_found;
  j["r"] = optional_json(r.r);
  j["h_rem_estimate"] = optional_json(r.h_rem_hat);
  j["t"] = r.t;
  j["T"] = r.T;
  j["proc_queries"] = r.ledger.proc_queries;
  j["counter_queries"] = r.ledger.counter_queries;
  j["sampler_queries"] = r.ledger.sampler_queries;
  j["initial_draws"] = r.ledger.initial_draws;
  j["epsilon"] = p.epsilon;
  j["delta"] = p.delta;
  j["seed"] = p.seed;
  j["mode"] = std::string(to_string(p.mode));
  if (timing) j["wall_ms"] = std::chrono::duration<double, std::milli>(r.wall_time).count();
  return j;
}

}  // namespace entropx
