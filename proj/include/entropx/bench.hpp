#pragma once

// Baseline-vs-estimator benchmark harness.
//
// For every instance the exact baseline (enumeration of sol(φ)↓V with one
// numerator count each, or a direct sum for explicit tables) is compared to
// estimate_entropy. Accuracy is reported as the observed error
// max(est/exact − 1, exact/est − 1).

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "entropx/circuits.hpp"
#include "entropx/cnf.hpp"
#include "entropx/core.hpp"
#include "entropx/estimator.hpp"
#include "entropx/explicit_distribution.hpp"
#include "entropx/families.hpp"
#include "entropx/formula.hpp"
#include "entropx/io.hpp"

namespace entropx {

struct BenchInstance {
  std::string name;
  std::variant<ExplicitDistribution, CircuitFormula> source;

  bool is_formula() const { return std::holds_alternative<CircuitFormula>(source); }
};

enum class InputKind { json, cnf };

inline InputKind infer_kind(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".json") return InputKind::json;
  if (ext == ".cnf" || ext == ".dimacs") return InputKind::cnf;
  throw ParseError("cannot infer input kind from extension of " + path.string() + " (use --kind)");
}

inline BenchInstance load_instance(const std::filesystem::path& path, std::optional<InputKind> kind = std::nullopt) {
  const std::string text = read_file(path);
  BenchInstance inst;
  inst.name = path.stem().string();
  if (kind.value_or(infer_kind(path)) == InputKind::json)
    inst.source = parse_distribution_json(text);
  else
    inst.source = parse_dimacs(text);
  return inst;
}

// Instances in `dir` with a .json or .cnf extension, sorted by file name.
inline std::vector<BenchInstance> load_corpus(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".json" || ext == ".cnf")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<BenchInstance> out;
  for (const auto& f : files) out.push_back(load_instance(f));
  return out;
}

// Generated desk-scale corpus: password checkers, gate trees, adders,
// bijections, random circuits and a few explicit tables.
inline std::vector<BenchInstance> desk_corpus(std::uint64_t seed = 2024) {
  std::vector<BenchInstance> out;
  auto add = [&out](std::string name, CircuitFormula f) { out.push_back({std::move(name), std::move(f)}); };
  add("and_gate", circuits::and_gate());
  add("xor_gate", circuits::xor_gate());
  add("pwd_checker_8", circuits::password_checker(8, 0xA5));
  add("pwd_checker_10", circuits::password_checker(10, 0x2C7));
  add("pwd_checker_12", circuits::password_checker(12, 0x9E1));
  add("and_tree_8", circuits::gate_tree(8, false, 2));
  add("xor_tree_8", circuits::gate_tree(8, true, 2));
  add("and_tree_12", circuits::gate_tree(12, false, 3));
  add("adder_3", circuits::adder(3));
  add("adder_4", circuits::adder(4));
  add("prefix_xor_8", circuits::prefix_xor(8));
  Rng rng(seed);
  for (int i = 0; i < 6; ++i) {
    const int n = 6 + static_cast<int>(rng.below(std::uint64_t{5}));
    const int gates = 6 + static_cast<int>(rng.below(std::uint64_t{8}));
    const int outs = 2 + static_cast<int>(rng.below(std::uint64_t{4}));
    add("random_circuit_" + std::to_string(i), circuits::random_circuit(rng, n, gates, outs));
  }
  for (const char* spec : {"uniform:m=6", "geometric:half_life=2,m=8", "dominated:r=0.9,m=8", "dirichlet:m=6,seed=5"}) {
    std::string name = spec;
    std::replace_if(name.begin(), name.end(), [](char c) { return c == ':' || c == ',' || c == '=' || c == '.'; }, '_');
    out.push_back({name, make_family(spec)});
  }
  return out;
}

inline void write_corpus(const std::filesystem::path& dir, const std::vector<BenchInstance>& instances) {
  std::filesystem::create_directories(dir);
  for (const auto& inst : instances) {
    if (inst.is_formula())
      write_file(dir / (inst.name + ".cnf"), to_dimacs(std::get<CircuitFormula>(inst.source), inst.name));
    else
      write_file(dir / (inst.name + ".json"), to_json(std::get<ExplicitDistribution>(inst.source)).dump(2) + "\n");
  }
}

struct BenchOptions {
  double epsilon = 0.8;
  double delta = 0.09;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::chrono::duration<double> timeout{60.0};
  std::uint64_t max_eval = std::uint64_t{1} << 22;
  int max_vars = kMaxFormulaVars;
  // Measure wall-clock times. Off by default so output is reproducible.
  bool timing = false;
  std::optional<Mode> mode;  // default: qif for formulas, generic for tables
};

struct BenchRecord {
  std::string name;
  std::optional<int> n;
  int m = 0;
  std::optional<double> baseline_time_s;
  bool baseline_timeout = false;
  std::optional<Count> baseline_eval_queries;
  std::optional<double> est_time_s;
  std::uint64_t est_proc_queries = 0;
  std::uint64_t initial_draws = 0;
  std::uint64_t t = 0;
  std::uint64_t T = 0;
  std::optional<double> exact_H;
  std::optional<double> est_H;
  std::optional<double> observed_error;
  std::string error;
};

inline std::optional<double> observed_error(std::optional<double> estimated, std::optional<double> exact) {
  if (!estimated || !exact || !(*estimated > 0.0) || !(*exact > 0.0)) return std::nullopt;
  return std::max(*estimated / *exact - 1.0, *exact / *estimated - 1.0);
}

inline BenchRecord run_instance(const BenchInstance& inst, const BenchOptions& opts) {
  using clock = std::chrono::steady_clock;
  BenchRecord rec;
  rec.name = inst.name;
  try {
    std::unique_ptr<ProcOracle> oracle;
    EstimationParams params;
    params.epsilon = opts.epsilon;
    params.delta = opts.delta;
    params.seed = opts.seed;
    params.threads = opts.threads;

    const auto t0 = clock::now();
    if (const auto* f = std::get_if<CircuitFormula>(&inst.source)) {
      const CountOptions count{opts.max_vars};
      rec.n = f->n();
      rec.m = f->m();
      rec.baseline_eval_queries = count_projected(*f, f->output_mask(), {}, count);
      ExactFormulaOptions ex;
      ex.count = count;
      ex.max_eval = opts.max_eval;
      ex.deadline = t0 + std::chrono::duration_cast<clock::duration>(opts.timeout);
      try {
        rec.exact_H = exact_entropy_formula(*f, ex).entropy;
      } catch (const ResourceCapError&) {
        rec.baseline_timeout = true;
      }
      oracle = std::make_unique<FormulaOracle>(*f, count);
      params.mode = opts.mode.value_or(Mode::qif);
    } else {
      const auto& d = std::get<ExplicitDistribution>(inst.source);
      rec.m = d.universe_bits();
      rec.baseline_eval_queries = d.size();
      rec.exact_H = exact_entropy(d);
      oracle = std::make_unique<ExplicitOracle>(d);
      params.mode = opts.mode.value_or(Mode::generic);
    }
    const auto t1 = clock::now();
    if (opts.timing && !rec.baseline_timeout) rec.baseline_time_s = std::chrono::duration<double>(t1 - t0).count();

    const EstimationResult est = estimate_entropy(*oracle, params);
    if (opts.timing) rec.est_time_s = std::chrono::duration<double>(est.wall_time).count();
    rec.est_H = est.h_hat;
    rec.est_proc_queries = est.ledger.proc_queries;
    rec.initial_draws = est.ledger.initial_draws;
    rec.t = est.t;
    rec.T = est.T;
    rec.observed_error = observed_error(rec.est_H, rec.exact_H);
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

inline std::vector<BenchRecord> run_bench(const std::vector<BenchInstance>& corpus, const BenchOptions& opts) {
  std::vector<BenchRecord> out;
  out.reserve(corpus.size());
  for (const auto& inst : corpus) out.push_back(run_instance(inst, opts));
  return out;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

}  // namespace detail

// Columns: benchmark, |U|, |V|, baseline time, EVAL queries, estimator time,
// PROC queries, exact H, estimated H, observed error. "-" marks a baseline
// that hit its timeout or enumeration cap.
inline std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "benchmark,U,V,baseline_time_s,eval_queries,est_time_s,proc_queries,exact_H,est_H,observed_error,error\n";
  for (const auto& r : records) {
    out << r.name << ',' << (r.n ? std::to_string(*r.n) : "") << ',' << r.m << ','
        << (r.baseline_timeout ? "-" : detail::fmt_opt(r.baseline_time_s)) << ','
        << (r.baseline_eval_queries ? to_string(*r.baseline_eval_queries) : "") << ','
        << detail::fmt_opt(r.est_time_s) << ',' << r.est_proc_queries << ','
        << (r.baseline_timeout ? "-" : detail::fmt_opt(r.exact_H)) << ',' << detail::fmt_opt(r.est_H) << ','
        << detail::fmt_opt(r.observed_error) << ',';
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    out << err << '\n';
  }
  return out.str();
}

// Plot-ready observed-error series; instances without a baseline are left out.
inline std::string error_histogram_csv(const std::vector<BenchRecord>& records, double epsilon) {
  std::ostringstream out;
  out << "benchmark,observed_error,tolerance\n";
  for (const auto& r : records)
    if (r.observed_error) out << r.name << ',' << detail::fmt_double(*r.observed_error) << ',' << detail::fmt_double(epsilon) << '\n';
  return out.str();
}

struct BenchSummary {
  std::size_t instances = 0;
  std::size_t with_baseline = 0;
  std::size_t within_tolerance = 0;
  std::size_t errors = 0;
  double fraction_within = 1.0;
  std::optional<double> max_observed_error;
};

inline BenchSummary summarize(const std::vector<BenchRecord>& records, double epsilon) {
  if (records.empty()) throw DomainError("summarize: no records");
  BenchSummary s;
  s.instances = records.size();
  for (const auto& r : records) {
    if (!r.error.empty()) ++s.errors;
    if (!r.exact_H || !r.est_H) continue;
    // Both zero (point mass) counts as exact.
    const bool exact_zero = *r.exact_H == 0.0 && *r.est_H == 0.0;
    if (!r.observed_error && !exact_zero) {
      if (*r.exact_H > 0.0 || *r.est_H > 0.0) {
        ++s.with_baseline;  // one side zero: infinitely wrong
        s.max_observed_error = std::numeric_limits<double>::infinity();
      }
      continue;
    }
    ++s.with_baseline;
    const double err = r.observed_error.value_or(0.0);
    if (err <= epsilon) ++s.within_tolerance;
    s.max_observed_error = std::max(s.max_observed_error.value_or(0.0), err);
  }
  if (s.with_baseline > 0) s.fraction_within = static_cast<double>(s.within_tolerance) / s.with_baseline;
  return s;
}

inline json to_json(const BenchSummary& s, double epsilon) {
  json j = json::object();
  j["instances"] = s.instances;
  j["with_baseline"] = s.with_baseline;
  j["within_tolerance"] = s.within_tolerance;
  j["fraction_within"] = s.fraction_within;
  j["max_observed_error"] = optional_json(s.max_observed_error);
  j["epsilon"] = epsilon;
  j["errors"] = s.errors;
  return j;
}

inline json to_json(const BenchRecord& r) {
  json j = json::object();
  j["benchmark"] = r.name;
  j["U"] = optional_json(r.n);
  j["V"] = r.m;
  j["baseline_time_s"] = optional_json(r.baseline_time_s);
  j["baseline_timeout"] = r.baseline_timeout;
  j["eval_queries"] = r.baseline_eval_queries ? json(to_string(*r.baseline_eval_queries)) : json(nullptr);
  j["est_time_s"] = optional_json(r.est_time_s);
  j["proc_queries"] = r.est_proc_queries;
  j["initial_draws"] = r.initial_draws;
  j["t"] = r.t;
  j["T"] = r.T;
  j["exact_H"] = optional_json(r.exact_H);
  j["est_H"] = optional_json(r.est_H);
  j["observed_error"] = optional_json(r.observed_error);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

}  // namespace entropx
