// entropx: entropy estimation over explicit tables and circuit formulas.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "entropx.hpp"

namespace fs = std::filesystem;
using namespace entropx;

namespace {

enum Exit { kOk = 0, kParse = 1, kValidation = 2, kResource = 3 };

struct Common {
  double epsilon = 0.8;
  double delta = 0.09;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::string format = "json";
  std::string kind;
  double timeout = 60.0;
  unsigned threads = 1;
  int max_vars = kMaxFormulaVars;
  std::uint64_t max_eval = std::uint64_t{1} << 22;
  std::optional<int> n;
  bool timing = false;
};

std::uint64_t resolve_seed(const Common& c) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("ENTROPX_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(std::string("ENTROPX_SEED is not an unsigned integer: '") + env + "'");
  }
  return 0;
}

std::optional<InputKind> resolve_kind(const Common& c) {
  if (c.kind.empty()) return std::nullopt;
  if (c.kind == "json") return InputKind::json;
  if (c.kind == "cnf") return InputKind::cnf;
  throw ParseError("--kind must be json or cnf");
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string fixed(double v, int digits = 6) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

// Refuses formulas that violate the circuit property; warns if unchecked.
int check_formula(const CircuitFormula& f, const CountOptions& opts) {
  const CircuitVerdict v = validate_circuit_property(f, opts);
  if (v.status == CircuitVerdict::Status::invalid) {
    print_json(to_json(f, v));
    return kValidation;
  }
  if (v.status == CircuitVerdict::Status::unvalidated)
    std::cerr << "warning: " << v.message << "; the accuracy guarantee assumes the circuit property\n";
  return kOk;
}

int cmd_estimate(const std::string& input, const Common& c) {
  const BenchInstance inst = load_instance(input, resolve_kind(c));
  EstimationParams params;
  params.epsilon = c.epsilon;
  params.delta = c.delta;
  params.seed = resolve_seed(c);
  params.threads = c.threads;
  params.n_override = c.n;
  params.validate();
  const CountOptions count{c.max_vars};

  std::unique_ptr<ProcOracle> oracle;
  if (const auto* f = std::get_if<CircuitFormula>(&inst.source)) {
    if (int rc = check_formula(*f, count)) return rc;
    oracle = std::make_unique<FormulaOracle>(*f, count);
    params.mode = c.mode.empty() ? Mode::qif : parse_mode(c.mode);
  } else {
    oracle = std::make_unique<ExplicitOracle>(std::get<ExplicitDistribution>(inst.source));
    params.mode = c.mode.empty() ? Mode::generic : parse_mode(c.mode);
  }
  const EstimationResult res = estimate_entropy(*oracle, params);

  if (c.format == "human") {
    std::cout << "estimate: " << fixed(res.h_hat) << " bits\n"
              << "contract: (1-" << c.epsilon << ")H <= estimate <= (1+" << c.epsilon << ")H with probability >= "
              << 1.0 - c.delta << "\n"
              << "so H lies in [" << fixed(res.h_hat / (1.0 + c.epsilon)) << ", "
              << fixed(res.h_hat / (1.0 - c.epsilon)) << "] unless the " << c.delta << " failure event occurred\n";
    if (res.dominator_found)
      std::cout << "dominating outcome found with mass " << fixed(*res.r) << "\n";
    std::cout << "queries: " << res.ledger.proc_queries << " PROC (" << res.ledger.initial_draws << " initial + "
              << res.T << " x " << res.t << ")\n";
    if (c.timing)
      std::cout << "time: " << fixed(std::chrono::duration<double, std::milli>(res.wall_time).count(), 3) << " ms\n";
  } else {
    print_json(to_json(res, params, c.timing));
  }
  return kOk;
}

int cmd_exact(const std::string& input, const Common& c, bool rationals) {
  const BenchInstance inst = load_instance(input, resolve_kind(c));
  json out = json::object();
  if (const auto* f = std::get_if<CircuitFormula>(&inst.source)) {
    ExactFormulaOptions opts;
    opts.count = CountOptions{c.max_vars};
    opts.max_eval = c.max_eval;
    opts.deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(c.timeout));
    const ExactFormulaResult r = exact_entropy_formula(*f, opts);
    out["entropy"] = r.entropy;
    out["eval_queries"] = r.eval_queries;
    if (rationals) {
      out["denominator"] = to_string(r.denominator);
      json probs = json::array();
      for (const auto& [sigma, num] : r.numerators) {
        std::string bits;
        for (int i = 0; i < f->m(); ++i) bits.push_back((sigma.value >> i) & 1 ? '1' : '0');
        probs.push_back({{"sigma", bits}, {"p", Rational{num, r.denominator}.to_string()}});
      }
      out["probabilities"] = std::move(probs);
    }
  } else {
    const auto& d = std::get<ExplicitDistribution>(inst.source);
    out["entropy"] = exact_entropy(d);
    out["eval_queries"] = d.size();
  }
  if (c.format == "human")
    std::cout << "H = " << fixed(out["entropy"].get<double>(), 12) << " bits (" << out["eval_queries"].dump()
              << " probability evaluations)\n";
  else
    print_json(out);
  return kOk;
}

int cmd_validate(const std::string& input, const Common& c) {
  const BenchInstance inst = load_instance(input, resolve_kind(c).value_or(InputKind::cnf));
  const auto* f = std::get_if<CircuitFormula>(&inst.source);
  if (!f) throw ParseError("validate expects a CNF formula");
  const CircuitVerdict v = validate_circuit_property(*f, CountOptions{c.max_vars});
  if (c.format == "human") {
    std::cout << to_string(v.status) << ": " << v.message << '\n';
    if (v.witness) {
      const json j = to_json(*f, v);
      std::cout << "witness: " << j["witness"][0].get<std::string>() << " " << j["witness"][1].get<std::string>()
                << '\n';
    }
  } else {
    print_json(to_json(*f, v));
  }
  switch (v.status) {
    case CircuitVerdict::Status::valid: return kOk;
    case CircuitVerdict::Status::invalid: return kValidation;
    default: return kResource;
  }
}

int cmd_verify_bounds(const std::string& input, const Common& c, std::uint64_t fuzz, bool reports) {
  if (!input.empty()) {
    const BenchInstance inst = load_instance(input, resolve_kind(c));
    std::vector<double> probs;
    int m;
    std::optional<int> n = c.n;
    if (const auto* f = std::get_if<CircuitFormula>(&inst.source)) {
      if (!n) n = f->n();
      ExactFormulaOptions opts;
      opts.count = CountOptions{c.max_vars};
      opts.max_eval = c.max_eval;
      probs = formula_probabilities(exact_entropy_formula(*f, opts));
      m = f->m();
    } else {
      const auto& d = std::get<ExplicitDistribution>(inst.source);
      probs.assign(d.probabilities().begin(), d.probabilities().end());
      m = d.universe_bits();
    }
    bool ok = true;
    auto emit = [&ok](const BoundReport& r) {
      std::cout << to_json(r).dump() << '\n';
      if (r.satisfied && !*r.satisfied) ok = false;
    };
    emit(check_moment_bound(probs, m));
    if (n) emit(check_input_width_bound(probs, *n));
    return ok ? kOk : kValidation;
  }
  std::function<void(const BoundReport&)> per_case;
  if (reports) per_case = [](const BoundReport& r) { std::cout << to_json(r).dump() << '\n'; };
  const FuzzSummary s = verify_bounds_fuzz(fuzz, resolve_seed(c), c.epsilon, per_case);
  json j = json::object();
  j["cases_per_regime"] = fuzz;
  j["seed"] = resolve_seed(c);
  j["high_entropy_cases"] = s.high_entropy_cases;
  j["low_entropy_cases"] = s.low_entropy_cases;
  j["input_width_cases"] = s.input_width_cases;
  j["violations"] = s.violations.size();
  j["hypothesis_checks"] = s.hypothesis_checks;
  j["hypothesis_violations"] = s.hypothesis_violations;
  j["max_high_ratio_fraction"] = s.max_high_ratio_fraction;
  j["max_low_moment_fraction"] = s.max_low_moment_fraction;
  j["max_input_width_fraction"] = s.max_input_width_fraction;
  j["max_hypothesis_lhs"] = s.max_hypothesis_lhs;
  json bad = json::array();
  for (const auto& r : s.violations) bad.push_back(to_json(r));
  j["violation_reports"] = std::move(bad);
  std::cout << (reports ? j.dump() : j.dump(2)) << '\n';
  return fuzz_clean(s) ? kOk : kValidation;
}

int cmd_tightness(int m, double gamma, const Common& c) {
  const TightnessConstruction t = tightness_construction(m, gamma);
  json j = json::object();
  j["m"] = t.m;
  j["gamma"] = t.gamma;
  j["target_excess"] = t.target_excess;
  j["epsilon"] = t.epsilon;
  j["heavy"] = t.heavy;
  j["light"] = t.light;
  j["light_count"] = t.light_count;
  j["entropy"] = t.entropy;
  j["second_moment"] = t.second_moment;
  j["ratio"] = t.ratio;
  j["iterations"] = t.iterations;
  if (c.format == "human")
    std::cout << "m=" << m << " gamma=" << gamma << " ratio=" << fixed(t.ratio) << " H=" << fixed(t.entropy, 9) << '\n';
  else
    print_json(j);
  return kOk;
}

int cmd_bench(const std::string& dir, const Common& c, const std::string& histogram) {
  BenchOptions opts;
  opts.epsilon = c.epsilon;
  opts.delta = c.delta;
  opts.seed = resolve_seed(c);
  opts.threads = c.threads;
  opts.timeout = std::chrono::duration<double>(c.timeout);
  opts.max_eval = c.max_eval;
  opts.max_vars = c.max_vars;
  opts.timing = c.timing;
  if (!c.mode.empty()) opts.mode = parse_mode(c.mode);
  const auto records = run_bench(load_corpus(dir), opts);
  if (!histogram.empty()) write_file(histogram, error_histogram_csv(records, c.epsilon));
  if (c.format == "json") {
    json j = json::object();
    json rows = json::array();
    for (const auto& r : records) rows.push_back(to_json(r));
    j["records"] = std::move(rows);
    j["summary"] = records.empty() ? json(nullptr) : to_json(summarize(records, c.epsilon), c.epsilon);
    print_json(j);
  } else {
    std::cout << bench_csv(records);
  }
  return kOk;
}

int cmd_gen_corpus(const std::string& dir, const Common& c) {
  const auto corpus = desk_corpus(c.seed.value_or(2024));
  write_corpus(dir, corpus);
  std::cout << "wrote " << corpus.size() << " instances to " << dir << '\n';
  return kOk;
}

void add_estimation_flags(CLI::App* sub, Common& c) {
  sub->add_option("--epsilon", c.epsilon, "relative tolerance in (0,1)")->capture_default_str();
  sub->add_option("--delta", c.delta, "failure probability in (0,1)")->capture_default_str();
  sub->add_option("--seed", c.seed, "RNG seed (falls back to ENTROPX_SEED, then 0)");
  sub->add_option("--mode", c.mode, "generic|qif (default: qif for CNF, generic for tables)")
      ->check(CLI::IsMember({"generic", "qif"}));
}

// Every subcommand takes --threads so scripts can pass one flag set everywhere;
// the enumerating commands are sequential and ignore it.
void add_threads_flag(CLI::App* sub, Common& c) {
  sub->add_option("--threads", c.threads, "worker threads; results do not depend on it")
      ->check(CLI::Range(1u, 256u));
}

void add_resource_flags(CLI::App* sub, Common& c) {
  sub->add_option("--max-vars", c.max_vars, "variable cap for the counter")->check(CLI::Range(1, kMaxFormulaVars));
  sub->add_option("--max-eval", c.max_eval, "cap on enumerated output assignments");
  sub->add_option("--timeout", c.timeout, "baseline timeout in seconds")->capture_default_str();
}

void add_input_flags(CLI::App* sub, Common& c) {
  sub->add_option("--kind", c.kind, "input kind, overriding the extension")->check(CLI::IsMember({"json", "cnf"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy estimation with a probability-revealing conditional sampler"};
  app.require_subcommand(1);
  Common c;
  std::string input;
  std::uint64_t fuzz = 0;
  bool reports = false;
  bool rationals = false;
  std::string histogram;
  int tight_m = 16;
  double gamma = 0.5;

  auto* est = app.add_subcommand("estimate", "estimate H of a distribution table (.json) or circuit formula (.cnf)");
  add_threads_flag(est, c);
  est->add_option("input", input, "input file")->required();
  add_estimation_flags(est, c);
  add_resource_flags(est, c);
  add_input_flags(est, c);
  est->add_option("--n", c.n, "input width |U| for qif sizing of a table");
  est->add_option("--format", c.format)->check(CLI::IsMember({"json", "human"}));
  est->add_flag("--timing", c.timing, "include wall-clock time (output is then not reproducible)");

  auto* ex = app.add_subcommand("exact", "exact entropy by enumeration");
  add_threads_flag(ex, c);
  ex->add_option("input", input, "input file")->required();
  add_resource_flags(ex, c);
  add_input_flags(ex, c);
  ex->add_flag("--rationals", rationals, "also print every p_sigma as num/den");
  ex->add_option("--format", c.format)->check(CLI::IsMember({"json", "human"}));

  auto* val = app.add_subcommand("validate", "check that each solution is determined by its inputs");
  add_threads_flag(val, c);
  val->add_option("input", input, "CNF file")->required();
  add_resource_flags(val, c);
  add_input_flags(val, c);
  val->add_option("--format", c.format)->check(CLI::IsMember({"json", "human"}));

  auto* vb = app.add_subcommand("verify-bounds", "check second-moment bounds on a file or on fuzzed tables");
  add_threads_flag(vb, c);
  vb->add_option("input", input, "distribution or CNF file");
  vb->add_option("--fuzz", fuzz, "fuzzed cases per regime");
  vb->add_option("--seed", c.seed, "fuzzer seed (falls back to ENTROPX_SEED, then 0)");
  vb->add_option("--epsilon", c.epsilon, "tolerance used for the batch-size check")->capture_default_str();
  vb->add_option("--n", c.n, "input width for the input-width bound");
  vb->add_flag("--reports", reports, "print one JSON report per fuzzed case before the summary");
  add_resource_flags(vb, c);
  add_input_flags(vb, c);

  auto* ti = app.add_subcommand("tightness", "two-heavy construction with a large variance ratio");
  add_threads_flag(ti, c);
  ti->add_option("--m", tight_m, "universe bits")->check(CLI::Range(3, 1000));
  ti->add_option("--gamma", gamma, "excess exponent in (0,1)")->capture_default_str();
  ti->add_option("--format", c.format)->check(CLI::IsMember({"json", "human"}));

  auto* be = app.add_subcommand("bench", "baseline vs estimator over a corpus directory");
  add_threads_flag(be, c);
  be->add_option("corpus", input, "directory of .json / .cnf files")->required()->check(CLI::ExistingDirectory);
  add_estimation_flags(be, c);
  add_resource_flags(be, c);
  be->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  be->add_option("--histogram", histogram, "write observed-error CSV to this path");
  be->add_flag("--timing", c.timing, "measure wall-clock times");

  auto* gc = app.add_subcommand("gen-corpus", "write the generated desk corpus");
  add_threads_flag(gc, c);
  gc->add_option("dir", input, "output directory")->required();
  gc->add_option("--seed", c.seed, "generator seed (default 2024)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }
  if (be->parsed() && !be->count("--format")) c.format = "csv";

  try {
    if (est->parsed()) return cmd_estimate(input, c);
    if (ex->parsed()) return cmd_exact(input, c, rationals);
    if (val->parsed()) return cmd_validate(input, c);
    if (vb->parsed()) {
      if (input.empty() && fuzz == 0) throw ParseError("verify-bounds needs an input file or --fuzz N");
      return cmd_verify_bounds(input, c, fuzz, reports);
    }
    if (ti->parsed()) return cmd_tightness(tight_m, gamma, c);
    if (be->parsed()) return cmd_bench(input, c, histogram);
    if (gc->parsed()) return cmd_gen_corpus(input, c);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ResourceCapError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kResource;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kOk;
}
