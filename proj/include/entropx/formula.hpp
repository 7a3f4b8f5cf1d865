#pragma once

// Distributions induced by circuit formulas φ(U, V):
//   p_σ = |sol(φ(V ↦ σ))| / |sol(φ)↓U|
// with a PROC oracle built from one sampler query and counter queries, the
// circuit-formula validator and the enumeration baseline.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "entropx/cnf.hpp"
#include "entropx/core.hpp"
#include "entropx/counter.hpp"
#include "entropx/sampler.hpp"

namespace entropx {

struct Rational {
  Count num = 0;
  Count den = 1;

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return entropx::to_string(num) + "/" + entropx::to_string(den); }
};

// PROC over a circuit formula. The denominator |sol(φ)↓U| is counted once and
// shared by all clones. For each query the sampler runs on φ plus blocking
// clauses for the excluded σ, and the numerator is counted on φ without
// blocking, so the revealed probability is the unconditional p_σ.
class FormulaOracle final : public ProcOracle {
 public:
  explicit FormulaOracle(CircuitFormula formula, CountOptions opts = {})
      : shared_(std::make_shared<Shared>(std::move(formula), opts)) {
    detail::check_caps(shared_->formula, opts);
    if (shared_->formula.m() > 64) throw ResourceCapError("output block wider than 64 bits");
    shared_->formula.blocked.clear();
  }

  int universe_bits() const override { return shared_->formula.m(); }
  std::optional<int> input_bits() const override { return shared_->formula.n(); }

  std::unique_ptr<ProcOracle> clone() const override { return std::unique_ptr<ProcOracle>(new FormulaOracle(shared_)); }

  const CircuitFormula& formula() const { return shared_->formula; }

  Count denominator() {
    std::call_once(shared_->denominator_once, [this] {
      ++ledger_.counter_queries;
      shared_->denominator = count_projected(shared_->formula, shared_->formula.input_mask(), {}, shared_->opts);
    });
    return shared_->denominator;
  }

  // p_σ as an exact fraction; counts as one counter query.
  Rational exact_probability(Outcome sigma) {
    const Count den = denominator();
    ++ledger_.counter_queries;
    const Count num = count_projected(shared_->formula, shared_->formula.all_mask(),
                                      output_assignment(shared_->formula, sigma), shared_->opts);
    return {num, den};
  }

 protected:
  ProcQueryResult do_query(const ExclusionSet& excluded, Rng& rng) override {
    if (denominator() == 0) throw EmptySupportError("PROC query: formula is unsatisfiable");
    UniformSampler& sampler = sampler_for(excluded);
    ++ledger_.sampler_queries;
    const std::uint64_t tau = sampler.sample(rng);
    const Outcome sigma = project_outputs(shared_->formula, tau);
    const Rational p = exact_probability(sigma);
    return {sigma, p.to_double()};
  }

 private:
  struct Shared {
    Shared(CircuitFormula f, CountOptions o) : formula(std::move(f)), opts(o) {}
    CircuitFormula formula;
    CountOptions opts;
    std::once_flag denominator_once;
    Count denominator = 0;
    std::mutex samplers_mutex;
    std::map<ExclusionSet, std::shared_ptr<UniformSampler>> samplers;
  };

  explicit FormulaOracle(std::shared_ptr<Shared> shared) : shared_(std::move(shared)) {}

  UniformSampler& sampler_for(const ExclusionSet& excluded) {
    std::lock_guard lock(shared_->samplers_mutex);
    auto it = shared_->samplers.find(excluded);
    if (it == shared_->samplers.end()) {
      CircuitFormula conditioned = shared_->formula;
      conditioned.blocked = excluded;
      auto sampler = std::make_shared<UniformSampler>(std::move(conditioned), shared_->opts);
      if (sampler->solution_count() == 0)
        throw EmptySupportError("PROC query: conditioned solution set is empty");
      it = shared_->samplers.emplace(excluded, std::move(sampler)).first;
    }
    return *it->second;
  }

  std::shared_ptr<Shared> shared_;
};

// ---------------------------------------------------------------------------
// Circuit-formula property
// ---------------------------------------------------------------------------

struct CircuitVerdict {
  enum class Status { valid, invalid, unvalidated };
  Status status = Status::unvalidated;
  // Two distinct solutions agreeing on U (full value masks).
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  std::string message;

  bool valid() const { return status == Status::valid; }
};

inline std::string_view to_string(CircuitVerdict::Status s) {
  switch (s) {
    case CircuitVerdict::Status::valid: return "valid";
    case CircuitVerdict::Status::invalid: return "invalid";
    default: return "unvalidated";
  }
}

// Valid iff |sol(φ)| = |sol(φ)↓U|, i.e. every U-projection extends uniquely.
inline CircuitVerdict validate_circuit_property(const CircuitFormula& f, const CountOptions& opts = {}) {
  CircuitVerdict verdict;
  const int cap = std::min(opts.max_vars, kMaxFormulaVars);
  if (f.num_vars > cap) {
    verdict.message = "formula exceeds the variable cap (" + std::to_string(cap) + "); property not checked";
    return verdict;
  }
  const std::uint64_t all = f.all_mask();
  const std::uint64_t u = f.input_mask();
  if (count_projected(f, all, {}, opts) == count_projected(f, u, {}, opts)) {
    verdict.status = CircuitVerdict::Status::valid;
    verdict.message = "every solution is determined by its input assignment";
    return verdict;
  }
  // Descend on U towards an input assignment with several extensions.
  PartialAssignment prefix;
  for (int var : f.inputs) {
    const PartialAssignment zero = prefix.with(var, false);
    prefix = count_projected(f, all, zero, opts) > count_projected(f, u, zero, opts) ? zero : prefix.with(var, true);
  }
  const auto first = find_model(f, prefix, {}, opts);
  const auto second = first ? find_model(f, prefix, {*first}, opts) : std::nullopt;
  verdict.status = CircuitVerdict::Status::invalid;
  if (first && second) verdict.witness = std::make_pair(*first, *second);
  verdict.message = "two distinct solutions share the same input assignment";
  return verdict;
}

// ---------------------------------------------------------------------------
// Enumeration baseline
// ---------------------------------------------------------------------------

struct ExactFormulaOptions {
  CountOptions count;
  // Maximum number of output assignments to enumerate.
  std::uint64_t max_eval = std::uint64_t{1} << 22;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct ExactFormulaResult {
  double entropy = 0.0;
  std::uint64_t eval_queries = 0;  // |sol(φ)↓V|
  Count denominator = 0;
  std::vector<std::pair<Outcome, Count>> numerators;  // ascending σ
};

// H(φ) by enumerating sol(φ)↓V and counting each numerator.
inline ExactFormulaResult exact_entropy_formula(const CircuitFormula& formula, const ExactFormulaOptions& opts = {}) {
  CircuitFormula f = formula;
  f.blocked.clear();
  ExactFormulaResult out;
  out.denominator = count_projected(f, f.input_mask(), {}, opts.count);
  if (out.denominator == 0) throw EmptySupportError("exact entropy: formula is unsatisfiable");
  const std::uint64_t all = f.all_mask();
  enum class Stop { none, cap, timeout } stop = Stop::none;
  enumerate_projected(
      f, f.output_mask(),
      [&](std::uint64_t values) {
        if (out.eval_queries >= opts.max_eval) {
          stop = Stop::cap;
          return false;
        }
        if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) {
          stop = Stop::timeout;
          return false;
        }
        ++out.eval_queries;
        const Outcome sigma = project_outputs(f, values);
        out.numerators.emplace_back(sigma, count_projected(f, all, output_assignment(f, sigma), opts.count));
        return true;
      },
      {}, opts.count);
  if (stop == Stop::timeout) throw TimeoutError("exact entropy: timeout");
  if (stop == Stop::cap)
    throw ResourceCapError("exact entropy: more than " + std::to_string(opts.max_eval) + " output assignments");
  std::sort(out.numerators.begin(), out.numerators.end());
  CompensatedSum h;
  const double den = static_cast<double>(out.denominator);
  for (const auto& [sigma, num] : out.numerators) {
    const double p = static_cast<double>(num) / den;
    h.add(p * -std::log2(p));
  }
  out.entropy = h.value();
  return out;
}

// p_σ table (ascending σ) as doubles.
inline std::vector<double> formula_probabilities(const ExactFormulaResult& exact) {
  std::vector<double> probs;
  probs.reserve(exact.numerators.size());
  for (const auto& [sigma, num] : exact.numerators)
    probs.push_back(static_cast<double>(num) / static_cast<double>(exact.denominator));
  return probs;
}

}  // namespace entropx
