#pragma once

// Exact projected model counting.
//
// count_projected is an exhaustive DPLL-style search: unit propagation,
// splitting the residual clauses into variable-disjoint components, and
// branching on the lowest unassigned projection variable of each component.
// Components without projection variables only need a satisfiability check.
// No component cache is kept; each call starts from scratch.
//
// count_projected_bruteforce enumerates all 2^num_vars assignments and is the
// reference the search engine is tested against.

#include <bit>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_set>
#include <vector>

#include "entropx/cnf.hpp"
#include "entropx/core.hpp"

namespace entropx {

struct CountOptions {
  int max_vars = kMaxFormulaVars;
};

namespace detail {

struct MaskClause {
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  std::uint64_t vars() const { return pos | neg; }
};

inline MaskClause unit_clause(int var, bool value) {
  return value ? MaskClause{var_bit(var), 0} : MaskClause{0, var_bit(var)};
}

// Clause forbidding the output assignment σ.
inline MaskClause blocking_clause(const CircuitFormula& f, Outcome sigma) {
  MaskClause c;
  for (std::size_t i = 0; i < f.outputs.size(); ++i) {
    if ((sigma.value >> i) & 1)
      c.neg |= var_bit(f.outputs[i]);
    else
      c.pos |= var_bit(f.outputs[i]);
  }
  return c;
}

inline void check_caps(const CircuitFormula& f, const CountOptions& opts) {
  const int cap = std::min(opts.max_vars, kMaxFormulaVars);
  if (f.num_vars > cap)
    throw ResourceCapError("formula has " + std::to_string(f.num_vars) + " variables; the counting cap is " +
                           std::to_string(cap));
}

// Clause masks of f plus its blocking clauses and the assumptions as units.
// Tautologies are dropped. Returns nullopt if the input is trivially unsat
// (an empty clause).
inline std::optional<std::vector<MaskClause>> build_clauses(const CircuitFormula& f, PartialAssignment assumptions,
                                                            bool include_blocking = true) {
  std::vector<MaskClause> out;
  out.reserve(f.clauses.size() + f.blocked.size() + 64);
  for (const auto& clause : f.clauses) {
    MaskClause c;
    for (int lit : clause) (lit > 0 ? c.pos : c.neg) |= var_bit(std::abs(lit));
    if (c.pos & c.neg) continue;
    if (c.vars() == 0) return std::nullopt;
    out.push_back(c);
  }
  if (include_blocking)
    for (Outcome sigma : f.blocked) {
      MaskClause c = blocking_clause(f, sigma);
      if (c.vars() == 0) return std::nullopt;  // V = ∅ and the only assignment is blocked
      out.push_back(c);
    }
  std::uint64_t bits = assumptions.assigned;
  while (bits) {
    const int var = std::countr_zero(bits) + 1;
    bits &= bits - 1;
    out.push_back(unit_clause(var, (assumptions.values >> (var - 1)) & 1));
  }
  return out;
}

// Unit propagation to fixpoint. On success `clauses` holds the residual
// (unsatisfied, reduced) clauses and `assigned`/`values` the forced literals.
inline bool propagate(std::vector<MaskClause>& clauses, std::uint64_t& assigned, std::uint64_t& values) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::size_t keep = 0;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      const MaskClause c = clauses[i];
      if ((c.pos & assigned & values) || (c.neg & assigned & ~values)) continue;  // satisfied
      const MaskClause rest{c.pos & ~assigned, c.neg & ~assigned};
      const std::uint64_t free = rest.vars();
      if (free == 0) return false;
      if ((free & (free - 1)) == 0) {
        assigned |= free;
        if (rest.pos) values |= free;
        else values &= ~free;
        changed = true;
        continue;
      }
      clauses[keep++] = rest;
    }
    clauses.resize(keep);
  }
  return true;
}

struct Component {
  std::uint64_t vars = 0;
  std::vector<MaskClause> clauses;
};

inline std::vector<Component> split_components(const std::vector<MaskClause>& clauses) {
  std::vector<Component> comps;
  for (const MaskClause& c : clauses) {
    Component merged{c.vars(), {c}};
    std::vector<Component> rest;
    for (auto& comp : comps) {
      if (comp.vars & merged.vars) {
        merged.vars |= comp.vars;
        merged.clauses.insert(merged.clauses.end(), comp.clauses.begin(), comp.clauses.end());
      } else {
        rest.push_back(std::move(comp));
      }
    }
    rest.push_back(std::move(merged));
    comps = std::move(rest);
  }
  return comps;
}

inline bool satisfiable(std::vector<MaskClause> clauses, std::uint64_t assigned = 0, std::uint64_t values = 0,
                        std::uint64_t* model = nullptr) {
  if (!propagate(clauses, assigned, values)) return false;
  if (clauses.empty()) {
    if (model) *model = values;
    return true;
  }
  const int var = std::countr_zero(clauses.front().vars()) + 1;
  for (bool value : {false, true}) {
    std::uint64_t a = assigned | var_bit(var);
    std::uint64_t v = value ? values | var_bit(var) : values & ~var_bit(var);
    if (satisfiable(clauses, a, v, model)) return true;
  }
  return false;
}

class SearchCounter {
 public:
  explicit SearchCounter(std::uint64_t projection) : projection_(projection) {}

  // Projected count over the variables in `scope`; `clauses` mention only
  // variables in `scope`.
  Count count(std::vector<MaskClause> clauses, std::uint64_t scope) const {
    std::uint64_t assigned = 0, values = 0;
    if (!propagate(clauses, assigned, values)) return 0;
    const std::uint64_t free = scope & ~assigned;
    std::uint64_t touched = 0;
    for (const auto& c : clauses) touched |= c.vars();
    Count total = pow2(std::popcount(free & ~touched & projection_));
    if (clauses.empty()) return total;

    for (auto& comp : split_components(clauses)) {
      const std::uint64_t proj = comp.vars & projection_;
      Count factor;
      if (proj == 0) {
        factor = satisfiable(std::move(comp.clauses)) ? 1 : 0;
      } else {
        const int var = std::countr_zero(proj) + 1;
        auto with_true = comp.clauses;
        with_true.push_back(unit_clause(var, true));
        comp.clauses.push_back(unit_clause(var, false));
        factor = count(std::move(with_true), comp.vars);
        factor += count(std::move(comp.clauses), comp.vars);
      }
      if (factor == 0) return 0;
      total *= factor;
    }
    return total;
  }

 private:
  std::uint64_t projection_;
};

}  // namespace detail

// |{τ↓P : τ ⊨ f ∧ assumptions ∧ blocking}|, P given as a variable mask.
inline Count count_projected(const CircuitFormula& f, std::uint64_t projection, PartialAssignment assumptions = {},
                             const CountOptions& opts = {}) {
  detail::check_caps(f, opts);
  projection &= f.all_mask();
  auto clauses = detail::build_clauses(f, assumptions);
  if (!clauses) return 0;
  return detail::SearchCounter(projection).count(std::move(*clauses), f.all_mask());
}

inline Count count_projected(const CircuitFormula& f, const std::vector<int>& projection,
                             PartialAssignment assumptions = {}, const CountOptions& opts = {}) {
  return count_projected(f, CircuitFormula::mask_of(projection), assumptions, opts);
}

inline constexpr int kMaxBruteForceVars = 24;

inline Count count_projected_bruteforce(const CircuitFormula& f, std::uint64_t projection,
                                        PartialAssignment assumptions = {}) {
  if (f.num_vars > kMaxBruteForceVars)
    throw ResourceCapError("brute-force enumeration is limited to " + std::to_string(kMaxBruteForceVars) + " variables");
  projection &= f.all_mask();
  std::unordered_set<std::uint64_t> seen;
  const std::uint64_t total = std::uint64_t{1} << f.num_vars;
  for (std::uint64_t tau = 0; tau < total; ++tau) {
    if ((tau & assumptions.assigned) != (assumptions.values & assumptions.assigned)) continue;
    if (satisfies(f, tau)) seen.insert(tau & projection);
  }
  return seen.size();
}

// Calls visit(σ) for every σ ∈ sol(f ∧ assumptions ∧ blocking)↓projection,
// branching on projection variables in ascending order and pruning
// unsatisfiable subtrees. σ is a variable-indexed value mask. Stops early
// (returning false) when visit returns false.
inline bool enumerate_projected(const CircuitFormula& f, std::uint64_t projection,
                                const std::function<bool(std::uint64_t)>& visit, PartialAssignment assumptions = {},
                                const CountOptions& opts = {}) {
  detail::check_caps(f, opts);
  projection &= f.all_mask();
  auto clauses = detail::build_clauses(f, assumptions);
  if (!clauses) return true;

  std::function<bool(std::vector<detail::MaskClause>, std::uint64_t, std::uint64_t)> rec =
      [&](std::vector<detail::MaskClause> cs, std::uint64_t assigned, std::uint64_t values) -> bool {
    if (!detail::propagate(cs, assigned, values)) return true;
    const std::uint64_t open = projection & ~assigned;
    if (open == 0) {
      if (!detail::satisfiable(cs, assigned, values)) return true;
      return visit(values & projection);
    }
    if (!detail::satisfiable(cs, assigned, values)) return true;
    const int var = std::countr_zero(open) + 1;
    for (bool value : {false, true}) {
      const std::uint64_t a = assigned | var_bit(var);
      const std::uint64_t v = value ? values | var_bit(var) : values & ~var_bit(var);
      if (!rec(cs, a, v)) return false;
    }
    return true;
  };
  return rec(std::move(*clauses), 0, 0);
}

// Some satisfying full assignment, if any.
inline std::optional<std::uint64_t> find_model(const CircuitFormula& f, PartialAssignment assumptions = {},
                                               const std::vector<std::uint64_t>& forbidden_full = {},
                                               const CountOptions& opts = {}) {
  detail::check_caps(f, opts);
  auto clauses = detail::build_clauses(f, assumptions);
  if (!clauses) return std::nullopt;
  const std::uint64_t all = f.all_mask();
  for (std::uint64_t tau : forbidden_full) clauses->push_back({all & ~tau, all & tau});
  std::uint64_t model = 0;
  if (!detail::satisfiable(std::move(*clauses), 0, 0, &model)) return std::nullopt;
  return model & all;
}

}  // namespace entropx
