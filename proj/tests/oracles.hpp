#pragma once

// Reference computations used as ground truth by the tests. Deliberately
// naive: full enumeration over integer-literal clauses and long-double sums,
// sharing no code with the library's counter, sampler or entropy routines.

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "entropx/cnf.hpp"

namespace oracle {

inline bool bit(std::uint64_t tau, int var) { return (tau >> (var - 1)) & 1; }

inline bool satisfied(const std::vector<std::vector<int>>& clauses, std::uint64_t tau) {
  for (const auto& clause : clauses) {
    bool any = false;
    for (int lit : clause) {
      const bool value = bit(tau, lit > 0 ? lit : -lit);
      if ((lit > 0) == value) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  return true;
}

// σ packed as in Outcome: bit i = value of the i-th listed output variable.
inline std::uint64_t pack(const std::vector<int>& vars, std::uint64_t tau) {
  std::uint64_t out = 0;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (bit(tau, vars[i])) out |= std::uint64_t{1} << i;
  return out;
}

struct Enumeration {
  std::uint64_t solutions = 0;
  std::set<std::uint64_t> input_projections;
  std::map<std::uint64_t, std::uint64_t> sigma_counts;  // σ -> |sol(φ(V ↦ σ))|
  bool circuit_property = true;
};

// Blocked σ (from f.blocked) are removed, as they are for the library.
inline Enumeration enumerate(const entropx::CircuitFormula& f) {
  if (f.num_vars > 24) throw std::runtime_error("oracle::enumerate: too many variables");
  Enumeration e;
  std::map<std::uint64_t, std::uint64_t> per_input;
  for (std::uint64_t tau = 0; tau < (std::uint64_t{1} << f.num_vars); ++tau) {
    if (!satisfied(f.clauses, tau)) continue;
    const std::uint64_t sigma = pack(f.outputs, tau);
    if (f.blocked.count(entropx::Outcome{sigma})) continue;
    ++e.solutions;
    const std::uint64_t u = pack(f.inputs, tau);
    e.input_projections.insert(u);
    if (++per_input[u] > 1) e.circuit_property = false;
    ++e.sigma_counts[sigma];
  }
  return e;
}

// Projected count on an arbitrary variable list under partial assignment
// {var: value}.
inline std::uint64_t projected_count(const entropx::CircuitFormula& f, const std::vector<int>& projection,
                                     const std::map<int, bool>& assumptions = {}) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t tau = 0; tau < (std::uint64_t{1} << f.num_vars); ++tau) {
    bool ok = true;
    for (const auto& [var, value] : assumptions)
      if (bit(tau, var) != value) ok = false;
    if (!ok || !satisfied(f.clauses, tau)) continue;
    if (f.blocked.count(entropx::Outcome{pack(f.outputs, tau)})) continue;
    seen.insert(pack(projection, tau));
  }
  return seen.size();
}

// p_σ = count(σ) / |sol↓U| for the unblocked formula.
inline std::map<std::uint64_t, long double> induced_distribution(entropx::CircuitFormula f) {
  f.blocked.clear();
  const Enumeration e = enumerate(f);
  std::map<std::uint64_t, long double> p;
  const long double den = static_cast<long double>(e.input_projections.size());
  for (const auto& [sigma, c] : e.sigma_counts) p[sigma] = static_cast<long double>(c) / den;
  return p;
}

inline long double entropy(const std::vector<long double>& probs) {
  long double h = 0.0L;
  for (long double p : probs)
    if (p > 0.0L) h -= p * std::log2(p);
  return h;
}

inline long double entropy(const std::vector<double>& probs) {
  return entropy(std::vector<long double>(probs.begin(), probs.end()));
}

inline long double entropy(const std::map<std::uint64_t, long double>& dist) {
  std::vector<long double> probs;
  for (const auto& [k, p] : dist) probs.push_back(p);
  return entropy(probs);
}

// E[log2 1/D(Y)] for Y drawn from D conditioned on the rows not in `excluded`.
inline long double conditional_self_information(const std::vector<double>& probs, const std::set<std::size_t>& excluded) {
  long double mass = 0.0L, acc = 0.0L;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (excluded.count(i) || probs[i] <= 0.0) continue;
    mass += probs[i];
    acc -= probs[i] * std::log2(static_cast<long double>(probs[i]));
  }
  return acc / mass;
}

// Σ p (log2 p)^2.
inline long double second_moment(const std::vector<double>& probs) {
  long double s = 0.0L;
  for (double p : probs)
    if (p > 0.0) {
      const long double l = std::log2(static_cast<long double>(p));
      s += p * l * l;
    }
  return s;
}

// Total-variation distance between an empirical histogram and a law.
inline double tv_distance(const std::map<std::uint64_t, std::uint64_t>& counts, std::uint64_t draws,
                          const std::map<std::uint64_t, long double>& law) {
  std::set<std::uint64_t> keys;
  for (const auto& [k, c] : counts) keys.insert(k);
  for (const auto& [k, p] : law) keys.insert(k);
  long double tv = 0.0L;
  for (auto k : keys) {
    const long double emp = counts.count(k) ? static_cast<long double>(counts.at(k)) / draws : 0.0L;
    const long double ref = law.count(k) ? law.at(k) : 0.0L;
    tv += std::fabs(emp - ref);
  }
  return static_cast<double>(tv / 2.0L);
}

}  // namespace oracle
