#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>

#include "entropx/cnf.hpp"
#include "entropx/counter.hpp"
#include "entropx/core.hpp"

namespace entropx {

// Exactly uniform sampler over the full solutions of a formula (including its
// blocking clauses), by counting-guided self-reduction: variables are fixed in
// ascending index order, x_i = 1 with probability #(prefix, x_i=1)/#(prefix).
// Branch decisions use exact integer draws. Prefix counts are memoized; the
// memo only affects speed, never the sample drawn for a given Rng stream.
class UniformSampler {
 public:
  explicit UniformSampler(CircuitFormula formula, CountOptions opts = {})
      : formula_(std::move(formula)), opts_(opts) {
    detail::check_caps(formula_, opts_);
  }

  const CircuitFormula& formula() const { return formula_; }

  Count solution_count() { return prefix_count(0, 0); }

  // Full assignment as a value mask (bit v−1 = value of variable v).
  std::uint64_t sample(Rng& rng) {
    const int n = formula_.num_vars;
    std::uint64_t values = 0;
    Count here = prefix_count(0, 0);
    if (here == 0) throw EmptySupportError("uniform sampler: formula has no solutions");
    for (int depth = 0; depth < n; ++depth) {
      const int var = depth + 1;
      if (here == pow2(n - depth)) {
        // Every completion is a solution: remaining variables are fair coins.
        for (int v = var; v <= n; ++v)
          if (rng.next() >> 63) values |= var_bit(v);
        break;
      }
      const std::uint64_t with_one = values | var_bit(var);
      const Count ones = prefix_count(depth + 1, with_one);
      bool pick_one;
      if (ones == 0)
        pick_one = false;
      else if (ones == here)
        pick_one = true;
      else
        pick_one = rng.below(here) < ones;
      if (pick_one) {
        values = with_one;
        here = ones;
      } else {
        here -= ones;
      }
    }
    return values;
  }

 private:
  // Number of full solutions whose first `depth` variables match `values`.
  Count prefix_count(int depth, std::uint64_t values) {
    const auto key = std::make_pair(depth, values);
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    PartialAssignment prefix;
    prefix.assigned = depth >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << depth) - 1;
    prefix.values = values & prefix.assigned;
    const Count c = count_projected(formula_, formula_.all_mask(), prefix, opts_);
    std::lock_guard lock(mutex_);
    memo_.emplace(key, c);
    return c;
  }

  CircuitFormula formula_;
  CountOptions opts_;
  std::mutex mutex_;
  std::map<std::pair<int, std::uint64_t>, Count> memo_;
};

}  // namespace entropx
