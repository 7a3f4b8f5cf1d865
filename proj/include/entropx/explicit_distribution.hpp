#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "entropx/core.hpp"

namespace entropx {

// Probability table over a declared universe of 2^m outcomes. Zero-mass rows
// are dropped, so the stored support may be smaller than 2^m.
class ExplicitDistribution {
 public:
  ExplicitDistribution() = default;

  static ExplicitDistribution from_table(std::vector<std::pair<std::string, double>> rows, int m,
                                         double sum_tolerance = 1e-12) {
    ExplicitDistribution d;
    d.m_ = m;
    std::unordered_set<std::string> seen;
    CompensatedSum total;
    for (auto& [id, p] : rows) {
      if (!std::isfinite(p) || p < 0.0) throw ValidationError("probability of '" + id + "' is negative or not finite");
      if (!seen.insert(id).second) throw ValidationError("duplicate outcome id '" + id + "'");
      total.add(p);
      if (p == 0.0) continue;
      d.ids_.push_back(std::move(id));
      d.probs_.push_back(p);
    }
    if (d.probs_.empty()) throw ValidationError("distribution has no positive-mass outcome");
    if (std::fabs(total.value() - 1.0) > sum_tolerance)
      throw ValidationError("probabilities sum to " + std::to_string(total.value()) + ", not 1");
    if (m < 0 || m > 62) throw ValidationError("m must lie in [0, 62]");
    if (d.probs_.size() > (std::uint64_t{1} << m))
      throw ValidationError("support of size " + std::to_string(d.probs_.size()) + " does not fit in 2^m = 2^" +
                            std::to_string(m) + " outcomes");
    return d;
  }

  // Ids are the row positions; m defaults to the smallest universe holding the rows.
  static ExplicitDistribution from_probs(std::span<const double> probs, std::optional<int> m = std::nullopt,
                                         double sum_tolerance = 1e-12) {
    std::vector<std::pair<std::string, double>> rows;
    rows.reserve(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) rows.emplace_back(std::to_string(i), probs[i]);
    int bits = 0;
    while ((std::uint64_t{1} << bits) < probs.size()) ++bits;
    return from_table(std::move(rows), m.value_or(bits), sum_tolerance);
  }

  std::size_t size() const { return probs_.size(); }
  int universe_bits() const { return m_; }
  double probability(std::size_t i) const { return probs_.at(i); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }
  std::span<const double> probabilities() const { return probs_; }

 private:
  std::vector<std::string> ids_;
  std::vector<double> probs_;
  int m_ = 0;
};

inline double exact_entropy(std::span<const double> probs) {
  CompensatedSum h;
  for (double p : probs)
    if (p > 0.0) h.add(p * -std::log2(p));
  return h.value();
}

inline double exact_entropy(const ExplicitDistribution& dist) { return exact_entropy(dist.probabilities()); }

namespace detail {

// Renormalized inverse-CDF table over the rows not excluded.
struct ConditionalTable {
  std::vector<std::uint32_t> rows;   // empty ⇒ identity mapping
  std::vector<double> cumulative;    // inclusive prefix sums
  double total = 0.0;
};

}  // namespace detail

// Exact PROC over an explicit table. Conditioning never rejects: each distinct
// exclusion set gets its own cumulative table, built once and shared by clones.
class ExplicitOracle final : public ProcOracle {
 public:
  explicit ExplicitOracle(ExplicitDistribution dist)
      : shared_(std::make_shared<Shared>(std::move(dist))) {}

  int universe_bits() const override { return shared_->dist.universe_bits(); }

  std::unique_ptr<ProcOracle> clone() const override {
    return std::unique_ptr<ProcOracle>(new ExplicitOracle(shared_));
  }

  const ExplicitDistribution& distribution() const { return shared_->dist; }

 protected:
  ProcQueryResult do_query(const ExclusionSet& excluded, Rng& rng) override {
    const detail::ConditionalTable& table = table_for(excluded);
    const double x = rng.uniform01() * table.total;
    auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), x);
    if (it == table.cumulative.end()) --it;
    const auto k = static_cast<std::size_t>(it - table.cumulative.begin());
    const std::size_t row = table.rows.empty() ? k : table.rows[k];
    return {Outcome{row}, shared_->dist.probability(row)};
  }

 private:
  struct Shared {
    explicit Shared(ExplicitDistribution d) : dist(std::move(d)) {}
    ExplicitDistribution dist;
    std::shared_mutex mutex;
    std::map<ExclusionSet, std::shared_ptr<const detail::ConditionalTable>> tables;
  };

  explicit ExplicitOracle(std::shared_ptr<Shared> shared) : shared_(std::move(shared)) {}

  const detail::ConditionalTable& table_for(const ExclusionSet& excluded) {
    {
      std::shared_lock lock(shared_->mutex);
      if (auto it = shared_->tables.find(excluded); it != shared_->tables.end()) return *it->second;
    }
    auto table = std::make_shared<detail::ConditionalTable>();
    const auto probs = shared_->dist.probabilities();
    CompensatedSum running;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (!excluded.empty() && excluded.contains(Outcome{i})) continue;
      if (!excluded.empty()) table->rows.push_back(static_cast<std::uint32_t>(i));
      running.add(probs[i]);
      table->cumulative.push_back(running.value());
    }
    if (table->cumulative.empty())
      throw EmptySupportError("PROC query: conditioning set has zero probability mass");
    table->total = table->cumulative.back();
    std::unique_lock lock(shared_->mutex);
    auto [it, inserted] = shared_->tables.emplace(excluded, std::move(table));
    return *it->second;
  }

  std::shared_ptr<Shared> shared_;
};

}  // namespace entropx
