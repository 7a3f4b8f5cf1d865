// Estimate the entropy of an explicit table and compare with the exact value.
#include <cstdio>

#include "entropx.hpp"

int main() {
  using namespace entropx;
  // One heavy outcome plus 63 equal light ones: takes the dominator branch.
  std::vector<std::pair<std::string, double>> rows{{"heavy", 0.6}};
  for (int i = 0; i < 63; ++i) rows.emplace_back("o" + std::to_string(i), 0.4 / 63);
  ExplicitDistribution dist = ExplicitDistribution::from_table(std::move(rows), 6);

  ExplicitOracle oracle(dist);
  EstimationParams params;
  params.epsilon = 0.3;
  params.delta = 0.1;
  params.seed = 42;
  const EstimationResult r = estimate_entropy(oracle, params);

  std::printf("exact     %.6f bits\n", exact_entropy(dist));
  std::printf("estimate  %.6f bits (dominator %s, r = %.4f)\n", r.h_hat, r.dominator_found ? "yes" : "no",
              r.r.value_or(0.0));
  std::printf("queries   %llu PROC calls, t = %llu, T = %llu\n",
              static_cast<unsigned long long>(r.ledger.proc_queries), static_cast<unsigned long long>(r.t),
              static_cast<unsigned long long>(r.T));
}
