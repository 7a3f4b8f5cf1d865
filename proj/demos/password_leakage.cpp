// Leakage of a password checker: entropy of its output over uniform guesses.
#include <cstdio>

#include "entropx.hpp"

int main() {
  using namespace entropx;
  const CircuitFormula checker = circuits::password_checker(10, 0x2B5);

  const CircuitVerdict verdict = validate_circuit_property(checker);
  std::printf("circuit property: %s\n", std::string(to_string(verdict.status)).c_str());

  const ExactFormulaResult exact = exact_entropy_formula(checker);
  std::printf("exact leakage  %.8f bits (%s output counts)\n", exact.entropy, to_string(exact.eval_queries).c_str());

  FormulaOracle oracle(checker);
  EstimationParams params;
  params.epsilon = 0.3;
  params.delta = 0.1;
  params.seed = 7;
  params.mode = Mode::qif;
  const EstimationResult r = estimate_entropy(oracle, params);
  std::printf("estimate       %.8f bits (%llu counter calls, %llu sampler calls)\n", r.h_hat,
              static_cast<unsigned long long>(r.ledger.counter_queries),
              static_cast<unsigned long long>(r.ledger.sampler_queries));
}
