#pragma once

// Tseitin-encoded circuit construction and the generated formula families
// used by tests and the desk benchmark corpus.

#include <cstdint>
#include <string>
#include <vector>

#include "entropx/cnf.hpp"
#include "entropx/core.hpp"

namespace entropx {

class CircuitBuilder {
 public:
  int input() {
    const int v = fresh();
    f_.inputs.push_back(v);
    return v;
  }

  int gate_and(int a, int b) {
    const int g = fresh();
    clause({-g, a});
    clause({-g, b});
    clause({g, -a, -b});
    return g;
  }

  int gate_or(int a, int b) {
    const int g = fresh();
    clause({g, -a});
    clause({g, -b});
    clause({-g, a, b});
    return g;
  }

  int gate_xor(int a, int b) {
    const int g = fresh();
    clause({-g, a, b});
    clause({-g, -a, -b});
    clause({g, -a, b});
    clause({g, a, -b});
    return g;
  }

  // g ↔ (l_1 ∧ … ∧ l_k) over literals.
  int gate_and_all(const std::vector<int>& lits) {
    const int g = fresh();
    std::vector<int> big{g};
    for (int l : lits) {
      clause({-g, l});
      big.push_back(-l);
    }
    clause(big);
    return g;
  }

  // New output variable equal to `wire`.
  int output(int wire) {
    const int v = fresh();
    clause({-v, wire});
    clause({v, -wire});
    f_.outputs.push_back(v);
    return v;
  }

  // Output variable tied to a constant.
  int output_constant(bool value) {
    const int v = fresh();
    clause({value ? v : -v});
    f_.outputs.push_back(v);
    return v;
  }

  void clause(std::vector<int> lits) { f_.clauses.push_back(std::move(lits)); }

  CircuitFormula build() const { return f_; }

 private:
  int fresh() { return ++f_.num_vars; }
  CircuitFormula f_;
};

namespace circuits {

// Hand-sized AND gate: vars u1=1, u2=2, v1=3 with v1 = u1 ∧ u2.
inline CircuitFormula and_gate() {
  CircuitFormula f;
  f.num_vars = 3;
  f.inputs = {1, 2};
  f.outputs = {3};
  f.clauses = {{-3, 1}, {-3, 2}, {3, -1, -2}};
  return f;
}

// v1 = u1 ⊕ u2 with vars u1=1, u2=2, v1=3.
inline CircuitFormula xor_gate() {
  CircuitFormula f;
  f.num_vars = 3;
  f.inputs = {1, 2};
  f.outputs = {3};
  f.clauses = {{-3, 1, 2}, {-3, -1, -2}, {3, -1, 2}, {3, 1, -2}};
  return f;
}

// Password checker: outputs `copies` copies of [u == secret] over n input bits.
// The reject output has mass 1 − 2^-n.
inline CircuitFormula password_checker(int n, std::uint64_t secret, int copies = 2) {
  CircuitBuilder b;
  std::vector<int> lits;
  for (int i = 0; i < n; ++i) {
    const int u = b.input();
    lits.push_back((secret >> i) & 1 ? u : -u);
  }
  const int match = b.gate_and_all(lits);
  for (int c = 0; c < copies; ++c) b.output(match);
  return b.build();
}

// Outputs v_1 = u_1, v_i = u_i ⊕ u_{i−1}: a bijection, so H = k and
// |sol↓V| = 2^k.
inline CircuitFormula prefix_xor(int k) {
  CircuitBuilder b;
  std::vector<int> u;
  for (int i = 0; i < k; ++i) u.push_back(b.input());
  b.output(u[0]);
  for (int i = 1; i < k; ++i) b.output(b.gate_xor(u[i], u[i - 1]));
  return b.build();
}

// k-bit ripple-carry adder over inputs a, b (2k inputs, k+1 outputs).
inline CircuitFormula adder(int k) {
  CircuitBuilder b;
  std::vector<int> x, y;
  for (int i = 0; i < k; ++i) x.push_back(b.input());
  for (int i = 0; i < k; ++i) y.push_back(b.input());
  int carry = 0;
  for (int i = 0; i < k; ++i) {
    const int half = b.gate_xor(x[i], y[i]);
    if (carry == 0) {
      b.output(half);
      carry = b.gate_and(x[i], y[i]);
    } else {
      b.output(b.gate_xor(half, carry));
      carry = b.gate_or(b.gate_and(x[i], y[i]), b.gate_and(half, carry));
    }
  }
  b.output(carry);
  return b.build();
}

// Balanced AND / XOR tree over n inputs, reduced until at most `width`
// wires remain; those become the outputs.
inline CircuitFormula gate_tree(int n, bool use_xor, int width = 2) {
  CircuitBuilder b;
  std::vector<int> level;
  for (int i = 0; i < n; ++i) level.push_back(b.input());
  while (static_cast<int>(level.size()) > width) {
    std::vector<int> next;
    for (std::size_t i = 0; i + 1 < level.size(); i += 2)
      next.push_back(use_xor ? b.gate_xor(level[i], level[i + 1]) : b.gate_and(level[i], level[i + 1]));
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  for (int w : level) b.output(w);
  return b.build();
}

// Random circuit: n inputs, `gates` random AND/OR/XOR gates over earlier
// wires (negations allowed), outputs from the last `outputs` gates.
inline CircuitFormula random_circuit(Rng& rng, int n, int gates, int outputs) {
  CircuitBuilder b;
  std::vector<int> wires;
  for (int i = 0; i < n; ++i) wires.push_back(b.input());
  std::vector<int> made;
  for (int g = 0; g < gates; ++g) {
    auto pick = [&] {
      const int w = wires[rng.below(static_cast<std::uint64_t>(wires.size()))];
      return rng.next() >> 63 ? -w : w;
    };
    const int a = pick();
    int c = pick();
    while (std::abs(c) == std::abs(a) && wires.size() > 1) c = pick();
    int out;
    switch (rng.below(std::uint64_t{3})) {
      case 0: out = b.gate_and(a, c); break;
      case 1: out = b.gate_or(a, c); break;
      default: out = b.gate_xor(a, c); break;
    }
    wires.push_back(out);
    made.push_back(out);
  }
  const int take = std::min<int>(outputs, static_cast<int>(made.size()));
  for (int i = static_cast<int>(made.size()) - take; i < static_cast<int>(made.size()); ++i) b.output(made[i]);
  if (take == 0) b.output(wires.front());
  return b.build();
}

// Random k-CNF with random U / V blocks (not necessarily a circuit formula).
inline CircuitFormula random_cnf(Rng& rng, int vars, int clauses, int k) {
  CircuitFormula f;
  f.num_vars = vars;
  for (int c = 0; c < clauses; ++c) {
    std::vector<int> lits;
    const int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    for (int i = 0; i < len; ++i) {
      const int v = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(vars)));
      lits.push_back(rng.next() >> 63 ? -v : v);
    }
    f.clauses.push_back(std::move(lits));
  }
  for (int v = 1; v <= vars; ++v) {
    switch (rng.below(std::uint64_t{3})) {
      case 0: f.inputs.push_back(v); break;
      case 1: f.outputs.push_back(v); break;
      default: break;
    }
  }
  if (f.outputs.empty()) f.outputs.push_back(vars);
  std::erase(f.inputs, f.outputs.front());
  return f;
}

}  // namespace circuits
}  // namespace entropx
