#pragma once

// Second-moment bounds on self-information and their numerical checks.
//
// For a (sub-)distribution D over 2^m outcomes write H = Σ D·log(1/D) and
// M2 = Σ D·log²D. The estimator's batch sizes rely on
//   H ≥ 1         ⇒  M2/H² ≤ (1 + log(m + log m + 1.1)/m)·m
//   H ≤ 1, m ≥ 2  ⇒  M2    ≤ m + log(m + log m + 2.5)
//   all p ≥ 2^-n  ⇒  M2    ≤ n·H
// and the median-of-means step needs (ratio − 1)/(t·ε²) ≤ 1/6.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entropx/core.hpp"
#include "entropx/estimator.hpp"
#include "entropx/explicit_distribution.hpp"

namespace entropx {

struct Moments {
  double entropy = 0.0;
  double second_moment = 0.0;
};

// Sub-distributions (total mass below one) are accepted.
inline Moments moments(std::span<const double> probs) {
  CompensatedSum mass, h, m2;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw DomainError("moments: probabilities must be nonnegative");
    mass.add(p);
    if (p == 0.0) continue;
    const double info = -std::log2(p);
    h.add(p * info);
    m2.add(p * info * info);
  }
  if (mass.value() > 1.0 + 1e-12) throw DomainError("moments: total mass exceeds 1");
  return {h.value(), m2.value()};
}

inline double high_entropy_ratio_bound(int m) {
  const double md = m;
  return (1.0 + std::log2(md + std::log2(md) + 1.1) / md) * md;
}

inline double low_entropy_moment_bound(int m) {
  const double md = m;
  return md + std::log2(md + std::log2(md) + 2.5);
}

// Floating-point allowance for the ≤ comparisons.
inline constexpr double kBoundSlack = 1e-12;

inline bool within_bound(double value, double bound) { return value <= bound * (1.0 + kBoundSlack) + kBoundSlack; }

struct BoundReport {
  std::string kind;  // "moment" or "input_width"
  int m = 0;
  std::optional<int> n;
  double H = 0.0;
  double second_moment = 0.0;
  std::optional<double> ratio;
  double bound_high_entropy = 0.0;
  double bound_low_entropy = 0.0;
  std::optional<double> qif_bound;
  // Absent when the case lies outside the bound's hypotheses.
  std::optional<bool> satisfied;
  std::string note;
};

namespace detail {

inline int min_universe_bits(std::size_t support) {
  int bits = 0;
  while ((std::uint64_t{1} << bits) < support) ++bits;
  return bits;
}

inline std::size_t positive_count(std::span<const double> probs) {
  return static_cast<std::size_t>(std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
}

}  // namespace detail

inline BoundReport check_moment_bound(std::span<const double> probs, int m) {
  if (m < detail::min_universe_bits(detail::positive_count(probs)))
    throw DomainError("check_moment_bound: support does not fit in 2^m outcomes");
  const Moments mo = moments(probs);
  BoundReport rep;
  rep.kind = "moment";
  rep.m = m;
  rep.H = mo.entropy;
  rep.second_moment = mo.second_moment;
  if (m >= 1) {
    rep.bound_high_entropy = high_entropy_ratio_bound(m);
    rep.bound_low_entropy = low_entropy_moment_bound(m);
  }
  if (mo.entropy > 0.0) rep.ratio = mo.second_moment / (mo.entropy * mo.entropy);

  bool any_check = false;
  bool ok = true;
  if (mo.entropy >= 1.0) {
    any_check = true;
    ok = ok && within_bound(*rep.ratio, rep.bound_high_entropy);
  }
  if (mo.entropy <= 1.0) {
    if (m >= 2) {
      any_check = true;
      ok = ok && within_bound(mo.second_moment, rep.bound_low_entropy);
    } else {
      rep.note = "H <= 1 with m < 2 is outside the low-entropy bound's hypotheses";
    }
  }
  if (any_check) rep.satisfied = ok;
  return rep;
}

inline BoundReport check_moment_bound(std::span<const double> probs) {
  return check_moment_bound(probs, detail::min_universe_bits(detail::positive_count(probs)));
}

inline BoundReport check_input_width_bound(std::span<const double> probs, int n) {
  if (n < 0) throw DomainError("check_input_width_bound: n must be nonnegative");
  const Moments mo = moments(probs);
  BoundReport rep;
  rep.kind = "input_width";
  rep.n = n;
  rep.m = detail::min_universe_bits(detail::positive_count(probs));
  rep.H = mo.entropy;
  rep.second_moment = mo.second_moment;
  if (mo.entropy > 0.0) rep.ratio = mo.second_moment / (mo.entropy * mo.entropy);
  if (rep.m >= 1) {
    rep.bound_high_entropy = high_entropy_ratio_bound(rep.m);
    rep.bound_low_entropy = low_entropy_moment_bound(rep.m);
  }
  rep.qif_bound = n * mo.entropy;
  const double floor = std::ldexp(1.0, -n);
  for (double p : probs) {
    if (p > 0.0 && p < floor * (1.0 - kBoundSlack)) {
      rep.note = "precondition violated: some probability is below 2^-n";
      return rep;
    }
  }
  rep.satisfied = within_bound(mo.second_moment, *rep.qif_bound);
  return rep;
}

// ---------------------------------------------------------------------------
// Median-of-means hypothesis for the batch size the estimator would choose
// ---------------------------------------------------------------------------

struct BatchHypothesis {
  bool dominator = false;
  double conditioned_ratio = 1.0;
  std::uint64_t t = 0;
  double lhs = 0.0;  // (ratio − 1)/(t·ε²)
  bool holds = true;
};

// probs must be a full distribution. With n given, the circuit-formula sizing
// is used instead of the generic one.
inline BatchHypothesis check_batch_hypothesis(std::span<const double> probs, int m, double epsilon,
                                              std::optional<int> n = std::nullopt) {
  BatchHypothesis out;
  std::size_t heavy = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] > 0.5) heavy = i;
  out.dominator = heavy != probs.size();
  const double r = out.dominator ? probs[heavy] : 0.0;
  if (out.dominator && r >= 1.0) return out;  // point mass: nothing is sampled

  const double rest_mass = out.dominator ? 1.0 - r : 1.0;
  CompensatedSum first, second;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i == heavy || probs[i] <= 0.0) continue;
    const double cond = probs[i] / rest_mass;
    const double info = -std::log2(probs[i]);
    first.add(cond * info);
    second.add(cond * info * info);
  }
  out.conditioned_ratio = second.value() / (first.value() * first.value());
  if (n)
    out.t = batch_size_qif(*n, m, epsilon, out.dominator ? std::optional<double>(r) : std::nullopt);
  else
    out.t = batch_size_generic(m, epsilon, out.dominator);
  out.lhs = (out.conditioned_ratio - 1.0) / (static_cast<double>(out.t) * epsilon * epsilon);
  out.holds = out.lhs <= 1.0 / 6.0 + kBoundSlack;
  return out;
}

// ---------------------------------------------------------------------------
// Near-tightness construction
// ---------------------------------------------------------------------------

// Two outcomes of mass (1 − ε)/2 and ε spread evenly over the other 2^m − 2,
// with ε chosen so that H = 1 + Δ, Δ = 1/log^γ(2^m − 2). The ratio M2/H²
// then grows like m^(1−γ).
struct TightnessConstruction {
  int m = 0;
  double gamma = 0.0;
  double target_excess = 0.0;  // Δ
  double epsilon = 0.0;
  double heavy = 0.0;
  double light = 0.0;
  double light_count = 0.0;  // 2^m − 2
  double entropy = 0.0;
  double second_moment = 0.0;
  double ratio = 0.0;
  int iterations = 0;

  static constexpr int kMaxMaterializedBits = 20;

  ExplicitDistribution materialize() const {
    if (m > kMaxMaterializedBits)
      throw ResourceCapError("tightness construction: m > 20 is only available as a summary");
    const std::size_t size = std::size_t{1} << m;
    std::vector<double> probs(size, light);
    probs[0] = heavy;
    probs[1] = heavy;
    return ExplicitDistribution::from_probs(probs, m);
  }
};

inline TightnessConstruction tightness_construction(int m, double gamma) {
  if (m < 3) throw DomainError("tightness_construction: m must be at least 3");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("tightness_construction: gamma must lie in (0,1)");
  if (m > 1000) throw DomainError("tightness_construction: m too large");

  TightnessConstruction c;
  c.m = m;
  c.gamma = gamma;
  c.light_count = std::ldexp(1.0, m) - 2.0;
  const double L = std::log2(c.light_count);
  c.target_excess = 1.0 / std::pow(L, gamma);

  // H(ε) − 1 = ε·[L + log(1/ε) − 1 + ((1−ε)/ε)·log(1/(1−ε))]; iterate
  // ε ← Δ / [...] with damping.
  auto bracket = [L](double eps) {
    const double tail = (1.0 - eps) / eps * (-std::log1p(-eps) / std::log(2.0));
    return L - std::log2(eps) - 1.0 + tail;
  };
  double eps = c.target_excess / L;
  constexpr double kDamping = 0.5;
  constexpr int kMaxIterations = 1000;
  bool converged = false;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double next = (1.0 - kDamping) * eps + kDamping * (c.target_excess / bracket(eps));
    c.iterations = it;
    if (std::fabs(next - eps) <= 1e-12 * eps) {
      eps = next;
      converged = true;
      break;
    }
    eps = next;
  }
  if (!converged || !(eps > 0.0 && eps < 1.0))
    throw Error("tightness_construction: fixed-point iteration did not converge");

  c.epsilon = eps;
  c.heavy = 0.5 - eps / 2.0;
  c.light = eps / c.light_count;
  const double heavy_info = -std::log2(c.heavy);
  const double light_info = L - std::log2(eps);
  c.entropy = 2.0 * c.heavy * heavy_info + eps * light_info;
  c.second_moment = 2.0 * c.heavy * heavy_info * heavy_info + eps * light_info * light_info;
  c.ratio = c.second_moment / (c.entropy * c.entropy);
  return c;
}

// ---------------------------------------------------------------------------
// Randomized verification
// ---------------------------------------------------------------------------

// Deterministic generator of test tables for the bound checks. Families:
//   0 Dirichlet(1) over a random support (normalized exponentials)
//   1 near point mass (one outcome carries 1 − tiny)
//   2 two heavy outcomes plus a thin spread
//   3 geometric with random ratio
//   4 uniform over a random support
//   5 dominator plus Dirichlet remainder
// Supports have at most 2^12 rows; the declared m is between the minimal
// width and 16.
class DistributionFuzzer {
 public:
  explicit DistributionFuzzer(std::uint64_t seed) : rng_(seed) {}

  struct Case {
    std::vector<double> probs;
    int m = 0;
    int family = 0;
  };

  Case next_distribution() {
    Case c;
    c.family = static_cast<int>(rng_.below(std::uint64_t{6}));
    const std::size_t k = random_support();
    switch (c.family) {
      case 0: c.probs = dirichlet(k); break;
      case 1: {
        const double tiny = std::ldexp(1.0, -static_cast<int>(1 + rng_.below(std::uint64_t{40})));
        c.probs = dirichlet(std::max<std::size_t>(k - 1, 1));
        for (double& p : c.probs) p *= tiny;
        c.probs.push_back(1.0 - tiny);
        break;
      }
      case 2: {
        const double spread = std::ldexp(rng_.uniform01(), -static_cast<int>(rng_.below(std::uint64_t{20})));
        const std::size_t rest = std::max<std::size_t>(k, 3) - 2;
        c.probs.assign(rest, spread / static_cast<double>(rest));
        c.probs.push_back((1.0 - spread) / 2.0);
        c.probs.push_back((1.0 - spread) / 2.0);
        break;
      }
      case 3: {
        const double q = 0.05 + 0.9 * rng_.uniform01();
        c.probs.resize(k);
        double w = 1.0;
        for (auto& p : c.probs) {
          p = w;
          w *= q;
        }
        normalize(c.probs);
        break;
      }
      case 4: c.probs.assign(k, 1.0 / static_cast<double>(k)); break;
      default: {
        const double r = 0.5 + 0.5 * rng_.uniform01();
        c.probs = dirichlet(std::max<std::size_t>(k - 1, 1));
        for (double& p : c.probs) p *= 1.0 - r;
        c.probs.push_back(r);
        break;
      }
    }
    std::erase_if(c.probs, [](double p) { return !(p > 0.0); });
    c.m = declared_bits(c.probs.size());
    return c;
  }

  // Sub-distribution with the mass of a dominating element removed
  // (total mass 1 − r, r ∈ (1/2, 1)), or a uniformly scaled table.
  Case next_sub_distribution() {
    Case c;
    c.family = static_cast<int>(rng_.below(std::uint64_t{3}));
    const std::size_t k = random_support();
    if (c.family == 0) {
      const double r = 0.5 + 0.5 * rng_.uniform01();
      c.probs = dirichlet(k);
      for (double& p : c.probs) p *= 1.0 - r;
    } else if (c.family == 1) {
      const double scale = rng_.uniform01();
      c.probs = dirichlet(k);
      for (double& p : c.probs) p *= scale;
    } else {
      // Uniform mass c over 2^m outcomes with c·(m + log 1/c) = 1: the
      // extremal shape for both halves of the bound.
      const int m = 2 + static_cast<int>(rng_.below(std::uint64_t{11}));
      double x = m + 1.0;
      for (int i = 0; i < 200; ++i) x = m + std::log2(x);
      const double mass = 1.0 / x * (1.0 - 1e-9 * rng_.uniform01());
      const std::size_t size = std::size_t{1} << m;
      c.probs.assign(size, mass / static_cast<double>(size));
      c.m = m;
      return c;
    }
    std::erase_if(c.probs, [](double p) { return !(p > 0.0); });
    c.m = std::max(2, declared_bits(c.probs.size()));
    return c;
  }

  // Rational table num_i/den with den ≤ 2^n, as induced by a circuit formula.
  struct RationalCase {
    std::vector<double> probs;
    int n = 0;
  };

  RationalCase next_rational() {
    RationalCase c;
    c.n = 1 + static_cast<int>(rng_.below(std::uint64_t{20}));
    const std::uint64_t max_den = std::uint64_t{1} << c.n;
    const std::uint64_t den = 1 + rng_.below(max_den);
    const std::uint64_t parts = 1 + rng_.below(std::min<std::uint64_t>(den, 256));
    // Random composition of den into `parts` positive integers.
    std::vector<std::uint64_t> cuts;
    std::set<std::uint64_t> chosen;
    while (chosen.size() + 1 < parts) chosen.insert(1 + rng_.below(den - 1));
    std::uint64_t prev = 0;
    for (std::uint64_t cut : chosen) {
      c.probs.push_back(static_cast<double>(cut - prev) / static_cast<double>(den));
      prev = cut;
    }
    c.probs.push_back(static_cast<double>(den - prev) / static_cast<double>(den));
    return c;
  }

 private:
  std::size_t random_support() {
    const double log_k = 1.0 + 11.0 * rng_.uniform01();
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::exp2(log_k)));
  }

  int declared_bits(std::size_t support) {
    const int lo = std::max(1, detail::min_universe_bits(support));
    return lo + static_cast<int>(rng_.below(static_cast<std::uint64_t>(17 - lo)));
  }

  std::vector<double> dirichlet(std::size_t k) {
    std::vector<double> w(k);
    for (auto& x : w) x = -std::log1p(-rng_.uniform01()) + 1e-300;
    normalize(w);
    return w;
  }

  static void normalize(std::vector<double>& w) {
    CompensatedSum s;
    for (double x : w) s.add(x);
    for (double& x : w) x /= s.value();
  }

  Rng rng_;
};

struct FuzzSummary {
  std::uint64_t high_entropy_cases = 0;
  std::uint64_t low_entropy_cases = 0;
  std::uint64_t input_width_cases = 0;
  std::uint64_t hypothesis_checks = 0;
  std::uint64_t hypothesis_violations = 0;
  double max_high_ratio_fraction = 0.0;  // max of ratio / bound
  double max_low_moment_fraction = 0.0;
  double max_input_width_fraction = 0.0;
  double max_hypothesis_lhs = 0.0;
  std::vector<BoundReport> violations;
};

// Runs `cases` tables through each regime (H ≥ 1 full distributions, H ≤ 1
// sub-distributions, rational tables); every full distribution is also
// checked against the batch-size hypothesis for generic sizing and, for
// rational tables, circuit-formula sizing.
// `on_case`, when set, sees every report that reached a verdict or a
// precondition note.
inline FuzzSummary verify_bounds_fuzz(std::uint64_t cases, std::uint64_t seed, double epsilon = 0.8,
                                      const std::function<void(const BoundReport&)>& on_case = {}) {
  FuzzSummary s;
  DistributionFuzzer fuzz(seed);
  auto record = [&s, &on_case](const BoundReport& r) {
    if (on_case) on_case(r);
    if (r.satisfied && !*r.satisfied && s.violations.size() < 100) s.violations.push_back(r);
  };

  while (s.high_entropy_cases < cases) {
    auto c = fuzz.next_distribution();
    const auto hyp = check_batch_hypothesis(c.probs, c.m, epsilon);
    ++s.hypothesis_checks;
    s.max_hypothesis_lhs = std::max(s.max_hypothesis_lhs, hyp.lhs);
    if (!hyp.holds) ++s.hypothesis_violations;
    const auto rep = check_moment_bound(c.probs, c.m);
    if (rep.H < 1.0) continue;
    ++s.high_entropy_cases;
    s.max_high_ratio_fraction = std::max(s.max_high_ratio_fraction, *rep.ratio / rep.bound_high_entropy);
    record(rep);
  }
  while (s.low_entropy_cases < cases) {
    auto c = fuzz.next_sub_distribution();
    const auto rep = check_moment_bound(c.probs, c.m);
    if (rep.H > 1.0) continue;
    ++s.low_entropy_cases;
    s.max_low_moment_fraction = std::max(s.max_low_moment_fraction, rep.second_moment / rep.bound_low_entropy);
    record(rep);
  }
  while (s.input_width_cases < cases) {
    auto c = fuzz.next_rational();
    const auto rep = check_input_width_bound(c.probs, c.n);
    ++s.input_width_cases;
    if (rep.H > 0.0) s.max_input_width_fraction = std::max(s.max_input_width_fraction, rep.second_moment / *rep.qif_bound);
    record(rep);
    if (!rep.satisfied) {
      BoundReport bad = rep;
      bad.satisfied = false;
      if (s.violations.size() < 100) s.violations.push_back(bad);
      continue;
    }
    const int m = std::max(1, detail::min_universe_bits(c.probs.size()));
    for (std::optional<int> n : {std::optional<int>{}, std::optional<int>{c.n}}) {
      const auto hyp = check_batch_hypothesis(c.probs, m, epsilon, n);
      ++s.hypothesis_checks;
      s.max_hypothesis_lhs = std::max(s.max_hypothesis_lhs, hyp.lhs);
      if (!hyp.holds) ++s.hypothesis_violations;
    }
  }
  return s;
}

inline bool fuzz_clean(const FuzzSummary& s) { return s.violations.empty() && s.hypothesis_violations == 0; }

}  // namespace entropx
