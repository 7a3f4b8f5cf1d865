#pragma once

// Median-of-means entropy estimation over a PROC oracle.
//
// estimate_entropy first looks for a dominating element (D(x) > 1/2) with a
// few unconditioned draws. If one shows up, the entropy is split as
// H = r·log(1/r) + (1−r)·E[log 1/D(Y) | Y ≠ x] and only the conditional part
// is estimated; otherwise H ≥ 1 and the self-information mean is estimated
// directly. Batch sizes come from the second-moment bounds in bounds.hpp.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "entropx/core.hpp"

namespace entropx {

enum class Mode { generic, qif };

inline std::string_view to_string(Mode mode) { return mode == Mode::qif ? "qif" : "generic"; }

inline Mode parse_mode(std::string_view text) {
  if (text == "generic") return Mode::generic;
  if (text == "qif") return Mode::qif;
  throw DomainError("unknown mode '" + std::string(text) + "' (expected generic|qif)");
}

struct EstimationParams {
  double epsilon = 0.8;
  double delta = 0.09;
  std::uint64_t seed = 0;
  Mode mode = Mode::generic;
  // |U| for qif mode when the oracle does not report input_bits().
  std::optional<int> n_override;
  // Worker threads for the trials of sample_est. Results do not depend on it.
  unsigned threads = 1;

  void validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
    if (n_override && *n_override < 1) throw DomainError("n must be at least 1");
  }
};

struct EstimationResult {
  double h_hat = 0.0;
  bool dominator_found = false;
  std::optional<double> r;
  std::optional<double> h_rem_hat;
  std::uint64_t t = 0;
  std::uint64_t T = 0;
  QueryLedger ledger;
  std::chrono::nanoseconds wall_time{0};
};

// ---------------------------------------------------------------------------
// Sample-size formulas
// ---------------------------------------------------------------------------

// Median repetitions: ⌈(9/2)·ln(2/δ)⌉. Natural log: the Hoeffding step
// sets exp(−2T/9) = δ/2.
inline std::uint64_t trial_count(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("trial_count: delta must lie in (0,1)");
  const double T = std::ceil(4.5 * std::log(2.0 / delta));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(T));
}

// Dominator-search rounds: ⌈log2(10/δ)⌉, so that (1/2)^rounds ≤ δ/10.
inline std::uint64_t initial_draw_rounds(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("initial_draw_rounds: delta must lie in (0,1)");
  return static_cast<std::uint64_t>(std::ceil(std::log2(10.0 / delta)));
}

namespace detail {

inline void check_eps(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0,1)");
}

inline std::uint64_t ceil_batch(double value) {
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

// m + log2(m + log2 m + c)
inline double log_correction_bound(int m, double c) {
  const double md = m;
  return md + std::log2(md + std::log2(md) + c);
}

}  // namespace detail

inline std::uint64_t batch_size_generic(int m, double epsilon, bool dominator) {
  if (m < 1) throw DomainError("batch_size_generic: m must be at least 1");
  detail::check_eps(epsilon);
  const double scale = 6.0 / (epsilon * epsilon);
  if (dominator) return detail::ceil_batch(scale * detail::log_correction_bound(m, 2.5));
  return detail::ceil_batch(scale * (detail::log_correction_bound(m, 1.1) - 1.0));
}

// Circuit-formula sizing, where every positive probability is ≥ 2^-n.
inline std::uint64_t batch_size_qif(int n, int m, double epsilon, std::optional<double> r) {
  if (n < 1) throw DomainError("batch_size_qif: n must be at least 1");
  if (m < 1) throw DomainError("batch_size_qif: m must be at least 1");
  detail::check_eps(epsilon);
  const double scale = 6.0 / (epsilon * epsilon);
  if (r) {
    if (!(*r > 0.5 && *r < 1.0)) throw DomainError("batch_size_qif: r must lie in (1/2, 1)");
    const double n_arm = n / (2.0 * -std::log2(1.0 - *r));
    return detail::ceil_batch(scale * std::min(n_arm, detail::log_correction_bound(m, 2.5)));
  }
  const double arm = std::min<double>(n, detail::log_correction_bound(m, 1.1));
  return detail::ceil_batch(scale * (arm - 1.0));
}

// ---------------------------------------------------------------------------
// Median of batch means
// ---------------------------------------------------------------------------

struct BatchMedianTrace {
  double median = 0.0;
  // In trial order.
  std::vector<double> batch_means;
};

// Lower median: element ⌊(T−1)/2⌋ of the sorted list.
inline double lower_median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of empty list");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

namespace detail {

inline double run_batch(ProcOracle& oracle, const ExclusionSet& excluded, std::uint64_t t, Rng rng) {
  double est = 0.0;
  for (std::uint64_t j = 0; j < t; ++j) est += self_information(oracle.query(excluded, rng).probability);
  return est / static_cast<double>(t);
}

}  // namespace detail

// Trial i draws from rng.substream(i), so the output is independent of the
// worker count.
inline BatchMedianTrace sample_est_trace(ProcOracle& oracle, const ExclusionSet& excluded,
                                       std::uint64_t t, double delta, const Rng& rng,
                                       unsigned threads = 1) {
  if (t < 1) throw DomainError("sample_est: t must be at least 1");
  const std::uint64_t T = trial_count(delta);
  BatchMedianTrace trace;
  trace.batch_means.assign(T, 0.0);

  const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), T));
  if (workers == 1) {
    for (std::uint64_t i = 0; i < T; ++i)
      trace.batch_means[i] = detail::run_batch(oracle, excluded, t, rng.substream(i));
  } else {
    std::vector<std::unique_ptr<ProcOracle>> clones;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) clones.push_back(oracle.clone());
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::uint64_t i = w; i < T; i += workers)
              trace.batch_means[i] = detail::run_batch(*clones[w], excluded, t, rng.substream(i));
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& clone : clones) oracle.absorb(clone->ledger());
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  trace.median = lower_median(trace.batch_means);
  return trace;
}

inline double sample_est(ProcOracle& oracle, const ExclusionSet& excluded, std::uint64_t t, double delta,
                         const Rng& rng, unsigned threads = 1) {
  return sample_est_trace(oracle, excluded, t, delta, rng, threads).median;
}

// ---------------------------------------------------------------------------
// Top-level estimator
// ---------------------------------------------------------------------------

inline EstimationResult estimate_entropy(ProcOracle& oracle, const EstimationParams& params) {
  params.validate();
  const auto start = std::chrono::steady_clock::now();
  const QueryLedger before = oracle.ledger();
  const int m = oracle.universe_bits();

  std::optional<int> n;
  if (params.mode == Mode::qif) {
    n = params.n_override ? params.n_override : oracle.input_bits();
    if (!n) throw DomainError("qif mode needs |U|: oracle has no input block and no n override was given");
  }

  const Rng root(params.seed);
  Rng draws = root.substream(0);
  const Rng sampling = root.substream(1);
  const double inner_delta = 0.9 * params.delta;

  EstimationResult result;
  std::uint64_t initial_draws = 0;
  std::optional<ProcQueryResult> dominator;
  const std::uint64_t rounds = initial_draw_rounds(params.delta);
  for (std::uint64_t i = 0; i < rounds; ++i) {
    ++initial_draws;
    const ProcQueryResult q = oracle.query({}, draws);
    if (q.probability > 0.5) {
      dominator = q;
      break;
    }
  }

  if (dominator) {
    const double r = dominator->probability;
    result.dominator_found = true;
    result.r = r;
    if (r >= 1.0) {
      // Point mass: Ω∖{x} is empty and H = 0.
      result.h_hat = 0.0;
      result.h_rem_hat = 0.0;
    } else {
      result.t = params.mode == Mode::qif ? batch_size_qif(*n, m, params.epsilon, r)
                                          : batch_size_generic(m, params.epsilon, true);
      result.T = trial_count(inner_delta);
      const double h_rem =
          sample_est(oracle, ExclusionSet{dominator->outcome}, result.t, inner_delta, sampling, params.threads);
      result.h_rem_hat = h_rem;
      result.h_hat = (1.0 - r) * h_rem + r * self_information(r);
    }
  } else {
    result.t = params.mode == Mode::qif ? batch_size_qif(*n, m, params.epsilon, std::nullopt)
                                        : batch_size_generic(m, params.epsilon, false);
    result.T = trial_count(inner_delta);
    result.h_hat = sample_est(oracle, {}, result.t, inner_delta, sampling, params.threads);
  }

  result.ledger = oracle.ledger() - before;
  result.ledger.initial_draws = initial_draws;
  result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace entropx
