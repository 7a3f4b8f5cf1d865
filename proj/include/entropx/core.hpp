#pragma once

// Shared vocabulary: outcomes, the probability-revealing conditional sampling
// oracle interface, the deterministic RNG and query accounting.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>

namespace entropx {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input text (DIMACS, JSON, family spec).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a semantic invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Variable-count, enumeration or time budget exceeded.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

class TimeoutError : public ResourceCapError {
 public:
  using ResourceCapError::ResourceCapError;
};

// A conditional query whose conditioning set carries no probability mass.
class EmptySupportError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Logarithms. Entropy and self-information are measured in bits.
// ---------------------------------------------------------------------------

inline double log2(double x) {
  if (!(x > 0.0)) throw DomainError("log2: argument must be positive");
  return std::log2(x);
}

inline double self_information(double p) { return -entropx::log2(p); }

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

// Element of the universe. For explicit tables this is the row index; for
// formulas it is the output assignment, bit i holding the value of the i-th
// declared output variable (so output blocks are limited to 64 bits).
struct Outcome {
  std::uint64_t value = 0;

  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

using ExclusionSet = std::set<Outcome>;

struct ProcQueryResult {
  Outcome outcome;
  // Unconditional probability D(x), never D(x)/D(S).
  double probability = 0.0;
};

struct QueryLedger {
  std::uint64_t proc_queries = 0;
  std::uint64_t counter_queries = 0;
  std::uint64_t sampler_queries = 0;
  std::uint64_t initial_draws = 0;

  QueryLedger& operator+=(const QueryLedger& o) {
    proc_queries += o.proc_queries;
    counter_queries += o.counter_queries;
    sampler_queries += o.sampler_queries;
    initial_draws += o.initial_draws;
    return *this;
  }
  friend QueryLedger operator-(QueryLedger a, const QueryLedger& b) {
    a.proc_queries -= b.proc_queries;
    a.counter_queries -= b.counter_queries;
    a.sampler_queries -= b.sampler_queries;
    a.initial_draws -= b.initial_draws;
    return a;
  }
  friend bool operator==(const QueryLedger&, const QueryLedger&) = default;
};

// ---------------------------------------------------------------------------
// Rng
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic generator: std::mt19937_64 (whose output sequence is fixed by
// the standard) seeded with splitmix64(seed). Floating and bounded draws are
// derived from raw 64-bit words here rather than through <random>
// distributions, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), exact (rejection on the top bits).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw DomainError("Rng::below: empty range");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  // Exact uniform draw in [0, bound) for 128-bit counts.
  unsigned __int128 below(unsigned __int128 bound) {
    if (bound == 0) throw DomainError("Rng::below: empty range");
    if (bound <= std::numeric_limits<std::uint64_t>::max())
      return below(static_cast<std::uint64_t>(bound));
    int bits = 128;
    while (bits > 0 && !((bound - 1) >> (bits - 1) & 1)) --bits;
    const unsigned __int128 mask =
        bits == 128 ? ~static_cast<unsigned __int128>(0)
                    : (static_cast<unsigned __int128>(1) << bits) - 1;
    unsigned __int128 x;
    do {
      x = (static_cast<unsigned __int128>(next()) << 64 | next()) & mask;
    } while (x >= bound);
    return x;
  }

  // Independent stream keyed by (a, b); depends only on the construction seed,
  // never on how many draws this generator has already made.
  Rng substream(std::uint64_t a, std::uint64_t b = 0) const {
    return Rng(splitmix64(splitmix64(seed_ ^ 0x5851f42d4c957f2dULL) ^ splitmix64(a + 1)) ^
               splitmix64(~b));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// PROC oracle
// ---------------------------------------------------------------------------

// Probability-revealing conditional sampling oracle. query(S̄) samples x from
// D conditioned on Ω∖S̄ and reveals the unconditional D(x).
//
// Workers never share an oracle; they call clone(), which shares immutable
// state and caches but starts with a zeroed ledger. Callers merge worker
// ledgers back with absorb().
class ProcOracle {
 public:
  virtual ~ProcOracle() = default;

  ProcQueryResult query(const ExclusionSet& excluded, Rng& rng) {
    ++ledger_.proc_queries;
    return do_query(excluded, rng);
  }

  // m = log2 |Ω|.
  virtual int universe_bits() const = 0;
  // |U| for formula-backed oracles.
  virtual std::optional<int> input_bits() const { return std::nullopt; }

  virtual std::unique_ptr<ProcOracle> clone() const = 0;

  const QueryLedger& ledger() const { return ledger_; }
  void absorb(const QueryLedger& other) { ledger_ += other; }
  void reset_ledger() { ledger_ = {}; }

 protected:
  ProcOracle() = default;
  ProcOracle(const ProcOracle&) = default;
  ProcOracle& operator=(const ProcOracle&) = default;

  virtual ProcQueryResult do_query(const ExclusionSet& excluded, Rng& rng) = 0;

  QueryLedger ledger_;
};

}  // namespace entropx

template <>
struct std::hash<entropx::Outcome> {
  std::size_t operator()(const entropx::Outcome& o) const noexcept {
    return static_cast<std::size_t>(entropx::splitmix64(o.value));
  }
};
