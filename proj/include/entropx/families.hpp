#pragma once

// Built-in explicit distribution families used as test corpus and bench input.
//
//   uniform:m=4                 16 rows of 1/16
//   point_mass:m=0              single row of mass 1
//   geometric:half_life=1,m=10  p_i ∝ 2^(-i/half_life) over 2^m rows
//   dominated:r=0.75,m=10       one row of mass r, (1−r) spread over 2^m − 1
//   two_heavy:m=12,gamma=0.5    near-tightness construction
//   dirichlet:m=8,seed=1        normalized exponentials over 2^m rows

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "entropx/bounds.hpp"
#include "entropx/core.hpp"
#include "entropx/explicit_distribution.hpp"

namespace entropx {

struct FamilySpec {
  std::string family;
  std::map<std::string, double> params;

  double get(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (auto it = params.find(key); it != params.end()) return it->second;
    if (fallback) return *fallback;
    throw ValidationError("family '" + family + "' needs parameter '" + key + "'");
  }

  std::string to_string() const {
    std::string out = family;
    char sep = ':';
    for (const auto& [k, v] : params) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, v);
      out += sep + k + "=" + std::string(buf, res.ptr);
      sep = ',';
    }
    return out;
  }
};

inline FamilySpec parse_family_spec(std::string_view text) {
  FamilySpec spec;
  const auto colon = text.find(':');
  spec.family = std::string(text.substr(0, colon));
  if (spec.family.empty()) throw ParseError("family spec: missing family name");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("family spec: expected key=value, got '" + std::string(item) + "'");
    double value = 0.0;
    const std::string_view num = item.substr(eq + 1);
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
    if (ec != std::errc() || ptr != num.data() + num.size())
      throw ParseError("family spec: bad number '" + std::string(num) + "'");
    spec.params[std::string(item.substr(0, eq))] = value;
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }
  return spec;
}

namespace detail {

inline int family_bits(const FamilySpec& spec, double fallback, int max_bits = 24) {
  const double m = spec.get("m", fallback);
  if (m != std::floor(m) || m < 0 || m > max_bits)
    throw ValidationError("family '" + spec.family + "': m must be an integer in [0, " + std::to_string(max_bits) + "]");
  return static_cast<int>(m);
}

}  // namespace detail

inline ExplicitDistribution make_family(const FamilySpec& spec) {
  const std::string& f = spec.family;
  if (f == "uniform") {
    const int m = detail::family_bits(spec, 4);
    const std::size_t size = std::size_t{1} << m;
    return ExplicitDistribution::from_probs(std::vector<double>(size, std::ldexp(1.0, -m)), m);
  }
  if (f == "point_mass") {
    const int m = detail::family_bits(spec, 0);
    return ExplicitDistribution::from_probs(std::vector<double>{1.0}, m);
  }
  if (f == "geometric") {
    const int m = detail::family_bits(spec, 10);
    const double half_life = spec.get("half_life", 1.0);
    if (!(half_life > 0.0)) throw ValidationError("geometric: half_life must be positive");
    std::vector<double> w(std::size_t{1} << m);
    CompensatedSum total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = std::exp2(-static_cast<double>(i) / half_life);
      total.add(w[i]);
    }
    for (double& x : w) x /= total.value();
    return ExplicitDistribution::from_probs(w, m);
  }
  if (f == "dominated") {
    const int m = detail::family_bits(spec, 10);
    const double r = spec.get("r");
    if (!(r > 0.0 && r <= 1.0)) throw ValidationError("dominated: r must lie in (0,1]");
    if (m < 1 && r < 1.0) throw ValidationError("dominated: m must be at least 1 when r < 1");
    const std::size_t size = std::size_t{1} << m;
    std::vector<double> w(size, (1.0 - r) / static_cast<double>(size - 1));
    w[0] = r;
    return ExplicitDistribution::from_probs(w, m);
  }
  if (f == "two_heavy") {
    const int m = detail::family_bits(spec, 12, TightnessConstruction::kMaxMaterializedBits);
    return tightness_construction(m, spec.get("gamma", 0.5)).materialize();
  }
  if (f == "dirichlet") {
    const int m = detail::family_bits(spec, 8);
    Rng rng(static_cast<std::uint64_t>(spec.get("seed", 0.0)));
    std::vector<double> w(std::size_t{1} << m);
    CompensatedSum total;
    for (double& x : w) {
      x = -std::log1p(-rng.uniform01()) + 1e-300;
      total.add(x);
    }
    for (double& x : w) x /= total.value();
    return ExplicitDistribution::from_probs(w, m);
  }
  throw ValidationError("unknown distribution family '" + f + "'");
}

inline ExplicitDistribution make_family(std::string_view text) { return make_family(parse_family_spec(text)); }

}  // namespace entropx
