#pragma once

// Circuit formulas in extended DIMACS.
//
//   p cnf <vars> <clauses>
//   c u <var> <var> ... 0      input block U (repeatable, cumulative)
//   c v <var> <var> ... 0      output block V (repeatable, cumulative)
//   c ind <var> ... 0          accepted as an alias for "c u"
//   <lit> <lit> ... 0          clauses
//
// Variables outside U ∪ V are auxiliary (e.g. Tseitin gate variables).

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <istream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "entropx/core.hpp"

namespace entropx {

// Exact model counts. The search engine handles at most 64 variables, so
// every count fits.
using Count = unsigned __int128;

inline std::string to_string(Count c) {
  if (c == 0) return "0";
  std::string s;
  while (c > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(c % 10)));
    c /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

inline Count pow2(int k) { return static_cast<Count>(1) << k; }

inline constexpr int kMaxFormulaVars = 64;

inline std::uint64_t var_bit(int var) { return std::uint64_t{1} << (var - 1); }

struct CircuitFormula {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
  std::vector<int> inputs;   // U, in declaration order
  std::vector<int> outputs;  // V, in declaration order; bit i of an Outcome is outputs[i]
  // Output assignments forbidden by blocking clauses.
  std::set<Outcome> blocked;

  int n() const { return static_cast<int>(inputs.size()); }
  int m() const { return static_cast<int>(outputs.size()); }

  std::uint64_t input_mask() const { return mask_of(inputs); }
  std::uint64_t output_mask() const { return mask_of(outputs); }
  std::uint64_t all_mask() const {
    return num_vars >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_vars) - 1;
  }

  static std::uint64_t mask_of(const std::vector<int>& vars) {
    std::uint64_t mask = 0;
    for (int v : vars) mask |= var_bit(v);
    return mask;
  }
};

// Partial assignment over variables 1..64: bit v−1 of `assigned` marks v as
// fixed, the same bit of `values` holds its value.
struct PartialAssignment {
  std::uint64_t assigned = 0;
  std::uint64_t values = 0;

  PartialAssignment with(int var, bool value) const {
    PartialAssignment a = *this;
    a.assigned |= var_bit(var);
    if (value)
      a.values |= var_bit(var);
    else
      a.values &= ~var_bit(var);
    return a;
  }
};

// V ↦ σ as a partial assignment.
inline PartialAssignment output_assignment(const CircuitFormula& f, Outcome sigma) {
  PartialAssignment a;
  for (std::size_t i = 0; i < f.outputs.size(); ++i) a = a.with(f.outputs[i], (sigma.value >> i) & 1);
  return a;
}

// Full assignment (bit v−1 = value of v) restricted to V, packed as an Outcome.
inline Outcome project_outputs(const CircuitFormula& f, std::uint64_t full_values) {
  std::uint64_t sigma = 0;
  for (std::size_t i = 0; i < f.outputs.size(); ++i)
    if (full_values & var_bit(f.outputs[i])) sigma |= std::uint64_t{1} << i;
  return Outcome{sigma};
}

inline bool satisfies(const CircuitFormula& f, std::uint64_t full_values) {
  for (const auto& clause : f.clauses) {
    bool sat = false;
    for (int lit : clause) {
      const bool value = (full_values & var_bit(std::abs(lit))) != 0;
      if ((lit > 0) == value) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return !f.blocked.contains(project_outputs(f, full_values));
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline int parse_int(std::string_view tok, int line_no) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": expected an integer, got '" + std::string(tok) + "'");
  return value;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace detail

inline CircuitFormula parse_dimacs(std::string_view text) {
  CircuitFormula f;
  bool have_header = false;
  bool have_u = false;
  long declared_clauses = 0;
  std::vector<int> current;
  std::vector<std::pair<int, int>> block_refs;  // (var, line) for range checks after the header
  int line_no = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto toks = detail::split_ws(line);
    if (toks.empty()) continue;

    if (toks[0] == "c") {
      if (toks.size() >= 2 && (toks[1] == "u" || toks[1] == "v" || toks[1] == "ind")) {
        const bool is_output = toks[1] == "v";
        if (!is_output) have_u = true;
        if (toks.back() != "0") throw ParseError("line " + std::to_string(line_no) + ": block declaration must end with 0");
        for (std::size_t i = 2; i + 1 < toks.size(); ++i) {
          const int v = detail::parse_int(toks[i], line_no);
          if (v <= 0) throw ParseError("line " + std::to_string(line_no) + ": block variables must be positive");
          (is_output ? f.outputs : f.inputs).push_back(v);
          block_refs.emplace_back(v, line_no);
        }
      }
      continue;
    }
    if (toks[0] == "p") {
      if (have_header) throw ParseError("line " + std::to_string(line_no) + ": duplicate header");
      if (toks.size() != 4 || toks[1] != "cnf") throw ParseError("line " + std::to_string(line_no) + ": malformed header");
      f.num_vars = detail::parse_int(toks[2], line_no);
      declared_clauses = detail::parse_int(toks[3], line_no);
      if (f.num_vars < 0 || declared_clauses < 0) throw ParseError("malformed header: negative counts");
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("line " + std::to_string(line_no) + ": clause before 'p cnf' header");
    for (auto tok : toks) {
      const int lit = detail::parse_int(tok, line_no);
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      if (std::abs(lit) > f.num_vars)
        throw ParseError("line " + std::to_string(line_no) + ": literal out of range (" + std::to_string(lit) + ")");
      current.push_back(lit);
    }
  }

  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!current.empty()) throw ParseError("last clause is not terminated by 0");
  if (static_cast<long>(f.clauses.size()) != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(f.clauses.size()));
  for (auto [v, ln] : block_refs)
    if (v > f.num_vars) throw ParseError("line " + std::to_string(ln) + ": literal out of range (" + std::to_string(v) + ")");

  auto dedupe = [](std::vector<int>& vars) {
    std::vector<int> out;
    std::set<int> seen;
    for (int v : vars)
      if (seen.insert(v).second) out.push_back(v);
    vars = std::move(out);
  };
  dedupe(f.inputs);
  dedupe(f.outputs);
  if (!have_u) throw ParseError("missing input block declaration ('c u ... 0')");
  if (f.outputs.empty()) throw ParseError("output block V must be nonempty ('c v ... 0')");
  for (int v : f.outputs)
    if (std::find(f.inputs.begin(), f.inputs.end(), v) != f.inputs.end())
      throw ParseError("variable " + std::to_string(v) + " is declared in both U and V");
  return f;
}

inline CircuitFormula parse_dimacs(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dimacs(ss.str());
}

inline std::string to_dimacs(const CircuitFormula& f, std::string_view comment = {}) {
  std::ostringstream out;
  if (!comment.empty()) out << "c " << comment << "\n";
  out << "p cnf " << f.num_vars << " " << f.clauses.size() << "\n";
  out << "c u";
  for (int v : f.inputs) out << " " << v;
  out << " 0\nc v";
  for (int v : f.outputs) out << " " << v;
  out << " 0\n";
  for (const auto& clause : f.clauses) {
    for (int lit : clause) out << lit << " ";
    out << "0\n";
  }
  return out.str();
}

}  // namespace entropx
