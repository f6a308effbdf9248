// Copyright 2026 The boxprop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "boxprop/error.hpp"
#include "boxprop/ids.hpp"
#include "boxprop/measure.hpp"

namespace boxprop {

struct Variable {
  VariableId id;
  std::size_t domain_size = 0;

  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Factor {
  FactorId id;
  Measure table;

  const std::vector<VariableId>& scope() const { return table.scope(); }

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Immutable bipartite graph of variables and factors. Factor ids are the
/// positions in the constructor's list; variable ids must be dense in [0, N).
class FactorGraph {
 public:
  FactorGraph() = default;

  explicit FactorGraph(std::vector<Measure> tables) {
    std::size_t n = 0;
    for (const Measure& t : tables) {
      if (t.scope().empty()) throw GraphError("factor with empty scope");
      for (VariableId v : t.scope()) n = std::max(n, v.index() + 1);
    }
    std::vector<std::size_t> dims(n, 0);
    neighbors_.assign(n, {});
    for (std::size_t f = 0; f < tables.size(); ++f) {
      const Measure& t = tables[f];
      for (std::size_t k = 0; k < t.scope().size(); ++k) {
        const std::size_t v = t.scope()[k].index();
        if (t.dims()[k] < 2)
          throw GraphError("variable " + std::to_string(v) + " has fewer than 2 states");
        if (dims[v] != 0 && dims[v] != t.dims()[k])
          throw GraphError("inconsistent domain size for variable " + std::to_string(v));
        dims[v] = t.dims()[k];
        neighbors_[v].push_back(FactorId{f});
      }
      factors_.push_back(Factor{FactorId{f}, std::move(tables[f])});
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (dims[v] == 0) throw GraphError("variable ids are not dense: " + std::to_string(v) + " is unused");
      variables_.push_back(Variable{VariableId{v}, dims[v]});
    }
    sorted_scopes_.reserve(factors_.size());
    for (const Factor& f : factors_) {
      auto s = f.scope();
      std::sort(s.begin(), s.end());
      sorted_scopes_.push_back(std::move(s));
    }
  }

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_factors() const { return factors_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Factor>& factors() const { return factors_; }
  const Factor& factor(FactorId f) const { return factors_.at(f.index()); }
  std::size_t domain_size(VariableId v) const { return variables_.at(v.index()).domain_size; }

  /// Incident factors of a variable, ascending.
  std::span<const FactorId> neighbors(VariableId v) const { return neighbors_.at(v.index()); }

  /// Scope of a factor, ascending by variable id.
  std::span<const VariableId> sorted_scope(FactorId f) const { return sorted_scopes_.at(f.index()); }

  friend bool operator==(const FactorGraph& a, const FactorGraph& b) { return a.factors_ == b.factors_; }

 private:
  std::vector<Variable> variables_;
  std::vector<Factor> factors_;
  std::vector<std::vector<FactorId>> neighbors_;
  std::vector<std::vector<VariableId>> sorted_scopes_;
};

/// Union of the scopes of the factors around `v`, minus `v`, ascending.
inline std::vector<VariableId> markov_blanket(const FactorGraph& g, VariableId v) {
  std::vector<VariableId> out;
  for (FactorId f : g.neighbors(v))
    for (VariableId u : g.factor(f).scope())
      if (u != v) out.push_back(u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Violation {
  enum class Kind { Positivity, Disconnected };

  Kind kind;
  std::string message;
  std::optional<FactorId> factor;
  std::optional<VariableId> variable;
  /// States of the factor scope minus `variable`, in scope order.
  std::vector<std::size_t> assignment;
};

/// Checks connectedness and the positivity condition: every factor, summed
/// over any one of its variables, is strictly positive for every setting of
/// the remaining ones.
inline std::vector<Violation> validate(const FactorGraph& g) {
  std::vector<Violation> out;

  for (const Factor& f : g.factors()) {
    for (std::size_t p = 0; p < f.scope().size(); ++p) {
      const auto L = detail::layout_for(f.table, f.scope()[p]);
      std::vector<double> sums(L.ny, 0.0);
      for (std::size_t i = 0; i < f.table.size(); ++i) sums[L.rest_index[i]] += f.table[i];
      for (std::size_t r = 0; r < L.ny; ++r) {
        if (sums[r] > 0.0) continue;
        Violation vio{Violation::Kind::Positivity, {}, f.id, f.scope()[p], {}};
        std::size_t rest = r;
        for (std::size_t k = 0; k < f.scope().size(); ++k) {
          if (k == p) continue;
          vio.assignment.push_back(rest % f.table.dims()[k]);
          rest /= f.table.dims()[k];
        }
        std::ostringstream msg;
        msg << "factor " << f.id << " sums to zero over variable " << f.scope()[p] << " at assignment (";
        for (std::size_t k = 0; k < vio.assignment.size(); ++k) msg << (k ? "," : "") << vio.assignment[k];
        msg << ")";
        vio.message = msg.str();
        out.push_back(std::move(vio));
      }
    }
  }

  if (g.num_variables() > 0) {
    std::vector<bool> seen_var(g.num_variables(), false), seen_fac(g.num_factors(), false);
    std::queue<VariableId> q;
    q.push(VariableId{0});
    seen_var[0] = true;
    std::size_t reached = 1;
    while (!q.empty()) {
      const VariableId v = q.front();
      q.pop();
      for (FactorId f : g.neighbors(v)) {
        if (seen_fac[f.index()]) continue;
        seen_fac[f.index()] = true;
        for (VariableId u : g.factor(f).scope()) {
          if (seen_var[u.index()]) continue;
          seen_var[u.index()] = true;
          ++reached;
          q.push(u);
        }
      }
    }
    if (reached < g.num_variables()) {
      Violation vio{Violation::Kind::Disconnected, {}, std::nullopt, std::nullopt, {}};
      for (std::size_t v = 0; v < g.num_variables(); ++v)
        if (!seen_var[v]) {
          vio.variable = VariableId{v};
          break;
        }
      vio.message = "graph is disconnected: " + std::to_string(g.num_variables() - reached) +
                    " variable(s) unreachable from variable 0 (first: " + std::to_string(vio.variable->value) + ")";
      out.push_back(std::move(vio));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// .fg text format
//
//   <number of factors>
//   (blank line)
//   per factor:  <k>  /  <k variable ids>  /  <k domain sizes>  /  <m>  /
//                m lines "<linear index> <value>"; unlisted entries are 0
//
// Lines starting with '#' are comments. Blank lines are ignored.

namespace detail {

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class FgReader {
 public:
  explicit FgReader(std::istream& in) : in_(in) {}

  /// Next non-blank, non-comment line split into tokens.
  std::vector<std::string_view> next_line(const char* what) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      std::size_t a = line_.find_first_not_of(" \t\r");
      if (a == std::string::npos || line_[a] == '#') continue;
      std::vector<std::string_view> tokens;
      std::string_view sv(line_);
      while (a != std::string::npos) {
        const std::size_t b = line_.find_first_of(" \t\r", a);
        tokens.push_back(sv.substr(a, b == std::string::npos ? std::string::npos : b - a));
        a = b == std::string::npos ? b : line_.find_first_not_of(" \t\r", b);
      }
      return tokens;
    }
    throw ParseError(line_no_ + 1, std::string("unexpected end of input, expected ") + what);
  }

  bool at_end() {
    std::string rest;
    while (std::getline(in_, rest)) {
      ++line_no_;
      std::size_t a = rest.find_first_not_of(" \t\r");
      if (a != std::string::npos && rest[a] != '#') return false;
    }
    return true;
  }

  std::size_t line() const { return line_no_; }

  std::size_t to_size(std::string_view tok, const char* what) const {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw ParseError(line_no_, std::string("expected nonnegative integer for ") + what + ", got '" +
                                     std::string(tok) + "'");
    return v;
  }

  double to_value(std::string_view tok) const {
    double v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size() || !std::isfinite(v))
      throw ParseError(line_no_, "expected a decimal value, got '" + std::string(tok) + "'");
    if (v < 0.0) throw ParseError(line_no_, "negative table value " + std::string(tok));
    return v;
  }

  std::vector<std::string_view> expect_tokens(std::size_t n, const char* what) {
    auto tokens = next_line(what);
    if (tokens.size() != n)
      throw ParseError(line_no_, std::string("expected ") + std::to_string(n) + " token(s) for " + what + ", got " +
                                     std::to_string(tokens.size()));
    return tokens;
  }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t line_no_ = 0;
};

}  // namespace detail

inline FactorGraph parse_fg(std::istream& in) {
  detail::FgReader r(in);
  const std::size_t num_factors = r.to_size(r.expect_tokens(1, "the factor count")[0], "the factor count");

  std::vector<Measure> tables;
  std::vector<std::size_t> seen_dims;
  for (std::size_t f = 0; f < num_factors; ++f) {
    const std::size_t k = r.to_size(r.expect_tokens(1, "a scope size")[0], "a scope size");
    if (k == 0) throw ParseError(r.line(), "factor scope must be nonempty");

    std::vector<VariableId> scope;
    for (auto tok : r.expect_tokens(k, "variable ids")) {
      const VariableId v{r.to_size(tok, "a variable id")};
      if (std::find(scope.begin(), scope.end(), v) != scope.end())
        throw ParseError(r.line(), "duplicate variable " + std::to_string(v.value) + " in scope");
      scope.push_back(v);
    }

    std::vector<std::size_t> dims;
    for (auto tok : r.expect_tokens(k, "domain sizes")) dims.push_back(r.to_size(tok, "a domain size"));
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t v = scope[j].index();
      if (dims[j] < 2) throw ParseError(r.line(), "variable " + std::to_string(v) + " has fewer than 2 states");
      if (v >= seen_dims.size()) seen_dims.resize(v + 1, 0);
      if (seen_dims[v] != 0 && seen_dims[v] != dims[j])
        throw ParseError(r.line(), "inconsistent domain size for variable " + std::to_string(v) + ": " +
                                       std::to_string(dims[j]) + " vs " + std::to_string(seen_dims[v]));
      seen_dims[v] = dims[j];
    }

    std::size_t size = 0;
    try {
      size = detail::checked_table_size(dims);
    } catch (const Error& e) {
      throw ParseError(r.line(), e.what());
    }

    const std::size_t m = r.to_size(r.expect_tokens(1, "an entry count")[0], "an entry count");
    std::vector<double> values(size, 0.0);
    std::vector<bool> listed(size, false);
    for (std::size_t e = 0; e < m; ++e) {
      auto tokens = r.expect_tokens(2, "a table entry");
      const std::size_t index = r.to_size(tokens[0], "a table index");
      if (index >= size)
        throw ParseError(r.line(), "table index " + std::to_string(index) + " out of range [0, " +
                                       std::to_string(size) + ")");
      if (listed[index]) throw ParseError(r.line(), "table index " + std::to_string(index) + " listed twice");
      listed[index] = true;
      values[index] = r.to_value(tokens[1]);
    }
    tables.emplace_back(std::move(scope), std::move(dims), std::move(values));
  }
  if (!r.at_end()) throw ParseError(r.line(), "trailing content after the last factor");

  try {
    return FactorGraph(std::move(tables));
  } catch (const GraphError& e) {
    throw ParseError(0, e.what());
  }
}

inline FactorGraph parse_fg(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_fg(in);
}

inline FactorGraph read_fg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_fg(in);
}

/// Writes every table entry, zeros included, in linear-index order.
inline void write_fg(std::ostream& out, const FactorGraph& g) {
  out << g.num_factors() << "\n";
  for (const Factor& f : g.factors()) {
    const Measure& t = f.table;
    out << "\n" << t.scope().size() << "\n";
    for (std::size_t k = 0; k < t.scope().size(); ++k) out << (k ? " " : "") << t.scope()[k];
    out << "\n";
    for (std::size_t k = 0; k < t.dims().size(); ++k) out << (k ? " " : "") << t.dims()[k];
    out << "\n" << t.size() << "\n";
    for (std::size_t i = 0; i < t.size(); ++i) out << i << " " << detail::format_double(t[i]) << "\n";
  }
}

inline std::string write_fg(const FactorGraph& g) {
  std::ostringstream out;
  write_fg(out, g);
  return out.str();
}

}  // namespace boxprop
