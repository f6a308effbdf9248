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
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "boxprop/error.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"

namespace boxprop {

enum class ExactEngine { Brute, VarElim };

inline std::optional<ExactEngine> parse_engine(std::string_view s) {
  if (s == "brute") return ExactEngine::Brute;
  if (s == "varelim") return ExactEngine::VarElim;
  return std::nullopt;
}

/// Joint-state limit for brute-force enumeration, and table-size limit for
/// intermediate factors in variable elimination.
inline constexpr std::size_t kMaxExactStates = std::size_t{1} << 26;

namespace detail {

inline std::vector<Measure> brute_marginals(const FactorGraph& g, std::size_t max_states) {
  const std::size_t n = g.num_variables();
  std::vector<std::size_t> dims(n);
  std::size_t total = 1;
  for (std::size_t v = 0; v < n; ++v) {
    dims[v] = g.domain_size(VariableId{v});
    if (total > max_states / dims[v])
      throw CapacityExceededError("brute-force enumeration needs more than " + std::to_string(max_states) +
                                  " joint states");
    total *= dims[v];
  }

  // Log tables, and for every variable the (factor, stride) pairs it drives.
  std::vector<std::vector<double>> logt(g.num_factors());
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> drives(n);
  for (const Factor& f : g.factors()) {
    for (double x : f.table.values()) logt[f.id.index()].push_back(x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity());
    std::size_t s = 1;
    for (std::size_t k = 0; k < f.scope().size(); ++k) {
      drives[f.scope()[k].index()].emplace_back(f.id.index(), s);
      s *= f.table.dims()[k];
    }
  }

  auto sweep = [&](auto&& visit) {
    std::vector<std::size_t> state(n, 0), idx(g.num_factors(), 0);
    for (std::size_t s = 0; s < total; ++s) {
      double lw = 0.0;
      for (std::size_t f = 0; f < idx.size(); ++f) lw += logt[f][idx[f]];
      visit(state, lw);
      for (std::size_t v = 0; v < n; ++v) {
        for (auto [f, st] : drives[v]) idx[f] += st;
        if (++state[v] < dims[v]) break;
        for (auto [f, st] : drives[v]) idx[f] -= st * dims[v];
        state[v] = 0;
      }
    }
  };

  double max_lw = -std::numeric_limits<double>::infinity();
  sweep([&](const std::vector<std::size_t>&, double lw) { max_lw = std::max(max_lw, lw); });
  if (!std::isfinite(max_lw)) throw ZeroMeasureError("every joint state has zero weight");

  std::vector<std::vector<long double>> acc(n);
  for (std::size_t v = 0; v < n; ++v) acc[v].assign(dims[v], 0.0L);
  sweep([&](const std::vector<std::size_t>& state, double lw) {
    const long double w = std::exp(static_cast<long double>(lw - max_lw));
    if (w == 0.0L) return;
    for (std::size_t v = 0; v < n; ++v) acc[v][state[v]] += w;
  });

  std::vector<Measure> out;
  for (std::size_t v = 0; v < n; ++v) {
    long double z = 0.0L;
    for (long double a : acc[v]) z += a;
    std::vector<double> p(dims[v]);
    for (std::size_t x = 0; x < dims[v]; ++x) p[x] = static_cast<double>(acc[v][x] / z);
    out.emplace_back(std::vector<VariableId>{VariableId{v}}, std::vector<std::size_t>{dims[v]}, std::move(p));
  }
  return out;
}

inline Measure rescaled(const Measure& m) {
  const double hi = *std::max_element(m.values().begin(), m.values().end());
  if (!(hi > 0.0)) throw ZeroMeasureError("intermediate factor vanished during elimination");
  return hi == 1.0 ? m : scale(m, 1.0 / hi);
}

/// Marginal of `target` by eliminating every other variable, greedily picking
/// the one whose bucket product is smallest.
inline Measure eliminate_to(const FactorGraph& g, VariableId target, std::size_t max_states) {
  std::vector<Measure> pool;
  pool.reserve(g.num_factors());
  for (const Factor& f : g.factors()) pool.push_back(rescaled(f.table));

  std::vector<bool> done(g.num_variables(), false);
  done[target.index()] = true;
  for (;;) {
    std::optional<VariableId> best;
    std::size_t best_size = std::numeric_limits<std::size_t>::max();
    for (std::size_t v = 0; v < g.num_variables(); ++v) {
      if (done[v]) continue;
      std::vector<VariableId> vars;
      std::size_t size = 1;
      bool used = false;
      for (const Measure& m : pool) {
        if (!m.position(VariableId{v})) continue;
        used = true;
        for (VariableId u : m.scope()) {
          if (std::find(vars.begin(), vars.end(), u) != vars.end()) continue;
          vars.push_back(u);
          const std::size_t d = g.domain_size(u);
          size = size > max_states / d ? max_states + 1 : size * d;
        }
      }
      if (!used) {
        done[v] = true;
        continue;
      }
      if (size < best_size) {
        best_size = size;
        best = VariableId{v};
      }
    }
    if (!best) break;
    if (best_size > max_states)
      throw CapacityExceededError("variable elimination needs an intermediate table of more than " +
                                  std::to_string(max_states) + " entries");

    Measure bucket;
    std::vector<Measure> rest;
    for (Measure& m : pool) {
      if (m.position(*best))
        bucket = multiply(bucket, m);
      else
        rest.push_back(std::move(m));
    }
    const VariableId drop[] = {*best};
    rest.push_back(rescaled(marginalize_out(bucket, drop)));
    pool = std::move(rest);
    done[best->index()] = true;
  }

  Measure result = Measure::filled({target}, {g.domain_size(target)}, 1.0);
  for (const Measure& m : pool) result = rescaled(multiply(result, m));
  return normalize(result);
}

}  // namespace detail

/// Exact single-variable marginals, one normalized measure per variable.
inline std::vector<Measure> exact_marginals(const FactorGraph& g, ExactEngine engine = ExactEngine::VarElim,
                                            std::size_t max_states = kMaxExactStates) {
  if (engine == ExactEngine::Brute) return detail::brute_marginals(g, max_states);
  std::vector<Measure> out;
  out.reserve(g.num_variables());
  for (std::size_t v = 0; v < g.num_variables(); ++v) out.push_back(detail::eliminate_to(g, VariableId{v}, max_states));
  return out;
}

}  // namespace boxprop
