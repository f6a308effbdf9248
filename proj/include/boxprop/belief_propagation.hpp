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
#include <vector>

#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"

namespace boxprop {

struct BpOptions {
  double tol = 1e-9;
  std::size_t max_iter = 10000;
  double damping = 0.0;  // weight of the previous message, in [0, 1)
};

struct BpResult {
  std::vector<Measure> beliefs;  // one normalized single-variable measure per variable
  bool converged = false;
  std::size_t iterations = 0;
  double max_change = 0.0;
};

/// Loopy belief propagation with parallel updates. Messages start uniform and
/// are normalized after every update; convergence is declared once the
/// largest change of any factor-to-variable message entry drops below `tol`.
inline BpResult bp_marginals(const FactorGraph& g, const BpOptions& opt = {}) {
  if (!(opt.damping >= 0.0 && opt.damping < 1.0)) throw Error("damping must lie in [0, 1)");

  // Edge e = (factor f, position k in its scope).
  struct Edge {
    std::size_t factor, pos, var, dim;
  };
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> factor_edges(g.num_factors());
  std::vector<std::vector<std::size_t>> var_edges(g.num_variables());
  for (const Factor& f : g.factors()) {
    for (std::size_t k = 0; k < f.scope().size(); ++k) {
      const std::size_t v = f.scope()[k].index();
      factor_edges[f.id.index()].push_back(edges.size());
      var_edges[v].push_back(edges.size());
      edges.push_back({f.id.index(), k, v, g.domain_size(f.scope()[k])});
    }
  }

  auto normalize_in_place = [](std::vector<double>& m) {
    double z = 0.0;
    for (double x : m) z += x;
    if (!(z > 0.0)) throw ZeroMeasureError("belief propagation message vanished");
    for (double& x : m) x /= z;
  };

  std::vector<std::vector<double>> to_var(edges.size()), to_fac(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    to_var[e].assign(edges[e].dim, 1.0 / static_cast<double>(edges[e].dim));
    to_fac[e] = to_var[e];
  }

  BpResult res;
  std::vector<std::vector<double>> next(edges.size());
  std::vector<std::size_t> state;
  for (res.iterations = 0; res.iterations < opt.max_iter;) {
    ++res.iterations;
    // variable -> factor, from the previous factor -> variable messages
    for (std::size_t e = 0; e < edges.size(); ++e) {
      std::vector<double>& m = to_fac[e];
      std::fill(m.begin(), m.end(), 1.0);
      for (std::size_t e2 : var_edges[edges[e].var]) {
        if (e2 == e) continue;
        for (std::size_t x = 0; x < m.size(); ++x) m[x] *= to_var[e2][x];
      }
      normalize_in_place(m);
    }
    // factor -> variable
    res.max_change = 0.0;
    for (const Factor& f : g.factors()) {
      const auto& fe = factor_edges[f.id.index()];
      for (std::size_t e : fe) next[e].assign(edges[e].dim, 0.0);
      state.assign(f.scope().size(), 0);
      for (std::size_t i = 0; i < f.table.size(); ++i) {
        const double psi = f.table[i];
        if (psi != 0.0) {
          for (std::size_t a = 0; a < fe.size(); ++a) {
            double w = psi;
            for (std::size_t b = 0; b < fe.size(); ++b)
              if (b != a) w *= to_fac[fe[b]][state[b]];
            next[fe[a]][state[a]] += w;
          }
        }
        detail::next_state(state, f.table.dims());
      }
      for (std::size_t e : fe) {
        normalize_in_place(next[e]);
        for (std::size_t x = 0; x < next[e].size(); ++x) {
          const double v = (1.0 - opt.damping) * next[e][x] + opt.damping * to_var[e][x];
          res.max_change = std::max(res.max_change, std::abs(v - to_var[e][x]));
          next[e][x] = v;
        }
      }
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      normalize_in_place(next[e]);
      to_var[e].swap(next[e]);
    }
    if (res.max_change < opt.tol) {
      res.converged = true;
      break;
    }
  }

  for (std::size_t v = 0; v < g.num_variables(); ++v) {
    std::vector<double> b(g.domain_size(VariableId{v}), 1.0);
    for (std::size_t e : var_edges[v])
      for (std::size_t x = 0; x < b.size(); ++x) b[x] *= to_var[e][x];
    normalize_in_place(b);
    res.beliefs.emplace_back(std::vector<VariableId>{VariableId{v}}, std::vector<std::size_t>{b.size()},
                             std::move(b));
  }
  return res;
}

}  // namespace boxprop
