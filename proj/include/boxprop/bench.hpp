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

// Benchmark graph generators plus the harness that runs every bound method
// over a graph and writes gap reports.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "boxprop/belief_propagation.hpp"
#include "boxprop/exact.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"
#include "boxprop/propagation.hpp"

namespace boxprop {

/// Seeded source of uniform and standard-normal draws. The engine is
/// std::mt19937_64, whose output sequence is fixed by the standard; normals
/// come from the Box-Muller transform (cosine branch only), so draws do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double uniform() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

struct GridSpec {
  std::size_t rows = 5;
  std::size_t cols = 5;
  std::size_t domain_size = 2;
  double beta = 1.0;
  std::uint64_t seed = 0;
};

namespace detail {

inline void check_grid(const GridSpec& s, std::size_t domain) {
  if (s.rows < 1 || s.cols < 1) throw Error("grid needs at least one row and one column");
  if (!(s.beta > 0.0)) throw Error("grid interaction strength must be positive");
  if (s.domain_size != domain) throw Error("grid domain size must be " + std::to_string(domain));
}

/// Nearest-neighbor edges in row-major order: right neighbor, then down.
inline std::vector<std::pair<std::size_t, std::size_t>> grid_edges(const GridSpec& s) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t r = 0; r < s.rows; ++r)
    for (std::size_t c = 0; c < s.cols; ++c) {
      const std::size_t v = r * s.cols + c;
      if (c + 1 < s.cols) edges.emplace_back(v, v + 1);
      if (r + 1 < s.rows) edges.emplace_back(v, v + s.cols);
    }
  return edges;
}

}  // namespace detail

/// Binary spin-glass grid, P(x) proportional to
/// exp(sum_i theta_i x_i + sum_<ij> J_ij x_i x_j) with spins x in {-1, +1}
/// (state 0 is -1, state 1 is +1). Fields and couplings are drawn as
/// standard normals and then multiplied by beta, so one seed gives the same
/// instance shape at every beta. Factors: one unary per variable (row-major),
/// then one pairwise per edge.
inline FactorGraph gen_ising_grid(const GridSpec& s) {
  detail::check_grid(s, 2);
  Rng rng(s.seed);
  const std::size_t n = s.rows * s.cols;
  const auto edges = detail::grid_edges(s);
  std::vector<double> theta(n), coupling(edges.size());
  for (double& t : theta) t = rng.normal();
  for (double& j : coupling) j = rng.normal();

  std::vector<Measure> tables;
  for (std::size_t v = 0; v < n; ++v) {
    const double h = s.beta * theta[v];
    tables.emplace_back(std::vector<VariableId>{VariableId{v}}, std::vector<std::size_t>{2},
                        std::vector<double>{std::exp(-h), std::exp(h)});
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double j = s.beta * coupling[e];
    // index = x_a + 2 x_b; aligned spins get exp(+J)
    tables.emplace_back(std::vector<VariableId>{VariableId{edges[e].first}, VariableId{edges[e].second}},
                        std::vector<std::size_t>{2, 2},
                        std::vector<double>{std::exp(j), std::exp(-j), std::exp(-j), std::exp(j)});
  }
  return FactorGraph(std::move(tables));
}

/// Ternary grid with pairwise factors only; every entry is exp(beta * z) for
/// an independent standard normal z.
inline FactorGraph gen_ternary_grid(const GridSpec& s) {
  detail::check_grid(s, 3);
  Rng rng(s.seed);
  std::vector<Measure> tables;
  for (auto [a, b] : detail::grid_edges(s)) {
    std::vector<double> values(9);
    for (double& x : values) x = std::exp(s.beta * rng.normal());
    tables.emplace_back(std::vector<VariableId>{VariableId{a}, VariableId{b}}, std::vector<std::size_t>{3, 3},
                        std::move(values));
  }
  return FactorGraph(std::move(tables));
}

inline FactorGraph gen_grid(const GridSpec& s) {
  if (s.domain_size == 2) return gen_ising_grid(s);
  if (s.domain_size == 3) return gen_ternary_grid(s);
  throw Error("grid domain size must be 2 or 3");
}

struct RandomGraphSpec {
  std::size_t num_variables = 6;
  std::size_t min_domain = 2;
  std::size_t max_domain = 4;
  std::size_t max_arity = 3;
  std::size_t extra_factors = 3;
  double strength = 1.0;  // table entries are exp(strength * z)
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::size_t> random_domains(const RandomGraphSpec& s, Rng& rng) {
  if (s.num_variables < 1 || s.min_domain < 2 || s.max_domain < s.min_domain || s.max_arity < 1)
    throw Error("invalid random graph parameters");
  std::vector<std::size_t> dims(s.num_variables);
  for (auto& d : dims) d = s.min_domain + rng.below(s.max_domain - s.min_domain + 1);
  return dims;
}

inline Measure random_table(const std::vector<VariableId>& scope, const std::vector<std::size_t>& all_dims,
                            double strength, Rng& rng) {
  std::vector<std::size_t> dims;
  for (VariableId v : scope) dims.push_back(all_dims[v.index()]);
  auto m = Measure::filled(scope, dims, 1.0);
  std::vector<double> values(m.size());
  for (double& x : values) x = std::exp(strength * rng.normal());
  return Measure(scope, dims, std::move(values));
}

}  // namespace detail

/// Connected random graph with strictly positive tables. Variable v > 0 is
/// tied to earlier variables by one factor each; `extra_factors` further
/// factors over random distinct variables close loops.
inline FactorGraph gen_random_graph(const RandomGraphSpec& s) {
  Rng rng(s.seed);
  const auto dims = detail::random_domains(s, rng);
  std::vector<Measure> tables;
  if (s.num_variables == 1 || s.max_arity == 1) {
    if (s.num_variables != 1) throw Error("a connected graph with several variables needs arity >= 2");
    tables.push_back(detail::random_table({VariableId{0}}, dims, s.strength, rng));
    return FactorGraph(std::move(tables));
  }
  for (std::size_t v = 1; v < s.num_variables; ++v) {
    const std::size_t arity = std::min(2 + rng.below(s.max_arity - 1), v + 1);
    std::vector<VariableId> scope{VariableId{v}};
    while (scope.size() < arity) {
      const VariableId u{rng.below(v)};
      if (std::find(scope.begin(), scope.end(), u) == scope.end()) scope.push_back(u);
    }
    tables.push_back(detail::random_table(scope, dims, s.strength, rng));
  }
  for (std::size_t e = 0; e < s.extra_factors; ++e) {
    const std::size_t arity = std::min(1 + rng.below(s.max_arity), s.num_variables);
    std::vector<VariableId> scope;
    while (scope.size() < arity) {
      const VariableId u{rng.below(s.num_variables)};
      if (std::find(scope.begin(), scope.end(), u) == scope.end()) scope.push_back(u);
    }
    tables.push_back(detail::random_table(scope, dims, s.strength, rng));
  }
  return FactorGraph(std::move(tables));
}

/// Random factor tree: each new factor joins one existing variable to
/// fresh ones; unary factors are sprinkled on as extra leaves.
inline FactorGraph gen_random_tree(const RandomGraphSpec& s) {
  Rng rng(s.seed);
  const auto dims = detail::random_domains(s, rng);
  std::vector<Measure> tables;
  std::size_t have = 1;
  tables.push_back(detail::random_table({VariableId{0}}, dims, s.strength, rng));
  while (have < s.num_variables) {
    const std::size_t max_new = std::min(s.max_arity - 1, s.num_variables - have);
    if (max_new == 0) throw Error("a tree with several variables needs arity >= 2");
    const std::size_t fresh = 1 + rng.below(max_new);
    std::vector<VariableId> scope{VariableId{rng.below(have)}};
    for (std::size_t k = 0; k < fresh; ++k) scope.push_back(VariableId{have++});
    tables.push_back(detail::random_table(scope, dims, s.strength, rng));
    if (rng.uniform() < 0.3) tables.push_back(detail::random_table({VariableId{rng.below(have)}}, dims, s.strength, rng));
  }
  return FactorGraph(std::move(tables));
}

/// Largest per-state width of a box.
inline double gap(const Box& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) g = std::max(g, b.upper()[i] - b.lower()[i]);
  return g;
}

inline double max_abs_diff(const Measure& a, const Measure& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct GapRecord {
  VariableId variable;
  std::string method;
  double gap = 0.0;
  double time_ms = 0.0;
};

struct DetailRecord {
  VariableId variable;
  Method method = Method::SubT;
  std::optional<Box> box;  // empty when the computation failed
  std::size_t nodes_used = 0;
  double time_ms = 0.0;
  std::optional<std::string> error;
  std::optional<bool> contains_exact;
  std::optional<bool> contains_bp;
};

struct CompareOptions {
  std::vector<Method> methods{Method::SubT, Method::SAWT};
  std::size_t subtree_max_nodes = kDefaultMaxNodes;
  std::size_t saw_max_nodes = kDefaultMaxNodes;
  bool run_exact = true;
  ExactEngine engine = ExactEngine::VarElim;
  bool run_bp = true;
  BpOptions bp;
  unsigned threads = 1;
  double slack = 1e-9;
};

struct CompareReport {
  std::vector<GapRecord> gaps;        // sorted by method label, then variable
  std::vector<DetailRecord> details;  // sorted by method label, then variable
  std::optional<std::vector<Measure>> exact;
  std::optional<BpResult> bp;
  std::vector<std::string> notes;
};

/// Runs every method on every variable. Failures are recorded per record
/// rather than aborting the run. When exact marginals are feasible the
/// report also carries BP errors ("BP-error" rows, max-abs error) and
/// containment flags.
inline CompareReport compare(const FactorGraph& g, const CompareOptions& opt = {}) {
  CompareReport rep;
  std::vector<Method> methods = opt.methods;
  std::sort(methods.begin(), methods.end(),
            [](Method a, Method b) { return method_label(a) < method_label(b); });
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

  const std::size_t n = g.num_variables();
  rep.details.resize(methods.size() * n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < rep.details.size();) {
      DetailRecord& d = rep.details[k];
      d.method = methods[k / n];
      d.variable = VariableId{k % n};
      const std::size_t budget = d.method == Method::SubT ? opt.subtree_max_nodes : opt.saw_max_nodes;
      try {
        BoundResult r = compute_bound(g, d.variable, d.method, budget);
        d.box = std::move(r.box);
        d.nodes_used = r.nodes_used;
        d.time_ms = r.elapsed.count();
      } catch (const Error& e) {
        d.error = e.what();
      }
    }
  };
  {
    const unsigned workers = std::max(1U, std::min<unsigned>(opt.threads, static_cast<unsigned>(rep.details.size())));
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  if (opt.run_exact) {
    try {
      rep.exact = exact_marginals(g, opt.engine);
    } catch (const Error& e) {
      rep.notes.push_back(std::string("exact marginals unavailable: ") + e.what());
    }
  }
  double bp_ms = 0.0;
  if (opt.run_bp) {
    const auto start = std::chrono::steady_clock::now();
    try {
      rep.bp = bp_marginals(g, opt.bp);
      if (!rep.bp->converged) rep.notes.push_back("belief propagation did not converge");
    } catch (const Error& e) {
      rep.notes.push_back(std::string("belief propagation failed: ") + e.what());
    }
    bp_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }

  for (DetailRecord& d : rep.details) {
    if (!d.box) {
      rep.notes.push_back(std::string(method_label(d.method)) + " failed for variable " +
                          std::to_string(d.variable.value) + ": " + *d.error);
      continue;
    }
    if (rep.exact) d.contains_exact = d.box->contains((*rep.exact)[d.variable.index()], opt.slack);
    if (rep.bp && rep.bp->converged) d.contains_bp = d.box->contains(rep.bp->beliefs[d.variable.index()], opt.slack);
    rep.gaps.push_back({d.variable, std::string(method_label(d.method)), gap(*d.box), d.time_ms});
  }
  if (rep.exact && rep.bp) {
    std::vector<GapRecord> bp_rows;
    for (std::size_t v = 0; v < n; ++v)
      bp_rows.push_back({VariableId{v}, "BP-error", max_abs_diff(rep.bp->beliefs[v], (*rep.exact)[v]),
                         bp_ms / static_cast<double>(n)});
    rep.gaps.insert(rep.gaps.begin(), bp_rows.begin(), bp_rows.end());  // "BP-error" sorts first
  }
  return rep;
}

/// Problems with the report's boxes; empty when every emitted box satisfies
/// 0 <= lower <= upper <= 1 and sum(lower) <= 1 <= sum(upper).
inline std::vector<std::string> check_report(const CompareReport& rep, double slack = 1e-9) {
  std::vector<std::string> problems;
  for (const DetailRecord& d : rep.details) {
    if (!d.box) continue;
    const Box& b = *d.box;
    double lo = 0.0, hi = 0.0;
    bool in_range = true;
    for (std::size_t x = 0; x < b.size(); ++x) {
      lo += b.lower()[x];
      hi += b.upper()[x];
      in_range &= b.lower()[x] >= -slack && b.upper()[x] <= 1.0 + slack && b.lower()[x] <= b.upper()[x];
    }
    const std::string who = std::string(method_label(d.method)) + " variable " + std::to_string(d.variable.value);
    if (!in_range) problems.push_back(who + ": bounds outside [0, 1]");
    if (lo > 1.0 + slack || hi < 1.0 - slack) problems.push_back(who + ": bounds exclude every distribution");
  }
  return problems;
}

inline void write_summary_csv(std::ostream& out, const CompareReport& rep) {
  out << "variable,method,gap,time_ms\n";
  for (const GapRecord& r : rep.gaps)
    out << r.variable << "," << r.method << "," << detail::format_double(r.gap) << ","
        << detail::format_double(r.time_ms) << "\n";
}

/// Per-method gaps sorted ascending, for plotting gap profiles.
inline void write_profile_csv(std::ostream& out, const CompareReport& rep) {
  out << "method,rank,gap\n";
  std::vector<GapRecord> rows = rep.gaps;
  std::stable_sort(rows.begin(), rows.end(), [](const GapRecord& a, const GapRecord& b) {
    return a.method != b.method ? a.method < b.method : a.gap < b.gap;
  });
  std::size_t rank = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rank = (i == 0 || rows[i].method != rows[i - 1].method) ? 0 : rank + 1;
    out << rows[i].method << "," << rank << "," << detail::format_double(rows[i].gap) << "\n";
  }
}

inline nlohmann::ordered_json to_json(const DetailRecord& d, const CompareReport* rep = nullptr) {
  nlohmann::ordered_json j;
  j["variable"] = d.variable.value;
  j["method"] = method_label(d.method);
  if (d.box) {
    j["lower"] = d.box->lower().values();
    j["upper"] = d.box->upper().values();
  } else {
    j["lower"] = nullptr;
    j["upper"] = nullptr;
  }
  j["nodes_used"] = d.nodes_used;
  j["time_ms"] = d.time_ms;
  if (d.error) j["error"] = *d.error;
  if (rep && rep->exact) j["exact"] = (*rep->exact)[d.variable.index()].values();
  if (d.contains_exact) j["contains_exact"] = *d.contains_exact;
  if (d.contains_bp) j["contains_bp"] = *d.contains_bp;
  return j;
}

/// One JSON object per line.
inline void write_details(std::ostream& out, const CompareReport& rep) {
  for (const DetailRecord& d : rep.details) out << to_json(d, &rep).dump() << "\n";
}

}  // namespace boxprop
