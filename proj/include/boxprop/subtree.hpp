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

#include <chrono>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "boxprop/bound_result.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"

namespace boxprop {

/// A tree inside the factor graph, rooted at a variable. Every edge of the
/// tree is an edge of the graph; graph edges not in the tree are "missing"
/// and carry simplex messages during propagation.
class Subtree {
 public:
  Subtree(const FactorGraph& g, VariableId root)
      : num_vars_(g.num_variables()),
        root_(root),
        in_tree_(g.num_variables() + g.num_factors(), false),
        parent_(g.num_variables() + g.num_factors()),
        children_(g.num_variables() + g.num_factors()) {
    if (root.index() >= num_vars_) throw Error("root variable out of range");
    in_tree_[slot(NodeRef::variable(root))] = true;
    order_.push_back(NodeRef::variable(root));
  }

  /// Attaches `child` below `parent`. Both must be adjacent in `g`, `parent`
  /// must already be in the tree and `child` must not be.
  void add_child(const FactorGraph& g, NodeRef parent, NodeRef child) {
    if (!contains(parent)) throw Error("subtree parent is not in the tree");
    if (contains(child)) throw Error("subtree node added twice");
    if (parent.kind == child.kind) throw Error("subtree edge must join a variable and a factor");
    const VariableId v = parent.is_variable() ? parent.as_variable() : child.as_variable();
    const FactorId f = parent.is_factor() ? parent.as_factor() : child.as_factor();
    const auto& scope = g.factor(f).scope();
    if (std::find(scope.begin(), scope.end(), v) == scope.end()) throw Error("subtree edge is not a graph edge");
    in_tree_[slot(child)] = true;
    parent_[slot(child)] = parent;
    children_[slot(parent)].push_back(child);
    order_.push_back(child);
  }

  VariableId root() const { return root_; }

  /// Nodes in insertion order; every parent precedes its children.
  const std::vector<NodeRef>& nodes() const { return order_; }
  std::size_t size() const { return order_.size(); }

  bool contains(NodeRef n) const { return in_tree_.at(slot(n)); }
  std::optional<NodeRef> parent(NodeRef n) const { return parent_.at(slot(n)); }
  std::span<const NodeRef> children(NodeRef n) const { return children_.at(slot(n)); }

  bool is_child_of(NodeRef child, NodeRef parent) const {
    auto p = parent_.at(slot(child));
    return p && *p == parent;
  }

 private:
  std::size_t slot(NodeRef n) const { return n.is_variable() ? n.index : num_vars_ + n.index; }

  std::size_t num_vars_;
  VariableId root_;
  std::vector<bool> in_tree_;
  std::vector<std::optional<NodeRef>> parent_;
  std::vector<std::vector<NodeRef>> children_;
  std::vector<NodeRef> order_;
};

/// Breadth-first subtree from `root`; neighbors are visited in ascending id
/// order and a node joins the tree on its first visit only. Growth stops once
/// the tree holds `max_nodes` nodes (variables and factors both count).
inline Subtree build_subtree(const FactorGraph& g, VariableId root,
                             std::size_t max_nodes = std::numeric_limits<std::size_t>::max()) {
  Subtree t(g, root);
  std::queue<NodeRef> q;
  q.push(NodeRef::variable(root));
  while (!q.empty() && t.size() < max_nodes) {
    const NodeRef u = q.front();
    q.pop();
    auto visit = [&](NodeRef w) {
      if (t.size() >= max_nodes || t.contains(w)) return;
      t.add_child(g, u, w);
      q.push(w);
    };
    if (u.is_variable()) {
      for (FactorId f : g.neighbors(u.as_variable())) visit(NodeRef::factor(f));
    } else {
      for (VariableId v : g.sorted_scope(u.as_factor())) visit(NodeRef::variable(v));
    }
  }
  return t;
}

/// Box propagation from the leaves of `t` to its root. The returned box
/// contains the exact marginal of the root, and also its loopy BP belief.
inline BoundResult boxprop_subtree(const FactorGraph& g, const Subtree& t) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t nv = g.num_variables();
  std::vector<std::optional<MessageSet>> msg(nv + g.num_factors());
  auto slot = [nv](NodeRef n) { return n.is_variable() ? n.index : nv + n.index; };

  const auto& order = t.nodes();
  for (std::size_t k = order.size(); k-- > 1;) {
    const NodeRef u = order[k];
    const NodeRef p = *t.parent(u);
    if (u.is_variable()) {
      const VariableId j = u.as_variable();
      const std::size_t d = g.domain_size(j);
      std::vector<MessageSet> simplices;
      std::vector<const MessageSet*> in;
      simplices.reserve(g.neighbors(j).size());
      for (FactorId f : g.neighbors(j)) {
        const NodeRef fn = NodeRef::factor(f);
        if (fn == p) continue;
        if (t.is_child_of(fn, u)) {
          in.push_back(&*msg[slot(fn)]);
        } else {
          simplices.push_back(Simplex{j, d});
          in.push_back(&simplices.back());
        }
      }
      msg[slot(u)] = detail::combine_at_variable(j, d, in);
    } else {
      const Factor& f = g.factor(u.as_factor());
      const VariableId keep = p.as_variable();
      std::map<VariableId, MessageSet> incoming;
      for (VariableId l : f.scope()) {
        if (l == keep) continue;
        const NodeRef ln = NodeRef::variable(l);
        if (t.is_child_of(ln, u))
          incoming.emplace(l, *msg[slot(ln)]);
        else
          incoming.emplace(l, Simplex{l, g.domain_size(l)});
      }
      msg[slot(u)] = bound_sum_product(f.table, keep, incoming);
    }
  }

  const VariableId root = t.root();
  const std::size_t d = g.domain_size(root);
  std::vector<MessageSet> simplices;
  simplices.reserve(g.neighbors(root).size());
  std::vector<const MessageSet*> in;
  for (FactorId f : g.neighbors(root)) {
    const NodeRef fn = NodeRef::factor(f);
    if (t.is_child_of(fn, NodeRef::variable(root))) {
      in.push_back(&*msg[slot(fn)]);
    } else {
      simplices.push_back(Simplex{root, d});
      in.push_back(&simplices.back());
    }
  }
  BoundResult r{root, detail::root_belief(root, d, in), Method::SubT, t.size(), {}};
  r.elapsed = std::chrono::steady_clock::now() - start;
  return r;
}

}  // namespace boxprop
