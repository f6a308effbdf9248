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
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "boxprop/bound_result.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"
#include "boxprop/subtree.hpp"

namespace boxprop {

enum class SawNodeKind : std::uint8_t {
  Root,
  Inner,
  DeadEndLeaf,       // walk cannot be extended without backtracking
  CycleInducedLeaf,  // last node already occurs earlier on the walk
  TruncationLeaf,    // placeholder for a walk cut off by the size budget
};

/// One self-avoiding walk from the root; `endpoint` is its last node.
struct SawNode {
  NodeRef endpoint;
  std::optional<std::uint32_t> parent;
  SawNodeKind kind = SawNodeKind::Inner;
  std::vector<std::uint32_t> children;
};

/// Tree of the self-avoiding walks that start at a variable. Nodes are stored
/// in breadth-first order, so each parent precedes its children.
class SawTree {
 public:
  VariableId root() const { return root_; }
  const std::vector<SawNode>& nodes() const { return nodes_; }
  const SawNode& node(std::size_t i) const { return nodes_.at(i); }

  /// Nodes other than truncation placeholders; bounded by the build budget.
  std::size_t node_count() const { return node_count_; }
  std::size_t truncated_count() const { return nodes_.size() - node_count_; }

  /// The walk (root first) that node `i` represents.
  std::vector<NodeRef> walk(std::size_t i) const {
    std::vector<NodeRef> w;
    for (std::optional<std::uint32_t> n = static_cast<std::uint32_t>(i); n; n = nodes_[*n].parent)
      w.push_back(nodes_[*n].endpoint);
    std::reverse(w.begin(), w.end());
    return w;
  }

 private:
  friend SawTree grow_saw_tree(const FactorGraph&, VariableId, std::size_t,
                               const std::function<bool(const SawTree&, std::size_t, NodeRef)>&);

  VariableId root_;
  std::vector<SawNode> nodes_;
  std::size_t node_count_ = 0;
};

/// Breadth-first construction of the self-avoiding walks from `root`;
/// extensions are tried in ascending neighbor order. An extension becomes a
/// TruncationLeaf when the budget of `max_nodes` is spent or `accept`
/// rejects it.
inline SawTree grow_saw_tree(const FactorGraph& g, VariableId root, std::size_t max_nodes,
                             const std::function<bool(const SawTree&, std::size_t, NodeRef)>& accept) {
  if (root.index() >= g.num_variables()) throw Error("root variable out of range");
  SawTree t;
  t.root_ = root;
  t.nodes_.push_back(SawNode{NodeRef::variable(root), std::nullopt, SawNodeKind::Root, {}});
  t.node_count_ = 1;

  auto on_walk = [&](std::size_t i, NodeRef n) {
    for (std::optional<std::uint32_t> k = static_cast<std::uint32_t>(i); k; k = t.nodes_[*k].parent)
      if (t.nodes_[*k].endpoint == n) return true;
    return false;
  };

  std::vector<NodeRef> candidates;
  for (std::size_t i = 0; i < t.nodes_.size(); ++i) {
    const SawNodeKind kind = t.nodes_[i].kind;
    if (kind != SawNodeKind::Root && kind != SawNodeKind::Inner) continue;

    const NodeRef e = t.nodes_[i].endpoint;
    const std::optional<NodeRef> back =
        t.nodes_[i].parent ? std::optional<NodeRef>(t.nodes_[*t.nodes_[i].parent].endpoint) : std::nullopt;
    candidates.clear();
    if (e.is_variable()) {
      for (FactorId f : g.neighbors(e.as_variable()))
        if (!back || NodeRef::factor(f) != *back) candidates.push_back(NodeRef::factor(f));
    } else {
      for (VariableId v : g.sorted_scope(e.as_factor()))
        if (!back || NodeRef::variable(v) != *back) candidates.push_back(NodeRef::variable(v));
    }
    if (candidates.empty()) {
      if (kind == SawNodeKind::Inner) t.nodes_[i].kind = SawNodeKind::DeadEndLeaf;
      continue;
    }
    for (NodeRef c : candidates) {
      SawNodeKind ck;
      if (t.node_count_ >= max_nodes || !accept(t, i, c)) {
        ck = SawNodeKind::TruncationLeaf;
      } else {
        ck = on_walk(i, c) ? SawNodeKind::CycleInducedLeaf : SawNodeKind::Inner;
        ++t.node_count_;
      }
      const auto idx = static_cast<std::uint32_t>(t.nodes_.size());
      t.nodes_.push_back(SawNode{c, static_cast<std::uint32_t>(i), ck, {}});
      t.nodes_[i].children.push_back(idx);
    }
  }
  return t;
}

/// SAW tree from `root`, cut off after `max_nodes` nodes in breadth-first
/// order.
inline SawTree build_saw_tree(const FactorGraph& g, VariableId root,
                              std::size_t max_nodes = std::numeric_limits<std::size_t>::max()) {
  return grow_saw_tree(g, root, max_nodes, [](const SawTree&, std::size_t, NodeRef) { return true; });
}

/// The part of the SAW tree whose walks are root paths of `t`; every other
/// walk is cut off as a TruncationLeaf.
inline SawTree saw_tree_from_subtree(const FactorGraph& g, const Subtree& t) {
  return grow_saw_tree(g, t.root(), std::numeric_limits<std::size_t>::max(),
                       [&t](const SawTree& s, std::size_t parent, NodeRef c) {
                         return t.contains(c) && t.is_child_of(c, s.node(parent).endpoint);
                       });
}

/// Box propagation from the leaves of the SAW tree to its root. Cycle-induced
/// and truncation leaves send the simplex; factor nodes bound the sum-product
/// over the (non-factorizing) joint box of their children.
inline BoundResult boxprop_sawtree(const FactorGraph& g, const SawTree& t) {
  const auto start = std::chrono::steady_clock::now();
  const auto& nodes = t.nodes();
  std::vector<std::optional<MessageSet>> msg(nodes.size());
  std::vector<const MessageSet*> in;
  std::vector<Box> boxes;

  for (std::size_t i = nodes.size(); i-- > 1;) {
    const SawNode& n = nodes[i];
    const NodeRef parent = nodes[*n.parent].endpoint;

    if (n.kind == SawNodeKind::CycleInducedLeaf || n.kind == SawNodeKind::TruncationLeaf) {
      const VariableId v = n.endpoint.is_variable() ? n.endpoint.as_variable() : parent.as_variable();
      msg[i] = Simplex{v, g.domain_size(v)};
    } else if (n.endpoint.is_variable()) {
      const VariableId v = n.endpoint.as_variable();
      in.clear();
      for (std::uint32_t c : n.children) in.push_back(&*msg[c]);
      msg[i] = detail::combine_at_variable(v, g.domain_size(v), in);
    } else {
      const Factor& f = g.factor(n.endpoint.as_factor());
      const VariableId keep = parent.as_variable();
      boxes.clear();
      for (VariableId l : f.scope()) {
        if (l == keep) continue;
        auto it = std::find_if(n.children.begin(), n.children.end(),
                               [&](std::uint32_t c) { return nodes[c].endpoint == NodeRef::variable(l); });
        boxes.push_back(it == n.children.end() ? Box::unit(l, g.domain_size(l)) : as_box(*msg[*it]));
      }
      msg[i] = bound_sum_product_joint(f.table, keep, box_product_disjoint_sbb(boxes));
    }
    // Children are no longer needed once the parent message exists.
    for (std::uint32_t c : n.children) msg[c].reset();
  }

  const VariableId root = t.root();
  in.clear();
  for (std::uint32_t c : nodes.front().children) in.push_back(&*msg[c]);
  BoundResult r{root, detail::root_belief(root, g.domain_size(root), in), Method::SAWT, t.node_count(), {}};
  r.elapsed = std::chrono::steady_clock::now() - start;
  return r;
}

}  // namespace boxprop
