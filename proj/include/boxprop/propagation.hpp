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

#include "boxprop/bound_result.hpp"
#include "boxprop/factor_graph.hpp"
#include "boxprop/saw_tree.hpp"
#include "boxprop/subtree.hpp"

namespace boxprop {

/// Default size budget for both trees.
inline constexpr std::size_t kDefaultMaxNodes = 5000;

/// Builds the tree for `method` around `root` and propagates boxes over it.
/// `elapsed` covers both steps.
inline BoundResult compute_bound(const FactorGraph& g, VariableId root, Method method,
                                 std::size_t max_nodes = kDefaultMaxNodes) {
  const auto start = std::chrono::steady_clock::now();
  BoundResult r = method == Method::SubT ? boxprop_subtree(g, build_subtree(g, root, max_nodes))
                                         : boxprop_sawtree(g, build_saw_tree(g, root, max_nodes));
  r.elapsed = std::chrono::steady_clock::now() - start;
  return r;
}

}  // namespace boxprop
