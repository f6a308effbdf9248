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
#include <optional>
#include <string_view>
#include <vector>

#include "boxprop/factor_graph.hpp"
#include "boxprop/measure.hpp"

namespace boxprop {

enum class Method { SubT, SAWT };

inline std::string_view method_label(Method m) { return m == Method::SubT ? "SubT" : "SAWT"; }

/// Accepts the report labels ("SubT", "SAWT") and the CLI spellings
/// ("subtree", "sawtree").
inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "SubT" || s == "subtree") return Method::SubT;
  if (s == "SAWT" || s == "sawtree") return Method::SAWT;
  return std::nullopt;
}

struct BoundResult {
  VariableId variable;
  Box box;
  Method method = Method::SubT;
  std::size_t nodes_used = 0;
  std::chrono::duration<double, std::milli> elapsed{};
};

namespace detail {

/// Variable rule shared by both trees: product of the incoming boxes, or the
/// simplex as soon as one incoming message is a simplex.
inline MessageSet combine_at_variable(VariableId v, std::size_t dim, const std::vector<const MessageSet*>& in) {
  std::vector<Box> boxes;
  boxes.reserve(in.size());
  for (const MessageSet* m : in) {
    if (is_simplex(*m)) return Simplex{v, dim};
    boxes.push_back(std::get<Box>(*m));
  }
  if (boxes.empty()) return Box::ones(v, dim);
  return box_product_same_scope(boxes);
}

/// Final belief at the root: bounding box of the normalized product, or the
/// unit box when any incoming message is a simplex.
inline Box root_belief(VariableId v, std::size_t dim, const std::vector<const MessageSet*>& in) {
  const MessageSet combined = combine_at_variable(v, dim, in);
  if (is_simplex(combined)) return Box::unit(v, dim);
  return normalize_box(std::get<Box>(combined));
}

}  // namespace detail

}  // namespace boxprop
