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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace boxprop {

/// Dense integer identifier tagged by what it indexes, so variable and
/// factor indices cannot be mixed up.
template <class Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}
  constexpr explicit Id(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit Id(int v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(Id, Id) = default;

  friend std::ostream& operator<<(std::ostream& os, Id id) { return os << id.value; }
};

using VariableId = Id<struct VariableTag>;
using FactorId = Id<struct FactorTag>;

/// A node of the bipartite factor graph: either a variable or a factor.
struct NodeRef {
  enum class Kind : std::uint8_t { Variable, Factor };

  Kind kind = Kind::Variable;
  std::uint32_t index = 0;

  static constexpr NodeRef variable(VariableId v) { return {Kind::Variable, v.value}; }
  static constexpr NodeRef factor(FactorId f) { return {Kind::Factor, f.value}; }

  constexpr bool is_variable() const { return kind == Kind::Variable; }
  constexpr bool is_factor() const { return kind == Kind::Factor; }
  constexpr VariableId as_variable() const { return VariableId{index}; }
  constexpr FactorId as_factor() const { return FactorId{index}; }

  friend constexpr auto operator<=>(NodeRef, NodeRef) = default;

  friend std::ostream& operator<<(std::ostream& os, NodeRef n) {
    return os << (n.is_variable() ? "v" : "F") << n.index;
  }
};

}  // namespace boxprop

template <class Tag>
struct std::hash<boxprop::Id<Tag>> {
  std::size_t operator()(boxprop::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
