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

// Measures (nonnegative tables over an ordered variable scope), boxes of
// measures, and the bounding-box kernel used by both propagation schemes.
//
// Linear indexing is little-endian over the scope: for scope (v1, ..., vk)
// with sizes (d1, ..., dk) the entry for states (x1, ..., xk) sits at
// x1 + d1 * (x2 + d2 * (x3 + ...)), i.e. the first variable cycles fastest.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "boxprop/error.hpp"
#include "boxprop/ids.hpp"

namespace boxprop {

/// Upper limit on the number of extreme-point combinations a single kernel
/// call will enumerate.
inline constexpr std::size_t kMaxEnumeration = std::size_t{1} << 20;

/// Upper limit on the number of entries of any dense table.
inline constexpr std::size_t kMaxTableSize = std::size_t{1} << 40;

namespace detail {

inline std::size_t checked_table_size(std::span<const std::size_t> dims) {
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw ScopeError("domain size must be positive");
    if (n > kMaxTableSize / d) throw CapacityExceededError("table size exceeds limit");
    n *= d;
  }
  return n;
}

/// Advances a little-endian odometer; returns false after the last state.
inline bool next_state(std::vector<std::size_t>& state, std::span<const std::size_t> dims) {
  for (std::size_t k = 0; k < state.size(); ++k) {
    if (++state[k] < dims[k]) return true;
    state[k] = 0;
  }
  return false;
}

}  // namespace detail

/// A nonnegative dense table over the joint domain of an ordered scope.
/// The empty scope holds a single scalar entry.
class Measure {
 public:
  Measure() : values_{1.0} {}

  Measure(std::vector<VariableId> scope, std::vector<std::size_t> dims, std::vector<double> values)
      : scope_(std::move(scope)), dims_(std::move(dims)), values_(std::move(values)) {
    if (scope_.size() != dims_.size()) throw ScopeError("scope and domain-size lists differ in length");
    for (std::size_t a = 0; a < scope_.size(); ++a)
      for (std::size_t b = a + 1; b < scope_.size(); ++b)
        if (scope_[a] == scope_[b])
          throw ScopeError("duplicate variable " + std::to_string(scope_[a].value) + " in scope");
    if (values_.size() != detail::checked_table_size(dims_))
      throw ScopeError("table has " + std::to_string(values_.size()) + " entries, scope requires " +
                       std::to_string(detail::checked_table_size(dims_)));
    for (double v : values_)
      if (!(v >= 0.0) || std::isinf(v)) throw Error("measure entries must be finite and nonnegative");
  }

  static Measure filled(std::vector<VariableId> scope, std::vector<std::size_t> dims, double value) {
    const std::size_t n = detail::checked_table_size(dims);
    return Measure(std::move(scope), std::move(dims), std::vector<double>(n, value));
  }

  /// Kronecker delta on a single variable.
  static Measure delta(VariableId v, std::size_t dim, std::size_t state) {
    std::vector<double> values(dim, 0.0);
    values.at(state) = 1.0;
    return Measure({v}, {dim}, std::move(values));
  }

  const std::vector<VariableId>& scope() const { return scope_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  std::optional<std::size_t> position(VariableId v) const {
    auto it = std::find(scope_.begin(), scope_.end(), v);
    if (it == scope_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - scope_.begin());
  }

  bool same_scope(const Measure& other) const { return scope_ == other.scope_ && dims_ == other.dims_; }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<VariableId> scope_;
  std::vector<std::size_t> dims_;
  std::vector<double> values_;
};

/// The set of measures m with lower <= m <= upper pointwise.
class Box {
 public:
  Box() = default;

  Box(Measure lower, Measure upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!lower_.same_scope(upper_)) throw ScopeError("box bounds have different scopes");
    for (std::size_t i = 0; i < lower_.size(); ++i)
      if (lower_[i] > upper_[i]) throw Error("box lower bound exceeds upper bound");
  }

  static Box degenerate(const Measure& m) { return Box(m, m); }

  static Box ones(VariableId v, std::size_t dim) {
    auto m = Measure::filled({v}, {dim}, 1.0);
    return Box(m, m);
  }

  /// [0, 1] per state: the loosest box containing the simplex.
  static Box unit(VariableId v, std::size_t dim) {
    return Box(Measure::filled({v}, {dim}, 0.0), Measure::filled({v}, {dim}, 1.0));
  }

  const Measure& lower() const { return lower_; }
  const Measure& upper() const { return upper_; }
  const std::vector<VariableId>& scope() const { return lower_.scope(); }
  const std::vector<std::size_t>& dims() const { return lower_.dims(); }
  std::size_t size() const { return lower_.size(); }

  bool is_degenerate() const { return lower_ == upper_; }

  bool contains(const Measure& m, double slack = 0.0) const {
    if (!m.same_scope(lower_)) return false;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] < lower_[i] - slack || m[i] > upper_[i] + slack) return false;
    return true;
  }

  /// True when `inner` lies inside this box, up to `slack` per entry.
  bool encloses(const Box& inner, double slack = 0.0) const {
    return contains(inner.lower(), slack) && contains(inner.upper(), slack);
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  Measure lower_;
  Measure upper_;
};

/// The full probability simplex on one variable.
struct Simplex {
  VariableId variable;
  std::size_t dim = 0;

  friend bool operator==(const Simplex&, const Simplex&) = default;
};

/// Set of candidate messages on a single variable.
using MessageSet = std::variant<Simplex, Box>;

inline bool is_simplex(const MessageSet& ms) { return std::holds_alternative<Simplex>(ms); }

inline VariableId message_variable(const MessageSet& ms) {
  if (const auto* s = std::get_if<Simplex>(&ms)) return s->variable;
  return std::get<Box>(ms).scope().front();
}

inline std::size_t message_dim(const MessageSet& ms) {
  if (const auto* s = std::get_if<Simplex>(&ms)) return s->dim;
  return std::get<Box>(ms).dims().front();
}

/// Box view of a message set; a simplex widens to the unit box.
inline Box as_box(const MessageSet& ms) {
  if (const auto* s = std::get_if<Simplex>(&ms)) return Box::unit(s->variable, s->dim);
  return std::get<Box>(ms);
}

inline double partition_sum(const Measure& m) {
  return std::accumulate(m.values().begin(), m.values().end(), 0.0);
}

inline Measure normalize(const Measure& m) {
  const double z = partition_sum(m);
  if (!(z > 0.0) || std::isinf(z)) throw ZeroMeasureError("cannot normalize a measure with partition sum " + std::to_string(z));
  std::vector<double> values(m.values());
  for (double& v : values) v /= z;
  return Measure(m.scope(), m.dims(), std::move(values));
}

inline Measure scale(const Measure& m, double c) {
  std::vector<double> values(m.values());
  for (double& v : values) v *= c;
  return Measure(m.scope(), m.dims(), std::move(values));
}

/// Product on the ordered union of scopes: `a`'s variables first, then the
/// variables of `b` not already in `a`.
inline Measure multiply(const Measure& a, const Measure& b) {
  std::vector<VariableId> scope(a.scope());
  std::vector<std::size_t> dims(a.dims());
  for (std::size_t k = 0; k < b.scope().size(); ++k) {
    if (auto pos = a.position(b.scope()[k])) {
      if (a.dims()[*pos] != b.dims()[k])
        throw ScopeError("domain size mismatch for variable " + std::to_string(b.scope()[k].value));
    } else {
      scope.push_back(b.scope()[k]);
      dims.push_back(b.dims()[k]);
    }
  }
  const std::size_t n = detail::checked_table_size(dims);

  // Stride of each result variable inside a and b (0 when absent).
  std::vector<std::size_t> stride_a(scope.size(), 0), stride_b(scope.size(), 0);
  {
    std::size_t s = 1;
    for (std::size_t k = 0; k < a.scope().size(); ++k) {
      stride_a[k] = s;
      s *= a.dims()[k];
    }
    s = 1;
    for (std::size_t k = 0; k < b.scope().size(); ++k) {
      auto pos = std::find(scope.begin(), scope.end(), b.scope()[k]) - scope.begin();
      stride_b[static_cast<std::size_t>(pos)] = s;
      s *= b.dims()[k];
    }
  }

  std::vector<double> values(n);
  std::vector<std::size_t> state(scope.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t i = 0; i < n; ++i) {
    values[i] = a[ia] * b[ib];
    for (std::size_t k = 0; k < state.size(); ++k) {
      ia += stride_a[k];
      ib += stride_b[k];
      if (++state[k] < dims[k]) break;
      ia -= stride_a[k] * dims[k];
      ib -= stride_b[k] * dims[k];
      state[k] = 0;
    }
  }
  return Measure(std::move(scope), std::move(dims), std::move(values));
}

/// Sums out `drop`; surviving variables keep their relative order.
inline Measure marginalize_out(const Measure& m, std::span<const VariableId> drop) {
  std::vector<bool> dropped(m.scope().size(), false);
  for (VariableId v : drop) {
    auto pos = m.position(v);
    if (!pos) throw ScopeError("variable " + std::to_string(v.value) + " is not in the measure's scope");
    dropped[*pos] = true;
  }
  std::vector<VariableId> scope;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> stride(m.scope().size(), 0);
  std::size_t s = 1;
  for (std::size_t k = 0; k < m.scope().size(); ++k) {
    if (dropped[k]) continue;
    scope.push_back(m.scope()[k]);
    dims.push_back(m.dims()[k]);
    stride[k] = s;
    s *= m.dims()[k];
  }
  std::vector<double> values(s, 0.0);
  std::vector<std::size_t> state(m.scope().size(), 0);
  std::size_t out = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    values[out] += m[i];
    for (std::size_t k = 0; k < state.size(); ++k) {
      out += stride[k];
      if (++state[k] < m.dims()[k]) break;
      out -= stride[k] * m.dims()[k];
      state[k] = 0;
    }
  }
  return Measure(std::move(scope), std::move(dims), std::move(values));
}

inline Measure marginalize_out(const Measure& m, std::initializer_list<VariableId> drop) {
  return marginalize_out(m, std::span<const VariableId>(drop.begin(), drop.size()));
}

/// Extreme points of a message set. A simplex yields its delta measures; a box
/// yields its corners, one per choice of lower/upper on each state where the
/// two differ (states with lower == upper do not multiply the count).
inline std::vector<Measure> extreme_points(const MessageSet& ms) {
  if (const auto* s = std::get_if<Simplex>(&ms)) {
    std::vector<Measure> out;
    out.reserve(s->dim);
    for (std::size_t x = 0; x < s->dim; ++x) out.push_back(Measure::delta(s->variable, s->dim, x));
    return out;
  }
  const Box& box = std::get<Box>(ms);
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (box.lower()[i] < box.upper()[i]) free.push_back(i);
  if (free.size() >= 63 || (std::size_t{1} << free.size()) > kMaxEnumeration)
    throw CapacityExceededError("box has 2^" + std::to_string(free.size()) + " corners");

  std::vector<Measure> out;
  out.reserve(std::size_t{1} << free.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
    std::vector<double> values(box.lower().values());
    for (std::size_t k = 0; k < free.size(); ++k)
      if (mask >> k & 1U) values[free[k]] = box.upper()[free[k]];
    out.emplace_back(box.scope(), box.dims(), std::move(values));
  }
  return out;
}

inline Box smallest_bounding_box(std::span<const Measure> points) {
  if (points.empty()) throw Error("smallest bounding box of an empty set");
  std::vector<double> lo(points.front().values()), hi(points.front().values());
  for (const Measure& p : points.subspan(1)) {
    if (!p.same_scope(points.front())) throw ScopeError("bounding-box points have different scopes");
    for (std::size_t i = 0; i < p.size(); ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }
  const Measure& f = points.front();
  return Box(Measure(f.scope(), f.dims(), std::move(lo)), Measure(f.scope(), f.dims(), std::move(hi)));
}

/// Product of boxes sharing one scope: again a box, bounded by the products
/// of the lower and of the upper bounds.
inline Box box_product_same_scope(std::span<const Box> boxes) {
  if (boxes.empty()) throw Error("product of an empty list of boxes");
  std::vector<double> lo(boxes.front().lower().values()), hi(boxes.front().upper().values());
  for (const Box& b : boxes.subspan(1)) {
    if (!b.lower().same_scope(boxes.front().lower())) throw ScopeError("box product operands have different scopes");
    for (std::size_t i = 0; i < lo.size(); ++i) {
      lo[i] *= b.lower()[i];
      hi[i] *= b.upper()[i];
    }
  }
  const Measure& f = boxes.front().lower();
  return Box(Measure(f.scope(), f.dims(), std::move(lo)), Measure(f.scope(), f.dims(), std::move(hi)));
}

/// Smallest bounding box of the product of boxes on mutually disjoint
/// scopes: the box between the outer products of the bounds.
inline Box box_product_disjoint_sbb(std::span<const Box> boxes) {
  Measure lo, hi;
  std::vector<VariableId> seen;
  for (const Box& b : boxes) {
    for (VariableId v : b.scope()) {
      if (std::find(seen.begin(), seen.end(), v) != seen.end())
        throw ScopeError("box scopes overlap on variable " + std::to_string(v.value));
      seen.push_back(v);
    }
    lo = multiply(lo, b.lower());
    hi = multiply(hi, b.upper());
  }
  return Box(std::move(lo), std::move(hi));
}

namespace detail {

/// Kernel of the factor-to-variable bounds. `coeff` is a dk x ny row-major
/// matrix mapping a measure c on ny joint states to the unnormalized image
/// (coeff * c) on dk states. Returns the smallest bounding box of the
/// normalized images of all nonzero c in the box [lower, upper].
///
/// Each bound is a linear-fractional program over a box, so it is attained
/// at a corner where c takes the upper bound on states whose ratio
/// coeff[x][y] / colsum[y] lies below the optimum and the lower bound above
/// it. Scanning prefixes of the states sorted by that ratio finds the
/// optimum in O(ny log ny) per output state instead of visiting 2^ny corners.
inline Box fractional_image_bounds(VariableId keep, std::size_t dk, std::size_t ny, std::span<const double> coeff,
                                   std::span<const double> lower, std::span<const double> upper) {
  std::vector<double> colsum(ny, 0.0);
  for (std::size_t x = 0; x < dk; ++x)
    for (std::size_t y = 0; y < ny; ++y) colsum[y] += coeff[x * ny + y];

  std::vector<std::size_t> relevant;
  bool lower_hits_relevant = false;
  bool upper_hits_null = false;
  bool upper_hits_relevant = false;
  for (std::size_t y = 0; y < ny; ++y) {
    if (colsum[y] > 0.0) {
      relevant.push_back(y);
      lower_hits_relevant |= lower[y] > 0.0;
      upper_hits_relevant |= upper[y] > 0.0;
    } else {
      upper_hits_null |= upper[y] > 0.0;
    }
  }
  // A nonzero corner supported only on states the factor annihilates.
  if (!lower_hits_relevant && upper_hits_null)
    throw ZeroMeasureError("a nonzero incoming measure is mapped to the zero measure");
  if (!upper_hits_relevant) throw ZeroMeasureError("every incoming measure is mapped to the zero measure");

  std::vector<double> lo(dk), hi(dk);
  std::vector<std::size_t> order(relevant);
  std::vector<double> ratio(ny, 0.0);
  for (std::size_t x = 0; x < dk; ++x) {
    const double* row = coeff.data() + x * ny;
    for (std::size_t y : relevant) ratio[y] = row[y] / colsum[y];
    std::sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return ratio[p] < ratio[q]; });

    auto scan = [&](auto begin, auto end, auto better) {
      double num = 0.0, den = 0.0;
      for (std::size_t y : relevant) {
        num += row[y] * lower[y];
        den += colsum[y] * lower[y];
      }
      std::optional<double> best;
      if (den > 0.0) best = num / den;
      for (auto it = begin; it != end; ++it) {
        const double w = upper[*it] - lower[*it];
        if (w == 0.0) continue;
        num += row[*it] * w;
        den += colsum[*it] * w;
        if (den > 0.0 && (!best || better(num / den, *best))) best = num / den;
      }
      return *best;
    };
    lo[x] = scan(order.begin(), order.end(), std::less<>{});
    hi[x] = scan(order.rbegin(), order.rend(), std::greater<>{});
    lo[x] = std::clamp(lo[x], 0.0, 1.0);
    hi[x] = std::clamp(hi[x], lo[x], 1.0);
  }
  return Box(Measure({keep}, {dk}, std::move(lo)), Measure({keep}, {dk}, std::move(hi)));
}

/// Splits a factor table into (kept state, joint index of the remaining
/// scope variables in scope order) for every entry.
struct FactorLayout {
  std::size_t keep_pos = 0;
  std::size_t dk = 0;
  std::size_t ny = 1;
  std::vector<std::size_t> keep_state;  // per table entry
  std::vector<std::size_t> rest_index;  // per table entry
};

inline FactorLayout layout_for(const Measure& factor, VariableId keep) {
  auto pos = factor.position(keep);
  if (!pos) throw ScopeError("variable " + std::to_string(keep.value) + " is not in the factor's scope");
  FactorLayout L;
  L.keep_pos = *pos;
  L.dk = factor.dims()[*pos];
  std::vector<std::size_t> stride(factor.scope().size(), 0);
  for (std::size_t k = 0; k < factor.scope().size(); ++k) {
    if (k == *pos) continue;
    stride[k] = L.ny;
    L.ny *= factor.dims()[k];
  }
  L.keep_state.resize(factor.size());
  L.rest_index.resize(factor.size());
  std::vector<std::size_t> state(factor.scope().size(), 0);
  for (std::size_t i = 0; i < factor.size(); ++i) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < state.size(); ++k) r += stride[k] * state[k];
    L.keep_state[i] = state[*pos];
    L.rest_index[i] = r;
    next_state(state, factor.dims());
  }
  return L;
}

}  // namespace detail

/// Smallest bounding box of the normalized measures in `box`.
inline Box normalize_box(const Box& box) {
  if (box.scope().size() != 1) throw ScopeError("normalize_box expects a single-variable box");
  const std::size_t d = box.size();
  std::vector<double> identity(d * d, 0.0);
  for (std::size_t x = 0; x < d; ++x) identity[x * d + x] = 1.0;
  return detail::fractional_image_bounds(box.scope().front(), d, d, identity, box.lower().values(),
                                         box.upper().values());
}

/// Bound on N(sum_{scope \ keep} factor * prod_l m_l) over every choice of
/// m_l from the incoming message sets, one per scope variable other than
/// `keep`. Enumerates all combinations of extreme points; combinations that
/// contain the zero measure are skipped since they are not measures the
/// normalization acts on.
inline Box bound_sum_product(const Measure& factor, VariableId keep, const std::map<VariableId, MessageSet>& incoming,
                             std::size_t max_combinations = kMaxEnumeration) {
  const detail::FactorLayout L = detail::layout_for(factor, keep);

  struct Choices {
    std::size_t pos;
    std::vector<Measure> points;
  };
  std::vector<Choices> choices;
  std::size_t total = 1;
  for (std::size_t k = 0; k < factor.scope().size(); ++k) {
    if (k == L.keep_pos) continue;
    const VariableId v = factor.scope()[k];
    auto it = incoming.find(v);
    if (it == incoming.end()) throw ScopeError("no incoming message for variable " + std::to_string(v.value));
    if (message_variable(it->second) != v || message_dim(it->second) != factor.dims()[k])
      throw ScopeError("incoming message for variable " + std::to_string(v.value) + " has the wrong scope");
    auto points = extreme_points(it->second);
    if (total > max_combinations / points.size())
      throw CapacityExceededError("extreme-point combinations exceed " + std::to_string(max_combinations));
    total *= points.size();
    choices.push_back({k, std::move(points)});
  }
  if (incoming.size() != choices.size()) throw ScopeError("incoming messages name variables outside the factor scope");

  // Per-entry state of each incoming variable.
  std::vector<std::vector<std::size_t>> entry_state(choices.size(), std::vector<std::size_t>(factor.size()));
  {
    std::vector<std::size_t> state(factor.scope().size(), 0);
    for (std::size_t i = 0; i < factor.size(); ++i) {
      for (std::size_t c = 0; c < choices.size(); ++c) entry_state[c][i] = state[choices[c].pos];
      detail::next_state(state, factor.dims());
    }
  }

  std::vector<double> lo(L.dk, std::numeric_limits<double>::infinity());
  std::vector<double> hi(L.dk, -std::numeric_limits<double>::infinity());
  bool any = false;
  std::vector<std::size_t> pick(choices.size(), 0);
  std::vector<std::size_t> radix(choices.size());
  for (std::size_t c = 0; c < choices.size(); ++c) radix[c] = choices[c].points.size();
  std::vector<double> image(L.dk);
  do {
    bool zero_input = false;
    for (std::size_t c = 0; c < choices.size(); ++c) zero_input |= choices[c].points[pick[c]].is_zero();
    if (zero_input) continue;

    std::fill(image.begin(), image.end(), 0.0);
    for (std::size_t i = 0; i < factor.size(); ++i) {
      double w = factor[i];
      for (std::size_t c = 0; c < choices.size() && w != 0.0; ++c) w *= choices[c].points[pick[c]][entry_state[c][i]];
      image[L.keep_state[i]] += w;
    }
    const double z = std::accumulate(image.begin(), image.end(), 0.0);
    if (!(z > 0.0)) throw ZeroMeasureError("an extreme-point combination yields the zero measure");
    for (std::size_t x = 0; x < L.dk; ++x) {
      const double p = image[x] / z;
      lo[x] = std::min(lo[x], p);
      hi[x] = std::max(hi[x], p);
    }
    any = true;
  } while (detail::next_state(pick, radix));

  if (!any) throw ZeroMeasureError("every incoming combination is the zero measure");
  const std::vector<std::size_t> dk{L.dk};
  return Box(Measure({keep}, dk, std::move(lo)), Measure({keep}, dk, std::move(hi)));
}

/// Looser variant of bound_sum_product for an incoming joint box that need not
/// factorize. `joint` must be over the factor scope minus `keep`, in scope
/// order.
inline Box bound_sum_product_joint(const Measure& factor, VariableId keep, const Box& joint) {
  const detail::FactorLayout L = detail::layout_for(factor, keep);
  std::vector<VariableId> rest;
  std::vector<std::size_t> rest_dims;
  for (std::size_t k = 0; k < factor.scope().size(); ++k) {
    if (k == L.keep_pos) continue;
    rest.push_back(factor.scope()[k]);
    rest_dims.push_back(factor.dims()[k]);
  }
  if (joint.scope() != rest || joint.dims() != rest_dims)
    throw ScopeError("joint incoming box must cover the factor scope minus the kept variable, in scope order");

  std::vector<double> coeff(L.dk * L.ny, 0.0);
  for (std::size_t i = 0; i < factor.size(); ++i) coeff[L.keep_state[i] * L.ny + L.rest_index[i]] = factor[i];
  return detail::fractional_image_bounds(keep, L.dk, L.ny, coeff, joint.lower().values(), joint.upper().values());
}

}  // namespace boxprop
