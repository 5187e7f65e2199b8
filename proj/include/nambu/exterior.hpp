#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nambu/poly.hpp"

namespace nambu {

/// Strictly increasing coordinate tuple encoded as a bit mask.
using IndexMask = std::uint32_t;

std::vector<std::size_t> mask_indices(IndexMask m);
IndexMask mask_of(std::span<const std::size_t> indices);
inline unsigned mask_grade(IndexMask m) { return static_cast<unsigned>(std::popcount(m)); }
/// Number of elements of m strictly below bit i.
inline unsigned mask_rank_below(IndexMask m, std::size_t i) {
  return static_cast<unsigned>(std::popcount(m & ((IndexMask{1} << i) - 1)));
}
/// Sign (+1/-1) of concatenating sorted disjoint tuples a then b into sorted order.
int shuffle_sign(IndexMask a, IndexMask b);

/// Lexicographic order on the tuples encoded by equal-grade masks.
struct LexMaskLess {
  bool operator()(IndexMask a, IndexMask b) const {
    const IndexMask diff = a ^ b;
    if (!diff) return false;
    return (a & diff & (~diff + 1)) != 0;
  }
};

enum class FieldKind { Vector, Form };

/// Grade-k skew field on a chart: sparse map from increasing index tuples to
/// polynomial coefficients. Vectors are sections of the k-th exterior power of
/// the tangent bundle (basis @x_i1^...^@x_ik), forms of the cotangent bundle
/// (basis dx_i1^...^dx_ik).
template <FieldKind K>
class SkewField {
 public:
  using Components = std::map<IndexMask, Poly, LexMaskLess>;
  static constexpr FieldKind kind = K;

  SkewField() = default;
  SkewField(Chart chart, unsigned grade) : chart_(std::move(chart)), grade_(grade) {}

  /// Grade-0 field holding a function.
  static SkewField scalar(const Poly& f);
  /// @x_i for vectors, dx_i for forms.
  static SkewField basis(const Chart& chart, std::size_t i);
  /// Basis element for a sorted index tuple, with coefficient 1.
  static SkewField basis_tuple(const Chart& chart, std::span<const std::size_t> indices);

  const Chart& chart() const { return chart_; }
  unsigned grade() const { return grade_; }
  const Components& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }
  /// Coefficient of a basis element (zero if absent).
  Poly component(IndexMask m) const;
  /// Grade-0 value (zero polynomial for higher grades).
  Poly scalar_value() const { return component(0); }

  /// Adds sign * coef at the tuple `indices` given in any order; repeated
  /// indices contribute nothing.
  void add_term(std::span<const std::size_t> indices, const Poly& coef);
  /// Adds coef at a mask of the field's grade.
  void add_component(IndexMask m, const Poly& coef);

  SkewField operator-() const;
  SkewField& operator+=(const SkewField& rhs);
  SkewField& operator-=(const SkewField& rhs);
  SkewField& operator*=(const Poly& f);
  SkewField& operator*=(const Rat& c);
  friend SkewField operator+(SkewField a, const SkewField& b) { return a += b; }
  friend SkewField operator-(SkewField a, const SkewField& b) { return a -= b; }
  friend SkewField operator*(SkewField a, const Poly& f) { return a *= f; }
  friend SkewField operator*(const Poly& f, SkewField a) { return a *= f; }
  friend SkewField operator*(SkewField a, const Rat& c) { return a *= c; }
  friend SkewField operator*(const Rat& c, SkewField a) { return a *= c; }
  friend bool operator==(const SkewField& a, const SkewField& b) {
    return a.grade_ == b.grade_ && a.comps_.size() == b.comps_.size() &&
           (a.comps_.empty() || a.chart_ == b.chart_) && a.comps_ == b.comps_;
  }

  /// Applies `fn` to every coefficient, dropping zeros.
  SkewField map_coefficients(const std::function<Poly(const Poly&)>& fn) const;

  /// `@x^@y * (x)` / `d x ^ d y * (x)`; `0` when zero.
  std::string to_string() const;

 private:
  Chart chart_;
  unsigned grade_ = 0;
  Components comps_;
};

using MultiVec = SkewField<FieldKind::Vector>;
using Form = SkewField<FieldKind::Form>;

template <FieldKind K>
using DualField = SkewField<K == FieldKind::Vector ? FieldKind::Form : FieldKind::Vector>;

/// Exterior product; throws on chart mismatch.
template <FieldKind K>
SkewField<K> wedge(const SkewField<K>& a, const SkewField<K>& b);

/// Interior product of a grade-1 field of the dual kind into T:
/// iota_{dx_i}(e_I) = (-1)^{position of i in I} e_{I minus i}, positions from 0.
template <FieldKind K>
SkewField<K> interior(const DualField<K>& one, const SkewField<K>& t);

/// iota_{a_r} ... iota_{a_1} T.
template <FieldKind K>
SkewField<K> interior_sequence(std::span<const DualField<K>> ones, const SkewField<K>& t);

/// iota_omega P for a k-form omega, extended linearly from
/// iota_{dx_J} = iota_{dx_jk} ... iota_{dx_j1}.
MultiVec contract(const Form& omega, const MultiVec& p);

/// Full pairing T(a_1, ..., a_k) = sum_I T_I det[a_r(e_{I_c})].
template <FieldKind K>
Poly evaluate(const SkewField<K>& t, std::span<const DualField<K>> ones);

/// <a, X> for a 1-form and a vector field.
Poly pairing(const Form& alpha, const MultiVec& x);

/// The one-form df.
Form differential(const Poly& f);

/// Transports T to another chart: coordinate i becomes target coordinate
/// coord_map[i], and coefficients are renamed accordingly.
template <FieldKind K>
SkewField<K> reindex(const SkewField<K>& t, const Chart& target, std::span<const std::size_t> coord_map);

/// Coefficients evaluated at a point (constant field on the same chart).
template <FieldKind K>
SkewField<K> at_point(const SkewField<K>& t, std::span<const Rat> point);

}  // namespace nambu
