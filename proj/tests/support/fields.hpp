#pragma once
// Small constructors and random generators for test inputs.

#include <algorithm>
#include <initializer_list>
#include <vector>

#include "nambu/exterior.hpp"
#include "nambu/random.hpp"

namespace testing_fields {

using namespace nambu;

/// Chart R^n with coordinates x1..xn.
inline Chart euclid(std::size_t n, const std::string& name = "") {
  std::vector<std::string> coords;
  for (std::size_t i = 1; i <= n; ++i) coords.push_back("x" + std::to_string(i));
  return Chart(name.empty() ? "R" + std::to_string(n) : name, coords);
}

inline Poly X(const Chart& c, std::size_t one_based) { return Poly::coordinate(c, one_based - 1); }
inline Poly K(const Chart& c, const Rat& r) { return Poly(c, r); }

/// coef * @x_{i1}^...^@x_{ik}, one-based indices in the given order.
inline MultiVec vec(const Chart& c, std::initializer_list<std::size_t> idx, const Poly& coef) {
  std::vector<std::size_t> zero;
  for (auto i : idx) zero.push_back(i - 1);
  MultiVec v(c, static_cast<unsigned>(zero.size()));
  v.add_term(zero, coef);
  return v;
}
inline MultiVec vec(const Chart& c, std::initializer_list<std::size_t> idx) { return vec(c, idx, Poly(c, 1)); }

inline Form form(const Chart& c, std::initializer_list<std::size_t> idx, const Poly& coef) {
  std::vector<std::size_t> zero;
  for (auto i : idx) zero.push_back(i - 1);
  Form f(c, static_cast<unsigned>(zero.size()));
  f.add_term(zero, coef);
  return f;
}
inline Form form(const Chart& c, std::initializer_list<std::size_t> idx) { return form(c, idx, Poly(c, 1)); }

inline MultiVec volume(const Chart& c) {
  std::vector<std::size_t> all;
  for (std::size_t i = 0; i < c.dimension(); ++i) all.push_back(i);
  return MultiVec::basis_tuple(c, all);
}

/// Random grade-k field with up to `terms` components of degree <= deg.
template <FieldKind K>
SkewField<K> random_field(Sampler& s, const Chart& c, unsigned grade, unsigned deg, unsigned terms = 3) {
  SkewField<K> out(c, grade);
  const unsigned count = static_cast<unsigned>(s.range(1, terms));
  for (unsigned t = 0; t < count; ++t) {
    std::vector<std::size_t> idx;
    while (idx.size() < grade) {
      const auto i = static_cast<std::size_t>(s.range(0, static_cast<std::int64_t>(c.dimension()) - 1));
      if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
    }
    out.add_term(idx, s.poly(c, deg, 2));
  }
  return out;
}

}  // namespace testing_fields
