#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nambu/chart.hpp"
#include "nambu/rational.hpp"

namespace nambu {

/// Exponent vector packed eight bits per coordinate. Coordinate i lives in
/// word i/8, most significant byte first, so comparing the words in order
/// is lexicographic comparison with the first coordinate most significant.
class Monomial {
 public:
  Monomial() = default;

  static Monomial variable(std::size_t i, unsigned power = 1);

  unsigned exponent(std::size_t i) const {
    return static_cast<unsigned>((words_[i / 8] >> shift(i)) & 0xffu);
  }
  void set_exponent(std::size_t i, unsigned e);
  unsigned degree() const { return degree_; }
  bool is_one() const { return degree_ == 0; }

  /// Throws when some exponent would exceed 255.
  friend Monomial operator*(const Monomial& a, const Monomial& b);

  /// Graded lexicographic order.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
    return a.words_ <=> b.words_;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) = default;

  std::size_t hash() const;

 private:
  static unsigned shift(std::size_t i) { return static_cast<unsigned>(7 - i % 8) * 8; }

  std::array<std::uint64_t, kMaxCoords / 8> words_{};
  unsigned degree_ = 0;
};

struct Term {
  Monomial mono;
  Rat coef;
};

/// Exact multivariate polynomial with rational coefficients over a chart.
///
/// Terms are kept sorted by decreasing graded-lex order with no zero
/// coefficients, so the representation of each polynomial is unique.
class Poly {
 public:
  Poly() = default;  // zero on no chart; only useful as a placeholder
  explicit Poly(Chart chart) : chart_(std::move(chart)) {}
  Poly(Chart chart, const Rat& constant);

  static Poly coordinate(const Chart& chart, std::size_t i);
  static Poly coordinate(const Chart& chart, std::string_view name);
  static Poly monomial(const Chart& chart, const Monomial& m, const Rat& coef);
  /// Builds from arbitrary (unsorted, possibly repeated) terms.
  static Poly from_terms(const Chart& chart, std::vector<Term> terms);

  const Chart& chart() const { return chart_; }
  std::span<const Term> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.is_one()); }
  Rat constant_term() const;
  /// -1 for the zero polynomial.
  int degree() const { return terms_.empty() ? -1 : static_cast<int>(terms_.front().mono.degree()); }
  bool depends_on(std::size_t i) const;

  Poly operator-() const;
  Poly& operator+=(const Poly& rhs);
  Poly& operator-=(const Poly& rhs);
  Poly& operator*=(const Poly& rhs);
  Poly& operator*=(const Rat& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rat& c) { return a *= c; }
  friend Poly operator*(const Rat& c, Poly a) { return a *= c; }

  /// Equal iff same chart and same canonical terms.
  friend bool operator==(const Poly& a, const Poly& b);

  Poly pow(unsigned e) const;
  Poly derivative(std::size_t i) const;
  Poly derivative(std::string_view coord) const;
  Rat evaluate(std::span<const Rat> point) const;

  /// Canonical text, e.g. `3/2*x^2*y - 1`.
  std::string to_string() const;

 private:
  Chart chart_;
  std::vector<Term> terms_;
};

/// Collects terms in any order and produces a canonical polynomial.
class PolyBuilder {
 public:
  explicit PolyBuilder(Chart chart) : chart_(std::move(chart)) {}

  void add(const Monomial& m, const Rat& c);
  void add(const Poly& p);
  void add_scaled(const Poly& p, const Rat& c);
  /// Adds sign * a * b.
  void add_product(const Poly& a, const Poly& b, int sign = 1);
  Poly build();
  /// Canonicalizes the pending terms in place; true when they cancel.
  bool sums_to_zero();
  /// Drops pending terms, keeping the allocation.
  void clear() { terms_.clear(); }

 private:
  Chart chart_;
  std::vector<Term> terms_;
};

/// Composes p with `images` (one polynomial per coordinate of p's chart, all
/// on a common target chart). Throws on an incomplete assignment.
Poly substitute(const Poly& p, std::span<const Poly> images);
/// Same, where the target chart is given explicitly (needed when p has
/// no coordinates to substitute, e.g. when p is constant).
Poly substitute(const Poly& p, std::span<const Poly> images, const Chart& target);

/// Canonical text of a monomial on a chart (`1` for the empty monomial).
std::string monomial_to_string(const Chart& chart, const Monomial& m);

}  // namespace nambu
