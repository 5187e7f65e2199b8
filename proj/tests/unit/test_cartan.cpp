#include <gtest/gtest.h>

#include "nambu/cartan.hpp"
#include "nambu/error.hpp"
#include "support/fields.hpp"

using namespace nambu;
using namespace testing_fields;

namespace {

// X(f) computed directly from components.
Poly apply(const MultiVec& x, const Poly& f) {
  Poly out(f.chart());
  for (const auto& [m, c] : x.components()) out += c * f.derivative(static_cast<std::size_t>(std::countr_zero(m)));
  return out;
}

// Bracket of decomposables by the expansion
// [X1^..^Xp, Y1^..^Yq] = sum (-1)^{i+j} [Xi,Yj] ^ X1..^Xi..Xp ^ Y1..^Yj..Yq.
MultiVec decomposable_bracket(const Chart& c, const std::vector<MultiVec>& xs, const std::vector<MultiVec>& ys) {
  auto wedge_all = [&](const std::vector<MultiVec>& v, std::size_t skip) {
    MultiVec out = MultiVec::scalar(Poly(c, 1));
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k != skip) out = wedge(out, v[k]);
    }
    return out;
  };
  MultiVec total(c, static_cast<unsigned>(xs.size() + ys.size() - 1));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      // Lie bracket of vector fields from the derivation oracle on coordinates.
      MultiVec lie(c, 1);
      for (std::size_t k = 0; k < c.dimension(); ++k) {
        Poly xk = Poly::coordinate(c, k);
        lie.add_term(std::vector<std::size_t>{k}, apply(xs[i], apply(ys[j], xk)) - apply(ys[j], apply(xs[i], xk)));
      }
      MultiVec term = wedge(wedge(lie, wedge_all(xs, i)), wedge_all(ys, j));
      total += (i + j) % 2 ? -term : term;
    }
  }
  return total;
}

}  // namespace

TEST(DeRham, Examples) {
  Chart c("R2", {"x", "y"});
  Poly x = Poly::coordinate(c, 0), y = Poly::coordinate(c, 1);
  EXPECT_EQ(de_rham_d(form(c, {2}, x)), form(c, {1, 2}));
  EXPECT_EQ(de_rham_d(Form::scalar(x * y)), form(c, {1}, y) + form(c, {2}, x));
  EXPECT_TRUE(de_rham_d(de_rham_d(Form::scalar(x * x * y))).is_zero());
  EXPECT_EQ(differential(x * y), de_rham_d(Form::scalar(x * y)));
}

TEST(LieDerivative, Examples) {
  Chart c = euclid(3);
  EXPECT_TRUE(lie_derivative(vec(c, {1}), vec(c, {2, 3})).is_zero());
  EXPECT_EQ(lie_derivative(vec(c, {2}, X(c, 1)), form(c, {2})), form(c, {1}));
  EXPECT_EQ(lie_derivative(vec(c, {1}), vec(c, {1, 2, 3}, X(c, 1))), vec(c, {1, 2, 3}));
  EXPECT_THROW(lie_derivative(vec(c, {1, 2}), form(c, {1})), Error);
}

TEST(Schouten, Examples) {
  Chart c = euclid(3);
  EXPECT_TRUE(schouten(vec(c, {1}), vec(c, {2})).is_zero());
  EXPECT_EQ(schouten(vec(c, {2}, X(c, 1)), vec(c, {1})), -vec(c, {2}));
  EXPECT_TRUE(schouten(volume(c), volume(c)).is_zero());
  EXPECT_EQ(schouten(volume(c), volume(c)).grade(), 5u);
  EXPECT_THROW(schouten(MultiVec::scalar(X(c, 1)), MultiVec::scalar(X(c, 2))), Error);
}

TEST(Schouten, FunctionConventions) {
  Chart c = euclid(3);
  Poly f = X(c, 1) * X(c, 2);
  MultiVec F = MultiVec::scalar(f);
  MultiVec x = vec(c, {1}, X(c, 3)) + vec(c, {2});
  EXPECT_EQ(schouten(x, F), MultiVec::scalar(apply(x, f)));
  MultiVec p = vec(c, {1, 2}, X(c, 3)) + vec(c, {2, 3});
  // [P, f] = (-1)^{p-1} iota_{df} P with p = 2.
  EXPECT_EQ(schouten(p, F), -interior<FieldKind::Vector>(differential(f), p));
}

class CartanProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CartanProperties, VectorBracketIsCommutatorOfDerivations) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 30; ++t) {
    auto x = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto y = random_field<FieldKind::Vector>(s, c, 1, 2);
    Poly f = s.poly(c, 3, 3);
    ASSERT_EQ(apply(schouten(x, y), f), apply(x, apply(y, f)) - apply(y, apply(x, f)));
  }
}

TEST_P(CartanProperties, MatchesDecomposableExpansion) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 20; ++t) {
    std::vector<MultiVec> xs, ys;
    const auto p = s.range(1, 3), q = s.range(1, 2);
    for (int i = 0; i < p; ++i) xs.push_back(random_field<FieldKind::Vector>(s, c, 1, 1, 2));
    for (int j = 0; j < q; ++j) ys.push_back(random_field<FieldKind::Vector>(s, c, 1, 1, 2));
    MultiVec a = MultiVec::scalar(Poly(c, 1)), b = MultiVec::scalar(Poly(c, 1));
    for (auto& v : xs) a = wedge(a, v);
    for (auto& v : ys) b = wedge(b, v);
    if (a.is_zero() || b.is_zero()) continue;
    ASSERT_EQ(schouten(a, b), decomposable_bracket(c, xs, ys));
  }
}

TEST_P(CartanProperties, GradedSkewAndLeibniz) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 30; ++t) {
    const unsigned p = static_cast<unsigned>(s.range(0, 3)), q = static_cast<unsigned>(s.range(1, 3));
    const unsigned r = static_cast<unsigned>(s.range(0, 2));
    auto P = random_field<FieldKind::Vector>(s, c, p, 2);
    auto Q = random_field<FieldKind::Vector>(s, c, q, 2);
    auto R = random_field<FieldKind::Vector>(s, c, r, 2);
    const bool odd = ((p + 1) * (q + 1)) % 2;
    ASSERT_EQ(schouten(P, Q), odd ? schouten(Q, P) : -schouten(Q, P));
    if (p + r == 0) continue;
    MultiVec rhs = wedge(schouten(P, Q), R);
    MultiVec second = wedge(Q, schouten(P, R));
    rhs += (((p + 1) * q) % 2) ? -second : second;
    ASSERT_EQ(schouten(P, wedge(Q, R)), rhs);
  }
}

TEST_P(CartanProperties, DSquaredVanishes) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 50; ++t) {
    auto w = random_field<FieldKind::Form>(s, c, static_cast<unsigned>(s.range(0, 2)), 2);
    ASSERT_TRUE(de_rham_d(de_rham_d(w)).is_zero());
  }
}

TEST_P(CartanProperties, LieRoutesAgreeOnPairings) {
  // L_X <a, Y> = <L_X a, Y> + <a, [X, Y]>: forms use Cartan, vectors Schouten.
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 50; ++t) {
    auto x = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto y = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto a = random_field<FieldKind::Form>(s, c, 1, 2);
    Poly lhs = apply(x, pairing(a, y));
    ASSERT_EQ(lhs, pairing(lie_derivative(x, a), y) + pairing(a, lie_derivative(x, y)));
  }
}

TEST_P(CartanProperties, LieOfBracketIsCommutator) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 30; ++t) {
    auto x = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto y = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto w = random_field<FieldKind::Form>(s, c, static_cast<unsigned>(s.range(0, 2)), 2);
    auto xy = schouten(x, y);
    ASSERT_EQ(lie_derivative(xy, w), lie_derivative(x, lie_derivative(y, w)) - lie_derivative(y, lie_derivative(x, w)));
    auto T = random_field<FieldKind::Vector>(s, c, static_cast<unsigned>(s.range(1, 3)), 2);
    ASSERT_EQ(lie_derivative(xy, T), lie_derivative(x, lie_derivative(y, T)) - lie_derivative(y, lie_derivative(x, T)));
  }
}

TEST_P(CartanProperties, GradedJacobi) {
  Chart c = euclid(4);
  Sampler s(GetParam());
  for (int t = 0; t < 20; ++t) {
    const unsigned p = static_cast<unsigned>(s.range(1, 3)), q = static_cast<unsigned>(s.range(1, 3));
    const unsigned r = static_cast<unsigned>(s.range(1, 3));
    auto P = random_field<FieldKind::Vector>(s, c, p, 2, 2);
    auto Q = random_field<FieldKind::Vector>(s, c, q, 2, 2);
    auto R = random_field<FieldKind::Vector>(s, c, r, 2, 2);
    MultiVec lhs = schouten(P, schouten(Q, R));
    MultiVec rhs = schouten(schouten(P, Q), R);
    MultiVec third = schouten(Q, schouten(P, R));
    rhs += (((p + 1) * (q + 1)) % 2) ? -third : third;
    ASSERT_EQ(lhs, rhs);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CartanProperties, ::testing::Values(21u, 22u, 23u));
