#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nambu/geomaps.hpp"

namespace nambu {

/// [a_1, ..., a_n] = d(Pi(a)) + sum_k (-1)^{n-k} iota_{Pi#(a_1..^a_k..a_n)} d a_k.
Form form_bracket(const NambuStructure& s, std::span<const Form> alphas);
/// sum_k (-1)^{n-k} L_{Pi#(a_1..^a_k..a_n)} a_k - (n-1) d(Pi(a)).
Form form_bracket_lie(const NambuStructure& s, std::span<const Form> alphas);
/// [a_1, ..., a_{n-1}, omega] for a 2-form omega, extended from 1-forms as a
/// derivation: [a, b^c] = [a, b]^c + b^[a, c].
Form form_bracket_two(const NambuStructure& s, std::span<const Form> alphas, const Form& omega);

/// One named sub-check of a report. Unasserted verdicts are recorded only.
struct CheckVerdict {
  std::string name;
  bool pass = true;
  bool asserted = true;
  std::optional<std::string> counterexample;
};

struct CheckReport {
  std::uint64_t seed = 0;
  std::vector<CheckVerdict> verdicts;
  std::optional<std::string> precondition_error;

  bool passed() const;
  const CheckVerdict* find(const std::string& name) const;
  /// First failing asserted verdict, if any.
  const CheckVerdict* first_failure() const;
};

/// Properties (1)-(5) of the form bracket on seeded random inputs of degree
/// <= degree; (4) and (5) use closed alphas (differentials).
CheckReport form_bracket_properties(const NambuStructure& s, std::size_t trials, unsigned degree,
                                    std::uint64_t seed);

/// Pi# of conormal wedges is tangent to C, brackets of conormal sections stay
/// conormal, and the restriction does not depend on the extension.
CheckReport conormal_restriction_check(const NambuStructure& s, const SolvedSubmanifold& c, std::size_t trials,
                                       std::uint64_t seed);

/// delta_Pi: iota_{df} Pi on functions, -[X, Pi] on vector fields, and the
/// graded Leibniz rule over the coordinate decomposition f @x_I for higher grades.
MultiVec delta_pi(const NambuStructure& s, const MultiVec& p);
/// delta_Pi of an explicit wedge of factors of grade 0 or 1.
MultiVec delta_pi_wedge(const NambuStructure& s, std::span<const MultiVec> factors);

struct DeltaCompatibility {
  MultiVec lhs;  // delta[P, Q]
  MultiVec rhs;  // [delta P, Q] + (-1)^{(|P|-1)(n-1)} [P, delta Q]
  MultiVec defect;
  bool pass = true;
  MultiVec delta_squared;  // delta(delta(x1)), recorded only
  bool delta_squared_zero = true;
};
DeltaCompatibility delta_compatibility_check(const NambuStructure& s, const MultiVec& p, const MultiVec& q);

/// Axioms (1)-(5) for the tangent pair (TM, T*M) of s on seeded random
/// sections. For order 2 the unrestricted forms of (2) and (3) are asserted
/// too; otherwise they are recorded only.
CheckReport wlfb_check(const NambuStructure& s, unsigned degree, std::size_t trials, std::uint64_t seed);

/// The two bialgebroid models: the tangent pair of a structure, and the
/// conormal bundle of the diagonal of a pair groupoid.
struct BialgebroidModel {
  enum class Kind { TangentPair, PairConormal };
  Kind kind = Kind::TangentPair;
  NambuStructure total;                 // structure whose sharp is the anchor
  Chart base;                           // chart of M
  std::optional<SolvedSubmanifold> units;  // diagonal, PairConormal only
  std::optional<PolyMap> target_map;       // beta, PairConormal only
};
BialgebroidModel tangent_pair_model(const NambuStructure& s);
/// (AG, A*G) of the pair groupoid M x M with Pi_M + (-1)^{n-1} Pi_M.
BialgebroidModel pair_conormal_model(const NambuStructure& base);

/// rho(d_A f_1 ^ ... ^ d_A f_{n-1}) f_n on the base chart.
Poly induced_base_bracket(const BialgebroidModel& model, std::span<const Poly> fs);

/// Structure constants of an n-Lie algebra on R^m in a basis e^1..e^m.
class FilippovTable {
 public:
  FilippovTable(std::size_t dimension, unsigned order);

  std::size_t dimension() const { return m_; }
  unsigned order() const { return n_; }
  /// Constants for a sorted index tuple.
  void set(IndexMask sorted, std::vector<Rat> values);
  /// [e^{i_1}, ..., e^{i_n}] for indices in any order.
  std::vector<Rat> bracket(std::span<const std::size_t> indices) const;
  bool is_zero() const;

  /// Checks the Fundamental identity on all basis tuples; returns the first
  /// failing (a; b) tuple pair when it fails.
  std::optional<std::string> fundamental_identity_failure() const;

  /// `[e1,e2,e3] = e1` lines, sorted tuples with nonzero values only.
  std::string to_string() const;

 private:
  std::vector<Rat> bracket_of(std::span<const std::vector<Rat>> args) const;

  std::size_t m_;
  unsigned n_;
  std::map<IndexMask, std::vector<Rat>, LexMaskLess> constants_;
};

/// Filippov algebra on the cotangent space at a zero of Pi.
FilippovTable pointwise_filippov(const NambuStructure& s, std::span<const Rat> point);

/// Subbundle B of TM along N, spanned by coordinate-adapted frame vectors:
/// each reduces on N to the tangent frame vector of one free coordinate.
struct SubalgebroidModel {
  SolvedSubmanifold base;
  std::vector<MultiVec> frame;
};
/// B = TN.
SubalgebroidModel tangent_subalgebroid(const SolvedSubmanifold& n);

/// @x_i + sum_s (d p_s / d x_i) @x_s for a free coordinate i.
MultiVec tangent_frame_vector(const SolvedSubmanifold& n, std::size_t free_coord);

/// Conditions (1)-(3) for B in the tangent pair model, then coisotropy of the
/// base. Throws when a frame vector is not tangent to N or not adapted.
CheckReport coiso_subalgebroid_check(const NambuStructure& s, const SubalgebroidModel& b, std::size_t trials,
                                     std::uint64_t seed);

}  // namespace nambu
