#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nambu/formsbialg.hpp"
#include "nambu/geomaps.hpp"

namespace nambu {

/// Polynomial Lie group on a chart G: m : G x G -> G, unit e, inversion i.
class GroupLaw {
 public:
  /// Throws unless associativity, unit and inverse laws hold exactly.
  GroupLaw(std::string name, PolyMap mult, std::vector<Rat> unit, PolyMap inv);

  /// (R^m, +) on the given chart.
  static GroupLaw additive(const Chart& chart);
  /// m((a,b,c),(a',b',c')) = (a+a', b+b', c+c'+ab') on a 3-dimensional chart.
  static GroupLaw heisenberg(const Chart& chart);

  const std::string& name() const { return name_; }
  const Chart& chart() const { return mult_.target(); }
  /// G x G, the source chart of the multiplication.
  const Chart& pair_chart() const { return mult_.source(); }
  const PolyMap& mult() const { return mult_; }
  const std::vector<Rat>& unit() const { return unit_; }
  const PolyMap& inv() const { return inv_; }
  /// {g = e} on G.
  SolvedSubmanifold unit_point() const;

 private:
  std::string name_;
  PolyMap mult_;
  std::vector<Rat> unit_;
  PolyMap inv_;
};

/// Pair groupoid M x M (coordinates x, y) with alpha = x, beta = y,
/// (x, y)(y, z) = (x, z), units the diagonal and inversion the swap.
class PairGroupoid {
 public:
  /// Throws if the structure maps fail alpha o i = beta, i o i = id, or
  /// alpha, beta restrict to the identity on the units.
  explicit PairGroupoid(NambuStructure base);

  const NambuStructure& base() const { return base_; }
  /// Pi_M + (-1)^{n-1} Pi_M.
  const NambuStructure& structure() const { return structure_; }
  const Chart& total_chart() const { return structure_.chart(); }
  const PolyMap& source() const { return alpha_; }
  const PolyMap& target() const { return beta_; }
  const PolyMap& inverse() const { return inv_; }
  const SolvedSubmanifold& units() const { return units_; }
  /// {x2 = y1, x3 = x1, y3 = y2} in (M x M)^3.
  SolvedSubmanifold multiplication_graph() const;
  /// G|_N = N x N.
  SolvedSubmanifold restriction(const SolvedSubmanifold& n) const;

 private:
  NambuStructure base_;
  NambuStructure structure_;
  PolyMap alpha_, beta_, inv_;
  SolvedSubmanifold units_;
};

using GroupoidModel = std::variant<GroupLaw, PairGroupoid>;

struct MultiplicativityResult {
  bool multiplicative = true;
  /// Multiplication graph under S + S + (-1)^{n-1} S.
  CoisotropyResult graph;
  /// Groups only: Pi(gh) = r_{h*} Pi(g) + l_{g*} Pi(h).
  std::optional<bool> lie_group_identity;
  std::optional<std::string> lie_group_witness;
  bool agree = true;
};
/// S must live on the group chart, or be the pair groupoid's own structure.
MultiplicativityResult multiplicativity_check(const GroupoidModel& model, const NambuStructure& s);

/// Verdicts unit_coisotropic, base_dependence, mixed_contraction.
CheckReport theorem_diagnostics(const GroupoidModel& model, const NambuStructure& s);

struct InversionResult {
  RelatednessResult relatedness;  // i against (S, S)
  bool identity = true;           // i_* Pi = (-1)^{n-1} Pi, exactly
  std::optional<RelatednessWitness> witness;
};
InversionResult inversion_check(const GroupoidModel& model, const NambuStructure& s);

struct BaseStructure {
  /// Unset when the base is a point; the structure there is zero.
  std::optional<NambuStructure> structure;
  /// beta is an anti Nambu-Poisson map onto the base structure.
  bool target_anti = true;
  bool is_point() const { return !structure.has_value(); }
};
/// Coinduces along alpha; throws with the obstruction when coinduction fails.
BaseStructure base_structure(const GroupoidModel& model, const NambuStructure& s, unsigned degree);

/// {f}_M = (-1)^{n-1} {f}_(AG,A*G) on every sorted coordinate tuple of the base.
CheckVerdict sign_relation_check(const PairGroupoid& model, const NambuStructure& base);

/// Verdicts subgroupoid_coisotropic, subalgebroid, base_coisotropic for
/// H = N x N, AH = TN and N. Throws with a witness if N is not coisotropic.
CheckReport coiso_subgroupoid_check(const PairGroupoid& model, const SolvedSubmanifold& n, std::size_t trials,
                                    std::uint64_t seed);

}  // namespace nambu
