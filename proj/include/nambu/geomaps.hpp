#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nambu/nambu.hpp"
#include "nambu/solved.hpp"

namespace nambu {

/// Polynomial map between charts: one component per target coordinate,
/// each a polynomial on the source chart.
class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(Chart source, Chart target, std::vector<Poly> comps);

  static PolyMap identity(const Chart& chart);

  const Chart& source() const { return source_; }
  const Chart& target() const { return target_; }
  const std::vector<Poly>& comps() const { return comps_; }

  /// f o phi for f on the target chart.
  Poly pullback(const Poly& f) const;
  /// Source indices when every component is a distinct bare source
  /// coordinate, so phi is a coordinate projection.
  std::optional<std::vector<std::size_t>> projection_indices() const;

  std::string to_string() const;

 private:
  Chart source_, target_;
  std::vector<Poly> comps_;
};

/// theta_s = dx_s - d(p_s), one per solved coordinate.
struct ConormalFrame {
  SolvedSubmanifold submanifold;
  std::vector<Form> frame;
};
ConormalFrame conormal_frame(const SolvedSubmanifold& c);

struct CoisotropyWitness {
  std::vector<std::size_t> solved;  // solved coordinates of the frame covectors
  std::vector<Form> covectors;
  Poly reduced;

  std::string to_string() const;
};

struct CoisotropyResult {
  bool coisotropic = true;
  std::optional<CoisotropyWitness> witness;
};

/// Pi(theta_I) reduced mod C for every sorted n-tuple of frame covectors;
/// the first nonzero reduction is the witness.
CoisotropyResult coisotropy_check(const NambuStructure& s, const SolvedSubmanifold& c);

/// Three independent formulations of coisotropy on solved-form C.
struct CoisotropyFormulations {
  bool frame = true;        // coisotropy_check
  bool ideal = true;        // brackets of the generators x_s - p_s vanish on C
  bool hamiltonian = true;  // Hamiltonian fields of generators are tangent to C
  bool agree() const { return frame == ideal && ideal == hamiltonian; }
};
CoisotropyFormulations coisotropy_formulations(const NambuStructure& s, const SolvedSubmanifold& c);

/// Gr(phi) on the product chart (source then target), y_j = phi_j(x).
SolvedSubmanifold graph_submanifold(const PolyMap& phi);

/// A + sign * B on the product chart of both structures' charts.
NambuStructure product_structure(const NambuStructure& a, const NambuStructure& b, int sign);

struct RelatednessWitness {
  std::vector<std::size_t> target_indices;
  Poly pushed;  // (phi_* Pi_A)(dy_J), on the source chart
  Poly target;  // Pi_B(dy_J) o phi

  std::string to_string() const;
};

struct RelatednessResult {
  enum class Kind { Related, AntiRelated, Witness };
  Kind kind = Kind::Related;
  /// First tuple where phi_* Pi_A != Pi_B o phi, unless Related.
  std::optional<RelatednessWitness> witness;
};
std::string to_string(RelatednessResult::Kind k);

/// Compares phi_* Pi_A with Pi_B o phi on every target coframe n-tuple.
/// AntiRelated is only reported when (-1)^{n-1} = -1.
RelatednessResult relatedness_check(const PolyMap& phi, const NambuStructure& a, const NambuStructure& b);

struct GraphEquivalence {
  RelatednessResult related;
  CoisotropyResult graph;
  bool agree = true;
};
/// phi is a Nambu-Poisson map iff Gr(phi) is coisotropic under
/// A + (-1)^{n-1} B; both sides are computed.
GraphEquivalence graph_equivalence_check(const PolyMap& phi, const NambuStructure& a, const NambuStructure& b);

/// R(phi) = {phi(x) = phi(y)} in the doubled source chart for a coordinate
/// projection phi.
SolvedSubmanifold r_phi_submanifold(const PolyMap& phi);

struct Coinduced {
  NambuStructure structure;
};
struct CoinduceObstruction {
  std::vector<Poly> fs;  // target functions
  Poly bracket;          // {phi^* f}_A, depends on a fiber coordinate

  std::string to_string() const;
};
using CoinduceResult = std::variant<Coinduced, CoinduceObstruction>;

/// Sweeps sorted n-tuples of target monomials of degree <= d; succeeds when
/// every pulled-back bracket depends only on projected coordinates.
CoinduceResult coinduce(const PolyMap& phi, const NambuStructure& a, unsigned degree);

/// phi^{-1}(C) for a coordinate projection phi and solved-form C on the target.
SolvedSubmanifold preimage(const PolyMap& phi, const SolvedSubmanifold& c);

}  // namespace nambu
