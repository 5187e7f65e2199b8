#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nambu/exterior.hpp"

namespace nambu {

/// Nonzero defect of the Fundamental identity on concrete functions.
struct FiWitness {
  std::vector<Poly> fs;  // n - 1 functions
  std::vector<Poly> gs;  // n functions
  Poly defect;

  std::string to_string() const;
};

struct FiVerified {
  unsigned degree = 0;
  std::size_t tuples = 0;  // (f, g) tuple pairs swept
};

struct FiRefuted {
  FiWitness witness;
};

using FiResult = std::variant<FiVerified, FiRefuted>;

/// How a tensor was assembled; used by sufficient_nambu.
class NambuStructure;
struct Provenance {
  enum class Kind { None, VectorWedge, StructureWedge };
  Kind kind = Kind::None;
  std::vector<MultiVec> vector_factors;
  std::vector<std::shared_ptr<const NambuStructure>> structure_factors;
};

struct NambuStatus {
  enum class Kind { Unchecked, FiVerified, FiRefuted };
  Kind kind = Kind::Unchecked;
  unsigned degree = 0;
  std::optional<FiWitness> witness;
};

/// An order-n multivector on a chart together with a log of verification
/// results. The log only grows.
class NambuStructure {
 public:
  NambuStructure() = default;
  /// Order is the tensor's grade; throws if it is below 2.
  explicit NambuStructure(MultiVec tensor, Provenance provenance = {});
  /// Order given explicitly, so a zero tensor can have any order.
  NambuStructure(const Chart& chart, unsigned order, MultiVec tensor, Provenance provenance = {});

  const Chart& chart() const { return chart_; }
  unsigned order() const { return order_; }
  const MultiVec& tensor() const { return tensor_; }
  const Provenance& provenance() const { return provenance_; }
  const std::vector<NambuStatus>& history() const { return history_; }
  NambuStatus status() const { return history_.empty() ? NambuStatus{} : history_.back(); }
  void record(const FiResult& result);

 private:
  Chart chart_;
  unsigned order_ = 0;
  MultiVec tensor_;
  Provenance provenance_;
  std::vector<NambuStatus> history_;
};

// Constructors for standard classes.

/// @x1^...^@xm scaled by f.
NambuStructure top_degree_structure(const Chart& chart, const Poly& f);
/// X1^...^Xn with the factors recorded for certification.
NambuStructure vector_wedge_structure(const std::vector<MultiVec>& factors);
/// A^B with both factors recorded.
NambuStructure structure_wedge(const NambuStructure& a, const NambuStructure& b);
/// iota_alpha Pi, an order n-1 structure.
NambuStructure subordinate_structure(const NambuStructure& s, const Form& alpha);

/// {f_1, ..., f_n} = Pi(df_1, ..., df_n).
Poly nambu_bracket(const NambuStructure& s, std::span<const Poly> fs);
/// X_{f_1..f_{n-1}} = iota_{df_{n-1}} ... iota_{df_1} Pi, so X(g) = {f.., g}.
MultiVec hamiltonian_field(const NambuStructure& s, std::span<const Poly> fs);
/// Pi^#(a_1 ^ ... ^ a_{n-1}).
MultiVec sharp(const NambuStructure& s, std::span<const Form> alphas);

/// LHS - RHS of the Fundamental identity on the given functions, computed
/// from brackets directly.
Poly fi_defect(const NambuStructure& s, std::span<const Poly> fs, std::span<const Poly> gs);

/// Monomials of total degree 1..d: ordered by degree, then in printing order.
std::vector<Poly> monomial_family(const Chart& chart, unsigned degree);

/// Sweeps the Fundamental identity over sorted distinct monomial tuples of
/// degree <= d (f-tuples outer, g-tuples inner) and returns the first
/// nonzero defect.
FiResult fi_check(const NambuStructure& s, unsigned degree);

/// Per f-tuple comparison of three formulations of the Fundamental identity.
struct FiFormulations {
  std::size_t f_tuples = 0;
  std::size_t bracket_failures = 0;      // some g-tuple has nonzero defect
  std::size_t hamiltonian_failures = 0;  // [X_f, X_g] != sum X_{..{f,g_k}..}
  std::size_t lie_failures = 0;          // L_{X_f} Pi != 0
  std::size_t disagreements = 0;         // f-tuples where the three differ
  std::optional<std::vector<Poly>> first_disagreement;
  bool agree() const { return disagreements == 0; }
};
FiFormulations fi_formulations(const NambuStructure& s, unsigned degree);

enum class Certificate { TopDegree, CommutingDecomposable, ProductOfCertified, None };
std::string to_string(Certificate c);
Certificate sufficient_nambu(const NambuStructure& s);

struct PluckerResult {
  bool decomposable = true;
  std::optional<Form> omega;
  std::optional<MultiVec> wedge;
};
/// iota_omega Pi ^ Pi = 0 for every basis (n-1)-form omega, in lex order.
PluckerResult plucker_check(const NambuStructure& s);
/// iota_omega Pi ^ Pi for one (n-1)-form.
MultiVec plucker_defect(const NambuStructure& s, const Form& omega);

/// Rank of the span of Pi^#(dx_J) over all (n-1)-subsets J at a point.
std::size_t distribution_rank(const NambuStructure& s, std::span<const Rat> point);

/// Rank of a rational matrix (rows) by exact elimination.
std::size_t rational_rank(std::vector<std::vector<Rat>> rows);

/// Sorted k-subsets of {0..n-1} in lex order.
std::vector<std::vector<std::size_t>> sorted_subsets(std::size_t n, std::size_t k);

}  // namespace nambu
