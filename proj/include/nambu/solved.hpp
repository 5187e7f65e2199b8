#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nambu/poly.hpp"

namespace nambu {

/// Submanifold {x_s = p_s(free coordinates)} of a chart in solved form.
class SolvedSubmanifold {
 public:
  struct Equation {
    std::size_t coord;
    Poly value;
  };

  SolvedSubmanifold() = default;
  /// Throws if a coordinate is solved twice, an equation lives on another
  /// chart, or a right-hand side mentions a solved coordinate.
  SolvedSubmanifold(Chart chart, std::vector<Equation> equations);

  const Chart& chart() const { return chart_; }
  /// Sorted by solved coordinate index.
  const std::vector<Equation>& equations() const { return equations_; }
  const std::vector<std::size_t>& free() const { return free_; }
  std::size_t dimension() const { return free_.size(); }
  std::size_t codimension() const { return equations_.size(); }
  bool is_solved(std::size_t coord) const { return solved_value(coord) != nullptr; }
  const Poly* solved_value(std::size_t coord) const;

  /// `{y1 = x1, y2 = x2}`.
  std::string to_string() const;

 private:
  Chart chart_;
  std::vector<Equation> equations_;
  std::vector<std::size_t> free_;
};

/// Normal form modulo the ideal of C: every solved coordinate replaced by its
/// value. The result is zero iff p vanishes on C.
Poly reduce_mod_solved(const Poly& p, const SolvedSubmanifold& sub);

}  // namespace nambu
