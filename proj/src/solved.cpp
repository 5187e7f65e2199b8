#include "nambu/solved.hpp"

#include <algorithm>

#include "nambu/error.hpp"

namespace nambu {

SolvedSubmanifold::SolvedSubmanifold(Chart chart, std::vector<Equation> equations)
    : chart_(std::move(chart)), equations_(std::move(equations)) {
  std::sort(equations_.begin(), equations_.end(),
            [](const Equation& a, const Equation& b) { return a.coord < b.coord; });
  std::vector<bool> solved(chart_.dimension(), false);
  for (auto& eq : equations_) {
    if (eq.coord >= chart_.dimension()) throw Error("solved coordinate out of range");
    if (solved[eq.coord]) {
      throw Error("coordinate '" + chart_.coord(eq.coord) + "' solved more than once");
    }
    solved[eq.coord] = true;
    if (!eq.value.chart().valid()) eq.value = Poly(chart_);
    require_same_chart(chart_, eq.value.chart());
  }
  for (const auto& eq : equations_) {
    for (std::size_t i = 0; i < chart_.dimension(); ++i) {
      if (solved[i] && eq.value.depends_on(i)) {
        throw Error("equation for '" + chart_.coord(eq.coord) + "' mentions solved coordinate '" +
                    chart_.coord(i) + "'");
      }
    }
  }
  for (std::size_t i = 0; i < chart_.dimension(); ++i) {
    if (!solved[i]) free_.push_back(i);
  }
}

const Poly* SolvedSubmanifold::solved_value(std::size_t coord) const {
  for (const auto& eq : equations_) {
    if (eq.coord == coord) return &eq.value;
  }
  return nullptr;
}

std::string SolvedSubmanifold::to_string() const {
  std::string out = "{";
  for (std::size_t k = 0; k < equations_.size(); ++k) {
    if (k) out += ", ";
    out += chart_.coord(equations_[k].coord) + " = " + equations_[k].value.to_string();
  }
  return out + "}";
}

Poly reduce_mod_solved(const Poly& p, const SolvedSubmanifold& sub) {
  if (p.is_zero()) return Poly(sub.chart());
  require_same_chart(p.chart(), sub.chart());
  bool touches = false;
  for (const auto& eq : sub.equations()) touches = touches || p.depends_on(eq.coord);
  if (!touches) return p;
  std::vector<Poly> images;
  images.reserve(sub.chart().dimension());
  for (std::size_t i = 0; i < sub.chart().dimension(); ++i) {
    const Poly* v = sub.solved_value(i);
    images.push_back(v ? *v : Poly::coordinate(sub.chart(), i));
  }
  // Right-hand sides only mention free coordinates, so one pass is a normal form.
  return substitute(p, images, sub.chart());
}

}  // namespace nambu
