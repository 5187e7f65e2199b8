#include "nambu/exterior.hpp"

#include <unordered_map>

#include "nambu/error.hpp"

namespace nambu {

std::vector<std::size_t> mask_indices(IndexMask m) {
  std::vector<std::size_t> out;
  while (m) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

IndexMask mask_of(std::span<const std::size_t> indices) {
  IndexMask m = 0;
  for (auto i : indices) m |= IndexMask{1} << i;
  return m;
}

int shuffle_sign(IndexMask a, IndexMask b) {
  unsigned inversions = 0;
  for (IndexMask rest = b; rest; rest &= rest - 1) {
    const unsigned j = static_cast<unsigned>(std::countr_zero(rest));
    const IndexMask above = j + 1 >= 32 ? 0 : ~((IndexMask{1} << (j + 1)) - 1);
    inversions += static_cast<unsigned>(std::popcount(a & above));
  }
  return inversions % 2 ? -1 : 1;
}

namespace {

template <FieldKind K>
const Chart& common_chart(const SkewField<K>& a, const SkewField<K>& b) {
  if (!a.chart().valid()) return b.chart();
  if (!b.chart().valid()) return a.chart();
  require_same_chart(a.chart(), b.chart());
  return a.chart();
}

template <FieldKind K>
const char* kind_name() {
  return K == FieldKind::Vector ? "multivector" : "form";
}

}  // namespace

template <FieldKind K>
SkewField<K> SkewField<K>::scalar(const Poly& f) {
  SkewField out(f.chart(), 0);
  out.add_component(0, f);
  return out;
}

template <FieldKind K>
SkewField<K> SkewField<K>::basis(const Chart& chart, std::size_t i) {
  if (i >= chart.dimension()) throw Error("coordinate index out of range for chart '" + chart.name() + "'");
  SkewField out(chart, 1);
  out.comps_.emplace(IndexMask{1} << i, Poly(chart, 1));
  return out;
}

template <FieldKind K>
SkewField<K> SkewField<K>::basis_tuple(const Chart& chart, std::span<const std::size_t> indices) {
  SkewField out(chart, static_cast<unsigned>(indices.size()));
  out.add_term(indices, Poly(chart, 1));
  return out;
}

template <FieldKind K>
Poly SkewField<K>::component(IndexMask m) const {
  auto it = comps_.find(m);
  return it == comps_.end() ? Poly(chart_) : it->second;
}

template <FieldKind K>
void SkewField<K>::add_term(std::span<const std::size_t> indices, const Poly& coef) {
  if (indices.size() != grade_) {
    throw Error(std::string(kind_name<K>()) + " term of grade " + std::to_string(indices.size()) +
                " added to grade " + std::to_string(grade_));
  }
  IndexMask m = 0;
  unsigned inversions = 0;
  for (auto i : indices) {
    if (i >= chart_.dimension()) throw Error("coordinate index out of range for chart '" + chart_.name() + "'");
    const IndexMask bit = IndexMask{1} << i;
    if (m & bit) return;
    inversions += static_cast<unsigned>(std::popcount(m & ~(bit - 1)));
    m |= bit;
  }
  add_component(m, inversions % 2 ? -coef : coef);
}

template <FieldKind K>
void SkewField<K>::add_component(IndexMask m, const Poly& coef) {
  if (coef.is_zero()) return;
  if (mask_grade(m) != grade_) throw Error("component grade does not match field grade");
  if (!chart_.valid()) chart_ = coef.chart();
  require_same_chart(chart_, coef.chart());
  auto [it, inserted] = comps_.try_emplace(m, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second.is_zero()) comps_.erase(it);
  }
}

template <FieldKind K>
SkewField<K> SkewField<K>::operator-() const {
  SkewField out = *this;
  for (auto& [m, p] : out.comps_) p = -p;
  return out;
}

template <FieldKind K>
SkewField<K>& SkewField<K>::operator+=(const SkewField& rhs) {
  if (rhs.comps_.empty()) return *this;
  chart_ = common_chart(*this, rhs);
  if (grade_ != rhs.grade_) {
    if (comps_.empty()) {
      grade_ = rhs.grade_;
    } else {
      throw Error(std::string("cannot add ") + kind_name<K>() + "s of grades " +
                  std::to_string(grade_) + " and " + std::to_string(rhs.grade_));
    }
  }
  for (const auto& [m, p] : rhs.comps_) add_component(m, p);
  return *this;
}

template <FieldKind K>
SkewField<K>& SkewField<K>::operator-=(const SkewField& rhs) {
  return *this += -rhs;
}

template <FieldKind K>
SkewField<K>& SkewField<K>::operator*=(const Poly& f) {
  if (f.is_zero()) {
    comps_.clear();
    return *this;
  }
  if (!comps_.empty()) require_same_chart(chart_, f.chart());
  for (auto it = comps_.begin(); it != comps_.end();) {
    it->second *= f;
    it = it->second.is_zero() ? comps_.erase(it) : std::next(it);
  }
  return *this;
}

template <FieldKind K>
SkewField<K>& SkewField<K>::operator*=(const Rat& c) {
  if (c.is_zero()) comps_.clear();
  for (auto& [m, p] : comps_) p *= c;
  return *this;
}

template <FieldKind K>
SkewField<K> SkewField<K>::map_coefficients(const std::function<Poly(const Poly&)>& fn) const {
  SkewField out(chart_, grade_);
  for (const auto& [m, p] : comps_) {
    Poly q = fn(p);
    if (!q.is_zero()) {
      if (!out.chart_.valid() || !(out.chart_ == q.chart())) out.chart_ = q.chart();
      out.comps_.emplace(m, std::move(q));
    }
  }
  return out;
}

template <FieldKind K>
std::string SkewField<K>::to_string() const {
  if (comps_.empty()) return "0";
  std::string out;
  for (const auto& [m, p] : comps_) {
    if (!out.empty()) out += " + ";
    std::string basis;
    for (auto i : mask_indices(m)) {
      if (!basis.empty()) basis += K == FieldKind::Vector ? "^" : " ^ ";
      basis += (K == FieldKind::Vector ? "@" : "d ") + chart_.coord(i);
    }
    if (basis.empty()) {
      out += "(" + p.to_string() + ")";
    } else if (p.is_constant() && p.constant_term().is_one()) {
      out += basis;
    } else {
      out += basis + " * (" + p.to_string() + ")";
    }
  }
  return out;
}

template <FieldKind K>
SkewField<K> wedge(const SkewField<K>& a, const SkewField<K>& b) {
  const Chart& chart = common_chart(a, b);
  SkewField<K> out(chart, a.grade() + b.grade());
  for (const auto& [ma, pa] : a.components()) {
    for (const auto& [mb, pb] : b.components()) {
      if (ma & mb) continue;
      Poly c = pa * pb;
      if (shuffle_sign(ma, mb) < 0) c = -c;
      out.add_component(ma | mb, c);
    }
  }
  return out;
}

template <FieldKind K>
SkewField<K> interior(const DualField<K>& one, const SkewField<K>& t) {
  if (one.grade() != 1) throw Error("interior product needs a grade-1 argument");
  if (t.grade() == 0) throw Error("interior product into a grade-0 field");
  const Chart& chart = one.chart().valid() ? one.chart() : t.chart();
  if (t.chart().valid()) require_same_chart(chart, t.chart());
  SkewField<K> out(chart, t.grade() - 1);
  for (const auto& [bit, a] : one.components()) {
    const std::size_t i = static_cast<std::size_t>(std::countr_zero(bit));
    for (const auto& [m, p] : t.components()) {
      if (!(m & bit)) continue;
      Poly c = a * p;
      if (mask_rank_below(m, i) % 2) c = -c;
      out.add_component(m & ~bit, c);
    }
  }
  return out;
}

template <FieldKind K>
SkewField<K> interior_sequence(std::span<const DualField<K>> ones, const SkewField<K>& t) {
  if (ones.size() > t.grade()) throw Error("interior product into a grade-0 field");
  SkewField<K> out = t;
  for (const auto& one : ones) out = interior<K>(one, out);
  return out;
}

template <FieldKind K>
Poly evaluate(const SkewField<K>& t, std::span<const DualField<K>> ones) {
  if (ones.size() != t.grade()) {
    throw Error("evaluate: " + std::to_string(ones.size()) + " arguments for a grade-" +
                std::to_string(t.grade()) + " field");
  }
  const Chart& chart = t.chart();
  for (const auto& o : ones) {
    if (o.grade() != 1) throw Error("evaluate: arguments must have grade 1");
    if (o.chart().valid() && chart.valid()) require_same_chart(chart, o.chart());
  }
  if (t.grade() == 0) return t.scalar_value();
  // Laplace expansion along the last row, memoized on column sets.
  std::unordered_map<IndexMask, Poly> memo;
  std::function<Poly(IndexMask)> det = [&](IndexMask cols) -> Poly {
    const unsigned r = mask_grade(cols);
    if (r == 0) return Poly(chart, 1);
    if (auto it = memo.find(cols); it != memo.end()) return it->second;
    const auto& row = ones[r - 1];
    PolyBuilder acc(chart);
    unsigned j = 0;
    for (IndexMask rest = cols; rest; rest &= rest - 1, ++j) {
      const IndexMask bit = rest & (~rest + 1);
      auto entry = row.components().find(bit);
      if (entry == row.components().end()) continue;
      Poly minor = det(cols & ~bit);
      if (minor.is_zero()) continue;
      acc.add_product(entry->second, minor, (r - 1 + j) % 2 ? -1 : 1);
    }
    Poly value = acc.build();
    memo.emplace(cols, value);
    return value;
  };
  PolyBuilder total(chart);
  for (const auto& [m, p] : t.components()) {
    Poly d = det(m);
    if (!d.is_zero()) total.add_product(p, d);
  }
  return total.build();
}

MultiVec contract(const Form& omega, const MultiVec& p) {
  if (omega.grade() > p.grade()) throw Error("contraction of a " + std::to_string(omega.grade()) +
                                             "-form into a grade-" + std::to_string(p.grade()) + " field");
  const Chart& chart = omega.chart().valid() ? omega.chart() : p.chart();
  MultiVec out(chart, p.grade() - omega.grade());
  for (const auto& [mw, w] : omega.components()) {
    for (const auto& [mp, c] : p.components()) {
      if ((mp & mw) != mw) continue;
      // Removing j1 < j2 < ... in turn: each step's sign counts the
      // surviving indices below it.
      unsigned sign = 0;
      IndexMask rest = mp;
      for (IndexMask sub = mw; sub; sub &= sub - 1) {
        const auto j = static_cast<std::size_t>(std::countr_zero(sub));
        sign += mask_rank_below(rest, j);
        rest &= ~(IndexMask{1} << j);
      }
      Poly coef = w * c;
      out.add_component(rest, sign % 2 ? -coef : coef);
    }
  }
  return out;
}

Poly pairing(const Form& alpha, const MultiVec& x) {
  if (alpha.grade() != 1 || x.grade() != 1) throw Error("pairing needs a 1-form and a vector field");
  const Chart& chart = alpha.chart().valid() ? alpha.chart() : x.chart();
  PolyBuilder acc(chart);
  for (const auto& [m, a] : alpha.components()) {
    auto it = x.components().find(m);
    if (it != x.components().end()) acc.add_product(a, it->second);
  }
  return acc.build();
}

Form differential(const Poly& f) {
  Form out(f.chart(), 1);
  for (std::size_t i = 0; i < f.chart().dimension(); ++i) {
    out.add_component(IndexMask{1} << i, f.derivative(i));
  }
  return out;
}

template <FieldKind K>
SkewField<K> reindex(const SkewField<K>& t, const Chart& target, std::span<const std::size_t> coord_map) {
  if (coord_map.size() != t.chart().dimension()) throw Error("reindex: coordinate map has the wrong size");
  std::vector<Poly> images;
  images.reserve(coord_map.size());
  for (auto j : coord_map) images.push_back(Poly::coordinate(target, j));
  SkewField<K> out(target, t.grade());
  std::vector<std::size_t> idx;
  for (const auto& [m, p] : t.components()) {
    idx.clear();
    for (auto i : mask_indices(m)) idx.push_back(coord_map[i]);
    out.add_term(idx, substitute(p, images, target));
  }
  return out;
}

template <FieldKind K>
SkewField<K> at_point(const SkewField<K>& t, std::span<const Rat> point) {
  const Chart chart = t.chart();
  return t.map_coefficients([&](const Poly& p) { return Poly(chart, p.evaluate(point)); });
}

#define NAMBU_INSTANTIATE(K)                                                                    \
  template class SkewField<K>;                                                                  \
  template SkewField<K> wedge<K>(const SkewField<K>&, const SkewField<K>&);                      \
  template SkewField<K> interior<K>(const DualField<K>&, const SkewField<K>&);                   \
  template SkewField<K> interior_sequence<K>(std::span<const DualField<K>>, const SkewField<K>&); \
  template Poly evaluate<K>(const SkewField<K>&, std::span<const DualField<K>>);                 \
  template SkewField<K> reindex<K>(const SkewField<K>&, const Chart&, std::span<const std::size_t>); \
  template SkewField<K> at_point<K>(const SkewField<K>&, std::span<const Rat>);

NAMBU_INSTANTIATE(FieldKind::Vector)
NAMBU_INSTANTIATE(FieldKind::Form)

#undef NAMBU_INSTANTIATE

}  // namespace nambu
