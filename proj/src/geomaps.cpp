#include "nambu/geomaps.hpp"

#include <algorithm>

#include "nambu/error.hpp"

namespace nambu {

PolyMap::PolyMap(Chart source, Chart target, std::vector<Poly> comps)
    : source_(std::move(source)), target_(std::move(target)), comps_(std::move(comps)) {
  if (!source_.valid() || !target_.valid()) throw Error("map needs valid source and target charts");
  if (comps_.size() != target_.dimension()) {
    throw Error("map into '" + target_.name() + "' needs " + std::to_string(target_.dimension()) +
                " components, got " + std::to_string(comps_.size()));
  }
  for (auto& c : comps_) {
    if (!c.chart().valid()) c = Poly(source_);
    require_same_chart(source_, c.chart());
  }
}

PolyMap PolyMap::identity(const Chart& chart) {
  std::vector<Poly> comps;
  for (std::size_t i = 0; i < chart.dimension(); ++i) comps.push_back(Poly::coordinate(chart, i));
  return PolyMap(chart, chart, std::move(comps));
}

Poly PolyMap::pullback(const Poly& f) const {
  if (f.is_zero() || f.is_constant()) return Poly(source_, f.constant_term());
  require_same_chart(target_, f.chart());
  return substitute(f, comps_, source_);
}

std::optional<std::vector<std::size_t>> PolyMap::projection_indices() const {
  std::vector<std::size_t> idx;
  std::vector<bool> used(source_.dimension(), false);
  for (const auto& c : comps_) {
    if (c.size() != 1 || c.degree() != 1 || c.terms().front().coef != Rat(1)) return std::nullopt;
    const auto& m = c.terms().front().mono;
    std::size_t i = 0;
    while (!m.exponent(i)) ++i;
    if (used[i]) return std::nullopt;
    used[i] = true;
    idx.push_back(i);
  }
  return idx;
}

std::string PolyMap::to_string() const {
  std::string out = "(";
  for (std::size_t j = 0; j < comps_.size(); ++j) out += (j ? ", " : "") + comps_[j].to_string();
  return out + ")";
}

ConormalFrame conormal_frame(const SolvedSubmanifold& c) {
  ConormalFrame out{c, {}};
  for (const auto& eq : c.equations()) {
    out.frame.push_back(Form::basis(c.chart(), eq.coord) - differential(eq.value));
  }
  return out;
}

std::string CoisotropyWitness::to_string() const {
  std::string out = "Pi(";
  for (std::size_t i = 0; i < covectors.size(); ++i) out += (i ? "; " : "") + covectors[i].to_string();
  return out + ") = " + reduced.to_string() + " on C";
}

CoisotropyResult coisotropy_check(const NambuStructure& s, const SolvedSubmanifold& c) {
  require_same_chart(s.chart(), c.chart());
  CoisotropyResult out;
  const std::size_t n = s.order();
  if (c.codimension() < n || s.tensor().is_zero()) return out;
  const auto frame = conormal_frame(c);
  std::vector<Form> picked(n);
  for (const auto& tuple : sorted_subsets(c.codimension(), n)) {
    for (std::size_t k = 0; k < n; ++k) picked[k] = frame.frame[tuple[k]];
    Poly r = reduce_mod_solved(evaluate<FieldKind::Vector>(s.tensor(), picked), c);
    if (!r.is_zero()) {
      CoisotropyWitness w{{}, picked, r};
      for (auto k : tuple) w.solved.push_back(c.equations()[k].coord);
      out.coisotropic = false;
      out.witness = std::move(w);
      return out;
    }
  }
  return out;
}

CoisotropyFormulations coisotropy_formulations(const NambuStructure& s, const SolvedSubmanifold& c) {
  CoisotropyFormulations out;
  out.frame = coisotropy_check(s, c).coisotropic;

  const std::size_t n = s.order(), k = c.codimension();
  std::vector<Poly> gens;
  for (const auto& eq : c.equations()) gens.push_back(Poly::coordinate(c.chart(), eq.coord) - eq.value);
  auto pick = [&](const std::vector<std::size_t>& tuple) {
    std::vector<Poly> fs;
    for (auto i : tuple) fs.push_back(gens[i]);
    return fs;
  };

  if (k >= n) {
    for (const auto& tuple : sorted_subsets(k, n)) {
      if (!reduce_mod_solved(nambu_bracket(s, pick(tuple)), c).is_zero()) {
        out.ideal = false;
        break;
      }
    }
  }

  if (k >= n - 1) {
    const auto frame = conormal_frame(c);
    for (const auto& tuple : sorted_subsets(k, n - 1)) {
      const MultiVec x = hamiltonian_field(s, pick(tuple));
      for (const auto& theta : frame.frame) {
        if (!reduce_mod_solved(pairing(theta, x), c).is_zero()) out.hamiltonian = false;
      }
      if (!out.hamiltonian) break;
    }
  }
  return out;
}

namespace {

Chart pair_chart(const Chart& a, const Chart& b, std::vector<std::size_t>& offsets) {
  const Chart blocks[] = {a, b};
  return product_chart(blocks, a.name() + "x" + b.name(), &offsets);
}

std::vector<std::size_t> block_map(const Chart& c, std::size_t offset) {
  std::vector<std::size_t> m(c.dimension());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = offset + i;
  return m;
}

}  // namespace

SolvedSubmanifold graph_submanifold(const PolyMap& phi) {
  std::vector<std::size_t> off;
  const Chart prod = pair_chart(phi.source(), phi.target(), off);
  std::vector<Poly> images;
  for (std::size_t i = 0; i < phi.source().dimension(); ++i) images.push_back(Poly::coordinate(prod, off[0] + i));
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (std::size_t j = 0; j < phi.target().dimension(); ++j) {
    const Poly& c = phi.comps()[j];
    eqs.push_back({off[1] + j, c.is_constant() ? Poly(prod, c.constant_term()) : substitute(c, images, prod)});
  }
  return SolvedSubmanifold(prod, std::move(eqs));
}

NambuStructure product_structure(const NambuStructure& a, const NambuStructure& b, int sign) {
  if (a.order() != b.order()) {
    throw Error("order mismatch: " + std::to_string(a.order()) + " vs " + std::to_string(b.order()));
  }
  std::vector<std::size_t> off;
  const Chart prod = pair_chart(a.chart(), b.chart(), off);
  const auto ma = block_map(a.chart(), off[0]), mb = block_map(b.chart(), off[1]);
  MultiVec t = reindex(a.tensor(), prod, ma);
  MultiVec tb = reindex(b.tensor(), prod, mb);
  t += sign < 0 ? -tb : tb;
  return NambuStructure(prod, a.order(), t);
}

std::string RelatednessWitness::to_string() const {
  std::string j;
  for (auto i : target_indices) j += (j.empty() ? "" : ",") + std::to_string(i + 1);
  return "J = (" + j + "), pushforward = " + pushed.to_string() + ", target = " + target.to_string();
}

std::string to_string(RelatednessResult::Kind k) {
  switch (k) {
    case RelatednessResult::Kind::Related: return "related";
    case RelatednessResult::Kind::AntiRelated: return "anti_related";
    case RelatednessResult::Kind::Witness: return "witness";
  }
  return "?";
}

RelatednessResult relatedness_check(const PolyMap& phi, const NambuStructure& a, const NambuStructure& b) {
  require_same_chart(phi.source(), a.chart());
  require_same_chart(phi.target(), b.chart());
  if (a.order() != b.order()) throw Error("relatedness needs structures of equal order");
  const std::size_t n = a.order();
  std::vector<Form> dphi;
  for (const auto& c : phi.comps()) dphi.push_back(differential(c));

  std::vector<RelatednessWitness> rows;
  std::vector<Form> picked(n);
  for (const auto& tuple : sorted_subsets(phi.target().dimension(), n)) {
    for (std::size_t k = 0; k < n; ++k) picked[k] = dphi[tuple[k]];
    rows.push_back({tuple, evaluate<FieldKind::Vector>(a.tensor(), picked),
                    phi.pullback(b.tensor().component(mask_of(tuple)))});
  }
  RelatednessResult out;
  auto first_mismatch = [&](int sign) -> const RelatednessWitness* {
    for (const auto& r : rows) {
      if (r.pushed != (sign > 0 ? r.target : -r.target)) return &r;
    }
    return nullptr;
  };
  const auto* bad = first_mismatch(1);
  if (!bad) return out;
  out.kind = n % 2 == 0 && !first_mismatch(-1) ? RelatednessResult::Kind::AntiRelated : RelatednessResult::Kind::Witness;
  out.witness = *bad;
  return out;
}

GraphEquivalence graph_equivalence_check(const PolyMap& phi, const NambuStructure& a, const NambuStructure& b) {
  GraphEquivalence out;
  out.related = relatedness_check(phi, a, b);
  const int sign = a.order() % 2 ? 1 : -1;
  out.graph = coisotropy_check(product_structure(a, b, sign), graph_submanifold(phi));
  out.agree = (out.related.kind == RelatednessResult::Kind::Related) == out.graph.coisotropic;
  return out;
}

SolvedSubmanifold r_phi_submanifold(const PolyMap& phi) {
  const auto proj = phi.projection_indices();
  if (!proj) throw Error("R(φ) not solved-form representable");
  std::vector<std::size_t> off;
  const Chart doubled = pair_chart(phi.source(), phi.source(), off);
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (auto i : *proj) eqs.push_back({off[1] + i, Poly::coordinate(doubled, off[0] + i)});
  return SolvedSubmanifold(doubled, std::move(eqs));
}

std::string CoinduceObstruction::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < fs.size(); ++i) out += (i ? "; " : "") + fs[i].to_string();
  return out + "), bracket = " + bracket.to_string();
}

CoinduceResult coinduce(const PolyMap& phi, const NambuStructure& a, unsigned degree) {
  const auto proj = phi.projection_indices();
  if (!proj) throw Error("coinduce needs a coordinate projection");
  require_same_chart(phi.source(), a.chart());
  if (degree == 0) throw Error("coinduce needs degree >= 1");
  const std::size_t n = a.order();
  const Chart& src = phi.source();
  const Chart& tgt = phi.target();

  std::vector<std::size_t> fiber;
  for (std::size_t i = 0; i < src.dimension(); ++i) {
    if (std::find(proj->begin(), proj->end(), i) == proj->end()) fiber.push_back(i);
  }
  auto fiber_dependent = [&](const Poly& p) {
    return std::any_of(fiber.begin(), fiber.end(), [&](std::size_t i) { return p.depends_on(i); });
  };

  const auto family = monomial_family(tgt, degree);
  std::vector<Poly> pulled;
  for (const auto& f : family) pulled.push_back(phi.pullback(f));
  std::vector<Poly> fs(n);
  for (const auto& tuple : sorted_subsets(family.size(), n)) {
    for (std::size_t k = 0; k < n; ++k) fs[k] = pulled[tuple[k]];
    Poly br = nambu_bracket(a, fs);
    if (fiber_dependent(br)) {
      CoinduceObstruction ob;
      for (auto i : tuple) ob.fs.push_back(family[i]);
      ob.bracket = std::move(br);
      return ob;
    }
  }

  std::vector<Poly> images(src.dimension(), Poly(tgt));
  for (std::size_t j = 0; j < proj->size(); ++j) images[(*proj)[j]] = Poly::coordinate(tgt, j);
  MultiVec t(tgt, static_cast<unsigned>(n));
  for (const auto& tuple : sorted_subsets(tgt.dimension(), n)) {
    for (std::size_t k = 0; k < n; ++k) fs[k] = Poly::coordinate(src, (*proj)[tuple[k]]);
    const Poly br = nambu_bracket(a, fs);
    if (!br.is_zero()) t.add_term(tuple, br.is_constant() ? Poly(tgt, br.constant_term()) : substitute(br, images, tgt));
  }
  return Coinduced{NambuStructure(tgt, static_cast<unsigned>(n), t)};
}

SolvedSubmanifold preimage(const PolyMap& phi, const SolvedSubmanifold& c) {
  const auto proj = phi.projection_indices();
  if (!proj) throw Error("preimage needs a coordinate projection");
  require_same_chart(phi.target(), c.chart());
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (const auto& eq : c.equations()) eqs.push_back({(*proj)[eq.coord], phi.pullback(eq.value)});
  return SolvedSubmanifold(phi.source(), std::move(eqs));
}

}  // namespace nambu
