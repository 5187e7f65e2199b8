#include "nambu/groupoid.hpp"

#include "nambu/error.hpp"

namespace nambu {

namespace {

int twist(unsigned n) { return n % 2 ? 1 : -1; }

std::vector<Poly> block_coords(const Chart& c, std::size_t offset, std::size_t count) {
  std::vector<Poly> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(Poly::coordinate(c, offset + i));
  return out;
}

std::vector<Poly> constants(const Chart& c, std::span<const Rat> values) {
  std::vector<Poly> out;
  for (const auto& v : values) out.push_back(Poly(c, v));
  return out;
}

std::vector<Poly> concat(std::vector<Poly> a, const std::vector<Poly>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// Components of phi evaluated at `images` (polynomials on `target`).
std::vector<Poly> apply(const PolyMap& phi, std::span<const Poly> images, const Chart& target) {
  std::vector<Poly> out;
  for (const auto& c : phi.comps()) out.push_back(substitute(c, images, target));
  return out;
}

Chart doubled(const Chart& c) {
  const Chart blocks[] = {c, c};
  return product_chart(blocks, c.name() + "x" + c.name());
}

NambuStructure scaled(const NambuStructure& s, int sign) {
  return NambuStructure(s.chart(), s.order(), sign < 0 ? -s.tensor() : s.tensor());
}

/// Pushes t (on a chart of dimension m, tangent to the block at `offset` of P)
/// forward by the Jacobian block d comps / d x_{offset..offset+m}.
MultiVec push_block(const MultiVec& t, const PolyMap& mult, std::size_t offset) {
  const Chart& p = mult.source();
  const std::size_t m = mult.target().dimension();
  std::vector<std::size_t> coord_map(m);
  for (std::size_t i = 0; i < m; ++i) coord_map[i] = offset + i;
  std::vector<MultiVec> columns;
  for (std::size_t k = 0; k < m; ++k) {
    MultiVec col(p, 1);
    for (std::size_t j = 0; j < m; ++j) {
      const Poly dj = mult.comps()[j].derivative(offset + k);
      if (!dj.is_zero()) col.add_term(std::vector<std::size_t>{j}, dj);
    }
    columns.push_back(col);
  }
  MultiVec out(p, t.grade());
  for (const auto& [mask, c] : t.components()) {
    MultiVec w = MultiVec::scalar(Poly(p, 1));
    for (auto i : mask_indices(mask)) w = wedge(w, columns[i]);
    const std::vector<Poly> images = block_coords(p, offset, m);
    out += w * substitute(c, images, p);
  }
  return out;
}

std::optional<std::string> lie_group_defect(const GroupLaw& g, const NambuStructure& s) {
  const Chart& p = g.pair_chart();
  const std::size_t m = g.chart().dimension();
  MultiVec lhs(p, s.order());
  for (const auto& [mask, c] : s.tensor().components()) {
    lhs.add_term(mask_indices(mask), substitute(c, g.mult().comps(), p));
  }
  const MultiVec rhs = push_block(s.tensor(), g.mult(), 0) + push_block(s.tensor(), g.mult(), m);
  const MultiVec defect = lhs - rhs;
  if (defect.is_zero()) return std::nullopt;
  return "Pi(gh) = " + lhs.to_string() + ", r_h* Pi(g) + l_g* Pi(h) = " + rhs.to_string();
}

CheckVerdict coisotropy_verdict(const std::string& name, const CoisotropyResult& r) {
  CheckVerdict v;
  v.name = name;
  v.pass = r.coisotropic;
  if (r.witness) v.counterexample = r.witness->to_string();
  return v;
}

CheckVerdict passing(const std::string& name) {
  CheckVerdict v;
  v.name = name;
  return v;
}

}  // namespace

GroupLaw::GroupLaw(std::string name, PolyMap mult, std::vector<Rat> unit, PolyMap inv)
    : name_(std::move(name)), mult_(std::move(mult)), unit_(std::move(unit)), inv_(std::move(inv)) {
  const Chart& g = mult_.target();
  const std::size_t m = g.dimension();
  if (!(mult_.source() == doubled(g))) throw Error("group multiplication must be defined on G x G");
  if (!(inv_.source() == g) || !(inv_.target() == g)) throw Error("group inversion must map G to G");
  if (unit_.size() != m) throw Error("unit has " + std::to_string(unit_.size()) + " coordinates, expected " +
                                     std::to_string(m));
  const Chart blocks[] = {g, g, g};
  const Chart triple = product_chart(blocks, g.name() + "^3");
  const auto a = block_coords(triple, 0, m), b = block_coords(triple, m, m), c = block_coords(triple, 2 * m, m);
  const auto left = apply(mult_, concat(apply(mult_, concat(a, b), triple), c), triple);
  const auto right = apply(mult_, concat(a, apply(mult_, concat(b, c), triple)), triple);
  if (left != right) throw Error("group law " + name_ + " is not associative");
  const auto x = block_coords(g, 0, m), e = constants(g, unit_);
  if (apply(mult_, concat(e, x), g) != x || apply(mult_, concat(x, e), g) != x) {
    throw Error("group law " + name_ + ": unit law fails");
  }
  const auto ix = apply(inv_, x, g);
  if (apply(mult_, concat(x, ix), g) != e || apply(mult_, concat(ix, x), g) != e) {
    throw Error("group law " + name_ + ": inverse law fails");
  }
}

GroupLaw GroupLaw::additive(const Chart& chart) {
  const std::size_t m = chart.dimension();
  const Chart p = doubled(chart);
  std::vector<Poly> mult, inv;
  for (std::size_t i = 0; i < m; ++i) {
    mult.push_back(Poly::coordinate(p, i) + Poly::coordinate(p, m + i));
    inv.push_back(-Poly::coordinate(chart, i));
  }
  return GroupLaw("(" + chart.name() + ", +)", PolyMap(p, chart, mult), std::vector<Rat>(m),
                  PolyMap(chart, chart, inv));
}

GroupLaw GroupLaw::heisenberg(const Chart& chart) {
  if (chart.dimension() != 3) throw Error("Heisenberg group needs a 3-dimensional chart");
  const Chart p = doubled(chart);
  auto q = [&](std::size_t i) { return Poly::coordinate(p, i); };
  auto x = [&](std::size_t i) { return Poly::coordinate(chart, i); };
  std::vector<Poly> mult{q(0) + q(3), q(1) + q(4), q(2) + q(5) + q(0) * q(4)};
  std::vector<Poly> inv{-x(0), -x(1), -x(2) + x(0) * x(1)};
  return GroupLaw("Heis(" + chart.name() + ")", PolyMap(p, chart, mult), std::vector<Rat>(3),
                  PolyMap(chart, chart, inv));
}

SolvedSubmanifold GroupLaw::unit_point() const {
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (std::size_t i = 0; i < unit_.size(); ++i) eqs.push_back({i, Poly(chart(), unit_[i])});
  return SolvedSubmanifold(chart(), std::move(eqs));
}

PairGroupoid::PairGroupoid(NambuStructure base) : base_(std::move(base)) {
  const Chart& m = base_.chart();
  const std::size_t dim = m.dimension();
  structure_ = product_structure(base_, base_, twist(base_.order()));
  const Chart& p = structure_.chart();
  const auto x = block_coords(p, 0, dim), y = block_coords(p, dim, dim);
  alpha_ = PolyMap(p, m, x);
  beta_ = PolyMap(p, m, y);
  inv_ = PolyMap(p, p, concat(y, x));
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (std::size_t i = 0; i < dim; ++i) eqs.push_back({dim + i, x[i]});
  units_ = SolvedSubmanifold(p, std::move(eqs));

  const auto all = concat(x, y);
  if (apply(alpha_, inv_.comps(), p) != y || apply(inv_, inv_.comps(), p) != all) {
    throw Error("pair groupoid inversion fails");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (reduce_mod_solved(beta_.comps()[i], units_) != alpha_.comps()[i]) throw Error("pair groupoid units fail");
  }
}

SolvedSubmanifold PairGroupoid::multiplication_graph() const {
  const Chart& p = total_chart();
  const Chart inner[] = {p, p};
  const Chart pp = product_chart(inner, p.name() + "x" + p.name());
  const Chart outer[] = {pp, p};
  const Chart t = product_chart(outer, pp.name() + "x" + p.name());
  const std::size_t m = base_.chart().dimension();
  auto at = [&](std::size_t block, std::size_t i) { return Poly::coordinate(t, block * m + i); };
  // Blocks: x1 y1 x2 y2 x3 y3.
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (std::size_t i = 0; i < m; ++i) {
    eqs.push_back({2 * m + i, at(1, i)});
    eqs.push_back({3 * m + i, at(5, i)});
    eqs.push_back({4 * m + i, at(0, i)});
  }
  return SolvedSubmanifold(t, std::move(eqs));
}

SolvedSubmanifold PairGroupoid::restriction(const SolvedSubmanifold& n) const {
  require_same_chart(base_.chart(), n.chart());
  const Chart& p = total_chart();
  const std::size_t dim = base_.chart().dimension();
  const auto x = block_coords(p, 0, dim), y = block_coords(p, dim, dim);
  std::vector<SolvedSubmanifold::Equation> eqs;
  for (const auto& e : n.equations()) {
    eqs.push_back({e.coord, substitute(e.value, x, p)});
    eqs.push_back({dim + e.coord, substitute(e.value, y, p)});
  }
  return SolvedSubmanifold(p, std::move(eqs));
}

MultiplicativityResult multiplicativity_check(const GroupoidModel& model, const NambuStructure& s) {
  MultiplicativityResult out;
  const int sign = twist(s.order());
  const NambuStructure total = product_structure(product_structure(s, s, 1), s, sign);
  if (const auto* g = std::get_if<GroupLaw>(&model)) {
    require_same_chart(g->chart(), s.chart());
    out.graph = coisotropy_check(total, graph_submanifold(g->mult()));
    out.lie_group_witness = lie_group_defect(*g, s);
    out.lie_group_identity = !out.lie_group_witness;
    out.agree = *out.lie_group_identity == out.graph.coisotropic;
  } else {
    const auto& pg = std::get<PairGroupoid>(model);
    require_same_chart(pg.total_chart(), s.chart());
    out.graph = coisotropy_check(total, pg.multiplication_graph());
  }
  out.multiplicative = out.graph.coisotropic && out.lie_group_identity.value_or(true);
  return out;
}

CheckReport theorem_diagnostics(const GroupoidModel& model, const NambuStructure& s) {
  CheckReport rep;
  if (const auto* g = std::get_if<GroupLaw>(&model)) {
    require_same_chart(g->chart(), s.chart());
    rep.verdicts.push_back(coisotropy_verdict("unit_coisotropic", coisotropy_check(s, g->unit_point())));
    // The base is a point: no coordinate functions to test.
    rep.verdicts.push_back(passing("base_dependence"));
    rep.verdicts.push_back(passing("mixed_contraction"));
    return rep;
  }
  const auto& pg = std::get<PairGroupoid>(model);
  require_same_chart(pg.total_chart(), s.chart());
  rep.verdicts.push_back(coisotropy_verdict("unit_coisotropic", coisotropy_check(s, pg.units())));

  const Chart& p = s.chart();
  const std::size_t dim = pg.base().chart().dimension();
  auto base_dep = passing("base_dependence");
  for (std::size_t block = 0; block < 2 && base_dep.pass; ++block) {
    for (const auto& tuple : sorted_subsets(dim, s.order())) {
      std::vector<Poly> fs;
      for (auto i : tuple) fs.push_back(Poly::coordinate(p, block * dim + i));
      const Poly br = nambu_bracket(s, fs);
      for (std::size_t j = 0; j < dim; ++j) {
        if (br.depends_on((1 - block) * dim + j)) {
          base_dep.pass = false;
          std::string args;
          for (const auto& f : fs) args += (args.empty() ? "" : "; ") + f.to_string();
          base_dep.counterexample = "{" + args + "} = " + br.to_string();
          break;
        }
      }
      if (!base_dep.pass) break;
    }
  }
  rep.verdicts.push_back(base_dep);

  auto mixed = passing("mixed_contraction");
  for (std::size_t i = 0; i < dim && mixed.pass; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const Form dx = Form::basis(p, i), dy = Form::basis(p, dim + j);
      const MultiVec c = interior<FieldKind::Vector>(dy, interior<FieldKind::Vector>(dx, s.tensor()));
      if (!c.is_zero()) {
        mixed.pass = false;
        mixed.counterexample = "iota(d " + p.coord(i) + " ^ d " + p.coord(dim + j) + ") Pi = " + c.to_string();
        break;
      }
    }
  }
  rep.verdicts.push_back(mixed);
  return rep;
}

InversionResult inversion_check(const GroupoidModel& model, const NambuStructure& s) {
  const PolyMap& inv = std::holds_alternative<GroupLaw>(model) ? std::get<GroupLaw>(model).inv()
                                                               : std::get<PairGroupoid>(model).inverse();
  InversionResult out;
  out.relatedness = relatedness_check(inv, s, s);
  const auto twisted = relatedness_check(inv, s, scaled(s, twist(s.order())));
  out.identity = twisted.kind == RelatednessResult::Kind::Related;
  out.witness = twisted.witness;
  return out;
}

BaseStructure base_structure(const GroupoidModel& model, const NambuStructure& s, unsigned degree) {
  BaseStructure out;
  if (std::holds_alternative<GroupLaw>(model)) return out;
  const auto& pg = std::get<PairGroupoid>(model);
  auto r = coinduce(pg.source(), s, degree);
  if (const auto* ob = std::get_if<CoinduceObstruction>(&r)) {
    throw Error("base structure obstructed along alpha: " + ob->to_string());
  }
  out.structure = std::get<Coinduced>(r).structure;
  const auto beta = relatedness_check(pg.target(), s, scaled(*out.structure, twist(s.order())));
  out.target_anti = beta.kind == RelatednessResult::Kind::Related;
  return out;
}

CheckVerdict sign_relation_check(const PairGroupoid& model, const NambuStructure& base) {
  require_same_chart(model.base().chart(), base.chart());
  const auto conormal = pair_conormal_model(model.base());
  const int sign = twist(base.order());
  auto v = passing("sign_relation");
  for (const auto& tuple : sorted_subsets(base.chart().dimension(), base.order())) {
    std::vector<Poly> fs;
    for (auto i : tuple) fs.push_back(Poly::coordinate(base.chart(), i));
    const Poly lhs = nambu_bracket(base, fs);
    const Poly rhs = induced_base_bracket(conormal, fs);
    if (lhs != (sign < 0 ? -rhs : rhs)) {
      std::string args;
      for (const auto& f : fs) args += (args.empty() ? "" : "; ") + f.to_string();
      v.pass = false;
      v.counterexample = "(" + args + "): base " + lhs.to_string() + ", induced " + rhs.to_string();
      break;
    }
  }
  return v;
}

CheckReport coiso_subgroupoid_check(const PairGroupoid& model, const SolvedSubmanifold& n, std::size_t trials,
                                    std::uint64_t seed) {
  const auto base = coisotropy_check(model.base(), n);
  if (!base.coisotropic) {
    throw Error("N = " + n.to_string() + " is not coisotropic: " + base.witness->to_string());
  }
  CheckReport rep;
  rep.seed = seed;
  rep.verdicts.push_back(
      coisotropy_verdict("subgroupoid_coisotropic", coisotropy_check(model.structure(), model.restriction(n))));
  const auto sub = coiso_subalgebroid_check(model.base(), tangent_subalgebroid(n), trials, seed);
  auto v = passing("subalgebroid");
  v.pass = sub.passed();
  if (const auto* f = sub.first_failure()) v.counterexample = f->name + ": " + f->counterexample.value_or("");
  if (sub.precondition_error) v.counterexample = sub.precondition_error;
  rep.verdicts.push_back(v);
  rep.verdicts.push_back(coisotropy_verdict("base_coisotropic", base));
  return rep;
}

}  // namespace nambu
