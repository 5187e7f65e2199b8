#include "nambu/formsbialg.hpp"

#include <algorithm>

#include "nambu/cartan.hpp"
#include "nambu/error.hpp"
#include "nambu/random.hpp"

namespace nambu {

namespace {

void require_forms(const NambuStructure& s, std::span<const Form> alphas, std::size_t want) {
  if (alphas.size() != want) {
    throw Error("form bracket of order " + std::to_string(s.order()) + " needs " + std::to_string(want) +
                " arguments, got " + std::to_string(alphas.size()));
  }
  for (const auto& a : alphas) {
    if (a.grade() != 1) throw Error("form bracket arguments must be 1-forms");
    if (!a.is_zero()) require_same_chart(s.chart(), a.chart());
  }
}

Form d_of(const Chart& c, const Poly& f) { return f.is_zero() ? Form(c, 1) : differential(f); }

Poly pi_value(const NambuStructure& s, std::span<const Form> alphas) {
  Poly v = evaluate<FieldKind::Vector>(s.tensor(), alphas);
  return v.chart().valid() ? v : Poly(s.chart());
}

std::vector<Form> omit(std::span<const Form> alphas, std::size_t k) {
  std::vector<Form> out;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (i != k) out.push_back(alphas[i]);
  }
  return out;
}

Poly apply_vector(const MultiVec& x, const Poly& f) {
  return pairing(d_of(x.chart(), f), x);
}

std::string join(std::span<const Form> forms) {
  std::string out = "(";
  for (std::size_t i = 0; i < forms.size(); ++i) out += (i ? "; " : "") + forms[i].to_string();
  return out + ")";
}

Form random_form(Sampler& rng, const Chart& c, unsigned degree) {
  Form out(c, 1);
  const auto count = rng.range(1, std::min<std::int64_t>(3, static_cast<std::int64_t>(c.dimension())));
  for (std::int64_t t = 0; t < count; ++t) {
    const auto i = static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(c.dimension()) - 1));
    out.add_component(IndexMask{1} << i, rng.poly(c, degree, 2));
  }
  return out;
}

MultiVec random_vector(Sampler& rng, const Chart& c, unsigned degree) {
  MultiVec out(c, 1);
  for (std::size_t i = 0; i < c.dimension(); ++i) {
    if (rng.coin()) out.add_component(IndexMask{1} << i, rng.poly(c, degree, 2));
  }
  return out;
}

std::vector<Form> random_forms(Sampler& rng, const Chart& c, unsigned degree, std::size_t count) {
  std::vector<Form> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_form(rng, c, degree));
  return out;
}

std::vector<Form> closed_forms(Sampler& rng, const Chart& c, unsigned degree, std::size_t count) {
  std::vector<Form> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(d_of(c, rng.poly(c, degree + 1, 3)));
  return out;
}

CheckVerdict verdict(std::string name, bool asserted = true) {
  CheckVerdict v;
  v.name = std::move(name);
  v.asserted = asserted;
  return v;
}

void fail(CheckVerdict& v, std::string why) {
  if (!v.pass) return;
  v.pass = false;
  v.counterexample = std::move(why);
}

// Individual identities; each returns a description of the failure.

std::optional<std::string> check_skew(const NambuStructure& s, std::vector<Form> a) {
  const Form base = form_bracket(s, a);
  std::swap(a[0], a[1]);
  if (form_bracket(s, a) != -base) return "swap of slots 1, 2 in " + join(a);
  a[1] = a[0];
  if (!form_bracket(s, a).is_zero()) return "repeated argument in " + join(a);
  return std::nullopt;
}

std::optional<std::string> check_exact(const NambuStructure& s, std::span<const Poly> fs) {
  std::vector<Form> dfs;
  for (const auto& f : fs) dfs.push_back(d_of(s.chart(), f));
  const Form lhs = form_bracket(s, dfs);
  const Form rhs = d_of(s.chart(), nambu_bracket(s, fs));
  if (lhs == rhs) return std::nullopt;
  return "a = " + join(dfs) + ", lhs = " + lhs.to_string() + ", rhs = " + rhs.to_string();
}

std::optional<std::string> check_leibniz(const NambuStructure& s, std::vector<Form> a, const Poly& f) {
  const std::size_t n = a.size();
  const Form plain = form_bracket(s, a);
  const MultiVec x = sharp(s, std::span<const Form>(a).first(n - 1));
  const Form rhs = plain * f + a[n - 1] * apply_vector(x, f);
  a[n - 1] = a[n - 1] * f;
  const Form lhs = form_bracket(s, a);
  if (lhs == rhs) return std::nullopt;
  return "a = " + join(a) + ", f = " + f.to_string() + ", lhs = " + lhs.to_string() + ", rhs = " + rhs.to_string();
}

std::optional<std::string> check_fi(const NambuStructure& s, std::span<const Form> a, std::span<const Form> b) {
  const std::size_t n = s.order();
  std::vector<Form> args(a.begin(), a.end());
  args.push_back(form_bracket(s, b));
  const Form lhs = form_bracket(s, args);
  Form rhs(s.chart(), 1);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Form> inner(a.begin(), a.end());
    inner.push_back(b[k]);
    std::vector<Form> outer(b.begin(), b.end());
    outer[k] = form_bracket(s, inner);
    rhs += form_bracket(s, outer);
  }
  if (lhs == rhs) return std::nullopt;
  return "a = " + join(a) + ", b = " + join(b) + ", defect = " + (lhs - rhs).to_string();
}

std::optional<std::string> check_morphism(const NambuStructure& s, std::span<const Form> a, std::span<const Form> b) {
  const MultiVec lhs = schouten(sharp(s, a), sharp(s, b));
  MultiVec rhs(s.chart(), 1);
  for (std::size_t k = 0; k < b.size(); ++k) {
    std::vector<Form> inner(a.begin(), a.end());
    inner.push_back(b[k]);
    std::vector<Form> outer(b.begin(), b.end());
    outer[k] = form_bracket(s, inner);
    rhs += sharp(s, outer);
  }
  if (lhs == rhs) return std::nullopt;
  return "a = " + join(a) + ", b = " + join(b) + ", defect = " + (lhs - rhs).to_string();
}

std::optional<std::string> check_compatibility(const NambuStructure& s, std::span<const Form> a) {
  const std::size_t n = a.size();
  const Form lhs = de_rham_d(form_bracket(s, a));
  Form rhs(s.chart(), 2);
  for (std::size_t k = 0; k < n; ++k) {
    const Form da = de_rham_d(a[k]);
    if (da.is_zero()) continue;
    // Moving the 2-form past n - 1 - k one-forms: each transposition is -1.
    const Form term = form_bracket_two(s, omit(a, k), da);
    rhs += (n - 1 - k) % 2 ? -term : term;
  }
  if (lhs == rhs) return std::nullopt;
  return "a = " + join(a) + ", defect = " + (lhs - rhs).to_string();
}

std::vector<Poly> random_polys(Sampler& rng, const Chart& c, unsigned degree, std::size_t count) {
  std::vector<Poly> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(rng.poly(c, degree, 3));
  return out;
}

}  // namespace

Form form_bracket(const NambuStructure& s, std::span<const Form> alphas) {
  const std::size_t n = s.order();
  require_forms(s, alphas, n);
  Form out = d_of(s.chart(), pi_value(s, alphas));
  for (std::size_t k = 0; k < n; ++k) {
    const Form da = de_rham_d(alphas[k]);
    if (da.is_zero()) continue;
    const auto rest = omit(alphas, k);
    const Form term = interior<FieldKind::Form>(sharp(s, rest), da);
    out += (n - 1 - k) % 2 ? -term : term;
  }
  return out;
}

Form form_bracket_lie(const NambuStructure& s, std::span<const Form> alphas) {
  const std::size_t n = s.order();
  require_forms(s, alphas, n);
  Form out = d_of(s.chart(), pi_value(s, alphas)) * Rat(-static_cast<std::int64_t>(n - 1));
  for (std::size_t k = 0; k < n; ++k) {
    const auto rest = omit(alphas, k);
    const Form term = lie_derivative(sharp(s, rest), alphas[k]);
    out += (n - 1 - k) % 2 ? -term : term;
  }
  return out;
}

Form form_bracket_two(const NambuStructure& s, std::span<const Form> alphas, const Form& omega) {
  require_forms(s, alphas, s.order() - 1);
  if (omega.grade() != 2) throw Error("graded form bracket needs a 2-form");
  Form out(s.chart(), 2);
  std::vector<Form> args(alphas.begin(), alphas.end());
  args.emplace_back();
  for (const auto& [m, w] : omega.components()) {
    const auto idx = mask_indices(m);
    const Form b = Form::basis(s.chart(), idx[0]) * w;
    const Form c = Form::basis(s.chart(), idx[1]);
    args.back() = b;
    out += wedge(form_bracket(s, args), c);
    args.back() = c;
    out += wedge(b, form_bracket(s, args));
  }
  return out;
}

bool CheckReport::passed() const { return !precondition_error && first_failure() == nullptr; }

const CheckVerdict* CheckReport::find(const std::string& name) const {
  for (const auto& v : verdicts) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

const CheckVerdict* CheckReport::first_failure() const {
  for (const auto& v : verdicts) {
    if (v.asserted && !v.pass) return &v;
  }
  return nullptr;
}

CheckReport form_bracket_properties(const NambuStructure& s, std::size_t trials, unsigned degree,
                                    std::uint64_t seed) {
  CheckReport rep;
  rep.seed = seed;
  const std::size_t n = s.order();
  const Chart& c = s.chart();
  Sampler rng(seed);
  auto skew = verdict("skew"), exact = verdict("exact"), leibniz = verdict("leibniz");
  auto fi = verdict("fundamental_identity"), morph = verdict("sharp_morphism");
  for (std::size_t t = 0; t < trials; ++t) {
    if (auto w = check_skew(s, random_forms(rng, c, degree, n))) fail(skew, *w);
    if (auto w = check_exact(s, random_polys(rng, c, degree, n))) fail(exact, *w);
    if (auto w = check_leibniz(s, random_forms(rng, c, degree, n), rng.poly(c, degree, 2))) fail(leibniz, *w);
    auto a = closed_forms(rng, c, degree, n - 1);
    if (auto w = check_fi(s, a, random_forms(rng, c, degree, n))) fail(fi, *w);
    if (auto w = check_morphism(s, a, random_forms(rng, c, degree, n - 1))) fail(morph, *w);
  }
  rep.verdicts = {skew, exact, leibniz, fi, morph};
  return rep;
}

CheckReport conormal_restriction_check(const NambuStructure& s, const SolvedSubmanifold& c, std::size_t trials,
                                       std::uint64_t seed) {
  CheckReport rep;
  rep.seed = seed;
  const auto co = coisotropy_check(s, c);
  if (!co.coisotropic) {
    rep.precondition_error = "submanifold " + c.to_string() + " is not coisotropic: " + co.witness->to_string();
    return rep;
  }
  const std::size_t n = s.order();
  const Chart& chart = s.chart();
  const auto frame = conormal_frame(c).frame;
  std::vector<MultiVec> tangents;
  for (auto i : c.free()) tangents.push_back(tangent_frame_vector(c, i));

  auto tangent = verdict("sharp_tangent"), conormal = verdict("bracket_conormal");
  auto independent = verdict("extension_independent");
  if (frame.size() >= n - 1) {
    std::vector<Form> picked(n - 1);
    for (const auto& tuple : sorted_subsets(frame.size(), n - 1)) {
      for (std::size_t k = 0; k + 1 < n; ++k) picked[k] = frame[tuple[k]];
      const MultiVec x = sharp(s, picked);
      for (const auto& theta : frame) {
        Poly r = reduce_mod_solved(pairing(theta, x), c);
        if (!r.is_zero()) fail(tangent, "Pi#" + join(picked) + " paired with " + theta.to_string() + " = " + r.to_string());
      }
    }
  }

  Sampler rng(seed);
  std::vector<Poly> gens;
  for (const auto& eq : c.equations()) gens.push_back(Poly::coordinate(chart, eq.coord) - eq.value);
  for (std::size_t t = 0; t < trials && !frame.empty(); ++t) {
    std::vector<Form> a(n), a2(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = Form(chart, 1);
      for (const auto& theta : frame) a[i] += theta * rng.poly(chart, 2, 2);
      const Poly h = gens[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(gens.size()) - 1))];
      a2[i] = a[i] + random_form(rng, chart, 1) * (h * rng.poly(chart, 1, 2));
    }
    const Form b = form_bracket(s, a);
    for (const auto& x : tangents) {
      Poly r = reduce_mod_solved(pairing(b, x), c);
      if (!r.is_zero()) fail(conormal, "a = " + join(a) + ", pairing with " + x.to_string() + " = " + r.to_string());
    }
    const Form diff = form_bracket(s, a2) - b;
    for (const auto& [m, p] : diff.components()) {
      Poly r = reduce_mod_solved(p, c);
      if (!r.is_zero()) {
        fail(independent, "a = " + join(a) + ", a' = " + join(a2) + ", differ on C by " + r.to_string());
      }
    }
  }
  rep.verdicts = {tangent, conormal, independent};
  return rep;
}

MultiVec delta_pi_wedge(const NambuStructure& s, std::span<const MultiVec> factors) {
  if (factors.empty()) throw Error("delta of an empty wedge");
  const unsigned n = s.order();
  for (const auto& f : factors) {
    if (f.grade() > 1) throw Error("wedge factors for delta must have grade 0 or 1");
  }
  MultiVec w = factors[0];
  MultiVec dw = delta_pi(s, factors[0]);
  for (std::size_t k = 1; k < factors.size(); ++k) {
    const MultiVec& q = factors[k];
    MultiVec second = wedge(w, delta_pi(s, q));
    dw = wedge(dw, q) + ((w.grade() * (n - 1)) % 2 ? -second : second);
    w = wedge(w, q);
  }
  return dw;
}

MultiVec delta_pi(const NambuStructure& s, const MultiVec& p) {
  const unsigned n = s.order();
  const Chart& c = s.chart();
  if (!p.is_zero()) require_same_chart(c, p.chart());
  if (p.grade() == 0) {
    const Poly f = p.scalar_value();
    if (f.is_zero() || f.is_constant()) return MultiVec(c, n - 1);
    return interior<FieldKind::Vector>(differential(f), s.tensor());
  }
  if (p.grade() == 1) return -schouten(p.is_zero() ? MultiVec(c, 1) : p, s.tensor());
  MultiVec out(c, p.grade() + n - 1);
  for (const auto& [m, f] : p.components()) {
    std::vector<MultiVec> factors{MultiVec::scalar(f)};
    for (auto i : mask_indices(m)) factors.push_back(MultiVec::basis(c, i));
    out += delta_pi_wedge(s, factors);
  }
  return out;
}

DeltaCompatibility delta_compatibility_check(const NambuStructure& s, const MultiVec& p, const MultiVec& q) {
  const unsigned n = s.order();
  DeltaCompatibility out;
  out.lhs = delta_pi(s, schouten(p, q));
  const int e = (static_cast<int>(p.grade()) - 1) * static_cast<int>(n - 1);
  MultiVec second = schouten(p, delta_pi(s, q));
  out.rhs = schouten(delta_pi(s, p), q) + (e % 2 ? -second : second);
  out.defect = out.lhs - out.rhs;
  out.pass = out.defect.is_zero();
  out.delta_squared = delta_pi(s, delta_pi(s, MultiVec::scalar(Poly::coordinate(s.chart(), 0))));
  out.delta_squared_zero = out.delta_squared.is_zero();
  return out;
}

CheckReport wlfb_check(const NambuStructure& s, unsigned degree, std::size_t trials, std::uint64_t seed) {
  CheckReport rep;
  rep.seed = seed;
  const std::size_t n = s.order();
  const Chart& c = s.chart();
  Sampler rng(seed);
  auto ax1 = verdict("lie_algebroid"), ax2 = verdict("fundamental_identity"), ax3 = verdict("anchor_morphism");
  auto ax4 = verdict("leibniz"), ax5 = verdict("compatibility");
  auto ax2u = verdict("fundamental_identity_unrestricted", n == 2);
  auto ax3u = verdict("anchor_morphism_unrestricted", n == 2);
  for (std::size_t t = 0; t < trials; ++t) {
    // (1) TM: d^2 = 0, Jacobi and Leibniz for the vector field bracket.
    const Form w = random_form(rng, c, degree);
    if (!de_rham_d(de_rham_d(w)).is_zero()) fail(ax1, "d d " + w.to_string() + " != 0");
    std::vector<MultiVec> xs;
    for (int k = 0; k < 3; ++k) xs.push_back(random_vector(rng, c, degree));
    const MultiVec jac = schouten(xs[0], schouten(xs[1], xs[2])) - schouten(schouten(xs[0], xs[1]), xs[2]) -
                         schouten(xs[1], schouten(xs[0], xs[2]));
    if (!jac.is_zero()) fail(ax1, "Jacobi fails on " + xs[0].to_string());
    const Poly f = rng.poly(c, degree, 2);
    if (schouten(xs[0], xs[1] * f) != schouten(xs[0], xs[1]) * f + xs[1] * apply_vector(xs[0], f)) {
      fail(ax1, "Leibniz fails on " + xs[0].to_string());
    }

    auto a = random_forms(rng, c, degree, n);
    if (auto e = check_skew(s, a)) fail(ax2, *e);
    auto closed = closed_forms(rng, c, degree, n - 1);
    if (auto e = check_fi(s, closed, random_forms(rng, c, degree, n))) fail(ax2, *e);
    if (auto e = check_morphism(s, closed, random_forms(rng, c, degree, n - 1))) fail(ax3, *e);
    if (auto e = check_leibniz(s, a, rng.poly(c, degree, 2))) fail(ax4, *e);
    if (auto e = check_compatibility(s, random_forms(rng, c, degree, n))) fail(ax5, *e);

    auto open = random_forms(rng, c, degree, n - 1);
    if (auto e = check_fi(s, open, random_forms(rng, c, degree, n))) fail(ax2u, *e);
    if (auto e = check_morphism(s, open, random_forms(rng, c, degree, n - 1))) fail(ax3u, *e);
  }
  rep.verdicts = {ax1, ax2, ax3, ax4, ax5, ax2u, ax3u};
  return rep;
}

BialgebroidModel tangent_pair_model(const NambuStructure& s) {
  BialgebroidModel m;
  m.kind = BialgebroidModel::Kind::TangentPair;
  m.total = s;
  m.base = s.chart();
  return m;
}

BialgebroidModel pair_conormal_model(const NambuStructure& base) {
  BialgebroidModel m;
  m.kind = BialgebroidModel::Kind::PairConormal;
  m.total = product_structure(base, base, base.order() % 2 ? 1 : -1);
  m.base = base.chart();
  m.units = graph_submanifold(PolyMap::identity(base.chart()));
  const std::size_t dim = base.chart().dimension();
  std::vector<Poly> comps;
  for (std::size_t i = 0; i < dim; ++i) comps.push_back(Poly::coordinate(m.total.chart(), dim + i));
  m.target_map = PolyMap(m.total.chart(), base.chart(), comps);
  return m;
}

Poly induced_base_bracket(const BialgebroidModel& model, std::span<const Poly> fs) {
  const std::size_t n = model.total.order();
  if (fs.size() != n) {
    throw Error("induced bracket of order " + std::to_string(n) + " needs " + std::to_string(n) + " functions");
  }
  if (model.kind == BialgebroidModel::Kind::TangentPair) {
    std::vector<Form> d;
    for (const auto& f : fs) d.push_back(d_of(model.total.chart(), f));
    return pi_value(model.total, d);
  }
  const Chart& tc = model.total.chart();
  std::vector<Poly> pulled;
  for (const auto& f : fs) pulled.push_back(model.target_map->pullback(f));
  std::vector<Form> d;
  for (const auto& g : pulled) d.push_back(d_of(tc, g));
  const MultiVec rho = sharp(model.total, std::span<const Form>(d).first(n - 1));
  const Poly on_units = reduce_mod_solved(pairing(d.back(), rho), *model.units);
  const std::size_t dim = model.base.dimension();
  std::vector<Poly> images;
  for (std::size_t i = 0; i < 2 * dim; ++i) images.push_back(Poly::coordinate(model.base, i % dim));
  if (on_units.is_zero() || on_units.is_constant()) return Poly(model.base, on_units.constant_term());
  return substitute(on_units, images, model.base);
}

FilippovTable::FilippovTable(std::size_t dimension, unsigned order) : m_(dimension), n_(order) {}

void FilippovTable::set(IndexMask sorted, std::vector<Rat> values) {
  if (values.size() != m_) throw Error("Filippov constants need one value per basis element");
  if (std::all_of(values.begin(), values.end(), [](const Rat& r) { return r.is_zero(); })) {
    constants_.erase(sorted);
  } else {
    constants_[sorted] = std::move(values);
  }
}

std::vector<Rat> FilippovTable::bracket(std::span<const std::size_t> indices) const {
  std::vector<Rat> zero(m_);
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  int sign = 1;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    for (std::size_t j = 0; j + 1 < idx.size() - i; ++j) {
      if (idx[j] == idx[j + 1]) return zero;
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
    }
  }
  auto it = constants_.find(mask_of(idx));
  if (it == constants_.end()) return zero;
  auto out = it->second;
  if (sign < 0) {
    for (auto& r : out) r = -r;
  }
  return out;
}

bool FilippovTable::is_zero() const { return constants_.empty(); }

std::vector<Rat> FilippovTable::bracket_of(std::span<const std::vector<Rat>> args) const {
  std::vector<Rat> out(m_);
  std::vector<std::size_t> idx(args.size());
  // Multilinear expansion over nonzero coefficients.
  auto expand = [&](auto&& self, std::size_t slot, const Rat& coef) -> void {
    if (slot == args.size()) {
      const auto b = bracket(idx);
      for (std::size_t j = 0; j < m_; ++j) out[j] += coef * b[j];
      return;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (args[slot][i].is_zero()) continue;
      idx[slot] = i;
      self(self, slot + 1, coef * args[slot][i]);
    }
  };
  expand(expand, 0, Rat(1));
  return out;
}

std::optional<std::string> FilippovTable::fundamental_identity_failure() const {
  if (n_ > m_ + 1) return std::nullopt;
  auto unit = [&](std::size_t i) {
    std::vector<Rat> e(m_);
    e[i] = Rat(1);
    return e;
  };
  auto names = [](const std::vector<std::size_t>& t) {
    std::string s;
    for (auto i : t) s += (s.empty() ? "" : ",") + std::string("e") + std::to_string(i + 1);
    return s;
  };
  for (const auto& a : sorted_subsets(m_, n_ - 1)) {
    for (const auto& b : sorted_subsets(m_, n_)) {
      std::vector<std::vector<Rat>> args;
      for (auto i : a) args.push_back(unit(i));
      args.push_back(bracket(b));
      const auto lhs = bracket_of(args);
      std::vector<Rat> rhs(m_);
      for (std::size_t k = 0; k < n_; ++k) {
        std::vector<std::vector<Rat>> inner;
        for (auto i : a) inner.push_back(unit(i));
        inner.push_back(unit(b[k]));
        std::vector<std::vector<Rat>> outer;
        for (auto i : b) outer.push_back(unit(i));
        outer[k] = bracket_of(inner);
        const auto term = bracket_of(outer);
        for (std::size_t j = 0; j < m_; ++j) rhs[j] += term[j];
      }
      if (lhs != rhs) return "a = (" + names(a) + "), b = (" + names(b) + ")";
    }
  }
  return std::nullopt;
}

std::string FilippovTable::to_string() const {
  if (constants_.empty()) return "0";
  std::string out;
  for (const auto& [m, vals] : constants_) {
    std::string lhs;
    for (auto i : mask_indices(m)) lhs += (lhs.empty() ? "" : ",") + std::string("e") + std::to_string(i + 1);
    std::string rhs;
    for (std::size_t j = 0; j < m_; ++j) {
      if (vals[j].is_zero()) continue;
      Rat v = vals[j];
      if (!rhs.empty()) {
        rhs += v.sign() < 0 ? " - " : " + ";
        if (v.sign() < 0) v = -v;
      }
      const std::string coef = v.is_one() ? "" : (v == Rat(-1) ? "-" : v.to_string() + "*");
      rhs += coef + "e" + std::to_string(j + 1);
    }
    out += (out.empty() ? "" : "\n") + ("[" + lhs + "] = " + rhs);
  }
  return out;
}

FilippovTable pointwise_filippov(const NambuStructure& s, std::span<const Rat> point) {
  const Chart& c = s.chart();
  if (point.size() != c.dimension()) throw Error("point has the wrong number of coordinates");
  if (!at_point(s.tensor(), point).is_zero()) throw Error("Nambu tensor does not vanish at the point");
  const unsigned n = s.order();
  FilippovTable table(c.dimension(), n);
  std::vector<Form> dx(n);
  for (const auto& tuple : sorted_subsets(c.dimension(), n)) {
    for (std::size_t k = 0; k < n; ++k) dx[k] = Form::basis(c, tuple[k]);
    const Form b = form_bracket(s, dx);
    std::vector<Rat> vals(c.dimension());
    for (std::size_t j = 0; j < c.dimension(); ++j) vals[j] = b.component(IndexMask{1} << j).evaluate(point);
    table.set(mask_of(tuple), std::move(vals));
  }
  return table;
}

MultiVec tangent_frame_vector(const SolvedSubmanifold& n, std::size_t free_coord) {
  MultiVec v = MultiVec::basis(n.chart(), free_coord);
  for (const auto& eq : n.equations()) {
    const Poly dp = eq.value.derivative(free_coord);
    if (!dp.is_zero()) v += MultiVec::basis(n.chart(), eq.coord) * dp;
  }
  return v;
}

SubalgebroidModel tangent_subalgebroid(const SolvedSubmanifold& n) {
  SubalgebroidModel b{n, {}};
  for (auto i : n.free()) b.frame.push_back(tangent_frame_vector(n, i));
  return b;
}

CheckReport coiso_subalgebroid_check(const NambuStructure& s, const SubalgebroidModel& b, std::size_t trials,
                                     std::uint64_t seed) {
  const SolvedSubmanifold& base = b.base;
  const Chart& c = s.chart();
  require_same_chart(c, base.chart());
  const std::size_t n = s.order();
  const auto conormal = conormal_frame(base).frame;

  // Validate the frame and find the free coordinate each vector covers.
  std::vector<bool> covered(c.dimension(), false);
  for (const auto& v : b.frame) {
    for (const auto& theta : conormal) {
      if (!reduce_mod_solved(pairing(theta, v), base).is_zero()) {
        throw Error("subbundle frame vector " + v.to_string() + " is not tangent to " + base.to_string());
      }
    }
    std::optional<std::size_t> hit;
    bool adapted = true;
    for (auto j : base.free()) {
      const Poly r = reduce_mod_solved(v.component(IndexMask{1} << j), base);
      if (r.is_zero()) continue;
      if (!r.is_constant() || hit) adapted = false;
      hit = j;
    }
    if (!adapted || !hit || covered[*hit]) {
      throw Error("subbundle frame vector " + v.to_string() + " is not coordinate-adapted");
    }
    covered[*hit] = true;
  }

  // B^0: the conormal frame of N plus dx_j for free j outside B.
  std::vector<Form> annihilator = conormal;
  for (auto j : base.free()) {
    if (!covered[j]) annihilator.push_back(Form::basis(c, j));
  }

  CheckReport rep;
  rep.seed = seed;
  auto anchor = verdict("anchor"), bracket = verdict("bracket"), vanishing = verdict("vanishing");
  auto base_coiso = verdict("base_coisotropic");
  if (annihilator.size() >= n - 1) {
    std::vector<Form> picked(n - 1);
    for (const auto& tuple : sorted_subsets(annihilator.size(), n - 1)) {
      for (std::size_t k = 0; k + 1 < n; ++k) picked[k] = annihilator[tuple[k]];
      const MultiVec x = sharp(s, picked);
      for (const auto& theta : conormal) {
        Poly r = reduce_mod_solved(pairing(theta, x), base);
        if (!r.is_zero()) fail(anchor, "rho" + join(picked) + " paired with " + theta.to_string() + " = " + r.to_string());
      }
    }
  }

  Sampler rng(seed);
  std::vector<Poly> gens;
  for (const auto& eq : base.equations()) gens.push_back(Poly::coordinate(c, eq.coord) - eq.value);
  auto ideal_element = [&]() {
    if (gens.empty()) return Poly(c);
    return gens[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(gens.size()) - 1))] *
           rng.poly(c, 1, 2);
  };
  for (std::size_t t = 0; t < trials && !annihilator.empty(); ++t) {
    std::vector<Form> a(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = random_form(rng, c, 1) * ideal_element();
      for (const auto& beta : annihilator) a[i] += beta * rng.poly(c, 2, 2);
    }
    const Form br = form_bracket(s, a);
    for (const auto& v : b.frame) {
      Poly r = reduce_mod_solved(pairing(br, v), base);
      if (!r.is_zero()) fail(bracket, "a = " + join(a) + ", pairing with " + v.to_string() + " = " + r.to_string());
    }
    a[n - 1] = random_form(rng, c, 1) * ideal_element();
    const Form vb = form_bracket(s, a);
    for (const auto& [m, p] : vb.components()) {
      Poly r = reduce_mod_solved(p, base);
      if (!r.is_zero()) fail(vanishing, "a = " + join(a) + ", bracket on N = " + vb.to_string());
    }
  }

  // Base: coisotropy of N for the structure induced by the tangent pair.
  const auto model = tangent_pair_model(s);
  MultiVec induced(c, static_cast<unsigned>(n));
  std::vector<Poly> coords(n);
  for (const auto& tuple : sorted_subsets(c.dimension(), n)) {
    for (std::size_t k = 0; k < n; ++k) coords[k] = Poly::coordinate(c, tuple[k]);
    const Poly v = induced_base_bracket(model, coords);
    if (!v.is_zero()) induced.add_term(tuple, v);
  }
  const auto co = coisotropy_check(NambuStructure(c, static_cast<unsigned>(n), induced), base);
  if (!co.coisotropic) fail(base_coiso, co.witness->to_string());

  rep.verdicts = {anchor, bracket, vanishing, base_coiso};
  return rep;
}

}  // namespace nambu
