#include "nambu/nambu.hpp"

#include <algorithm>
#include <map>

#include "nambu/cartan.hpp"
#include "nambu/error.hpp"

namespace nambu {

std::string FiWitness::to_string() const {
  auto list = [](const std::vector<Poly>& ps) {
    std::string out = "(";
    for (std::size_t i = 0; i < ps.size(); ++i) out += (i ? "; " : "") + ps[i].to_string();
    return out + ")";
  };
  return "f = " + list(fs) + ", g = " + list(gs) + ", defect = " + defect.to_string();
}

NambuStructure::NambuStructure(MultiVec tensor, Provenance provenance)
    : chart_(tensor.chart()), order_(tensor.grade()), tensor_(std::move(tensor)),
      provenance_(std::move(provenance)) {
  if (order_ < 2) throw Error("Nambu structure needs order >= 2, got " + std::to_string(order_));
  if (!chart_.valid()) throw Error("Nambu structure tensor has no chart");
}

NambuStructure::NambuStructure(const Chart& chart, unsigned order, MultiVec tensor, Provenance provenance)
    : chart_(chart), order_(order), tensor_(std::move(tensor)), provenance_(std::move(provenance)) {
  if (order_ < 2) throw Error("Nambu structure needs order >= 2, got " + std::to_string(order_));
  if (tensor_.is_zero()) {
    tensor_ = MultiVec(chart_, order_);
  } else {
    require_same_chart(chart_, tensor_.chart());
    if (tensor_.grade() != order_) {
      throw Error("tensor grade " + std::to_string(tensor_.grade()) + " does not match order " +
                  std::to_string(order_));
    }
  }
}

void NambuStructure::record(const FiResult& result) {
  NambuStatus st;
  if (const auto* v = std::get_if<FiVerified>(&result)) {
    st.kind = NambuStatus::Kind::FiVerified;
    st.degree = v->degree;
  } else {
    st.kind = NambuStatus::Kind::FiRefuted;
    st.witness = std::get<FiRefuted>(result).witness;
  }
  history_.push_back(std::move(st));
}

NambuStructure top_degree_structure(const Chart& chart, const Poly& f) {
  std::vector<std::size_t> all(chart.dimension());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  MultiVec t = MultiVec::basis_tuple(chart, all) * f;
  return NambuStructure(chart, static_cast<unsigned>(all.size()), t);
}

NambuStructure vector_wedge_structure(const std::vector<MultiVec>& factors) {
  if (factors.size() < 2) throw Error("a wedge structure needs at least two factors");
  MultiVec t = factors.front();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (factors[i].grade() != 1) throw Error("wedge structure factors must be vector fields");
    if (i) t = wedge(t, factors[i]);
  }
  Provenance p;
  p.kind = Provenance::Kind::VectorWedge;
  p.vector_factors = factors;
  return NambuStructure(factors.front().chart(), static_cast<unsigned>(factors.size()), t, std::move(p));
}

NambuStructure structure_wedge(const NambuStructure& a, const NambuStructure& b) {
  require_same_chart(a.chart(), b.chart());
  Provenance p;
  p.kind = Provenance::Kind::StructureWedge;
  p.structure_factors = {std::make_shared<const NambuStructure>(a), std::make_shared<const NambuStructure>(b)};
  return NambuStructure(a.chart(), a.order() + b.order(), wedge(a.tensor(), b.tensor()), std::move(p));
}

NambuStructure subordinate_structure(const NambuStructure& s, const Form& alpha) {
  return NambuStructure(s.chart(), s.order() - 1, interior<FieldKind::Vector>(alpha, s.tensor()));
}

namespace {

void require_arity(const NambuStructure& s, std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(std::string(what) + " of an order-" + std::to_string(s.order()) + " structure needs " +
                std::to_string(want) + " arguments, got " + std::to_string(got));
  }
}

std::vector<Form> differentials(std::span<const Poly> fs) {
  std::vector<Form> out;
  out.reserve(fs.size());
  for (const auto& f : fs) out.push_back(differential(f));
  return out;
}

}  // namespace

Poly nambu_bracket(const NambuStructure& s, std::span<const Poly> fs) {
  require_arity(s, fs.size(), s.order(), "bracket");
  for (const auto& f : fs) require_same_chart(s.chart(), f.chart());
  const auto dfs = differentials(fs);
  return evaluate<FieldKind::Vector>(s.tensor(), dfs);
}

MultiVec hamiltonian_field(const NambuStructure& s, std::span<const Poly> fs) {
  require_arity(s, fs.size(), s.order() - 1, "Hamiltonian field");
  for (const auto& f : fs) require_same_chart(s.chart(), f.chart());
  const auto dfs = differentials(fs);
  return interior_sequence<FieldKind::Vector>(dfs, s.tensor());
}

MultiVec sharp(const NambuStructure& s, std::span<const Form> alphas) {
  require_arity(s, alphas.size(), s.order() - 1, "sharp map");
  for (const auto& a : alphas) {
    if (a.grade() != 1) throw Error("sharp map arguments must be 1-forms");
  }
  return interior_sequence<FieldKind::Vector>(alphas, s.tensor());
}

Poly fi_defect(const NambuStructure& s, std::span<const Poly> fs, std::span<const Poly> gs) {
  const unsigned n = s.order();
  require_arity(s, fs.size(), n - 1, "Fundamental identity f-slot");
  require_arity(s, gs.size(), n, "Fundamental identity g-slot");
  std::vector<Poly> args(fs.begin(), fs.end());
  args.push_back(nambu_bracket(s, gs));
  Poly defect = nambu_bracket(s, args);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<Poly> inner(fs.begin(), fs.end());
    inner.push_back(gs[k]);
    std::vector<Poly> outer(gs.begin(), gs.end());
    outer[k] = nambu_bracket(s, inner);
    defect -= nambu_bracket(s, outer);
  }
  return defect;
}

std::vector<std::vector<std::size_t>> sorted_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k > n) return out;
  std::vector<std::size_t> cur(k);
  for (std::size_t i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(cur);
    std::size_t i = k;
    while (i > 0 && cur[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::vector<Poly> monomial_family(const Chart& chart, unsigned degree) {
  std::vector<Poly> out;
  const std::size_t m = chart.dimension();
  std::vector<unsigned> exps(m, 0);
  // Exponent vectors of a fixed degree, first coordinate's exponent descending.
  std::function<void(std::size_t, unsigned)> rec = [&](std::size_t i, unsigned left) {
    if (i + 1 == m) {
      exps[i] = left;
      Monomial mono;
      for (std::size_t j = 0; j < m; ++j) mono.set_exponent(j, exps[j]);
      out.push_back(Poly::monomial(chart, mono, Rat(1)));
      return;
    }
    for (unsigned e = left + 1; e-- > 0;) {
      exps[i] = e;
      rec(i + 1, left - e);
    }
  };
  for (unsigned d = 1; d <= degree; ++d) rec(0, d);
  return out;
}

namespace {

// Dense vector field: one coefficient per coordinate.
using Dense = std::vector<Poly>;

Dense to_dense(const MultiVec& x, const Chart& chart) {
  Dense out(chart.dimension(), Poly(chart));
  for (const auto& [m, c] : x.components()) out[static_cast<std::size_t>(std::countr_zero(m))] = c;
  return out;
}

bool all_zero(const Dense& v) {
  return std::all_of(v.begin(), v.end(), [](const Poly& p) { return p.is_zero(); });
}

// X(h) = sum_j X^j d_j h, accumulated into `acc` with a sign.
void apply_into(PolyBuilder& acc, const Dense& x, const std::vector<Poly>& dh, int sign) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j].is_zero() && !dh[j].is_zero()) acc.add_product(x[j], dh[j], sign);
  }
}

std::vector<Poly> gradient(const Poly& h, const Chart& chart) {
  std::vector<Poly> out;
  out.reserve(chart.dimension());
  for (std::size_t i = 0; i < chart.dimension(); ++i) out.push_back(h.derivative(i));
  return out;
}

// Tables shared by the sweeps over a monomial family.
struct Sweep {
  const NambuStructure& s;
  Chart chart;
  std::size_t m;
  unsigned n;
  std::vector<Poly> family;
  std::vector<std::vector<Poly>> family_grad;
  std::vector<std::vector<std::size_t>> f_tuples;  // sorted (n-1)-subsets
  std::map<std::vector<std::size_t>, std::size_t> f_index;

  Sweep(const NambuStructure& st, unsigned degree)
      : s(st), chart(st.chart()), m(chart.dimension()), n(st.order()),
        family(monomial_family(chart, degree)) {
    for (const auto& g : family) family_grad.push_back(gradient(g, chart));
    f_tuples = sorted_subsets(family.size(), n - 1);
    for (std::size_t i = 0; i < f_tuples.size(); ++i) f_index.emplace(f_tuples[i], i);
  }

  std::vector<Poly> pick(const std::vector<std::size_t>& idx) const {
    std::vector<Poly> out;
    for (auto i : idx) out.push_back(family[i]);
    return out;
  }

  // Bracket cofactors c_j = {t_1, .., t_{n-1}, x_j}, by the determinant pairing.
  Dense cofactors(const std::vector<std::size_t>& t) const {
    Dense out(m, Poly(chart));
    std::vector<Poly> args = pick(t);
    args.push_back(Poly(chart));
    for (std::size_t j = 0; j < m; ++j) {
      args.back() = Poly::coordinate(chart, j);
      out[j] = nambu_bracket(s, args);
    }
    return out;
  }

  // Face indices of an n-tuple: position of g minus g_k among f_tuples.
  std::vector<std::size_t> faces(const std::vector<std::size_t>& g) const {
    std::vector<std::size_t> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<std::size_t> face;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) face.push_back(g[j]);
      }
      out[k] = f_index.at(face);
    }
    return out;
  }
};

// Bracket-route data for the inner g loop.
struct BracketTables {
  std::vector<Dense> cof;                          // per (n-1)-tuple
  std::vector<std::vector<std::size_t>> g_tuples;  // sorted n-subsets
  std::vector<std::vector<std::size_t>> g_faces;
  std::vector<std::vector<Poly>> g_bracket_grad;  // gradient of {g}

  explicit BracketTables(const Sweep& sw) {
    cof.reserve(sw.f_tuples.size());
    for (const auto& t : sw.f_tuples) cof.push_back(sw.cofactors(t));
    g_tuples = sorted_subsets(sw.family.size(), sw.n);
    for (const auto& g : g_tuples) {
      g_faces.push_back(sw.faces(g));
      // {g_1..g_n} = {g_1..g_{n-1}, g_n}
      PolyBuilder acc(sw.chart);
      apply_into(acc, cof[g_faces.back()[sw.n - 1]], sw.family_grad[g[sw.n - 1]], 1);
      g_bracket_grad.push_back(gradient(acc.build(), sw.chart));
    }
  }
};

// Per f-tuple: gradients of {f.., a} for every family member a.
std::vector<std::vector<Poly>> image_gradients(const Sweep& sw, const Dense& xf) {
  std::vector<std::vector<Poly>> out;
  out.reserve(sw.family.size());
  for (std::size_t a = 0; a < sw.family.size(); ++a) {
    PolyBuilder acc(sw.chart);
    apply_into(acc, xf, sw.family_grad[a], 1);
    out.push_back(gradient(acc.build(), sw.chart));
  }
  return out;
}

// Defect for one (f, g) pair, left in `acc` (canonical once sums_to_zero ran).
bool pair_defect_zero(PolyBuilder& acc, const Sweep& sw, const BracketTables& bt, const Dense& cf,
                      const std::vector<std::vector<Poly>>& img_grad, std::size_t gi) {
  acc.clear();
  apply_into(acc, cf, bt.g_bracket_grad[gi], 1);
  const auto& g = bt.g_tuples[gi];
  const auto& faces = bt.g_faces[gi];
  for (std::size_t k = 0; k < sw.n; ++k) {
    // Slot k (0-based) moved to the end: n-1-k transpositions.
    const int sign = (sw.n - 1 - k) % 2 ? 1 : -1;  // defect subtracts the RHS
    apply_into(acc, bt.cof[faces[k]], img_grad[g[k]], sign);
  }
  return acc.sums_to_zero();
}

}  // namespace

FiResult fi_check(const NambuStructure& s, unsigned degree) {
  if (degree < 1) throw Error("fi_check needs degree >= 1");
  Sweep sw(s, degree);
  if (s.tensor().is_zero()) {
    return FiVerified{degree, sw.f_tuples.size() * sorted_subsets(sw.family.size(), sw.n).size()};
  }
  BracketTables bt(sw);
  PolyBuilder acc(sw.chart);
  std::size_t swept = 0;
  for (std::size_t fi = 0; fi < sw.f_tuples.size(); ++fi) {
    const Dense& cf = bt.cof[fi];
    if (all_zero(cf)) {
      // Every term of the identity contains X_f, so each defect is 0.
      swept += bt.g_tuples.size();
      continue;
    }
    const auto img_grad = image_gradients(sw, cf);
    for (std::size_t gi = 0; gi < bt.g_tuples.size(); ++gi) {
      ++swept;
      if (pair_defect_zero(acc, sw, bt, cf, img_grad, gi)) continue;
      FiWitness w{sw.pick(sw.f_tuples[fi]), sw.pick(bt.g_tuples[gi]), acc.build()};
      return FiRefuted{std::move(w)};
    }
  }
  return FiVerified{degree, swept};
}

FiFormulations fi_formulations(const NambuStructure& s, unsigned degree) {
  if (degree < 1) throw Error("fi_formulations needs degree >= 1");
  FiFormulations out;
  Sweep sw(s, degree);
  BracketTables bt(sw);
  const std::size_t T = sw.f_tuples.size();

  // Hamiltonian fields through iterated interior products, with gradients
  // of their coefficients.
  std::vector<Dense> ham;
  std::vector<std::vector<std::vector<Poly>>> ham_grad;
  for (const auto& t : sw.f_tuples) {
    ham.push_back(to_dense(hamiltonian_field(s, sw.pick(t)), sw.chart));
    std::vector<std::vector<Poly>> g;
    for (const auto& c : ham.back()) g.push_back(gradient(c, sw.chart));
    ham_grad.push_back(std::move(g));
  }

  // Hamiltonian of the tuple t with slot k replaced by coordinate x_i, as
  // (index, sign); sign 0 when the tuple degenerates. Family member i is x_i.
  auto replaced = [&](const std::vector<std::size_t>& t, std::size_t k, std::size_t i) -> std::pair<std::size_t, int> {
    std::vector<std::size_t> u = t;
    u[k] = i;
    int sign = 1;
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = a + 1; b < u.size(); ++b) {
        if (u[a] == u[b]) return {0, 0};
        if (u[a] > u[b]) sign = -sign;
      }
    }
    std::sort(u.begin(), u.end());
    return {sw.f_index.at(u), sign};
  };

  PolyBuilder acc(sw.chart);
  std::vector<PolyBuilder> comp(sw.m, PolyBuilder(sw.chart));
  for (std::size_t fi = 0; fi < T; ++fi) {
    ++out.f_tuples;
    const Dense& cf = bt.cof[fi];

    bool bracket_ok = true;
    if (!all_zero(cf)) {
      const auto img_grad = image_gradients(sw, cf);
      for (std::size_t gi = 0; gi < bt.g_tuples.size() && bracket_ok; ++gi) {
        bracket_ok = pair_defect_zero(acc, sw, bt, cf, img_grad, gi);
      }
    }

    // [X_f, X_g] = sum_k X_{g_1 .. {f, g_k} .. g_{n-1}}, expanding the
    // replaced slot through d{f, g_k} = sum_i d_i{f, g_k} dx_i.
    bool ham_ok = true;
    const Dense& xf = ham[fi];
    if (!all_zero(xf)) {
      std::vector<std::vector<Poly>> h_grad(sw.family.size());
      for (std::size_t a = 0; a < sw.family.size(); ++a) {
        PolyBuilder hb(sw.chart);
        apply_into(hb, xf, sw.family_grad[a], 1);
        h_grad[a] = gradient(hb.build(), sw.chart);
      }
      for (std::size_t gi = 0; gi < T && ham_ok; ++gi) {
        const Dense& xg = ham[gi];
        for (auto& b : comp) b.clear();
        for (std::size_t j = 0; j < sw.m; ++j) {
          apply_into(comp[j], xf, ham_grad[gi][j], 1);
          apply_into(comp[j], xg, ham_grad[fi][j], -1);
        }
        const auto& g = sw.f_tuples[gi];
        for (std::size_t k = 0; k < g.size(); ++k) {
          const auto& dh = h_grad[g[k]];
          for (std::size_t i = 0; i < sw.m; ++i) {
            if (dh[i].is_zero()) continue;
            auto [idx, sign] = replaced(g, k, i);
            if (!sign) continue;
            for (std::size_t j = 0; j < sw.m; ++j) {
              if (!ham[idx][j].is_zero()) comp[j].add_product(dh[i], ham[idx][j], -sign);
            }
          }
        }
        for (auto& b : comp) ham_ok = ham_ok && b.sums_to_zero();
      }
    }

    MultiVec lie = schouten(hamiltonian_field(s, sw.pick(sw.f_tuples[fi])), s.tensor());
    const bool lie_ok = lie.is_zero();

    out.bracket_failures += !bracket_ok;
    out.hamiltonian_failures += !ham_ok;
    out.lie_failures += !lie_ok;
    if (bracket_ok != ham_ok || ham_ok != lie_ok) {
      ++out.disagreements;
      if (!out.first_disagreement) out.first_disagreement = sw.pick(sw.f_tuples[fi]);
    }
  }
  return out;
}

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::TopDegree: return "top_degree";
    case Certificate::CommutingDecomposable: return "commuting_decomposable";
    case Certificate::ProductOfCertified: return "product_of_certified";
    case Certificate::None: return "none";
  }
  return "none";
}

namespace {

// Coordinates a field touches through its indices or its coefficients.
IndexMask support(const MultiVec& t) {
  IndexMask out = 0;
  for (const auto& [m, c] : t.components()) {
    out |= m;
    for (std::size_t i = 0; i < t.chart().dimension(); ++i) {
      if (c.depends_on(i)) out |= IndexMask{1} << i;
    }
  }
  return out;
}

// Certificate of a factor living on the coordinate block it touches.
Certificate certify_on_block(const NambuStructure& s, IndexMask block) {
  if (mask_grade(block) == s.order() && !s.tensor().is_zero()) {
    bool only_block = (support(s.tensor()) & ~block) == 0;
    if (only_block) return Certificate::TopDegree;
  }
  return sufficient_nambu(s);
}

}  // namespace

Certificate sufficient_nambu(const NambuStructure& s) {
  if (s.order() == s.chart().dimension()) return Certificate::TopDegree;
  const Provenance& p = s.provenance();
  if (p.kind == Provenance::Kind::VectorWedge && p.vector_factors.size() == s.order()) {
    MultiVec w = MultiVec::scalar(Poly(s.chart(), 1));
    for (const auto& f : p.vector_factors) w = wedge(w, f);
    if (!(w == s.tensor())) return Certificate::None;
    for (std::size_t i = 0; i < p.vector_factors.size(); ++i) {
      for (std::size_t j = i + 1; j < p.vector_factors.size(); ++j) {
        if (!schouten(p.vector_factors[i], p.vector_factors[j]).is_zero()) return Certificate::None;
      }
    }
    return Certificate::CommutingDecomposable;
  }
  if (p.kind == Provenance::Kind::StructureWedge && p.structure_factors.size() == 2) {
    const auto& a = *p.structure_factors[0];
    const auto& b = *p.structure_factors[1];
    if (!(wedge(a.tensor(), b.tensor()) == s.tensor())) return Certificate::None;
    const IndexMask sa = support(a.tensor()), sb = support(b.tensor());
    if (sa & sb) return Certificate::None;
    if (certify_on_block(a, sa) == Certificate::None) return Certificate::None;
    if (certify_on_block(b, sb) == Certificate::None) return Certificate::None;
    return Certificate::ProductOfCertified;
  }
  return Certificate::None;
}

MultiVec plucker_defect(const NambuStructure& s, const Form& omega) {
  return wedge(contract(omega, s.tensor()), s.tensor());
}

PluckerResult plucker_check(const NambuStructure& s) {
  PluckerResult out;
  for (const auto& idx : sorted_subsets(s.chart().dimension(), s.order() - 1)) {
    Form omega = Form::basis_tuple(s.chart(), idx);
    MultiVec w = plucker_defect(s, omega);
    if (!w.is_zero()) {
      out.decomposable = false;
      out.omega = std::move(omega);
      out.wedge = std::move(w);
      return out;
    }
  }
  return out;
}

std::size_t rational_rank(std::vector<std::vector<Rat>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c].is_zero()) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c].is_zero()) continue;
      const Rat factor = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

std::size_t distribution_rank(const NambuStructure& s, std::span<const Rat> point) {
  const Chart& chart = s.chart();
  if (point.size() != chart.dimension()) throw Error("point dimension does not match chart");
  const MultiVec at = at_point(s.tensor(), point);
  std::vector<std::vector<Rat>> rows;
  for (const auto& idx : sorted_subsets(chart.dimension(), s.order() - 1)) {
    std::vector<Form> alphas;
    for (auto i : idx) alphas.push_back(Form::basis(chart, i));
    MultiVec v = interior_sequence<FieldKind::Vector>(alphas, at);
    std::vector<Rat> row(chart.dimension());
    for (const auto& [m, c] : v.components()) row[static_cast<std::size_t>(std::countr_zero(m))] = c.constant_term();
    rows.push_back(std::move(row));
  }
  return rational_rank(std::move(rows));
}

}  // namespace nambu
