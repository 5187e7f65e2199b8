// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "nambu/cartan.hpp"
#include "nambu/error.hpp"
#include "nambu/groupoid.hpp"
#include "nambu/runner.hpp"
#include "support/corpus.hpp"
#include "support/fields.hpp"
#include "support/oracles.hpp"

using namespace nambu;
using namespace testing_fields;

namespace {

/// Collects the first failed requirement of a criterion.
class Tally {
 public:
  bool require(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && !failure_) failure_ = what;
    return ok;
  }
  bool passed() const { return !failure_; }
  std::size_t checks() const { return checks_; }
  const std::string& failure() const { return *failure_; }

 private:
  std::size_t checks_ = 0;
  std::optional<std::string> failure_;
};

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome finish(const Tally& t, const std::string& summary) {
  if (t.passed()) return {true, summary + " (" + std::to_string(t.checks()) + " checks)"};
  return {false, t.failure()};
}

NambuStructure vol(const Chart& c, const Poly& f) { return top_degree_structure(c, f); }

// L_X on forms by the coordinate expansion X(w_I) dx^I + sum_j w_I dx^i1 ^ .. d(X^ij) .. ^ dx^ik.
Form lie_by_components(const MultiVec& x, const Form& w) {
  const Chart& c = w.chart();
  Form out(c, w.grade());
  std::vector<Poly> xc(c.dimension(), Poly(c));
  for (const auto& [m, coef] : x.components()) xc[mask_indices(m).front()] = coef;
  for (const auto& [m, coef] : w.components()) {
    Poly along(c);
    for (std::size_t k = 0; k < c.dimension(); ++k) along += xc[k] * coef.derivative(k);
    const auto idx = mask_indices(m);
    out += Form::basis_tuple(c, idx) * along;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      Form term = Form::scalar(coef);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        term = wedge(term, r == j ? differential(xc[idx[r]]) : Form::basis(c, idx[r]));
      }
      out += term;
    }
  }
  return out;
}

Outcome calculus_kernel() {
  Tally t;
  const Chart c = euclid(4);
  Sampler s(101);
  for (int i = 0; i < 200; ++i) {
    auto w = random_field<FieldKind::Form>(s, c, static_cast<unsigned>(s.range(0, 3)), 2);
    auto dd = de_rham_d(de_rham_d(w));
    t.require(dd.is_zero(), "d d w = " + dd.to_string() + " for w = " + w.to_string());
  }
  for (int i = 0; i < 200; ++i) {
    auto x = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto y = random_field<FieldKind::Vector>(s, c, 1, 2);
    auto w = random_field<FieldKind::Form>(s, c, static_cast<unsigned>(s.range(1, 3)), 2);
    const Form lie = lie_derivative(x, w);
    t.require(lie == lie_by_components(x, w), "L_X w disagrees with its coordinate expansion for w = " + w.to_string());
    // [L_X, iota_Y] = iota_[X,Y]
    const Form comm = lie_derivative(x, interior<FieldKind::Form>(y, w)) - interior<FieldKind::Form>(y, lie);
    t.require(comm == interior<FieldKind::Form>(schouten(x, y), w), "[L_X, iota_Y] != iota_[X,Y] for w = " + w.to_string());
  }
  for (int i = 0; i < 200; ++i) {
    const unsigned p = static_cast<unsigned>(s.range(1, 3)), q = static_cast<unsigned>(s.range(1, 3));
    const unsigned r = static_cast<unsigned>(s.range(1, 3));
    auto P = random_field<FieldKind::Vector>(s, c, p, 2, 2);
    auto Q = random_field<FieldKind::Vector>(s, c, q, 2, 2);
    auto R = random_field<FieldKind::Vector>(s, c, r, 2, 2);
    MultiVec rhs = schouten(schouten(P, Q), R);
    MultiVec third = schouten(Q, schouten(P, R));
    rhs += (((p + 1) * (q + 1)) % 2) ? -third : third;
    t.require(schouten(P, schouten(Q, R)) == rhs, "graded Jacobi fails for P = " + P.to_string());
  }
  return finish(t, "d^2 = 0, Cartan, Schouten Jacobi on 200 instances each");
}

Outcome fi_positive_family() {
  Tally t;
  const Chart c3 = euclid(3), c4 = euclid(4), c5 = euclid(5);
  const std::vector<std::pair<std::string, NambuStructure>> family = {
      {"vol R3", vol(c3, Poly(c3, 1))},
      {"(1+x1) vol R3", vol(c3, Poly(c3, 1) + X(c3, 1))},
      {"@x1^@x2^x4@x3 on R4", NambuStructure(vec(c4, {1, 2, 3}, X(c4, 4)))},
      {"iota_dx1 vol R3", subordinate_structure(vol(c3, Poly(c3, 1)), Form::basis(c3, 0))},
      {"@x1^@x2^@x4^@x5 on R5", NambuStructure(vec(c5, {1, 2, 4, 5}))},
  };
  t.require(family[3].second.tensor() == vec(c3, {2, 3}), "subordinate structure is not @x2^@x3");
  std::size_t tuples = 0;
  for (const auto& [name, s] : family) {
    const FiResult r = fi_check(s, 2);
    if (t.require(std::holds_alternative<FiVerified>(r), name + " refuted: " +
                                                             (std::holds_alternative<FiRefuted>(r)
                                                                  ? std::get<FiRefuted>(r).witness.to_string()
                                                                  : std::string()))) {
      tuples += std::get<FiVerified>(r).tuples;
    }
    const FiFormulations f = fi_formulations(s, 2);
    t.require(f.f_tuples > 0 && f.agree(), name + ": formulations disagree on " + std::to_string(f.disagreements) +
                                               " f-tuples");
    t.require(f.bracket_failures == 0 && f.hamiltonian_failures == 0 && f.lie_failures == 0,
              name + ": a formulation failed");
  }
  return finish(t, "5 structures VERIFIED_ON_FAMILY over " + std::to_string(tuples) + " tuple pairs");
}

Outcome fi_refutation() {
  Tally t;
  const Chart c = euclid(6);
  const NambuStructure s(vec(c, {1, 2, 3}) + vec(c, {4, 5, 6}));
  const FiResult r = fi_check(s, 2);
  std::string witness;
  if (t.require(std::holds_alternative<FiRefuted>(r), "R6 sum verified")) {
    const FiWitness& w = std::get<FiRefuted>(r).witness;
    witness = w.to_string();
    t.require(!w.defect.is_zero(), "witness defect is zero");
    t.require(fi_defect(s, w.fs, w.gs) == w.defect, "witness does not re-verify: " + witness);
    for (const auto& f : w.fs) t.require(f.degree() <= 2, "witness function above degree 2");
    for (const auto& g : w.gs) t.require(g.degree() <= 2, "witness function above degree 2");
  }
  const PluckerResult p = plucker_check(s);
  if (t.require(!p.decomposable && p.omega && p.wedge, "plucker_check found no witness")) {
    t.require(!p.wedge->is_zero() && plucker_defect(s, *p.omega) == *p.wedge, "plucker witness does not re-verify");
  }
  return finish(t, "REFUTED with " + witness);
}

PolyMap scaling(const Chart& c, const Rat& k) {
  std::vector<Poly> comps;
  for (std::size_t i = 0; i < c.dimension(); ++i) comps.push_back(Poly::coordinate(c, i) * k);
  return PolyMap(c, c, comps);
}

Poly jacobian_det(const PolyMap& phi) {
  const std::size_t m = phi.source().dimension();
  std::vector<std::vector<Poly>> J(m, std::vector<Poly>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) J[j][i] = phi.comps()[j].derivative(i);
  }
  return oracle::permutation_det(J);
}

// Two shears x_k += p(other coordinates): Jacobian determinant 1.
PolyMap random_shear(Sampler& s, const Chart& c) {
  std::vector<Poly> comps;
  for (std::size_t i = 0; i < c.dimension(); ++i) comps.push_back(Poly::coordinate(c, i));
  for (int round = 0; round < 2; ++round) {
    const auto k = static_cast<std::size_t>(s.range(0, 2));
    const Chart sub("S", {c.coord((k + 1) % 3), c.coord((k + 2) % 3)});
    const Poly p = s.poly(sub, 1, 2);
    const std::vector<Poly> into{comps[(k + 1) % 3], comps[(k + 2) % 3]};
    comps[k] = comps[k] + (p.is_constant() ? Poly(c, p.constant_term()) : substitute(p, into, c));
  }
  return PolyMap(c, c, comps);
}

Outcome graph_biconditional() {
  Tally t;
  const Chart c = euclid(3);
  const NambuStructure v = vol(c, Poly(c, 1));
  const auto id = graph_equivalence_check(PolyMap::identity(c), v, v);
  t.require(id.related.kind == RelatednessResult::Kind::Related && id.graph.coisotropic && id.agree,
            "identity map is not positive on both routes");
  const auto twice = graph_equivalence_check(scaling(c, 2), v, v);
  t.require(twice.related.kind != RelatednessResult::Kind::Related && !twice.graph.coisotropic && twice.agree,
            "x -> 2x is not negative on both routes");
  t.require(twice.graph.witness && twice.related.witness, "x -> 2x lacks witnesses");
  Sampler s(404);
  int agree = 0, positives = 0;
  for (int i = 0; i < 20; ++i) {
    PolyMap phi;
    if (i % 2) {
      phi = random_shear(s, c);
    } else {
      std::vector<Poly> comps;
      for (int j = 0; j < 3; ++j) comps.push_back(s.poly(c, 2, 3));
      phi = PolyMap(c, c, comps);
    }
    const auto ge = graph_equivalence_check(phi, v, v);
    // Oracle: vol is phi-related to vol iff det J = 1.
    const bool expected = jacobian_det(phi) == Poly(c, 1);
    const bool related = ge.related.kind == RelatednessResult::Kind::Related;
    agree += ge.agree && related == expected && ge.graph.coisotropic == expected;
    positives += expected;
    for (const auto& comp : phi.comps()) t.require(comp.degree() <= 2, "random map above degree 2");
  }
  t.require(agree == 20, "random maps: agreement " + std::to_string(agree) + "/20");
  t.require(positives > 0 && positives < 20, "random maps do not cover both verdicts");
  return finish(t, "identity positive, x -> 2x negative, random maps 20/20 (" + std::to_string(positives) +
                       " related)");
}

PolyMap projection(const Chart& src, const Chart& tgt) {
  std::vector<Poly> comps;
  for (std::size_t i = 0; i < tgt.dimension(); ++i) comps.push_back(Poly::coordinate(src, i));
  return PolyMap(src, tgt, comps);
}

bool mentions(const Poly& p, std::size_t coord) { return !p.derivative(coord).is_zero(); }

Outcome coinduction() {
  Tally t;
  const Chart c4 = euclid(4), c3 = euclid(3, "T3");
  const PolyMap phi = projection(c4, c3);
  const SolvedSubmanifold r = r_phi_submanifold(phi);
  const NambuStructure good(vec(c4, {1, 2, 3}));
  const auto ok = coinduce(phi, good, 2);
  if (t.require(std::holds_alternative<Coinduced>(ok), "vol on R4 projection obstructed")) {
    t.require(std::get<Coinduced>(ok).structure.tensor() == volume(c3), "coinduced structure is not vol R3");
  }
  t.require(coisotropy_check(product_structure(good, good, 1), r).coisotropic, "R(phi) not coisotropic for vol");

  const NambuStructure bad(vec(c4, {1, 2, 3}, X(c4, 4)));
  const auto ob = coinduce(phi, bad, 2);
  const auto rc = coisotropy_check(product_structure(bad, bad, 1), r);
  std::string witness;
  if (t.require(std::holds_alternative<CoinduceObstruction>(ob), "x4 vol coinduced")) {
    const auto& o = std::get<CoinduceObstruction>(ob);
    witness = o.to_string();
    t.require(mentions(o.bracket, 3), "obstruction bracket does not depend on the fiber: " + witness);
  }
  if (t.require(!rc.coisotropic && rc.witness, "R(phi) coisotropic for x4 vol")) {
    // Both witnesses detect the fiber coordinate: x4 on one copy, x4 - x4' on R(phi).
    t.require(mentions(rc.witness->reduced, 3) || mentions(rc.witness->reduced, 7),
              "R(phi) witness does not involve the fiber: " + rc.witness->to_string());
  }
  return finish(t, "vol R3 coinduced, x4 vol obstructed with " + witness);
}

Outcome pair_groupoid() {
  Tally t;
  const Chart c = euclid(3);
  const NambuStructure base = vol(c, Poly(c, 1));
  const PairGroupoid pg(base);
  const GroupoidModel model = pg;
  const auto m = multiplicativity_check(model, pg.structure());
  t.require(m.multiplicative && m.graph.coisotropic, "multiplication graph not coisotropic");
  const auto diag = theorem_diagnostics(model, pg.structure());
  for (const char* name : {"unit_coisotropic", "base_dependence", "mixed_contraction"}) {
    const CheckVerdict* v = diag.find(name);
    t.require(v && v->pass, std::string("diagnostic ") + name + " fails");
  }
  const auto inv = inversion_check(model, pg.structure());
  t.require(inv.identity, "i_* Pi != (-1)^{n-1} Pi");
  const auto b = base_structure(model, pg.structure(), 2);
  if (t.require(!b.is_point(), "base structure is a point")) {
    t.require(b.structure->tensor() == base.tensor(), "base structure is " + b.structure->tensor().to_string());
    const CheckVerdict sr = sign_relation_check(pg, *b.structure);
    t.require(sr.pass, "sign relation fails: " + sr.counterexample.value_or(""));
  }
  t.require(b.target_anti, "beta is not anti Nambu-Poisson");
  return finish(t, "multiplicative, diagnostics, inversion, base vol R3, sign relation");
}

Outcome nambu_lie_group() {
  Tally t;
  const Chart c = euclid(3);
  const GroupLaw g = GroupLaw::additive(c);
  const GroupoidModel model = g;
  const NambuStructure s = vol(c, X(c, 1));
  const auto m = multiplicativity_check(model, s);
  t.require(m.multiplicative && m.graph.coisotropic, "graph route fails for x1 vol");
  t.require(m.lie_group_identity == true, "r_*/l_* route fails for x1 vol");
  t.require(m.agree, "routes disagree for x1 vol");
  t.require(at_point(s.tensor(), g.unit()).is_zero(), "Pi(e) != 0 for x1 vol");
  const FilippovTable table = pointwise_filippov(s, g.unit());
  t.require(table.to_string() == "[e1,e2,e3] = e1", "Filippov table is " + table.to_string());
  const auto fi = table.fundamental_identity_failure();
  t.require(!fi, "Filippov table fails the fundamental identity at " + fi.value_or(""));

  const NambuStructure constant = vol(c, Poly(c, 1));
  const auto bad = multiplicativity_check(model, constant);
  t.require(!bad.multiplicative && bad.lie_group_identity == false && bad.agree, "constant vol is multiplicative");
  const auto diag = theorem_diagnostics(model, constant);
  const CheckVerdict* unit = diag.find("unit_coisotropic");
  t.require(unit && !unit->pass && unit->counterexample, "constant vol lacks a Pi(e) != 0 witness");
  t.require(!at_point(constant.tensor(), g.unit()).is_zero(), "Pi(e) = 0 for constant vol");
  return finish(t, "x1 vol multiplicative on both routes, [e1,e2,e3] = e1, constant vol fails with " +
                       (unit && unit->counterexample ? *unit->counterexample : std::string("?")));
}

Outcome form_bracket_bialgebroid() {
  Tally t;
  const Chart c4 = euclid(4);
  Sampler s(808);
  for (int i = 0; i < 200; ++i) {
    const unsigned n = static_cast<unsigned>(s.range(2, 4));
    const NambuStructure st(c4, n, random_field<FieldKind::Vector>(s, c4, n, 2, 2));
    std::vector<Form> a;
    for (unsigned k = 0; k < n; ++k) a.push_back(random_field<FieldKind::Form>(s, c4, 1, 2));
    t.require(form_bracket(st, a) == form_bracket_lie(st, a), "displayed forms disagree for " + st.tensor().to_string());
  }
  const Chart c = euclid(3);
  for (const auto& st : {vol(c, Poly(c, 1)), vol(c, X(c, 1))}) {
    const std::string name = st.tensor().to_string();
    const CheckReport props = form_bracket_properties(st, 10, 2, 5);
    t.require(props.passed() && props.verdicts.size() >= 5, "properties fail for " + name);
    const CheckReport w = wlfb_check(st, 2, 10, 5);
    std::size_t asserted = 0;
    for (const auto& v : w.verdicts) asserted += v.asserted;
    t.require(w.passed() && asserted >= 5, "wlfb fails for " + name);
  }
  const PairGroupoid pg(vol(c, Poly(c, 1)));
  const CheckReport conormal = conormal_restriction_check(pg.structure(), pg.units(), 10, 5);
  t.require(conormal.passed(), "conormal restriction fails on the diagonal");
  const CheckVerdict* ext = conormal.find("extension_independent");
  t.require(ext && ext->pass && ext->asserted, "extension independence not established");
  return finish(t, "200 bracket pairs agree, properties and wlfb for vol and x1 vol, diagonal conormal");
}

Outcome subgroupoid_chain() {
  Tally t;
  const Chart c = euclid(3);
  const PairGroupoid pg(vol(c, Poly(c, 1)));
  const CheckReport r = coiso_subgroupoid_check(pg, SolvedSubmanifold(c, {{2, Poly(c)}}), 8, 9);
  for (const char* name : {"subgroupoid_coisotropic", "subalgebroid", "base_coisotropic"}) {
    const CheckVerdict* v = r.find(name);
    t.require(v && v->pass, std::string(name) + " fails for {x3 = 0}");
  }
  std::string rejection;
  try {
    coiso_subgroupoid_check(pg, SolvedSubmanifold(c, {{0, Poly(c)}, {1, Poly(c)}, {2, Poly(c)}}), 8, 9);
    t.require(false, "the point {0} was accepted");
  } catch (const Error& e) {
    rejection = e.what();
    t.require(rejection.find("Pi(d x1; d x2; d x3) = 1") != std::string::npos, "unexpected rejection: " + rejection);
  }
  return finish(t, "{x3 = 0} passes, point rejected with Pi(d x1; d x2; d x3) = 1");
}

Outcome cli_corpus() {
  Tally t;
  std::size_t witnesses = 0;
  for (const auto& entry : test::corpus()) {
    const std::string text = test::read_text(test::corpus_path(entry.stem));
    const Session s = parse_session(text);
    const std::string printed = print(s);
    t.require(parse_session(printed) == s && print(parse_session(printed)) == printed,
              entry.stem + ": parse/print round trip fails");
    const RunResult r = run(text, RunOptions{});
    t.require(r.exit_code() == entry.exit_code,
              entry.stem + ": exit " + std::to_string(r.exit_code()) + ", expected " + std::to_string(entry.exit_code));
    for (const Report& rep : reports_from_json(to_json(r, entry.stem, RunOptions{}))) {
      if (rep.verdict != Verdict::Fail && rep.verdict != Verdict::Refuted) continue;
      ++witnesses;
      const WitnessCheck w = verify_witness(rep);
      t.require(rep.witness && w.ok(), entry.stem + ": " + rep.command + ": " + w.detail);
    }
  }
  return finish(t, std::to_string(test::corpus().size()) + " files round-trip, " + std::to_string(witnesses) +
                       " witnesses replayed");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"calculus kernel", calculus_kernel},
      {"FI positive family", fi_positive_family},
      {"FI refutation", fi_refutation},
      {"graph biconditional", graph_biconditional},
      {"coinduction", coinduction},
      {"pair groupoid", pair_groupoid},
      {"Nambu-Lie group", nambu_lie_group},
      {"form bracket and bialgebroid", form_bracket_bialgebroid},
      {"coisotropic subgroupoid chain", subgroupoid_chain},
      {"CLI corpus", cli_corpus},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.2fs", secs);
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << i + 1 << ". " << criteria[i].first << ": " << o.detail << " ["
              << timing << "]" << std::endl;
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures ? 1 : 0;
}
