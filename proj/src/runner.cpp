#include "nambu/runner.hpp"

#include <chrono>
#include <map>
#include <set>

#include "json.hpp"
#include "nambu/cartan.hpp"
#include "nambu/error.hpp"
#include "nambu/formsbialg.hpp"
#include "nambu/groupoid.hpp"

namespace nambu {

namespace {

struct SemanticError : std::runtime_error {
  SemanticError(Location l, const std::string& m) : std::runtime_error(m), loc(l) {}
  Location loc;
};

[[noreturn]] void fail(Location loc, const std::string& msg) { throw SemanticError(loc, msg); }

struct Value {
  enum class Kind { Scalar, Vector, Form };
  Kind kind = Kind::Scalar;
  Poly scalar;
  MultiVec vec;
  Form form;
  Chart chart;

  static Value of(Poly p) {
    Value v;
    v.chart = p.chart();
    v.scalar = std::move(p);
    return v;
  }
  static Value of(MultiVec m) {
    Value v;
    v.kind = Kind::Vector;
    v.chart = m.chart();
    v.vec = std::move(m);
    return v;
  }
  static Value of(Form f) {
    Value v;
    v.kind = Kind::Form;
    v.chart = f.chart();
    v.form = std::move(f);
    return v;
  }

  bool is_zero() const {
    switch (kind) {
      case Kind::Scalar: return scalar.is_zero();
      case Kind::Vector: return vec.is_zero();
      case Kind::Form: return form.is_zero();
    }
    return false;
  }
  bool is_zero_scalar() const { return kind == Kind::Scalar && scalar.is_zero(); }
  std::string to_string() const {
    switch (kind) {
      case Kind::Scalar: return scalar.to_string();
      case Kind::Vector: return vec.to_string();
      case Kind::Form: return form.to_string();
    }
    return "";
  }
  std::string describe() const {
    switch (kind) {
      case Kind::Scalar: return "a polynomial";
      case Kind::Vector: return "a " + std::to_string(vec.grade()) + "-vector";
      case Kind::Form: return "a " + std::to_string(form.grade()) + "-form";
    }
    return "";
  }
  MultiVec as_multivec(Location loc) const {
    if (kind == Kind::Scalar) return MultiVec::scalar(scalar);
    if (kind == Kind::Vector) return vec;
    fail(loc, "expected a multivector, got " + describe());
  }
};

struct Binding {
  enum class Kind { Value, Sub, Map, Group, Pair };
  Kind kind = Kind::Value;
  Value value;
  std::string chart_name;
  std::optional<SolvedSubmanifold> sub;
  std::optional<PolyMap> map;
  std::optional<GroupLaw> group;
  std::optional<PairGroupoid> pair;
  std::string base_name;  // Pair
  std::size_t stmt = 0;
};

const char* kind_name(Binding::Kind k) {
  switch (k) {
    case Binding::Kind::Value: return "an expression";
    case Binding::Kind::Sub: return "a submanifold";
    case Binding::Kind::Map: return "a map";
    case Binding::Kind::Group: return "a group";
    case Binding::Kind::Pair: return "a pair groupoid";
  }
  return "?";
}

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::optional<std::string> value, witness, recheck;
  std::optional<std::uint64_t> seed;
};

Outcome pass(std::string value) {
  Outcome o;
  o.value = std::move(value);
  return o;
}

Outcome failed(std::string witness) {
  Outcome o;
  o.verdict = Verdict::Fail;
  o.witness = std::move(witness);
  return o;
}

std::string verdict_summary(const CheckReport& r) {
  std::string out;
  for (const auto& v : r.verdicts) {
    if (!v.asserted) continue;
    out += (out.empty() ? "" : ", ") + v.name + (v.pass ? " ok" : " fails");
  }
  return out;
}

Outcome from_check_report(const CheckReport& r, bool randomized = true) {
  Outcome o;
  if (randomized) o.seed = r.seed;
  if (r.precondition_error) {
    o.verdict = Verdict::Fail;
    o.witness = "precondition: " + *r.precondition_error;
    return o;
  }
  o.value = verdict_summary(r);
  if (const auto* f = r.first_failure()) {
    o.verdict = Verdict::Fail;
    o.witness = f->name + ": " + f->counterexample.value_or("");
  }
  return o;
}

std::string join(const std::vector<std::string>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

template <typename T>
std::string list_text(const std::vector<T>& xs) {
  std::vector<std::string> parts;
  for (const auto& x : xs) parts.push_back(x.to_string());
  return "(" + join(parts, "; ") + ")";
}

int twist(unsigned n) { return n % 2 ? 1 : -1; }

class Runner {
 public:
  Runner(const Session& s, const RunOptions& o, RunResult& out)
      : session_(s), opt_(o), out_(out), deps_(s.statements.size()), scope_(s.statements.size()) {}

  void run() {
    for (std::size_t i = 0; i < session_.statements.size(); ++i) {
      const Statement& st = session_.statements[i];
      index_ = i;
      const auto start = std::chrono::steady_clock::now();
      Report rep;
      try {
        std::optional<Outcome> outcome = execute(st, rep);
        if (!outcome) continue;
        rep.verdict = outcome->verdict;
        rep.value = outcome->value;
        rep.witness = outcome->witness;
        rep.recheck = outcome->recheck;
        rep.seed = outcome->seed;
      } catch (const SemanticError& e) {
        error_report(rep, st, e.loc, e.what());
      } catch (const Error& e) {
        error_report(rep, st, st.loc, e.what());
      }
      rep.inputs = inputs_for(i);
      rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      out_.reports.push_back(std::move(rep));
      if (out_.reports.back().verdict == Verdict::Error) return;
    }
  }

 private:
  void error_report(Report& rep, const Statement& st, Location loc, const std::string& msg) {
    rep.verdict = Verdict::Error;
    if (rep.command.empty()) rep.command = print(st);
    rep.error = msg;
    rep.location = loc;
    rep.value.reset();
    rep.witness.reset();
    rep.recheck.reset();
  }

  // ---- scope and lookup -------------------------------------------------

  void depend(std::size_t stmt) { deps_[index_].insert(stmt); }

  const Chart& chart_named(const std::string& name, Location loc) {
    auto it = charts_.find(name);
    if (it == charts_.end()) fail(loc, "unknown chart '" + name + "'");
    depend(chart_decl_.at(name));
    return it->second;
  }

  const Chart& current_chart(Location loc) {
    if (!current_) fail(loc, "no chart declared");
    scope_[index_] = *current_;
    return chart_named(*current_, loc);
  }

  const Binding& lookup(const std::string& name, Location loc) {
    auto it = names_.find(name);
    if (it == names_.end()) fail(loc, "unknown name '" + name + "'");
    depend(it->second.stmt);
    return it->second;
  }

  const Binding& lookup(const Arg& a, Binding::Kind kind) {
    if (a.is_list) fail(a.loc, std::string("expected the name of ") + kind_name(kind) + ", got a list");
    const Binding& b = lookup(a.name, a.loc);
    if (b.kind != kind) fail(a.loc, "'" + a.name + "' is " + kind_name(b.kind) + ", expected " + kind_name(kind));
    return b;
  }

  void declare(const std::string& name, Location loc, bool chart_too = false) {
    if (names_.count(name) || charts_.count(name)) fail(loc, "'" + name + "' is already defined");
    if (current_ && !chart_too) {
      const Chart& c = charts_.at(*current_);
      if (c.index_of(name)) fail(loc, "'" + name + "' is a coordinate of chart " + *current_);
    }
  }

  // ---- expressions --------------------------------------------------------

  Value eval(const Expr& e, const Chart& scope) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Number: return Value::of(Poly(scope, e.number));
      case K::Name: {
        if (auto i = scope.index_of(e.name)) return Value::of(Poly::coordinate(scope, *i));
        const Binding& b = lookup(e.name, e.loc);
        if (b.kind != Binding::Kind::Value) fail(e.loc, "'" + e.name + "' is " + kind_name(b.kind));
        if (!(b.value.chart == scope)) {
          fail(e.loc, "'" + e.name + "' lives on chart " + b.chart_name + ", not " + scope.name());
        }
        return b.value;
      }
      case K::Vector: {
        auto i = scope.index_of(e.name);
        if (!i) fail(e.loc, "'" + e.name + "' is not a coordinate of chart " + scope.name());
        return Value::of(MultiVec::basis(scope, *i));
      }
      case K::Differential: {
        Value f;
        if (e.lhs) {
          f = eval(*e.lhs, scope);
        } else {
          Expr name;
          name.kind = K::Name;
          name.name = e.name;
          name.loc = e.loc;
          f = eval(name, scope);
        }
        if (f.kind != Value::Kind::Scalar) fail(e.loc, "d needs a polynomial, got " + f.describe());
        return Value::of(differential(f.scalar));
      }
      case K::Neg: {
        Value v = eval(*e.lhs, scope);
        return negate(v);
      }
      case K::Add:
      case K::Sub: return add(eval(*e.lhs, scope), eval(*e.rhs, scope), e.kind == K::Sub, e.loc);
      case K::Mul: return multiply(eval(*e.lhs, scope), eval(*e.rhs, scope), e.loc);
      case K::Wedge: return wedge_values(eval(*e.lhs, scope), eval(*e.rhs, scope), e.loc);
      case K::Pow: {
        Value b = eval(*e.lhs, scope);
        if (b.kind != Value::Kind::Scalar) fail(e.loc, "power of " + b.describe());
        Poly p(scope, 1);
        for (unsigned k = 0; k < e.exponent; ++k) p = p * b.scalar;
        return Value::of(p);
      }
    }
    fail(e.loc, "bad expression");
  }

  static Value negate(Value v) {
    switch (v.kind) {
      case Value::Kind::Scalar: v.scalar = -v.scalar; break;
      case Value::Kind::Vector: v.vec = -v.vec; break;
      case Value::Kind::Form: v.form = -v.form; break;
    }
    return v;
  }

  static Value add(Value a, Value b, bool subtract, Location loc) {
    if (subtract) b = negate(std::move(b));
    if (a.kind != b.kind) {
      if (a.is_zero_scalar()) return b;
      if (b.is_zero_scalar()) return a;
      fail(loc, "cannot add " + a.describe() + " and " + b.describe());
    }
    switch (a.kind) {
      case Value::Kind::Scalar: return Value::of(a.scalar + b.scalar);
      case Value::Kind::Vector:
        if (a.vec.grade() != b.vec.grade()) fail(loc, "cannot add " + a.describe() + " and " + b.describe());
        return Value::of(a.vec + b.vec);
      case Value::Kind::Form:
        if (a.form.grade() != b.form.grade()) fail(loc, "cannot add " + a.describe() + " and " + b.describe());
        return Value::of(a.form + b.form);
    }
    return a;
  }

  static Value scale(Value v, const Poly& f) {
    switch (v.kind) {
      case Value::Kind::Scalar: v.scalar = v.scalar * f; break;
      case Value::Kind::Vector: v.vec = v.vec * f; break;
      case Value::Kind::Form: v.form = v.form * f; break;
    }
    return v;
  }

  static Value multiply(Value a, Value b, Location loc) {
    if (a.kind == Value::Kind::Scalar) return scale(std::move(b), a.scalar);
    if (b.kind == Value::Kind::Scalar) return scale(std::move(a), b.scalar);
    fail(loc, "'*' needs a polynomial factor; use '^' to wedge " + a.describe() + " and " + b.describe());
  }

  static Value wedge_values(Value a, Value b, Location loc) {
    if (a.kind == Value::Kind::Scalar || b.kind == Value::Kind::Scalar) return multiply(a, b, loc);
    if (a.kind != b.kind) fail(loc, "cannot wedge " + a.describe() + " and " + b.describe());
    if (a.kind == Value::Kind::Vector) return Value::of(wedge(a.vec, b.vec));
    return Value::of(wedge(a.form, b.form));
  }

  Poly scalar_on(const Expr& e, const Chart& scope) {
    Value v = eval(e, scope);
    if (v.kind != Value::Kind::Scalar) fail(e.loc, "expected a polynomial, got " + v.describe());
    return v.scalar;
  }

  // ---- command arguments --------------------------------------------------

  struct TensorArg {
    NambuStructure s;
    std::string chart_name;
    std::string name;
  };

  TensorArg tensor(const Arg& a) {
    if (a.is_list) fail(a.loc, "expected a tensor name, got a list");
    const Binding& b = lookup(a.name, a.loc);
    if (b.kind == Binding::Kind::Pair) return {b.pair->structure(), a.name, a.name};
    if (b.kind != Binding::Kind::Value || b.value.kind != Value::Kind::Vector || b.value.vec.grade() < 2) {
      fail(a.loc, "'" + a.name + "' is not a multivector of grade >= 2");
    }
    return {NambuStructure(b.value.chart, b.value.vec.grade(), b.value.vec), b.chart_name, a.name};
  }

  std::vector<Value> values(const Arg& a, const Chart& scope) {
    if (!a.is_list) fail(a.loc, "expected a parenthesized list");
    std::vector<Value> out;
    for (const auto& e : a.list) out.push_back(eval(*e, scope));
    return out;
  }

  std::vector<Poly> polys(const Arg& a, const Chart& scope) {
    std::vector<Poly> out;
    std::size_t k = 0;
    for (auto& v : values(a, scope)) {
      if (v.kind != Value::Kind::Scalar) fail(a.list[k]->loc, "expected a polynomial, got " + v.describe());
      out.push_back(v.scalar);
      ++k;
    }
    return out;
  }

  std::vector<Form> forms(const Arg& a, const Chart& scope) {
    std::vector<Form> out;
    std::size_t k = 0;
    for (auto& v : values(a, scope)) {
      if (v.kind == Value::Kind::Scalar && v.scalar.is_zero()) {
        out.push_back(Form(scope, 1));
      } else if (v.kind != Value::Kind::Form || v.form.grade() != 1) {
        fail(a.list[k]->loc, "expected a 1-form, got " + v.describe());
      } else {
        out.push_back(v.form);
      }
      ++k;
    }
    return out;
  }

  struct ModelArg {
    GroupoidModel model;
    const Binding* binding;
  };

  ModelArg model(const Arg& a) {
    if (a.is_list) fail(a.loc, "expected a group or pair groupoid name");
    const Binding& b = lookup(a.name, a.loc);
    if (b.kind == Binding::Kind::Group) return {*b.group, &b};
    if (b.kind == Binding::Kind::Pair) return {*b.pair, &b};
    fail(a.loc, "'" + a.name + "' is " + kind_name(b.kind) + ", expected a group or pair groupoid");
  }

  NambuStructure model_tensor(const Statement& st, const ModelArg& m) {
    if (st.args.size() >= 2) return tensor(st.args[1]).s;
    if (m.binding->kind == Binding::Kind::Pair) return m.binding->pair->structure();
    fail(st.loc, st.name + " on a group needs a tensor argument");
  }

  void arity(const Statement& st, std::size_t lo, std::size_t hi) {
    if (st.args.size() < lo || st.args.size() > hi) {
      fail(st.loc, st.name + " takes " +
                       (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                       " arguments, got " + std::to_string(st.args.size()));
    }
  }

  void check_options(const Statement& st, std::initializer_list<const char*> allowed) {
    for (const auto& o : st.options) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || o.name == a;
      if (!ok) fail(st.loc, st.name + " does not take --" + o.name);
      if (o.value < 0) fail(st.loc, "--" + o.name + " must be nonnegative");
    }
  }

  // Effective option value; recorded into the echoed command.
  std::int64_t effective(Statement& echo, const char* name, std::int64_t fallback) {
    if (const Option* o = echo.option(name)) return o->value;
    echo.options.push_back({name, fallback});
    return fallback;
  }

  std::uint64_t seed_for(const Statement& st) {
    if (const Option* o = st.option("seed")) return static_cast<std::uint64_t>(o->value);
    return opt_.seed;
  }

  // ---- statements ---------------------------------------------------------

  std::optional<Outcome> execute(const Statement& st, Report& rep) {
    using K = Statement::Kind;
    switch (st.kind) {
      case K::Chart: {
        declare(st.name, st.loc, true);
        std::set<std::string> seen;
        for (const auto& c : st.coords) {
          if (!seen.insert(c).second) fail(st.loc, "coordinate '" + c + "' repeated");
          if (charts_.count(c) || names_.count(c)) fail(st.loc, "coordinate '" + c + "' is already a name");
        }
        charts_.emplace(st.name, Chart(st.name, st.coords));
        chart_decl_[st.name] = index_;
        current_ = st.name;
        return std::nullopt;
      }
      case K::Use:
        if (!charts_.count(st.name)) fail(st.loc, "unknown chart '" + st.name + "'");
        current_ = st.name;
        return std::nullopt;
      case K::Bind: {
        const Chart& c = current_chart(st.loc);
        declare(st.name, st.loc);
        Binding b;
        b.value = eval(*st.expr, c);
        b.chart_name = *current_;
        b.stmt = index_;
        if (b.value.is_zero() && b.value.kind != Value::Kind::Scalar) {
          out_.warnings.push_back(st.loc.to_string() + ": " + st.name + " evaluates to the zero " +
                                  (b.value.kind == Value::Kind::Vector ? "multivector" : "form"));
        }
        names_.emplace(st.name, std::move(b));
        return std::nullopt;
      }
      case K::Sub: {
        const Chart& c = current_chart(st.loc);
        declare(st.name, st.loc);
        std::vector<SolvedSubmanifold::Equation> eqs;
        for (const auto& [coord, rhs] : st.equations) {
          auto i = c.index_of(coord);
          if (!i) fail(rhs->loc, "'" + coord + "' is not a coordinate of chart " + *current_);
          eqs.push_back({*i, scalar_on(*rhs, c)});
        }
        Binding b;
        b.kind = Binding::Kind::Sub;
        b.sub = SolvedSubmanifold(c, std::move(eqs));
        b.chart_name = *current_;
        b.stmt = index_;
        names_.emplace(st.name, std::move(b));
        return std::nullopt;
      }
      case K::Map: {
        declare(st.name, st.loc);
        const Chart src = chart_named(st.source, st.loc);
        const Chart tgt = chart_named(st.target, st.loc);
        if (st.comps.size() != tgt.dimension()) {
          fail(st.loc, "map to " + st.target + " needs " + std::to_string(tgt.dimension()) + " components, got " +
                           std::to_string(st.comps.size()));
        }
        std::vector<Poly> comps;
        for (const auto& e : st.comps) comps.push_back(scalar_on(*e, src));
        Binding b;
        b.kind = Binding::Kind::Map;
        b.map = PolyMap(src, tgt, std::move(comps));
        b.stmt = index_;
        names_.emplace(st.name, std::move(b));
        return std::nullopt;
      }
      case K::Group: {
        declare(st.name, st.loc);
        const Chart c = chart_named(st.source, st.loc);
        Binding b;
        b.kind = Binding::Kind::Group;
        b.stmt = index_;
        if (st.group_kind == "additive") {
          b.group = GroupLaw::additive(c);
        } else if (st.group_kind == "heisenberg") {
          b.group = GroupLaw::heisenberg(c);
        } else {
          const Chart blocks[] = {c, c};
          const Chart p = product_chart(blocks, c.name() + "x" + c.name());
          std::vector<Poly> mult, inv;
          std::vector<Rat> unit;
          for (const auto& e : st.comps) mult.push_back(scalar_on(*e, p));
          for (const auto& e : st.unit) {
            const Poly u = scalar_on(*e, c);
            if (!u.is_constant()) fail(e->loc, "unit coordinates must be constants");
            unit.push_back(u.constant_term());
          }
          for (const auto& e : st.inverse) inv.push_back(scalar_on(*e, c));
          if (mult.size() != c.dimension() || inv.size() != c.dimension()) {
            fail(st.loc, "group law on " + st.source + " needs " + std::to_string(c.dimension()) + " components");
          }
          b.group = GroupLaw(st.name, PolyMap(p, c, mult), unit, PolyMap(c, c, inv));
        }
        names_.emplace(st.name, std::move(b));
        return std::nullopt;
      }
      case K::Pair: {
        declare(st.name, st.loc, true);
        Arg a;
        a.name = st.source;
        a.loc = st.loc;
        TensorArg base = tensor(a);
        Binding b;
        b.kind = Binding::Kind::Pair;
        b.pair = PairGroupoid(base.s);
        b.base_name = st.source;
        b.chart_name = st.name;
        b.stmt = index_;
        charts_.emplace(st.name, b.pair->total_chart().renamed(st.name));
        chart_decl_[st.name] = index_;
        names_.emplace(st.name, std::move(b));
        return std::nullopt;
      }
      case K::Eval: {
        const Chart& c = current_chart(st.loc);
        rep.command = print(st);
        return pass(eval(*st.expr, c).to_string());
      }
      case K::Command: return command(st, rep);
    }
    return std::nullopt;
  }

  Outcome command(const Statement& st, Report& rep) {
    Statement echo = st;
    rep.command = print(echo);
    Outcome o = dispatch(st, echo);
    rep.command = print(echo);
    return o;
  }

  Outcome dispatch(const Statement& st, Statement& echo) {
    const std::string& c = st.name;
    const auto degree = [&] { return static_cast<unsigned>(effective(echo, "degree", opt_.degree)); };
    const auto trials = [&] { return static_cast<std::size_t>(effective(echo, "trials", static_cast<std::int64_t>(opt_.trials))); };

    if (c == "check fi") {
      check_options(st, {"degree"});
      arity(st, 1, 1);
      auto t = tensor(st.args[0]);
      const unsigned d = degree();
      const FiResult r = fi_check(t.s, d);
      if (const auto* v = std::get_if<FiVerified>(&r)) {
        Outcome o = pass("degree " + std::to_string(v->degree) + ", " + std::to_string(v->tuples) + " tuple pairs");
        o.verdict = Verdict::VerifiedOnFamily;
        return o;
      }
      const auto& w = std::get<FiRefuted>(r).witness;
      Outcome o = failed(w.to_string());
      o.verdict = Verdict::Refuted;
      o.recheck = "check fituple " + t.name + " " + list_text(w.fs) + " " + list_text(w.gs);
      return o;
    }
    if (c == "check fituple") {
      check_options(st, {});
      arity(st, 3, 3);
      auto t = tensor(st.args[0]);
      const auto fs = polys(st.args[1], t.s.chart());
      const auto gs = polys(st.args[2], t.s.chart());
      if (fs.size() + 1 != t.s.order() || gs.size() != t.s.order()) {
        fail(st.loc, "fituple needs " + std::to_string(t.s.order() - 1) + " and " + std::to_string(t.s.order()) +
                         " functions");
      }
      FiWitness w{fs, gs, fi_defect(t.s, fs, gs)};
      if (w.defect.is_zero()) return pass("defect = 0");
      Outcome o = failed(w.to_string());
      o.verdict = Verdict::Refuted;
      return o;
    }
    if (c == "check formulations") {
      check_options(st, {"degree"});
      arity(st, 1, 1);
      auto t = tensor(st.args[0]);
      const auto f = fi_formulations(t.s, degree());
      const std::string summary = std::to_string(f.f_tuples) + " f-tuples, failures: bracket " +
                                  std::to_string(f.bracket_failures) + ", hamiltonian " +
                                  std::to_string(f.hamiltonian_failures) + ", lie " + std::to_string(f.lie_failures);
      if (f.agree()) return pass(summary);
      Outcome o = failed("formulations disagree on f = " + list_text(*f.first_disagreement));
      o.value = summary;
      return o;
    }
    if (c == "check plucker") {
      check_options(st, {});
      arity(st, 1, 1);
      auto t = tensor(st.args[0]);
      const auto r = plucker_check(t.s);
      if (r.decomposable) return pass("decomposable");
      return failed("omega = " + r.omega->to_string() + ", iota_omega Pi ^ Pi = " + r.wedge->to_string());
    }
    if (c == "check coisotropic") {
      check_options(st, {});
      arity(st, 2, 2);
      auto t = tensor(st.args[0]);
      const Binding& sub = lookup(st.args[1], Binding::Kind::Sub);
      const auto r = coisotropy_check(t.s, *sub.sub);
      if (r.coisotropic) return pass("coisotropic");
      Outcome o = failed(r.witness->to_string());
      o.recheck = "check covectors " + t.name + " " + st.args[1].name + " " + list_text(r.witness->covectors);
      return o;
    }
    if (c == "check covectors") {
      check_options(st, {});
      arity(st, 3, 3);
      auto t = tensor(st.args[0]);
      const Binding& sub = lookup(st.args[1], Binding::Kind::Sub);
      const auto fs = forms(st.args[2], t.s.chart());
      if (fs.size() != t.s.order()) fail(st.loc, "covectors needs " + std::to_string(t.s.order()) + " 1-forms");
      require_same_chart(t.s.chart(), sub.sub->chart());
      CoisotropyWitness w{{}, fs, reduce_mod_solved(evaluate<FieldKind::Vector>(t.s.tensor(), fs), *sub.sub)};
      if (w.reduced.is_zero()) return pass("0 on C");
      return failed(w.to_string());
    }
    if (c == "check graph") {
      check_options(st, {});
      arity(st, 3, 3);
      const Binding& m = lookup(st.args[0], Binding::Kind::Map);
      auto a = tensor(st.args[1]);
      auto b = tensor(st.args[2]);
      const auto g = graph_equivalence_check(*m.map, a.s, b.s);
      const bool related = g.related.kind == RelatednessResult::Kind::Related;
      const std::string summary = to_string(g.related.kind) + ", graph " +
                                  (g.graph.coisotropic ? "coisotropic" : "not coisotropic");
      if (!g.agree) {
        Outcome o = failed("routes disagree: " + summary);
        o.value = summary;
        return o;
      }
      if (related) return pass(summary);
      Outcome o = failed("relatedness: " + g.related.witness->to_string() + "; graph: " + g.graph.witness->to_string());
      o.value = summary;
      return o;
    }
    if (c == "check related") {
      check_options(st, {});
      arity(st, 3, 3);
      const Binding& m = lookup(st.args[0], Binding::Kind::Map);
      const auto r = relatedness_check(*m.map, tensor(st.args[1]).s, tensor(st.args[2]).s);
      if (r.kind == RelatednessResult::Kind::Related) return pass("related");
      Outcome o = failed(r.witness->to_string());
      o.value = to_string(r.kind);
      return o;
    }
    if (c == "coinduce") {
      check_options(st, {"degree"});
      arity(st, 2, 2);
      const Binding& m = lookup(st.args[0], Binding::Kind::Map);
      auto a = tensor(st.args[1]);
      const auto r = coinduce(*m.map, a.s, degree());
      const auto rphi = coisotropy_check(product_structure(a.s, a.s, twist(a.s.order())), r_phi_submanifold(*m.map));
      const bool ok = std::holds_alternative<Coinduced>(r);
      if (ok != rphi.coisotropic) {
        return failed(std::string("routes disagree: coinduce ") + (ok ? "succeeds" : "fails") + ", R(phi) " +
                      (rphi.coisotropic ? "coisotropic" : "not coisotropic"));
      }
      if (ok) return pass(std::get<Coinduced>(r).structure.tensor().to_string());
      return failed("obstruction " + std::get<CoinduceObstruction>(r).to_string() + "; R(phi): " +
                    rphi.witness->to_string());
    }
    if (c == "check multiplicative") {
      check_options(st, {});
      arity(st, 1, 2);
      auto m = model(st.args[0]);
      const auto r = multiplicativity_check(m.model, model_tensor(st, m));
      std::string summary = std::string("graph ") + (r.graph.coisotropic ? "coisotropic" : "not coisotropic");
      if (r.lie_group_identity) summary += *r.lie_group_identity ? ", r/l identity holds" : ", r/l identity fails";
      if (!r.agree) {
        Outcome o = failed("routes disagree: " + summary);
        o.value = summary;
        return o;
      }
      if (r.multiplicative) return pass(summary);
      std::string w = r.graph.witness ? "graph: " + r.graph.witness->to_string() : "";
      if (r.lie_group_witness) w += (w.empty() ? "" : "; ") + std::string("r/l: ") + *r.lie_group_witness;
      Outcome o = failed(w);
      o.value = summary;
      return o;
    }
    if (c == "check diagnostics") {
      check_options(st, {});
      arity(st, 1, 2);
      auto m = model(st.args[0]);
      return from_check_report(theorem_diagnostics(m.model, model_tensor(st, m)), false);
    }
    if (c == "check inversion") {
      check_options(st, {});
      arity(st, 1, 2);
      auto m = model(st.args[0]);
      const auto r = inversion_check(m.model, model_tensor(st, m));
      if (r.identity) return pass("i_* Pi = (-1)^(n-1) Pi, inversion " + to_string(r.relatedness.kind));
      return failed(r.witness ? r.witness->to_string() : "i_* Pi != (-1)^(n-1) Pi");
    }
    if (c == "base") {
      check_options(st, {"degree"});
      arity(st, 1, 2);
      auto m = model(st.args[0]);
      const auto s = model_tensor(st, m);
      const unsigned d = degree();
      BaseStructure b;
      try {
        b = base_structure(m.model, s, d);
      } catch (const Error& e) {
        return failed(e.what());
      }
      const std::string v = b.is_point() ? "point" : b.structure->tensor().to_string();
      if (!b.target_anti) {
        Outcome o = failed("beta is not an anti Nambu-Poisson map onto the base structure");
        o.value = v;
        return o;
      }
      return pass(v);
    }
    if (c == "check signrelation") {
      check_options(st, {"degree"});
      arity(st, 1, 1);
      const Binding& p = lookup(st.args[0], Binding::Kind::Pair);
      BaseStructure b;
      try {
        b = base_structure(GroupoidModel(*p.pair), p.pair->structure(), degree());
      } catch (const Error& e) {
        return failed(e.what());
      }
      const auto v = sign_relation_check(*p.pair, *b.structure);
      if (v.pass) return pass("base bracket = (-1)^(n-1) induced bracket on coordinate tuples");
      return failed(*v.counterexample);
    }
    if (c == "check subgroupoid") {
      check_options(st, {"trials", "seed"});
      arity(st, 2, 2);
      const Binding& p = lookup(st.args[0], Binding::Kind::Pair);
      const Binding& n = lookup(st.args[1], Binding::Kind::Sub);
      require_same_chart(p.pair->base().chart(), n.sub->chart());
      const std::size_t tr = trials();
      const std::uint64_t seed = seed_for(st);
      const auto base = coisotropy_check(p.pair->base(), *n.sub);
      if (!base.coisotropic) {
        Outcome o = failed("N is not coisotropic: " + base.witness->to_string());
        o.recheck = "check covectors " + p.base_name + " " + st.args[1].name + " " + list_text(base.witness->covectors);
        o.seed = seed;
        return o;
      }
      return from_check_report(coiso_subgroupoid_check(*p.pair, *n.sub, tr, seed));
    }
    if (c == "check wlfb" || c == "check properties") {
      check_options(st, {"degree", "trials", "seed"});
      arity(st, 1, 1);
      auto t = tensor(st.args[0]);
      const unsigned d = degree();
      const std::size_t tr = trials();
      const std::uint64_t seed = seed_for(st);
      return from_check_report(c == "check wlfb" ? wlfb_check(t.s, d, tr, seed)
                                                 : form_bracket_properties(t.s, tr, d, seed));
    }
    if (c == "check conormal" || c == "check subalgebroid") {
      check_options(st, {"trials", "seed"});
      arity(st, 2, 2);
      auto t = tensor(st.args[0]);
      const Binding& n = lookup(st.args[1], Binding::Kind::Sub);
      const std::size_t tr = trials();
      const std::uint64_t seed = seed_for(st);
      if (c == "check conormal") return from_check_report(conormal_restriction_check(t.s, *n.sub, tr, seed));
      return from_check_report(coiso_subalgebroid_check(t.s, tangent_subalgebroid(*n.sub), tr, seed));
    }
    if (c == "check filippov") {
      check_options(st, {});
      arity(st, 2, 2);
      auto t = tensor(st.args[0]);
      std::vector<Rat> point;
      for (const auto& p : polys(st.args[1], t.s.chart())) {
        if (!p.is_constant()) fail(st.args[1].loc, "point coordinates must be constants");
        point.push_back(p.constant_term());
      }
      if (point.size() != t.s.chart().dimension()) fail(st.args[1].loc, "point has the wrong dimension");
      const auto table = pointwise_filippov(t.s, point);
      const std::string text = table.is_zero() ? "0" : table.to_string();
      if (auto f = table.fundamental_identity_failure()) {
        Outcome o = failed("fundamental identity fails at " + *f);
        o.value = text;
        return o;
      }
      return pass(text);
    }
    if (c == "check delta") {
      check_options(st, {});
      arity(st, 3, 3);
      auto t = tensor(st.args[0]);
      auto field = [&](const Arg& a) {
        if (a.is_list) fail(a.loc, "expected a multivector name");
        const Binding& b = lookup(a, Binding::Kind::Value);
        if (!(b.value.chart == t.s.chart())) fail(a.loc, "'" + a.name + "' lives on another chart");
        return b.value.as_multivec(a.loc);
      };
      const auto r = delta_compatibility_check(t.s, field(st.args[1]), field(st.args[2]));
      if (r.pass) return pass(r.lhs.to_string());
      Outcome o = failed("defect = " + r.defect.to_string());
      o.value = r.lhs.to_string();
      return o;
    }
    if (c == "bracket") {
      check_options(st, {});
      arity(st, 2, 2);
      auto t = tensor(st.args[0]);
      const auto fs = polys(st.args[1], t.s.chart());
      return pass(nambu_bracket(t.s, fs).to_string());
    }
    if (c == "formbracket") {
      check_options(st, {});
      arity(st, 2, 2);
      auto t = tensor(st.args[0]);
      const auto as = forms(st.args[1], t.s.chart());
      return pass(form_bracket(t.s, as).to_string());
    }
    fail(st.loc, "unknown command '" + c + "'");
  }

  // ---- replay inputs ------------------------------------------------------

  std::vector<std::string> inputs_for(std::size_t i) {
    std::set<std::size_t> closure;
    std::vector<std::size_t> stack(deps_[i].begin(), deps_[i].end());
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      if (!closure.insert(j).second) continue;
      stack.insert(stack.end(), deps_[j].begin(), deps_[j].end());
    }
    std::vector<std::string> out;
    std::optional<std::string> current;
    auto scope_to = [&](const std::optional<std::string>& s) {
      if (s && s != current) {
        out.push_back("use " + *s);
        current = s;
      }
    };
    for (std::size_t j : closure) {
      const Statement& st = session_.statements[j];
      scope_to(scope_[j]);
      out.push_back(print(st));
      if (st.kind == Statement::Kind::Chart) current = st.name;
    }
    scope_to(scope_[i]);
    return out;
  }

  const Session& session_;
  RunOptions opt_;
  RunResult& out_;
  std::size_t index_ = 0;
  std::vector<std::set<std::size_t>> deps_;
  std::vector<std::optional<std::string>> scope_;
  std::map<std::string, Chart> charts_;
  std::map<std::string, std::size_t> chart_decl_;
  std::map<std::string, Binding> names_;
  std::optional<std::string> current_;
};

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::VerifiedOnFamily: return "VERIFIED_ON_FAMILY";
    case Verdict::Refuted: return "REFUTED";
    case Verdict::Error: return "ERROR";
  }
  return "?";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::Pass, Verdict::Fail, Verdict::VerifiedOnFamily, Verdict::Refuted, Verdict::Error}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::string Report::session_text() const {
  std::string out;
  for (const auto& s : inputs) out += s + "\n";
  return out + command + "\n";
}

bool Report::same_outcome(const Report& o) const {
  return verdict == o.verdict && value == o.value && witness == o.witness && error == o.error;
}

int RunResult::exit_code() const {
  int code = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::Error) return 2;
    if (r.verdict != Verdict::Pass && r.verdict != Verdict::VerifiedOnFamily) code = 1;
  }
  return code;
}

RunResult run(const Session& session, const RunOptions& options) {
  RunResult out;
  Runner(session, options, out).run();
  return out;
}

RunResult run(std::string_view text, const RunOptions& options) {
  try {
    return run(parse_session(text), options);
  } catch (const ParseError& e) {
    RunResult out;
    Report r;
    r.verdict = Verdict::Error;
    r.command = "parse";
    r.error = e.what();
    r.location = e.location();
    out.reports.push_back(std::move(r));
    return out;
  }
}

Report replay(const Report& r) {
  RunOptions o;
  if (r.seed) o.seed = *r.seed;
  auto result = run(r.session_text(), o);
  if (result.reports.empty()) {
    Report empty;
    empty.verdict = Verdict::Error;
    empty.error = "replay produced no report";
    return empty;
  }
  return result.reports.back();
}

WitnessCheck verify_witness(const Report& r) {
  WitnessCheck out;
  const Report again = replay(r);
  out.reproduced = again.same_outcome(r);
  if (!out.reproduced) out.detail = "replay gave " + to_string(again.verdict) + " " + again.witness.value_or("");
  if (r.recheck) {
    Report narrow = r;
    narrow.command = *r.recheck;
    const Report re = replay(narrow);
    // The recheck reports the core witness; the original may prefix it.
    out.rechecked = (re.verdict == Verdict::Fail || re.verdict == Verdict::Refuted) && re.witness && r.witness &&
                    r.witness->find(*re.witness) != std::string::npos;
    if (!out.rechecked) out.detail += (out.detail.empty() ? "" : "; ") + std::string("recheck gave ") +
                                      to_string(re.verdict) + " " + re.witness.value_or(re.error.value_or(""));
  }
  return out;
}

std::string to_text(const Report& r) {
  std::string out = "[" + to_string(r.verdict) + "] " + r.command + "\n";
  auto field = [&](const char* name, const std::string& v) {
    std::string indented;
    for (char ch : v) indented += ch == '\n' ? std::string("\n      ") : std::string(1, ch);
    out += std::string("  ") + name + ": " + indented + "\n";
  };
  if (r.value) field("value", *r.value);
  if (r.witness) field("witness", *r.witness);
  if (r.error) field("error", *r.error);
  if (r.seed) field("seed", std::to_string(*r.seed));
  return out;
}

std::string to_json(const RunResult& result, std::string_view source, const RunOptions& options) {
  using nlohmann::json;
  json reports = json::array();
  for (const auto& r : result.reports) {
    json j;
    j["command"] = r.command;
    j["inputs"] = r.inputs;
    j["verdict"] = to_string(r.verdict);
    auto opt = [&](const char* k, const std::optional<std::string>& v) { j[k] = v ? json(*v) : json(nullptr); };
    opt("value", r.value);
    opt("witness", r.witness);
    opt("recheck", r.recheck);
    opt("error", r.error);
    j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
    j["location"] = r.location ? json{{"line", r.location->line}, {"column", r.location->column}} : json(nullptr);
    j["timing_ms"] = r.timing_ms;
    reports.push_back(std::move(j));
  }
  json top;
  top["schema"] = "report-v1";
  top["source"] = std::string(source);
  top["options"] = {{"seed", options.seed}, {"degree", options.degree}, {"trials", options.trials}};
  top["exit_code"] = result.exit_code();
  top["warnings"] = result.warnings;
  top["reports"] = std::move(reports);
  return top.dump(2) + "\n";
}

std::vector<Report> reports_from_json(std::string_view json_text) {
  using nlohmann::json;
  const json top = json::parse(json_text);
  if (top.value("schema", "") != "report-v1") throw Error("not a report-v1 document");
  std::vector<Report> out;
  for (const auto& j : top.at("reports")) {
    Report r;
    r.command = j.at("command").get<std::string>();
    r.inputs = j.at("inputs").get<std::vector<std::string>>();
    const auto v = verdict_from_string(j.at("verdict").get<std::string>());
    if (!v) throw Error("unknown verdict " + j.at("verdict").dump());
    r.verdict = *v;
    auto opt = [&](const char* k) -> std::optional<std::string> {
      if (!j.contains(k) || j[k].is_null()) return std::nullopt;
      return j[k].get<std::string>();
    };
    r.value = opt("value");
    r.witness = opt("witness");
    r.recheck = opt("recheck");
    r.error = opt("error");
    if (j.contains("seed") && !j["seed"].is_null()) r.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("location") && !j["location"].is_null()) {
      r.location = Location{j["location"].at("line").get<std::size_t>(), j["location"].at("column").get<std::size_t>()};
    }
    r.timing_ms = j.value("timing_ms", 0.0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nambu
