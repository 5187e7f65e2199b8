#include "nambu/session.hpp"

#include <cctype>
#include <set>

namespace nambu {

namespace {

enum class Tok { Ident, Int, Sym, Option, Newline, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Location loc;
};

const std::set<std::string, std::less<>> kReserved = {"chart", "use",     "sub",         "map",      "group",
                                                      "pair",  "check",   "bracket",     "formbracket",
                                                      "coinduce", "base", "d"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  Location loc;
  std::size_t i = 0;
  int depth = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (text[i] == '\n') {
        ++loc.line;
        loc.column = 1;
      } else {
        ++loc.column;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '\n') {
      if (depth == 0) out.push_back({Tok::Newline, "\n", loc});
      advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const Location start = loc;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      out.push_back({Tok::Ident, std::string(text.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back({Tok::Int, std::string(text.substr(i, j - i)), start});
      advance(j - i);
      continue;
    }
    if (text.substr(i, 2) == "--" && i + 2 < text.size() && is_ident_start(text[i + 2])) {
      std::size_t j = i + 2;
      while (j < text.size() && (is_ident_char(text[j]) || text[j] == '-')) ++j;
      out.push_back({Tok::Option, std::string(text.substr(i + 2, j - i - 2)), start});
      advance(j - i);
      continue;
    }
    for (std::string_view two : {":=", "->"}) {
      if (text.substr(i, 2) == two) {
        out.push_back({Tok::Sym, std::string(two), start});
        advance(2);
        goto next;
      }
    }
    if (std::string_view("@^*+-/(){},;:=").find(c) != std::string_view::npos) {
      if (c == '(' || c == '{') ++depth;
      if ((c == ')' || c == '}') && depth > 0) --depth;
      out.push_back({Tok::Sym, std::string(1, c), start});
      advance(1);
      continue;
    }
    throw ParseError(start, std::string("unexpected character '") + c + "'");
  next:;
  }
  out.push_back({Tok::End, "", loc});
  return out;
}

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Session session() {
    Session s;
    while (true) {
      while (at_separator()) ++pos_;
      if (peek().kind == Tok::End) break;
      s.statements.push_back(statement());
      if (!at_separator() && peek().kind != Tok::End) fail("expected end of statement");
    }
    return s;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool at_separator() const {
    return peek().kind == Tok::Newline || (peek().kind == Tok::Sym && peek().text == ";");
  }
  bool is_sym(std::string_view s, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Sym && peek(ahead).text == s;
  }
  bool is_word(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    const std::string got = t.kind == Tok::End       ? "end of input"
                            : t.kind == Tok::Newline ? "end of line"
                            : t.kind == Tok::Option  ? "'--" + t.text + "'"
                                                     : "'" + t.text + "'";
    throw ParseError(t.loc, msg + ", got " + got);
  }
  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }
  void expect_word(std::string_view s) {
    if (!is_word(s)) fail("expected '" + std::string(s) + "'");
    ++pos_;
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[pos_++].text;
  }
  std::string declared_name() {
    if (peek().kind == Tok::Ident && kReserved.count(peek().text)) fail("reserved word cannot be a name");
    return ident("a name");
  }

  template <typename F>
  void separated(std::string_view close, std::string_view sep, F&& item) {
    if (is_sym(close)) {
      ++pos_;
      return;
    }
    while (true) {
      item();
      if (is_sym(close)) {
        ++pos_;
        return;
      }
      expect_sym(sep);
    }
  }

  std::vector<ExprPtr> expr_list(std::string_view sep) {
    expect_sym("(");
    std::vector<ExprPtr> out;
    separated(")", sep, [&] { out.push_back(sum()); });
    return out;
  }

  Statement statement() {
    Statement st;
    st.loc = peek().loc;
    if (peek().kind == Tok::Ident && !is_sym(":=", 1)) {
      const std::string w = peek().text;
      if (w == "chart") {
        ++pos_;
        st.kind = Statement::Kind::Chart;
        st.name = declared_name();
        expect_sym("(");
        separated(")", ",", [&] { st.coords.push_back(declared_name()); });
        return st;
      }
      if (w == "use") {
        ++pos_;
        st.kind = Statement::Kind::Use;
        st.name = ident("a chart name");
        return st;
      }
      if (w == "sub") {
        ++pos_;
        st.kind = Statement::Kind::Sub;
        st.name = declared_name();
        expect_sym(":=");
        expect_sym("{");
        separated("}", ",", [&] {
          std::string c = ident("a coordinate");
          expect_sym("=");
          st.equations.emplace_back(std::move(c), sum());
        });
        return st;
      }
      if (w == "map") {
        ++pos_;
        st.kind = Statement::Kind::Map;
        st.name = declared_name();
        expect_sym(":");
        st.source = ident("a source chart");
        expect_sym("->");
        st.target = ident("a target chart");
        expect_sym(":=");
        st.comps = expr_list(",");
        return st;
      }
      if (w == "group") {
        ++pos_;
        st.kind = Statement::Kind::Group;
        st.name = declared_name();
        expect_sym(":=");
        st.group_kind = ident("additive, heisenberg or law");
        if (st.group_kind != "additive" && st.group_kind != "heisenberg" && st.group_kind != "law") {
          --pos_;
          fail("expected additive, heisenberg or law");
        }
        st.source = ident("a chart name");
        if (st.group_kind == "law") {
          st.comps = expr_list(",");
          expect_word("unit");
          st.unit = expr_list(",");
          expect_word("inverse");
          st.inverse = expr_list(",");
        }
        return st;
      }
      if (w == "pair") {
        ++pos_;
        st.kind = Statement::Kind::Pair;
        st.name = declared_name();
        expect_sym(":=");
        st.source = ident("a base structure name");
        return st;
      }
      if (w == "check" || w == "bracket" || w == "formbracket" || w == "coinduce" || w == "base") {
        ++pos_;
        st.kind = Statement::Kind::Command;
        st.name = w == "check" ? "check " + ident("a check name") : w;
        command_tail(st);
        return st;
      }
    }
    if (peek().kind == Tok::Ident && is_sym(":=", 1)) {
      st.kind = Statement::Kind::Bind;
      st.name = declared_name();
      expect_sym(":=");
      st.expr = sum();
      return st;
    }
    st.kind = Statement::Kind::Eval;
    st.expr = sum();
    return st;
  }

  void command_tail(Statement& st) {
    while (!at_separator() && peek().kind != Tok::End) {
      if (peek().kind == Tok::Option) {
        Option o{toks_[pos_++].text, 0};
        if (peek().kind != Tok::Int) fail("expected an integer after --" + o.name);
        try {
          o.value = std::stoll(toks_[pos_].text);
        } catch (const std::exception&) {
          fail("option value out of range");
        }
        ++pos_;
        st.options.push_back(std::move(o));
        continue;
      }
      if (!st.options.empty()) fail("positional argument after options");
      Arg a;
      a.loc = peek().loc;
      if (is_sym("(")) {
        a.is_list = true;
        a.list = expr_list(";");
      } else {
        a.name = ident("an argument");
      }
      st.args.push_back(std::move(a));
    }
  }

  ExprPtr binary(Expr::Kind k, Location loc, ExprPtr a, ExprPtr b) {
    Expr e;
    e.kind = k;
    e.loc = loc;
    e.lhs = std::move(a);
    e.rhs = std::move(b);
    return make(std::move(e));
  }

  ExprPtr sum() {
    ExprPtr left = wedge();
    while (is_sym("+") || is_sym("-")) {
      const Location loc = peek().loc;
      const auto k = peek().text == "+" ? Expr::Kind::Add : Expr::Kind::Sub;
      ++pos_;
      left = binary(k, loc, left, wedge());
    }
    return left;
  }

  ExprPtr wedge() {
    ExprPtr left = product();
    while (is_sym("^")) {
      const Location loc = peek().loc;
      ++pos_;
      left = binary(Expr::Kind::Wedge, loc, left, product());
    }
    return left;
  }

  ExprPtr product() {
    ExprPtr left = unary();
    while (is_sym("*")) {
      const Location loc = peek().loc;
      ++pos_;
      left = binary(Expr::Kind::Mul, loc, left, unary());
    }
    return left;
  }

  ExprPtr unary() {
    if (is_sym("-")) {
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.loc = peek().loc;
      ++pos_;
      e.lhs = unary();
      return make(std::move(e));
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    while (is_sym("^") && peek(1).kind == Tok::Int) {
      Expr e;
      e.kind = Expr::Kind::Pow;
      e.loc = peek().loc;
      pos_ += 1;
      const std::string& digits = peek().text;
      if (digits.size() > 4) fail("exponent too large");
      e.exponent = static_cast<unsigned>(std::stoul(digits));
      ++pos_;
      e.lhs = base;
      base = make(std::move(e));
    }
    return base;
  }

  ExprPtr primary() {
    Expr e;
    e.loc = peek().loc;
    if (peek().kind == Tok::Int) {
      std::string text = toks_[pos_++].text;
      if (is_sym("/") && peek(1).kind == Tok::Int) {
        text += "/" + toks_[pos_ + 1].text;
        pos_ += 2;
        if (text.substr(text.find('/') + 1).find_first_not_of('0') == std::string::npos) {
          throw ParseError(e.loc, "zero denominator");
        }
      }
      e.kind = Expr::Kind::Number;
      e.number = Rat::parse(text);
      return make(std::move(e));
    }
    if (is_sym("@")) {
      ++pos_;
      e.kind = Expr::Kind::Vector;
      e.name = ident("a coordinate after '@'");
      return make(std::move(e));
    }
    if (is_sym("(")) {
      ++pos_;
      ExprPtr inner = sum();
      expect_sym(")");
      return inner;
    }
    if (is_word("d") && (peek(1).kind == Tok::Ident || (peek(1).kind == Tok::Sym && peek(1).text == "("))) {
      ++pos_;
      e.kind = Expr::Kind::Differential;
      if (is_sym("(")) {
        ++pos_;
        e.lhs = sum();
        expect_sym(")");
      } else {
        e.name = ident("a name after 'd'");
      }
      return make(std::move(e));
    }
    if (peek().kind == Tok::Ident) {
      if (kReserved.count(peek().text)) fail("unexpected reserved word");
      e.kind = Expr::Kind::Name;
      e.name = toks_[pos_++].text;
      return make(std::move(e));
    }
    fail("expected an expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

int level(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Wedge: return 2;
    case Expr::Kind::Mul: return 3;
    case Expr::Kind::Neg: return 4;
    case Expr::Kind::Pow: return 5;
    default: return 6;
  }
}

std::string render(const Expr& e, int min_level) {
  std::string s;
  switch (e.kind) {
    case Expr::Kind::Number: s = e.number.to_string(); break;
    case Expr::Kind::Name: s = e.name; break;
    case Expr::Kind::Vector: s = "@" + e.name; break;
    case Expr::Kind::Differential: s = e.lhs ? "d(" + render(*e.lhs, 0) + ")" : "d " + e.name; break;
    case Expr::Kind::Neg: {
      std::string inner = render(*e.lhs, 4);
      s = "-" + (inner.front() == '-' ? "(" + inner + ")" : inner);
      break;
    }
    case Expr::Kind::Add: s = render(*e.lhs, 1) + " + " + render(*e.rhs, 2); break;
    case Expr::Kind::Sub: s = render(*e.lhs, 1) + " - " + render(*e.rhs, 2); break;
    case Expr::Kind::Wedge: {
      std::string right = render(*e.rhs, 3);
      if (std::isdigit(static_cast<unsigned char>(right.front()))) right = "(" + right + ")";
      s = render(*e.lhs, 2) + " ^ " + right;
      break;
    }
    case Expr::Kind::Mul: s = render(*e.lhs, 3) + "*" + render(*e.rhs, 4); break;
    case Expr::Kind::Pow: s = render(*e.lhs, 5) + "^" + std::to_string(e.exponent); break;
  }
  if (e.kind == Expr::Kind::Number && e.number < Rat(0)) s = "(" + s + ")";
  return level(e) < min_level ? "(" + s + ")" : s;
}

std::string join(const std::vector<ExprPtr>& xs, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + print(*xs[i]);
  return out;
}

bool same(const ExprPtr& a, const ExprPtr& b) { return (!a && !b) || (a && b && *a == *b); }

bool same_list(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  return a.kind == b.kind && a.number == b.number && a.name == b.name && a.exponent == b.exponent &&
         same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

std::string print(const Expr& e) { return render(e, 0); }

const Option* Statement::option(std::string_view n) const {
  for (const auto& o : options) {
    if (o.name == n) return &o;
  }
  return nullptr;
}

bool operator==(const Statement& a, const Statement& b) {
  if (a.kind != b.kind || a.name != b.name || a.coords != b.coords || !same(a.expr, b.expr) ||
      a.source != b.source || a.target != b.target || !same_list(a.comps, b.comps) ||
      a.group_kind != b.group_kind || !same_list(a.unit, b.unit) || !same_list(a.inverse, b.inverse) ||
      a.equations.size() != b.equations.size() || a.args.size() != b.args.size() ||
      a.options.size() != b.options.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    if (a.equations[i].first != b.equations[i].first || !same(a.equations[i].second, b.equations[i].second)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (a.args[i].is_list != b.args[i].is_list || a.args[i].name != b.args[i].name ||
        !same_list(a.args[i].list, b.args[i].list)) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.options.size(); ++i) {
    if (a.options[i].name != b.options[i].name || a.options[i].value != b.options[i].value) return false;
  }
  return true;
}

Session parse_session(std::string_view text) { return Parser(lex(text)).session(); }

std::string print(const Statement& s) {
  switch (s.kind) {
    case Statement::Kind::Chart: {
      std::string out = "chart " + s.name + " (";
      for (std::size_t i = 0; i < s.coords.size(); ++i) out += (i ? ", " : "") + s.coords[i];
      return out + ")";
    }
    case Statement::Kind::Use: return "use " + s.name;
    case Statement::Kind::Bind: return s.name + " := " + print(*s.expr);
    case Statement::Kind::Sub: {
      std::string out = "sub " + s.name + " := {";
      for (std::size_t i = 0; i < s.equations.size(); ++i) {
        out += (i ? ", " : "") + s.equations[i].first + " = " + print(*s.equations[i].second);
      }
      return out + "}";
    }
    case Statement::Kind::Map:
      return "map " + s.name + " : " + s.source + " -> " + s.target + " := (" + join(s.comps, ", ") + ")";
    case Statement::Kind::Group: {
      std::string out = "group " + s.name + " := " + s.group_kind + " " + s.source;
      if (s.group_kind == "law") {
        out += " (" + join(s.comps, ", ") + ") unit (" + join(s.unit, ", ") + ") inverse (" +
               join(s.inverse, ", ") + ")";
      }
      return out;
    }
    case Statement::Kind::Pair: return "pair " + s.name + " := " + s.source;
    case Statement::Kind::Command: {
      std::string out = s.name;
      for (const auto& a : s.args) out += " " + (a.is_list ? "(" + join(a.list, "; ") + ")" : a.name);
      for (const auto& o : s.options) out += " --" + o.name + " " + std::to_string(o.value);
      return out;
    }
    case Statement::Kind::Eval: return print(*s.expr);
  }
  return "";
}

std::string print(const Session& s) {
  std::string out;
  for (const auto& st : s.statements) out += print(st) + "\n";
  return out;
}

}  // namespace nambu
