#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nambu/rational.hpp"

namespace nambu {

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
  std::string to_string() const { return std::to_string(line) + ":" + std::to_string(column); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Expression tree. Binary operators are left associative; `^ INT` is a power,
/// any other `^` is the wedge product.
struct Expr {
  enum class Kind { Number, Name, Vector, Differential, Neg, Add, Sub, Mul, Wedge, Pow };
  Kind kind = Kind::Number;
  Location loc;
  Rat number;        // Number
  std::string name;  // Name, Vector, Differential of a name
  unsigned exponent = 0;  // Pow
  ExprPtr lhs, rhs;       // binary; lhs for Neg, Pow and Differential of an expression

  friend bool operator==(const Expr& a, const Expr& b);
};

/// Canonical text with minimal parentheses; parse(print(e)) == e.
std::string print(const Expr& e);

/// Positional command argument: a bound name or a `(a; b; c)` list.
struct Arg {
  std::string name;
  std::vector<ExprPtr> list;
  bool is_list = false;
  Location loc;
};

struct Option {
  std::string name;  // without the leading dashes
  std::int64_t value = 0;
};

struct Statement {
  enum class Kind { Chart, Use, Bind, Sub, Map, Group, Pair, Command, Eval };
  Kind kind = Kind::Eval;
  Location loc;
  std::string name;                 // declared name; command verb for Command
  std::vector<std::string> coords;  // Chart
  ExprPtr expr;                     // Bind, Eval
  std::vector<std::pair<std::string, ExprPtr>> equations;  // Sub
  std::string source, target;       // Map; Group chart and Pair base in `source`
  std::vector<ExprPtr> comps;       // Map; Group law multiplication
  std::string group_kind;           // additive | heisenberg | law
  std::vector<ExprPtr> unit, inverse;  // Group law
  std::vector<Arg> args;            // Command
  std::vector<Option> options;      // Command

  const Option* option(std::string_view name) const;
  friend bool operator==(const Statement& a, const Statement& b);
};

struct Session {
  std::vector<Statement> statements;
  friend bool operator==(const Session& a, const Session& b) { return a.statements == b.statements; }
};

/// Lexical and syntactic errors carry a location.
class ParseError : public std::runtime_error {
 public:
  ParseError(Location loc, const std::string& message)
      : std::runtime_error(loc.to_string() + ": " + message), loc_(loc) {}
  const Location& location() const { return loc_; }

 private:
  Location loc_;
};

Session parse_session(std::string_view text);
/// One statement per line.
std::string print(const Session& s);
std::string print(const Statement& s);

}  // namespace nambu
