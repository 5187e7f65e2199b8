#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "nambu/runner.hpp"
#include "nambu/session.hpp"
#include "support/corpus.hpp"

using namespace nambu;
using nambu::test::corpus;
using nambu::test::corpus_path;
using nambu::test::read_text;

namespace {

ExprPtr leaf(Expr::Kind k, std::string name = {}, Rat n = Rat(0)) {
  Expr e;
  e.kind = k;
  e.name = std::move(name);
  e.number = n;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr node(Expr::Kind k, ExprPtr a, ExprPtr b = nullptr, unsigned exponent = 0) {
  Expr e;
  e.kind = k;
  e.lhs = std::move(a);
  e.rhs = std::move(b);
  e.exponent = exponent;
  return std::make_shared<const Expr>(std::move(e));
}

ExprPtr random_expr(std::mt19937_64& rng, int depth) {
  static const char* names[] = {"x", "y", "z1", "x'"};
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
  if (depth == 0 || pick(4) == 0) {
    switch (pick(4)) {
      case 0: return leaf(Expr::Kind::Number, {}, Rat(pick(7)) / Rat(1 + pick(3)));
      case 1: return leaf(Expr::Kind::Name, names[pick(4)]);
      case 2: return leaf(Expr::Kind::Vector, names[pick(4)]);
      default: return leaf(Expr::Kind::Differential, names[pick(4)]);
    }
  }
  switch (pick(8)) {
    case 0: return node(Expr::Kind::Neg, random_expr(rng, depth - 1));
    case 1: return node(Expr::Kind::Add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 2: return node(Expr::Kind::Sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 3: return node(Expr::Kind::Mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return node(Expr::Kind::Wedge, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: return node(Expr::Kind::Pow, random_expr(rng, depth - 1), nullptr, 1 + pick(4));
    case 6: return node(Expr::Kind::Differential, random_expr(rng, depth - 1));
    default: return node(Expr::Kind::Mul, leaf(Expr::Kind::Number, {}, Rat(3, 2)), random_expr(rng, depth - 1));
  }
}

ExprPtr parse_expr(const std::string& text) {
  const Session s = parse_session("e := " + text);
  EXPECT_EQ(s.statements.size(), 1u);
  return s.statements.at(0).expr;
}

RunResult run_file(const std::string& stem) { return run(read_text(corpus_path(stem)), RunOptions{}); }

}  // namespace

TEST(ExprPrint, Examples) {
  EXPECT_EQ(print(*parse_expr("(x)")), "x");
  EXPECT_EQ(print(*parse_expr("x*(y*z)")), "x*(y*z)");
  EXPECT_EQ(print(*parse_expr("(x*y)*z")), "x*y*z");
  EXPECT_EQ(print(*parse_expr("x - (y + z)")), "x - (y + z)");
  EXPECT_EQ(print(*parse_expr("(x - y) + z")), "x - y + z");
  EXPECT_EQ(print(*parse_expr("-(x^2)")), "-x^2");
  EXPECT_EQ(print(*parse_expr("(-x)^2")), "(-x)^2");
  EXPECT_EQ(print(*parse_expr("@x^@y^(x1*@z)")), "@x ^ @y ^ x1*@z");
  EXPECT_EQ(print(*parse_expr("d(x*y) ^ d z")), "d(x*y) ^ d z");
  EXPECT_EQ(print(*parse_expr("x ^ (2)")), "x ^ (2)");
  EXPECT_EQ(print(*parse_expr("3/2*x^2")), "3/2*x^2");
}

TEST(ExprPrint, PowerVersusWedge) {
  const auto p = parse_expr("x^2");
  EXPECT_EQ(p->kind, Expr::Kind::Pow);
  EXPECT_EQ(p->exponent, 2u);
  const auto w = parse_expr("x ^ (2)");
  EXPECT_EQ(w->kind, Expr::Kind::Wedge);
  const auto w2 = parse_expr("@x ^ @y");
  EXPECT_EQ(w2->kind, Expr::Kind::Wedge);
}

TEST(ExprPrint, RandomTreesRoundTrip) {
  std::mt19937_64 rng(20261014);
  for (int i = 0; i < 2000; ++i) {
    const ExprPtr e = random_expr(rng, 4);
    const std::string text = print(*e);
    const ExprPtr back = parse_expr(text);
    ASSERT_TRUE(back) << text;
    EXPECT_TRUE(*back == *e) << text << " reparsed as " << print(*back);
    EXPECT_EQ(print(*back), text);
  }
}

TEST(Corpus, EveryFileIsListed) {
  std::set<std::string> listed, found;
  for (const auto& c : corpus()) listed.insert(c.stem);
  for (const auto& f : std::filesystem::directory_iterator(NAMBU_CORPUS_DIR)) {
    if (f.path().extension() == ".nmb") found.insert(f.path().stem().string());
  }
  EXPECT_EQ(listed, found);
}

TEST(Corpus, ParsePrintRoundTrip) {
  for (const auto& c : corpus()) {
    const Session s = parse_session(read_text(corpus_path(c.stem)));
    const std::string text = print(s);
    const Session back = parse_session(text);
    EXPECT_TRUE(back == s) << c.stem;
    EXPECT_EQ(print(back), text) << c.stem;
  }
}

TEST(Corpus, ExitCodes) {
  for (const auto& c : corpus()) EXPECT_EQ(run_file(c.stem).exit_code(), c.exit_code) << c.stem;
}

TEST(Corpus, WitnessesReverifyOnReplay) {
  std::size_t checked = 0;
  for (const auto& c : corpus()) {
    for (const auto& r : run_file(c.stem).reports) {
      ASSERT_NE(r.verdict, Verdict::Error) << c.stem << ": " << r.error.value_or("");
      if (r.verdict != Verdict::Fail && r.verdict != Verdict::Refuted) continue;
      EXPECT_TRUE(r.witness) << r.command;
      const WitnessCheck w = verify_witness(r);
      EXPECT_TRUE(w.ok()) << c.stem << ": " << r.command << ": " << w.detail;
      ++checked;
    }
  }
  EXPECT_GE(checked, 6u);
}

TEST(Corpus, JsonRoundTrip) {
  for (const auto& c : corpus()) {
    const RunResult r = run_file(c.stem);
    const auto back = reports_from_json(to_json(r, c.stem, RunOptions{}));
    ASSERT_EQ(back.size(), r.reports.size()) << c.stem;
    for (std::size_t i = 0; i < back.size(); ++i) {
      EXPECT_EQ(back[i].command, r.reports[i].command);
      EXPECT_EQ(back[i].inputs, r.reports[i].inputs);
      EXPECT_EQ(back[i].recheck, r.reports[i].recheck);
      EXPECT_EQ(back[i].seed, r.reports[i].seed);
      EXPECT_TRUE(back[i].same_outcome(r.reports[i])) << back[i].command;
    }
  }
}

TEST(Run, RefutationReportsWitnessSeedAndRecheck) {
  const RunResult r = run_file("fi_refuted");
  const Report* refuted = nullptr;
  for (const auto& rep : r.reports) {
    if (rep.verdict == Verdict::Refuted && rep.command.rfind("check fi ", 0) == 0) refuted = &rep;
  }
  ASSERT_NE(refuted, nullptr);
  ASSERT_TRUE(refuted->witness);
  ASSERT_TRUE(refuted->recheck);
  EXPECT_EQ(refuted->recheck->rfind("check fituple ", 0), 0u);
  EXPECT_FALSE(refuted->seed);
  const Report again = replay(*refuted);
  EXPECT_TRUE(again.same_outcome(*refuted));
}

TEST(Run, RandomizedChecksEmbedTheirSeed) {
  RunOptions o;
  o.seed = 77;
  const RunResult r = run("chart R3 (x, y, z)\npi := @x^@y^@z\ncheck wlfb pi --trials 2\ncheck wlfb pi --trials 2 --seed 5", o);
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_EQ(r.reports[0].seed, 77u);
  EXPECT_EQ(r.reports[1].seed, 5u);
  EXPECT_EQ(r.reports[0].verdict, Verdict::Pass);
}

TEST(Run, JsonDocumentFields) {
  const RunResult r = run_file("graph_scaling");
  const std::string json = to_json(r, "graph_scaling.nmb", RunOptions{});
  for (const char* key : {"\"schema\": \"report-v1\"", "\"exit_code\": 1", "\"reports\"", "\"witness\"",
                          "\"recheck\"", "\"inputs\"", "\"timing_ms\"", "\"location\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
  EXPECT_THROW(reports_from_json("{\"schema\": \"other\", \"reports\": []}"), std::exception);
}

TEST(Run, EvalOfAnExpression) {
  const RunResult r = run("chart R3 (x, y, z)\n(x + 1)*(x - 1)", RunOptions{});
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].verdict, Verdict::Pass);
  EXPECT_EQ(r.reports[0].value, "x^2 - 1");
  EXPECT_EQ(r.exit_code(), 0);

  const RunResult v = run("chart R3 (x, y, z); @x^@y*z - @y^@x", RunOptions{});
  ASSERT_EQ(v.reports.size(), 1u);
  EXPECT_EQ(v.reports[0].value, "@x^@y * (z + 1)");
}

TEST(Run, ZeroTensorWarning) {
  const RunResult r = run("chart R3 (x, y, z)\npi := @x^@x\ncheck fi pi --degree 1", RunOptions{});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0], "2:1: pi evaluates to the zero multivector");
  EXPECT_EQ(r.exit_code(), 0);
}

TEST(Run, OptionsAreEchoed) {
  RunOptions o;
  o.degree = 1;
  const RunResult r = run("chart R3 (x, y, z)\npi := @x^@y^@z\ncheck fi pi", o);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].command, "check fi pi --degree 1");
  EXPECT_EQ(r.reports[0].inputs, (std::vector<std::string>{"chart R3 (x, y, z)", "pi := @x ^ @y ^ @z"}));
}

TEST(Errors, ParseErrorsCarryLocation) {
  struct Case {
    const char* text;
    std::size_t line, column;
  };
  const Case cases[] = {
      {"x $ y", 1, 3},
      {"chart R3 (x, y, z)\npi := x^1/2", 2, 10},
      {"chart R3 (x, y, z)\npi := (x + ", 2, 12},
      {"chart R3 (x y)", 1, 13},
      {"chart R3 (x, y, z)\nsub C := {x = }", 2, 15},
      {"chart R3 (x, y, z)\nx := 1/0", 2, 6},
  };
  for (const auto& c : cases) {
    try {
      parse_session(c.text);
      ADD_FAILURE() << "no error for " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.location().line, c.line) << c.text << ": " << e.what();
      EXPECT_EQ(e.location().column, c.column) << c.text << ": " << e.what();
    }
    const RunResult r = run(c.text, RunOptions{});
    ASSERT_EQ(r.reports.size(), 1u);
    EXPECT_EQ(r.reports[0].verdict, Verdict::Error);
    EXPECT_EQ(r.reports[0].command, "parse");
    ASSERT_TRUE(r.reports[0].location);
    EXPECT_EQ(r.reports[0].location->line, c.line);
    EXPECT_EQ(r.exit_code(), 2);
  }
}

TEST(Errors, SemanticErrorsStopTheRun) {
  const RunResult r = run(read_text(std::string(NAMBU_CORPUS_DIR) + "/../tests/cli/malformed.nmb"), RunOptions{});
  ASSERT_EQ(r.reports.size(), 2u);
  EXPECT_EQ(r.reports[0].verdict, Verdict::VerifiedOnFamily);
  EXPECT_EQ(r.reports[1].verdict, Verdict::Error);
  EXPECT_EQ(r.reports[1].error, "unknown name 'nope'");
  ASSERT_TRUE(r.reports[1].location);
  EXPECT_EQ(r.reports[1].location->to_string(), "4:10");
  EXPECT_EQ(r.exit_code(), 2);
}

TEST(Errors, SemanticMessages) {
  struct Case {
    const char* text;
    const char* error;
    const char* loc;
  };
  const Case cases[] = {
      {"chart R3 (x, y, z)\npi := @x^@q", "'q' is not a coordinate of chart R3", "2:10"},
      {"chart R3 (x, y, z)\nchart R2 (a, b)\nmap f : R2 -> R3 := (a, b)", "map to R3 needs 3 components, got 2",
       "3:1"},
      {"chart R3 (x, y, z)\ncheck bogus x", "unknown command 'check bogus'", "2:1"},
      {"pi := 1", "no chart declared", "1:1"},
  };
  for (const auto& c : cases) {
    const RunResult r = run(c.text, RunOptions{});
    ASSERT_FALSE(r.reports.empty()) << c.text;
    const Report& last = r.reports.back();
    EXPECT_EQ(last.verdict, Verdict::Error) << c.text;
    EXPECT_EQ(last.error.value_or(""), c.error) << c.text;
    ASSERT_TRUE(last.location) << c.text;
    EXPECT_EQ(last.location->to_string(), c.loc) << c.text;
  }
}

TEST(Verdicts, StringsRoundTrip) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::VerifiedOnFamily, Verdict::Refuted, Verdict::Error}) {
    EXPECT_EQ(verdict_from_string(to_string(v)), v);
  }
  EXPECT_EQ(to_string(Verdict::VerifiedOnFamily), "VERIFIED_ON_FAMILY");
  EXPECT_FALSE(verdict_from_string("MAYBE"));
}
