#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nambu/session.hpp"

namespace nambu {

enum class Verdict { Pass, Fail, VerifiedOnFamily, Refuted, Error };
std::string to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct Report {
  std::string command;              // canonical statement, effective options included
  std::vector<std::string> inputs;  // canonical statements the command depends on
  Verdict verdict = Verdict::Pass;
  std::optional<std::string> value;
  std::optional<std::string> witness;
  /// Narrower command that recomputes the witness on its own.
  std::optional<std::string> recheck;
  std::optional<std::string> error;
  std::optional<std::uint64_t> seed;
  std::optional<Location> location;
  double timing_ms = 0;

  /// inputs and command, one statement per line.
  std::string session_text() const;
  /// Verdict, value and witness agree.
  bool same_outcome(const Report& other) const;
};

struct RunOptions {
  std::uint64_t seed = 1;
  unsigned degree = 2;
  std::size_t trials = 10;
};

struct RunResult {
  std::vector<Report> reports;
  std::vector<std::string> warnings;
  /// 0 when every verdict is PASS or VERIFIED_ON_FAMILY, 2 when any is ERROR, 1 otherwise.
  int exit_code() const;
};

/// Executes statements in order; the first error ends the run with an ERROR report.
RunResult run(const Session& session, const RunOptions& options);
/// Parses first; a parse error becomes a single ERROR report.
RunResult run(std::string_view text, const RunOptions& options);

/// Re-runs the report's own session with its seed; returns the last report.
Report replay(const Report& r);

struct WitnessCheck {
  bool reproduced = false;  // replay gives the same outcome
  bool rechecked = true;    // the recheck command reproduces the witness, when present
  std::string detail;
  bool ok() const { return reproduced && rechecked; }
};
WitnessCheck verify_witness(const Report& r);

/// `[PASS] command` followed by indented value, witness and seed lines.
std::string to_text(const Report& r);

/// Schema report-v1.
std::string to_json(const RunResult& result, std::string_view source, const RunOptions& options);
std::vector<Report> reports_from_json(std::string_view json_text);

}  // namespace nambu
