#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nambu/error.hpp"
#include "nambu/runner.hpp"

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_result(const nambu::RunResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& rep : r.reports) {
    std::cout << nambu::to_text(rep);
    if (rep.location) std::cout << "  location: " << rep.location->to_string() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nambu: exact checks for Nambu-Poisson structures"};
  app.require_subcommand(1);
  nambu::RunOptions opts;

  std::string file, json_out, expr;
  auto* run = app.add_subcommand("run", "Run a session file");
  run->add_option("FILE", file, "Session file (.nmb)")->required();
  run->add_option("--json", json_out, "Write a report-v1 JSON document");
  auto* eval = app.add_subcommand("eval", "Run statements given on the command line");
  eval->add_option("EXPR", expr, "Statements, separated by ';'")->required();
  for (auto* sc : {run, eval}) {
    sc->add_option("--seed", opts.seed, "Seed for randomized checks");
    sc->add_option("--degree", opts.degree, "Default degree bound");
    sc->add_option("--trials", opts.trials, "Default trial count for randomized checks");
  }
  auto* fmt = app.add_subcommand("fmt", "Print a session file in canonical form");
  fmt->add_option("FILE", file, "Session file")->required();
  auto* replay = app.add_subcommand("replay", "Replay every report of a report-v1 document");
  replay->add_option("JSON", file, "Report document")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto text = read_file(file);
      if (!text) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
      }
      const auto r = nambu::run(*text, opts);
      print_result(r);
      if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) {
          std::cerr << "cannot write " << json_out << "\n";
          return 2;
        }
        out << nambu::to_json(r, file, opts);
      }
      return r.exit_code();
    }
    if (*eval) {
      const auto r = nambu::run(expr, opts);
      print_result(r);
      return r.exit_code();
    }
    if (*fmt) {
      const auto text = read_file(file);
      if (!text) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
      }
      std::cout << nambu::print(nambu::parse_session(*text));
      return 0;
    }
    if (*replay) {
      const auto text = read_file(file);
      if (!text) {
        std::cerr << "cannot read " << file << "\n";
        return 2;
      }
      int code = 0;
      for (const auto& rep : nambu::reports_from_json(*text)) {
        const auto check = nambu::verify_witness(rep);
        std::cout << (check.ok() ? "[REPRODUCED] " : "[MISMATCH] ") << rep.command << "\n";
        if (!check.ok()) {
          std::cout << "  " << check.detail << "\n";
          code = 1;
        }
      }
      return code;
    }
  } catch (const nambu::ParseError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
