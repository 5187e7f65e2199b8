#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace nambu::test {

struct CorpusEntry {
  std::string stem;
  int exit_code;
};

inline const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries = {
      {"coinduce_obstructed", 1}, {"coinduce_projection", 0}, {"delta", 0},
      {"fi_positive", 0},         {"fi_refuted", 1},          {"form_bracket", 0},
      {"graph_identity", 0},      {"graph_scaling", 1},       {"heisenberg", 1},
      {"lie_group_constant", 1},  {"nambu_lie_group", 0},     {"pair_groupoid", 0},
      {"subgroupoid", 0},         {"subgroupoid_point", 1},   {"zero_tensor", 0},
  };
  return entries;
}

inline std::string corpus_path(const std::string& stem) {
  return std::string(NAMBU_CORPUS_DIR) + "/" + stem + ".nmb";
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nambu::test
