#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "beamlab/engine.hpp"
#include "beamlab/scenario.hpp"

namespace beamlab::testing {

inline nlohmann::json bundled_doc(const std::string& name) {
  std::ifstream in(resolve_scenario(name));
  return nlohmann::json::parse(in);
}

inline std::string trace_of(const scenario& sc, sim_result* result = nullptr) {
  std::ostringstream out;
  trace_recorder rec(out);
  const auto r = run(sc, {&rec, nullptr});
  if (result) *result = r;
  return out.str();
}

inline std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

}  // namespace beamlab::testing
