#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sssv/errors.hpp"
#include "sssv/ising.hpp"

namespace sssv {

// Problem file layout:
//   {"n_spins": 8, "h": [[0, 1.0], ...], "j": [[0, 1, 1.0], ...], "core": [0, 1, 2, 3]}
// Spins missing from "h" get zero field; "core" is optional.

inline nlohmann::json problem_to_json(const IsingProblem& problem) {
  nlohmann::json doc;
  doc["n_spins"] = problem.n_spins();
  auto h = nlohmann::json::array();
  const auto fields = problem.fields();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i] != 0.0) h.push_back({i, fields[i]});
  doc["h"] = std::move(h);
  auto j = nlohmann::json::array();
  for (const auto& c : problem.couplings()) j.push_back({c.i, c.j, c.value});
  doc["j"] = std::move(j);
  if (problem.core_set()) doc["core"] = *problem.core_set();
  return doc;
}

inline IsingProblem problem_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw InvalidInput("problem file: top level must be an object");
    const auto n = doc.at("n_spins").get<std::size_t>();
    if (n == 0) throw InvalidInput("problem file: n_spins must be positive");
    std::vector<double> h(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& entry : doc.value("h", nlohmann::json::array())) {
      if (!entry.is_array() || entry.size() != 2) throw InvalidInput("problem file: 'h' entries must be [index, value]");
      const auto i = entry[0].get<std::size_t>();
      if (i >= n) throw InvalidInput("problem file: field index " + std::to_string(i) + " out of range");
      if (seen[i]) throw InvalidInput("problem file: field for spin " + std::to_string(i) + " given twice");
      seen[i] = true;
      h[i] = entry[1].get<double>();
    }
    std::vector<Coupling> j;
    for (const auto& entry : doc.value("j", nlohmann::json::array())) {
      if (!entry.is_array() || entry.size() != 3) throw InvalidInput("problem file: 'j' entries must be [i, j, value]");
      j.push_back({entry[0].get<std::size_t>(), entry[1].get<std::size_t>(), entry[2].get<double>()});
    }
    std::optional<std::vector<std::size_t>> core;
    if (doc.contains("core")) core = doc["core"].get<std::vector<std::size_t>>();
    return IsingProblem(n, std::move(h), std::move(j), std::move(core));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("problem file: ") + e.what());
  }
}

inline IsingProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("problem file '" + path + "': " + e.what());
  }
  return problem_from_json(doc);
}

inline void save_problem(const IsingProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write problem file '" + path + "'");
  out << problem_to_json(problem).dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace sssv
