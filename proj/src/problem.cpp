#include "polyheat/problem.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "polyheat/error.hpp"

namespace polyheat {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_config, "malformed config: " + what);
}

double number(const json& j, const char* key) {
  if (!j.contains(key)) malformed(std::string("missing \"") + key + "\"");
  if (!j.at(key).is_number()) malformed(std::string("\"") + key + "\" must be a number");
  return j.at(key).get<double>();
}

int integer(const json& j, const char* key) {
  if (!j.at(key).is_number_integer()) {
    malformed(std::string("\"") + key + "\" must be an integer");
  }
  return j.at(key).get<int>();
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) malformed(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) malformed("unknown key \"" + k + "\" in " + where);
  }
}

PlaneWaveState atoms(const json& j, const char* freq_key, const char* where,
                     std::size_t cap) {
  if (!j.is_array()) malformed(std::string(where) + " must be an array");
  std::vector<Wave> waves;
  for (const json& a : j) {
    only_keys(a, {freq_key, "re", "im"}, where);
    const double re = a.contains("re") ? number(a, "re") : 0.0;
    const double im = a.contains("im") ? number(a, "im") : 0.0;
    waves.push_back({number(a, freq_key), Complex{re, im}});
  }
  return PlaneWaveState(std::move(waves), cap);
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  only_keys(j, {"name", "p", "alpha", "t", "u0_atoms", "V_atoms", "grid", "dyson",
                "spectral", "tol"},
            "problem");
  ProblemSpec s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) malformed("\"name\" must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("p")) malformed("missing \"p\"");
  const int p = integer(j, "p");
  if (!j.contains("alpha") || !j["alpha"].is_array() || j["alpha"].size() != 2 ||
      !j["alpha"][0].is_number() || !j["alpha"][1].is_number()) {
    malformed("\"alpha\" must be [re, im]");
  }
  s.params = validate_params(p, Complex{j["alpha"][0].get<double>(), j["alpha"][1].get<double>()});
  s.t = number(j, "t");
  if (!(s.t >= 0.0)) malformed("\"t\" must be >= 0");
  if (j.contains("dyson")) {
    only_keys(j["dyson"], {"n_max", "time_mesh", "simplex_order", "max_atoms"}, "dyson");
    const json& d = j["dyson"];
    if (d.contains("n_max")) s.dyson.n_max = integer(d, "n_max");
    if (d.contains("time_mesh")) s.dyson.time_mesh = integer(d, "time_mesh");
    if (d.contains("simplex_order")) s.dyson.simplex_order = integer(d, "simplex_order");
    if (d.contains("max_atoms")) {
      const int cap = integer(d, "max_atoms");
      if (cap < 1) malformed("\"max_atoms\" must be >= 1");
      s.dyson.max_atoms = static_cast<std::size_t>(cap);
    }
  } else {
    s.dyson.n_max = Defaults::n_max;
    s.dyson.time_mesh = Defaults::time_mesh;
  }
  s.u0 = j.contains("u0_atoms") ? atoms(j["u0_atoms"], "y", "u0_atoms", s.dyson.max_atoms)
                                : PlaneWaveState();
  s.V = j.contains("V_atoms") ? atoms(j["V_atoms"], "z", "V_atoms", s.dyson.max_atoms)
                              : PlaneWaveState();
  if (j.contains("grid")) {
    only_keys(j["grid"], {"N", "L"}, "grid");
    if (j["grid"].contains("N")) s.grid_N = integer(j["grid"], "N");
    if (j["grid"].contains("L")) s.grid_L = number(j["grid"], "L");
  }
  if (j.contains("spectral")) {
    only_keys(j["spectral"], {"steps"}, "spectral");
    if (j["spectral"].contains("steps")) s.spectral_steps = integer(j["spectral"], "steps");
  }
  if (j.contains("tol")) s.tol = number(j, "tol");
  if (!(s.tol > 0.0)) malformed("\"tol\" must be positive");
  if (s.spectral_steps < 1) malformed("\"spectral.steps\" must be >= 1");
  try {
    s.dyson.validate();
  } catch (const Error& e) {
    malformed(e.what());
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) malformed("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemSpec load_problem(const std::string& path) { return parse_problem(read_file(path)); }

}  // namespace polyheat
