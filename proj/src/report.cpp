#include "bdie/error.hpp"
#include "bdie/verify.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bdie {

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::warn: return "warn";
    case Status::info: return "info";
  }
  return "?";
}

CsvRow bound_row(std::string suite, std::string name, int level, double h, double value, double reference,
                 double error, double tolerance) {
  const bool ok = std::isfinite(error) && error <= tolerance;
  return {std::move(suite), std::move(name), level, h, value, reference, error, tolerance,
          ok ? Status::pass : Status::fail};
}

CsvRow at_least_row(std::string suite, std::string name, int level, double h, double value, double minimum) {
  const double shortfall = std::isfinite(value) ? std::max(0.0, minimum - value) : minimum;
  const bool ok = std::isfinite(value) && value >= minimum;
  return {std::move(suite), std::move(name), level, h, value, minimum, shortfall, 0.0,
          ok ? Status::pass : Status::fail};
}

CsvRow info_row(std::string suite, std::string name, int level, double h, double value) {
  return {std::move(suite), std::move(name), level, h, value, 0.0, 0.0, 0.0, Status::info};
}

void write_csv(std::ostream& out, std::span<const CsvRow> rows) {
  out << "# bdie-csv 1\n";
  out << "suite,name,level,h,value,reference,error,tolerance,status\n";
  for (const auto& r : rows)
    out << fmt::format("{},{},{},{:.6e},{:.9e},{:.9e},{:.3e},{:.3e},{}\n", r.suite, r.name, r.level, r.h, r.value,
                       r.reference, r.error, r.tolerance, to_string(r.status));
}

bool all_passed(std::span<const CsvRow> rows) {
  for (const auto& r : rows)
    if (r.status == Status::fail) return false;
  return true;
}

Tolerances default_tolerances() {
  return {
      {"transfer", 1e-13},
      {"kernel", 1e-12},
      {"sphere_V1_center", 2e-2},
      {"sphere_W1_interior", 2e-2},
      {"sphere_W1_exterior", 2e-2},
      {"sphere_Wb1", 3e-2},
      {"sphere_Wpb1", 3e-2},
      {"sphere_L1", 3e-2},
      {"sphere_rate", 2.5},
      {"jump_W", 5e-2},
      {"jump_TV", 5e-2},
      {"jump_TW", 5e-2},
      {"jump_TW_variable", 8e-2},
      {"greenu1", 3e-2},
      {"green_rate", 1.7},
      {"solve_error", 5e-2},
      {"eoc", 1.0},
      {"sigma_variation", 0.5},
      {"neumann_kernel", 0.1},
      {"stabilization_ratio", 10.0},
      {"boundary_mean", 1e-8},
      {"solvability", 1e-3},
      {"solvability_shift", 3e-2},
      {"lifting_rate", 1.5},
      {"extension_u", 1e-2},
      {"round_trip", 5e-2},
      {"extension_psi", 0.5},
      {"shrink_rate", 1.0},
      {"runtime_transfer", 60.0},
      {"runtime_sphere", 300.0},
  };
}

double tolerance(const Tolerances& tol, const std::string& name) {
  const auto it = tol.find(name);
  require(it != tol.end(), ErrorKind::contract, "no tolerance named '" + name + "'");
  return it->second;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(ErrorKind::parse, fmt::format("line {}: '{}' is not a number", line, text));
  return v;
}

bool parse_bool(const std::string& text, int line) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  fail(ErrorKind::parse, fmt::format("line {}: '{}' is not a boolean", line, text));
}

std::vector<int> parse_levels(std::string text, int line) {
  for (char& c : text)
    if (c == ',') c = ' ';
  std::istringstream in(text);
  std::vector<int> out;
  std::string tok;
  while (in >> tok) {
    const double v = parse_number(tok, line);
    if (v != std::floor(v) || v < 0) fail(ErrorKind::parse, fmt::format("line {}: level '{}' is not a count", line, tok));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace

StudyConfig parse_study_config(std::istream& in) {
  StudyConfig cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(ErrorKind::parse, fmt::format("line {}: expected 'key = value'", line));
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (value.empty()) fail(ErrorKind::parse, fmt::format("line {}: '{}' has no value", line, key));
    if (key == "case") {
      cfg.case_id = value;
    } else if (key == "system") {
      cfg.system = system_from_id(value);
    } else if (key == "shape") {
      if (value != "cube" && value != "ball") fail(ErrorKind::parse, fmt::format("line {}: unknown shape '{}'", line, value));
      cfg.shape = value;
    } else if (key == "levels") {
      cfg.levels = parse_levels(value, line);
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "solver") {
      cfg.solver = solver_path_from_id(value);
    } else if (key == "lifting") {
      cfg.lifting = lifting_from_id(value);
    } else if (key == "stabilize") {
      cfg.stabilize = parse_bool(value, line);
    } else if (key.rfind("tol.", 0) == 0) {
      const std::string name = key.substr(4);
      if (!cfg.tolerances.count(name)) fail(ErrorKind::parse, fmt::format("line {}: unknown tolerance '{}'", line, name));
      cfg.tolerances[name] = parse_number(value, line);
    } else {
      fail(ErrorKind::parse, fmt::format("line {}: unknown key '{}'", line, key));
    }
  }
  require(cfg.levels.size() >= 2, ErrorKind::validation, "a study needs at least two levels");
  for (std::size_t i = 1; i < cfg.levels.size(); ++i)
    require(cfg.levels[i] > cfg.levels[i - 1], ErrorKind::validation, "levels must be strictly increasing");
  return cfg;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::resource, "cannot open config '" + path + "'");
  return parse_study_config(in);
}

}  // namespace bdie
