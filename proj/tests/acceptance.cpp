// Acceptance run: one PASS/FAIL line per criterion, then the detail rows as CSV.
// Usage: acceptance [--strict] [criterion ids...]
// Without --strict the exit code only reflects whether every criterion ran.

#include "bdie/acceptance.hpp"

#include <fmt/format.h>

#include <cstring>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  bool strict = false;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--strict") == 0) {
      strict = true;
      continue;
    }
    try {
      ids.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "usage: acceptance [--strict] [criterion ids...]\n";
      return 2;
    }
  }
  if (ids.empty())
    for (int id = 1; id <= bdie::kCriterionCount; ++id) ids.push_back(id);

  std::vector<bdie::CriterionResult> results;
  bool crashed = false;
  for (const int id : ids) {
    try {
      results.push_back(bdie::run_criterion(id));
      const auto& r = results.back();
      std::cout << fmt::format("criterion {:>2}: {}  {} ({:.1f} s)\n", r.id, r.passed() ? "PASS" : "FAIL", r.title,
                               r.seconds)
                << std::flush;
    } catch (const std::exception& e) {
      crashed = true;
      std::cout << fmt::format("criterion {:>2}: FAIL  error: {}\n", id, e.what()) << std::flush;
    }
  }

  bdie::Rows all;
  for (const auto& r : results) all.insert(all.end(), r.rows.begin(), r.rows.end());
  std::cout << '\n';
  bdie::write_csv(std::cout, all);

  int failed = 0;
  for (const auto& r : results) failed += r.passed() ? 0 : 1;
  std::cout << fmt::format("\n{} of {} criteria passed\n", static_cast<int>(results.size()) - failed,
                           static_cast<int>(ids.size()));
  if (crashed) return 1;
  return strict && failed > 0 ? 1 : 0;
}
