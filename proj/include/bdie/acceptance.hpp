#pragma once

#include "bdie/verify.hpp"

#include <string>

namespace bdie {

inline constexpr int kCriterionCount = 10;

struct CriterionResult {
  int id = 0;
  std::string title;
  Rows rows;
  double seconds = 0.0;

  bool passed() const { return all_passed(rows); }
};

// Runs one acceptance criterion (1..kCriterionCount); rows use the suite "criterion<id>".
CriterionResult run_criterion(int id, const Tolerances& tol = default_tolerances());
std::string criterion_title(int id);

}  // namespace bdie
