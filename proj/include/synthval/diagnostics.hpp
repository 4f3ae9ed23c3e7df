#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

enum class DiagnosticCheck {
  PrimaryKeyUnique,
  PrimaryKeyNonNull,
  ContinuousRange,
  DiscreteCategories,
  NullCell,
};

std::string to_string(DiagnosticCheck check);

struct DiagnosticViolation {
  DiagnosticCheck check;
  std::string column;
  std::string detail;
  std::size_t count = 0;
};

struct DiagnosticReport {
  bool passed = true;  // true iff violations is empty
  std::vector<DiagnosticViolation> violations;
};

// Structural validity gate: a synthetic dataset with any violation is dropped
// from evaluation. Checks primary-key uniqueness and non-nullness, continuous
// values against the real [min, max] (closed interval), discrete values
// against the real category set, and null feature cells. All checks run; all
// violations are reported. Datasets without a primary-key column skip the key
// checks. Throws on schema mismatch between the two datasets.
DiagnosticReport diagnose(const Dataset& real, const Dataset& synthetic);

}  // namespace synthval
