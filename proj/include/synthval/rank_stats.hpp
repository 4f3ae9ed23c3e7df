#pragma once

#include <span>
#include <string>
#include <vector>

namespace synthval {

enum class Orientation { LowerBetter, HigherBetter };

// k models scored on n tests. Scores are comparable within a test column
// only after orientation makes "smaller is better" uniform.
struct ScoreMatrix {
  std::vector<std::string> models;               // k names
  std::vector<std::string> tests;                // n names
  std::vector<std::vector<double>> scores;       // k x n
  std::vector<Orientation> orientations;         // per test

  std::size_t model_count() const { return models.size(); }
  std::size_t test_count() const { return tests.size(); }
  void validate() const;  // k >= 2, n >= 2, rectangular, finite cells
};

// Flips the sign of every higher-better column and marks it lower-better.
// Idempotent.
ScoreMatrix orient(ScoreMatrix matrix);

struct AlignedRanks {
  std::vector<std::string> models;
  std::vector<std::vector<double>> ranks;  // k x n, values in [1, kn]
  std::vector<double> model_totals;        // rank total per model
  std::vector<double> test_totals;         // rank total per test

  std::size_t model_count() const { return models.size(); }
  std::size_t test_count() const { return test_totals.size(); }
  double mean_rank(std::size_t model) const {
    return model_totals[model] / static_cast<double>(test_totals.size());
  }
};

// Subtracts each test column's mean from its scores, pools all k*n aligned
// observations and ranks them ascending, with average ranks on ties.
AlignedRanks aligned_ranks(const ScoreMatrix& oriented);

struct FarResult {
  double statistic = 0.0;
  int dof = 0;                        // k - 1
  double p_value = 1.0;
  std::vector<double> mean_ranks;     // per model, matrix order
  std::vector<std::string> ordering;  // models by ascending mean rank
};

// Friedman aligned-ranks statistic from the rank totals, compared against the
// chi-square distribution with k-1 degrees of freedom. A degenerate
// (non-positive) denominator reports statistic 0 and p-value 1.
FarResult far_statistic(const AlignedRanks& ranks);

struct ControlComparison {
  std::string model;
  double z = 0.0;
  double p = 1.0;
};

// One-vs-control comparisons against the best-ranked model:
// z_i = (mean_rank_i - mean_rank_control) / sqrt(k (n + 1) / 6), two-sided
// normal p-values. The control itself is not included.
std::vector<ControlComparison> control_pvalues(const AlignedRanks& ranks);

struct FinnerAdjusted {
  std::vector<double> apv;     // adjusted p-values, input order
  std::vector<bool> rejected;  // APV <= alpha, input order
  double alpha = 0.05;
};

// Finner step-down adjustment for k - 1 hypotheses:
// APV_(i) = min(1, max_{j <= i} 1 - (1 - p_(j))^((k-1)/j)) over the ascending
// p ordering, mapped back to the input order.
FinnerAdjusted finner_adjust(std::span<const double> pvalues, int k,
                             double alpha = 0.05);

struct FinnerRow {
  std::string model;
  double z = 0.0;
  double p = 1.0;
  double apv = 1.0;
  bool rejected = false;
};

struct FinnerResult {
  std::string control;
  double alpha = 0.05;
  std::vector<FinnerRow> rows;  // non-control models, matrix order
};

// control_pvalues + finner_adjust in one step.
FinnerResult finner_posthoc(const AlignedRanks& ranks, double alpha = 0.05);

// Average ranks (ties averaged), 1-based, over an arbitrary value list.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace synthval
