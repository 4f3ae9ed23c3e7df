#pragma once

#include <span>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

// 1-Wasserstein (earth mover) distance between two empirical distributions:
// the area between their CDF step functions. Throws on empty input.
double wasserstein_1d(std::span<const double> real_values,
                      std::span<const double> synth_values);

// Two-sample Cramér's V on the 2 x c contingency table (row = dataset
// membership, column = category): V = sqrt(chi2 / N). Returns 0 when fewer
// than two categories exist in total. Throws on empty input.
double cramers_v(std::span<const std::string> real_tokens,
                 std::span<const std::string> synth_tokens);

enum class FeatureMetric { Wasserstein, CramersV };

struct FeatureScore {
  std::string column;
  FeatureMetric metric = FeatureMetric::Wasserstein;
  double value = 0.0;
};

// One score per feature column: Wasserstein distance for continuous columns,
// Cramér's V for discrete ones.
std::vector<FeatureScore> wc_feature_scores(const Dataset& real,
                                            const Dataset& synthetic);

// Collapses a models x features score matrix into one score per model: each
// feature is treated as a problem, scores are aligned and rank-pooled
// (lower is better), and each model's score is its mean aligned rank.
std::vector<double> wc_aggregate(
    const std::vector<std::vector<double>>& per_model_feature_scores);

struct NoveltyConfig {
  double alpha = 0.05;  // match threshold on min-max-normalized values, in (0, 1)
};

// Fraction of synthetic rows with no matching real row. A synthetic row
// matches a real row when every continuous feature is within alpha after
// min-max normalization against the real ranges and every discrete feature
// is exactly equal.
double novelty_score(const Dataset& real, const Dataset& synthetic,
                     const NoveltyConfig& config = {});

}  // namespace synthval
