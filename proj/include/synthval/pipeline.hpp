#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"
#include "synthval/diagnostics.hpp"
#include "synthval/domain_classifier.hpp"
#include "synthval/isolation_forest.hpp"
#include "synthval/metrics.hpp"
#include "synthval/rank_stats.hpp"

namespace synthval {

struct NamedDataset {
  std::string name;
  std::string path;  // informational, may be empty
  Dataset dataset;
};

struct EvaluationConfig {
  std::uint64_t seed = 0;
  NoveltyConfig novelty{};
  bool novelty_higher_better = false;  // default follows lower-is-better ranking
  DomainClassifierConfig classifier{};
  IsolationForestConfig forest{};
  double alpha_significance = 0.05;
  // Test hook: when set, the four computed tests are replaced by this matrix
  // and ranking runs on it directly.
  std::optional<ScoreMatrix> score_override;
};

struct ModelEvaluation {
  std::string name;
  std::string path;
  DiagnosticReport diagnostics;
  bool excluded = false;
  bool scored = false;
  std::vector<FeatureScore> wc_per_feature;
  double wc_score = 0.0;          // mean aligned rank across features
  double novelty = 0.0;           // unmatched-instance ratio
  double domain_auc = 0.0;        // mean cross-validated AUC
  double anomaly_fraction = 0.0;  // flagged-instance ratio
  std::vector<double> fold_aucs;
  AnomalyTestResult anomaly;
  std::vector<double> override_scores;  // raw row when the hook is active
};

struct EvaluationReport {
  std::vector<ModelEvaluation> models;
  std::vector<std::string> test_names;
  bool ranking_skipped = true;
  std::string skip_reason;
  std::optional<FarResult> far;
  std::optional<FinnerResult> finner;
  std::string selected;       // best mean aligned rank among survivors
  std::string selected_path;
  EvaluationConfig config;
};

// Runs the whole evaluation: diagnose every synthetic dataset and drop
// failures, score the survivors on the four quality tests, orient the score
// matrix lower-is-better, rank with aligned ranks, test with the
// Friedman-aligned-ranks statistic, apply the Finner post-hoc step-down and
// select the best-ranked model. With fewer than two survivors the ranking is
// skipped and the reason recorded.
EvaluationReport evaluate_all(const Dataset& real,
                              const std::vector<NamedDataset>& synthetics,
                              const EvaluationConfig& config);

std::string report_to_json_string(const EvaluationReport& report);
std::string report_to_text(const EvaluationReport& report);
void write_report_json(const EvaluationReport& report, const std::string& path);

// {"models": [...], "tests": [...], "scores": [[...]], "orientations": [...]}
// with orientations optional ("lower_better" assumed).
ScoreMatrix load_score_matrix(const std::string& path);

struct Projection2D {
  std::vector<std::string> names;  // "real" first, then the synthetic names
  std::vector<std::vector<std::array<double, 2>>> coordinates;
  std::vector<std::vector<double>> loadings;  // 2 x encoded dimension
  std::array<double, 2> explained_variance_fraction{0.0, 0.0};
  bool degenerate = false;  // fewer than 2 effective dimensions
};

// One-hot + standardize fitted on the real dataset, 2-component PCA fitted on
// the real rows only; every dataset is projected with the same loadings.
Projection2D project_2d(const Dataset& real,
                        const std::vector<NamedDataset>& synthetics);

// CSV with header dataset,x,y
void write_projection_csv(const Projection2D& projection,
                          const std::string& path);

}  // namespace synthval
