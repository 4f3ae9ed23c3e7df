#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

// Area under the ROC curve, Mann-Whitney formulation:
// P(score_pos > score_neg) + 0.5 * P(equal). Throws when either class is
// missing. Labels are 0/1.
double auc(std::span<const double> scores, std::span<const int> labels);

struct DomainClassifierConfig {
  int folds = 5;
  double learning_rate = 0.1;
  int epochs = 300;
  std::uint64_t seed = 0;
};

struct DomainClassifierResult {
  double mean_auc = 0.0;
  std::vector<double> fold_aucs;
};

// Real-vs-synthetic discrimination score: pools real rows (label 0) and
// synthetic rows (label 1), runs stratified k-fold cross validation with a
// full-batch gradient-descent logistic regression per fold (continuous
// features standardized on each fold's training pool), and reports the mean
// validation AUC. 0.5 means indistinguishable.
DomainClassifierResult domain_classifier(const Dataset& real,
                                         const Dataset& synthetic,
                                         const DomainClassifierConfig& config);

double domain_classifier_score(const Dataset& real, const Dataset& synthetic,
                               const DomainClassifierConfig& config);

// Core cross-validation loop on an already-encoded feature matrix. Fold
// assignment is stratified on the labels but derived from the label groups'
// positions only, so mirroring all labels with the same seed reproduces the
// exact same folds.
std::vector<double> cross_validated_aucs(const Eigen::MatrixXd& features,
                                         const std::vector<int>& labels,
                                         const std::vector<bool>& standardize_dims,
                                         const DomainClassifierConfig& config);

}  // namespace synthval
