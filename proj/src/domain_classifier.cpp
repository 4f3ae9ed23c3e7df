#include "synthval/domain_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthval/encoding.hpp"
#include "synthval/errors.hpp"
#include "synthval/rank_stats.hpp"
#include "synthval/rng.hpp"

namespace synthval {

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("auc: scores and labels differ in length");
  }
  double positives = 0.0, negatives = 0.0;
  for (int label : labels) {
    (label ? positives : negatives) += 1.0;
  }
  if (positives == 0.0 || negatives == 0.0) {
    throw DataError("auc: both classes must be present");
  }
  // Rank formulation with tie-averaged ranks:
  // U = sum of positive ranks - nP (nP + 1) / 2, AUC = U / (nP * nN)
  const std::vector<double> ranks = average_ranks(scores);
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) positive_rank_sum += ranks[i];
  }
  const double u = positive_rank_sum - positives * (positives + 1.0) / 2.0;
  return u / (positives * negatives);
}

namespace {

// Stratified fold assignment. Label groups are processed in order of their
// first occurrence in the index sequence, so the assignment is a function of
// (group partition, seed) and not of which label value a group carries.
std::vector<int> stratified_fold_assignment(const std::vector<int>& labels,
                                            int folds, Rng& rng) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<int> group_of_label(2, -1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int& g = group_of_label[static_cast<std::size_t>(labels[i])];
    if (g < 0) {
      g = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(g)].push_back(i);
  }

  std::vector<int> fold_of(labels.size(), 0);
  for (auto& group : groups) {
    rng.shuffle(group);
    for (std::size_t j = 0; j < group.size(); ++j) {
      fold_of[group[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return 1.0 / (1.0 + (-z.array()).exp());
}

// Full-batch gradient descent on the mean cross-entropy, weights and bias
// initialized at zero (which makes the fit exactly antisymmetric under label
// mirroring).
void fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  double learning_rate, int epochs, Eigen::VectorXd& weights,
                  double& bias) {
  const double n = static_cast<double>(x.rows());
  weights = Eigen::VectorXd::Zero(x.cols());
  bias = 0.0;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const Eigen::VectorXd residual =
        sigmoid((x * weights).array() + bias) - y;
    weights -= learning_rate * (x.transpose() * residual) / n;
    bias -= learning_rate * residual.sum() / n;
  }
}

}  // namespace

std::vector<double> cross_validated_aucs(const Eigen::MatrixXd& features,
                                         const std::vector<int>& labels,
                                         const std::vector<bool>& standardize_dims,
                                         const DomainClassifierConfig& config) {
  if (config.folds < 2) throw DataError("domain classifier: folds must be >= 2");
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("domain classifier: feature rows and labels differ");
  }
  std::size_t positives = 0, negatives = 0;
  for (int label : labels) {
    if (label != 0 && label != 1) {
      throw DataError("domain classifier: labels must be 0 or 1");
    }
    (label ? positives : negatives) += 1;
  }
  const std::size_t smallest = std::min(positives, negatives);
  if (smallest < static_cast<std::size_t>(config.folds)) {
    throw DataError("domain classifier: fewer rows than folds in one class");
  }

  Rng rng(config.seed);
  const std::vector<int> fold_of =
      stratified_fold_assignment(labels, config.folds, rng);

  std::vector<double> fold_aucs;
  fold_aucs.reserve(static_cast<std::size_t>(config.folds));
  for (int fold = 0; fold < config.folds; ++fold) {
    std::vector<Eigen::Index> train_rows, valid_rows;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      (fold_of[i] == fold ? valid_rows : train_rows)
          .push_back(static_cast<Eigen::Index>(i));
    }

    Eigen::MatrixXd train_x(train_rows.size(), features.cols());
    Eigen::VectorXd train_y(train_rows.size());
    for (std::size_t i = 0; i < train_rows.size(); ++i) {
      train_x.row(static_cast<Eigen::Index>(i)) = features.row(train_rows[i]);
      train_y(static_cast<Eigen::Index>(i)) =
          labels[static_cast<std::size_t>(train_rows[i])];
    }
    Eigen::MatrixXd valid_x(valid_rows.size(), features.cols());
    std::vector<int> valid_y(valid_rows.size());
    for (std::size_t i = 0; i < valid_rows.size(); ++i) {
      valid_x.row(static_cast<Eigen::Index>(i)) = features.row(valid_rows[i]);
      valid_y[i] = labels[static_cast<std::size_t>(valid_rows[i])];
    }

    const Standardizer scaler = Standardizer::fit(train_x, standardize_dims);
    Eigen::VectorXd weights;
    double bias = 0.0;
    fit_logistic(scaler.apply(train_x), train_y, config.learning_rate,
                 config.epochs, weights, bias);

    const Eigen::VectorXd scores =
        sigmoid((scaler.apply(valid_x) * weights).array() + bias);
    fold_aucs.push_back(
        auc(std::span<const double>(scores.data(),
                                    static_cast<std::size_t>(scores.size())),
            valid_y));
  }
  return fold_aucs;
}

DomainClassifierResult domain_classifier(const Dataset& real,
                                         const Dataset& synthetic,
                                         const DomainClassifierConfig& config) {
  if (!(real.schema() == synthetic.schema())) {
    throw DataError("domain classifier: schemas differ");
  }
  const FeatureEncoder encoder = FeatureEncoder::fit(real);
  const Eigen::MatrixXd real_x = encoder.encode(real);
  const Eigen::MatrixXd synth_x = encoder.encode(synthetic);

  Eigen::MatrixXd pooled(real_x.rows() + synth_x.rows(), real_x.cols());
  pooled << real_x, synth_x;
  std::vector<int> labels(static_cast<std::size_t>(pooled.rows()), 0);
  std::fill(labels.begin() + real_x.rows(), labels.end(), 1);

  DomainClassifierResult result;
  result.fold_aucs =
      cross_validated_aucs(pooled, labels, encoder.continuous_dims(), config);
  result.mean_auc =
      std::accumulate(result.fold_aucs.begin(), result.fold_aucs.end(), 0.0) /
      static_cast<double>(result.fold_aucs.size());
  return result;
}

double domain_classifier_score(const Dataset& real, const Dataset& synthetic,
                               const DomainClassifierConfig& config) {
  return domain_classifier(real, synthetic, config).mean_auc;
}

}  // namespace synthval
