#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "synthval/dataset.hpp"
#include "synthval/encoding.hpp"

namespace synthval {

struct IsolationForestConfig {
  int trees = 100;
  std::size_t subsample = 256;   // capped at the number of training rows
  double anomaly_quantile = 0.99;
  std::uint64_t seed = 0;
};

// Expected path length normalizer c(m) = 2 H(m-1) - 2 (m-1)/m with the
// harmonic number approximated by ln(i) + Euler's constant. c(m) = 0 for
// m <= 1.
double average_path_length_norm(std::size_t m);

// Ensemble of random binary isolation trees over a numeric row matrix.
// Short average isolation paths signal anomalies.
class IsolationForest {
 public:
  // feature < 0 marks a leaf; size is the number of subsample rows that
  // reached the node.
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int size = 0;
  };
  using Tree = std::vector<Node>;

  // Each tree grows on a uniform random subsample, splitting a uniformly
  // random non-constant feature at a uniform value between the node's min and
  // max, down to isolation or depth ceil(log2(subsample)). Tree t draws from
  // the stream seed + t, so the forest is independent of build order.
  static IsolationForest fit(const Eigen::MatrixXd& rows,
                             const IsolationForestConfig& config);

  // Test hook for hand-built trees.
  static IsolationForest from_trees(std::vector<Tree> trees, double c_norm);

  // Mean path length over trees, with the c(leaf size) adjustment for
  // unsplit leaves.
  double mean_path_length(const Eigen::RowVectorXd& row) const;

  // s(x) = 2^(-E[h(x)] / c_norm), in (0, 1).
  double score(const Eigen::RowVectorXd& row) const;

  double c_norm() const { return c_norm_; }
  std::size_t effective_subsample() const { return subsample_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
  double c_norm_ = 0.0;
  std::size_t subsample_ = 0;
};

// Dataset-level model: one-hot/continuous encoding fitted on the training
// data plus the forest itself.
struct AnomalyModel {
  FeatureEncoder encoder;
  IsolationForest forest;
};

AnomalyModel isolation_forest_fit(const Dataset& real,
                                  const IsolationForestConfig& config);

double anomaly_score_instance(const AnomalyModel& model, const Dataset& dataset,
                              std::size_t row);

struct AnomalyTestResult {
  double fraction_flagged = 0.0;    // synthetic rows strictly above threshold
  double mean_instance_score = 0.0; // auxiliary: mean synthetic score
  double threshold = 0.0;           // quantile of the real rows' own scores
};

// Fits the forest on the real data, takes the anomaly_quantile quantile of
// the real rows' own scores as threshold, and reports the fraction of
// synthetic rows scoring strictly above it.
AnomalyTestResult anomaly_test(const Dataset& real, const Dataset& synthetic,
                               const IsolationForestConfig& config);

double anomaly_test_score(const Dataset& real, const Dataset& synthetic,
                          const IsolationForestConfig& config);

}  // namespace synthval
