#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

struct GmmComponent {
  double weight = 1.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric, regularized positive-definite
};

struct GmmModel {
  std::vector<std::string> columns;  // continuous feature names, schema order
  std::vector<GmmComponent> components;
  // one entry per density evaluation: initial parameters first, then after
  // each EM update; non-decreasing up to the regularization slack
  std::vector<double> log_likelihood_history;
};

struct GmmConfig {
  int n_components = 5;
  int max_iter = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

// EM fit on an all-continuous dataset. Means seeded k-means++ style,
// covariances regularized with eps * I (eps = 1e-6 times the mean feature
// variance). Stops when the log-likelihood improvement of an update drops
// below tol, or after max_iter updates. Throws when a discrete or
// primary-key column is present, or when n_components exceeds the row count.
GmmModel gmm_fit(const Dataset& real, const GmmConfig& config);

// Draws component indices by weight, then multivariate normals through the
// Cholesky factor of the component covariance. Bit-reproducible per seed.
Dataset gmm_sample(const GmmModel& model, std::size_t n, std::uint64_t seed);

}  // namespace synthval
