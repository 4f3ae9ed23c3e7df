#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

// Per-feature marginal of the copula: for continuous features the sorted
// empirical sample (an inverse-CDF lookup table), for discrete features the
// sorted category list with cumulative frequencies.
struct CopulaMarginal {
  std::string column;
  ColumnKind kind = ColumnKind::Continuous;
  std::vector<double> sorted_values;
  std::vector<std::string> categories;
  std::vector<double> cumulative;  // ends at 1
};

struct CopulaModel {
  std::vector<ColumnSpec> columns;  // feature columns, schema order
  std::vector<CopulaMarginal> marginals;
  Eigen::MatrixXd correlation;  // unit diagonal, positive semi-definite
  std::vector<std::string> constant_columns;  // correlations forced to 0
};

// Maps every feature to normal scores (continuous: average-rank transform
// u = rank / (N + 1); discrete: cumulative-frequency midpoints), estimates
// the score correlation matrix and projects it to PSD by eigenvalue clipping.
// Needs at least 3 rows.
CopulaModel copula_fit(const Dataset& real, std::uint64_t seed);

// Draws correlated normals through a Cholesky (or eigenvalue) factor, maps
// them to uniforms and inverts each marginal: linear interpolation of the
// sorted table for continuous features (outputs stay inside the observed
// range), cumulative-bucket lookup for discrete ones.
Dataset copula_sample(const CopulaModel& model, std::size_t n,
                      std::uint64_t seed);

}  // namespace synthval
