#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"

namespace synthval {

// Numeric encoding of feature columns: continuous columns pass through as one
// dimension each, discrete columns expand to one-hot indicators over the
// category set observed in the reference (real) dataset. The primary-key
// column is dropped.
class FeatureEncoder {
 public:
  static FeatureEncoder fit(const Dataset& reference);

  Eigen::MatrixXd encode(const Dataset& dataset) const;
  Eigen::RowVectorXd encode_row(const Dataset& dataset, std::size_t row) const;

  std::size_t dimension() const { return dimension_; }
  // true for dimensions that are raw continuous values (candidates for
  // standardization); one-hot dimensions are false
  const std::vector<bool>& continuous_dims() const { return continuous_dims_; }

 private:
  struct EncodedColumn {
    std::size_t source = 0;           // schema column index
    bool continuous = true;
    std::size_t offset = 0;           // first output dimension
    std::vector<std::string> categories;  // sorted, discrete only
  };

  Schema schema_;
  std::vector<EncodedColumn> columns_;
  std::size_t dimension_ = 0;
  std::vector<bool> continuous_dims_;
};

// Column-wise standardization (x - mean) / std over selected dimensions.
// Dimensions with zero variance are centered only.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& data,
                          const std::vector<bool>& dims);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& data) const;
};

}  // namespace synthval
