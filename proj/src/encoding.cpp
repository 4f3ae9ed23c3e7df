#include "synthval/encoding.hpp"

#include <algorithm>

#include "synthval/errors.hpp"

namespace synthval {

FeatureEncoder FeatureEncoder::fit(const Dataset& reference) {
  FeatureEncoder encoder;
  encoder.schema_ = reference.schema();
  std::size_t offset = 0;
  for (std::size_t c = 0; c < reference.column_count(); ++c) {
    const auto& spec = reference.schema().column(c);
    if (spec.role != ColumnRole::Feature) continue;
    EncodedColumn column;
    column.source = c;
    column.offset = offset;
    if (spec.kind == ColumnKind::Continuous) {
      column.continuous = true;
      offset += 1;
    } else {
      column.continuous = false;
      const auto& tokens = reference.column(c).tokens;
      column.categories.assign(tokens.begin(), tokens.end());
      std::sort(column.categories.begin(), column.categories.end());
      column.categories.erase(
          std::unique(column.categories.begin(), column.categories.end()),
          column.categories.end());
      offset += column.categories.size();
    }
    encoder.columns_.push_back(std::move(column));
  }
  encoder.dimension_ = offset;
  encoder.continuous_dims_.assign(offset, false);
  for (const auto& column : encoder.columns_) {
    if (column.continuous) encoder.continuous_dims_[column.offset] = true;
  }
  return encoder;
}

Eigen::RowVectorXd FeatureEncoder::encode_row(const Dataset& dataset,
                                              std::size_t row) const {
  Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(dimension_);
  for (const auto& column : columns_) {
    if (dataset.is_null(row, column.source)) {
      throw DataError("encode: null cell in column '" +
                      dataset.schema().column(column.source).name + "'");
    }
    if (column.continuous) {
      out(static_cast<Eigen::Index>(column.offset)) =
          dataset.numeric_at(row, column.source);
    } else {
      const auto& token = dataset.token_at(row, column.source);
      const auto it = std::lower_bound(column.categories.begin(),
                                       column.categories.end(), token);
      // unseen categories encode as all-zeros
      if (it != column.categories.end() && *it == token) {
        const auto offset = column.offset + static_cast<std::size_t>(
                                                it - column.categories.begin());
        out(static_cast<Eigen::Index>(offset)) = 1.0;
      }
    }
  }
  return out;
}

Eigen::MatrixXd FeatureEncoder::encode(const Dataset& dataset) const {
  if (!(dataset.schema() == schema_)) {
    throw DataError("encode: dataset schema differs from the fitted schema");
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dataset.row_count()),
                      static_cast<Eigen::Index>(dimension_));
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = encode_row(dataset, r);
  }
  return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& data,
                               const std::vector<bool>& dims) {
  Standardizer s;
  s.mean = Eigen::VectorXd::Zero(data.cols());
  s.scale = Eigen::VectorXd::Ones(data.cols());
  const double n = static_cast<double>(data.rows());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    if (!dims[static_cast<std::size_t>(j)]) continue;
    const double mean = data.col(j).mean();
    const double var = (data.col(j).array() - mean).square().sum() / n;
    s.mean(j) = mean;
    s.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& data) const {
  return (data.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

}  // namespace synthval
