#include "synthval/copula.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "synthval/errors.hpp"
#include "synthval/rank_stats.hpp"
#include "synthval/rng.hpp"
#include "synthval/special_functions.hpp"

namespace synthval {

namespace {

// clip eigenvalues at 0 and restore the unit diagonal
Eigen::MatrixXd project_to_correlation(const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.eigenvalues().minCoeff() >= 0.0) return matrix;
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd psd = solver.eigenvectors() * clipped.asDiagonal() *
                        solver.eigenvectors().transpose();
  Eigen::VectorXd diag = psd.diagonal().cwiseMax(1e-12);
  const Eigen::VectorXd inv_sqrt = diag.array().rsqrt().matrix();
  psd = inv_sqrt.asDiagonal() * psd * inv_sqrt.asDiagonal();
  psd.diagonal().setOnes();
  return psd;
}

Eigen::MatrixXd factor_for_sampling(const Eigen::MatrixXd& correlation) {
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  // semi-definite fallback: L = V sqrt(max(eig, 0))
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
  const Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
}

}  // namespace

CopulaModel copula_fit(const Dataset& real, std::uint64_t seed) {
  (void)seed;  // the fit is deterministic; kept for interface symmetry
  if (real.row_count() < 3) throw DataError("copula_fit: need at least 3 rows");

  CopulaModel model;
  const std::size_t rows = real.row_count();
  std::vector<Eigen::VectorXd> scores;

  for (std::size_t c = 0; c < real.column_count(); ++c) {
    const auto& spec = real.schema().column(c);
    if (spec.role == ColumnRole::PrimaryKey) {
      throw DataError("copula_fit: primary-key column '" + spec.name +
                      "' cannot be generated");
    }
    model.columns.push_back(spec);

    CopulaMarginal marginal;
    marginal.column = spec.name;
    marginal.kind = spec.kind;
    Eigen::VectorXd z(static_cast<Eigen::Index>(rows));
    bool constant = false;

    if (spec.kind == ColumnKind::Continuous) {
      const auto& values = real.column(c).numeric;
      for (std::size_t r = 0; r < rows; ++r) {
        if (real.is_null(r, c)) throw DataError("copula_fit: null cell");
      }
      marginal.sorted_values = values;
      std::sort(marginal.sorted_values.begin(), marginal.sorted_values.end());
      const std::vector<double> ranks = average_ranks(values);
      for (std::size_t r = 0; r < rows; ++r) {
        const double u = ranks[r] / (static_cast<double>(rows) + 1.0);
        z(static_cast<Eigen::Index>(r)) = normal_quantile(u);
      }
      constant = marginal.sorted_values.front() == marginal.sorted_values.back();
    } else {
      const auto& tokens = real.column(c).tokens;
      std::map<std::string, double> counts;
      for (std::size_t r = 0; r < rows; ++r) {
        if (real.is_null(r, c)) throw DataError("copula_fit: null cell");
        counts[tokens[r]] += 1.0;
      }
      double cumulative = 0.0;
      std::map<std::string, double> midpoint, lower;
      for (const auto& [token, count] : counts) {
        marginal.categories.push_back(token);
        lower[token] = cumulative;
        cumulative += count / static_cast<double>(rows);
        marginal.cumulative.push_back(cumulative);
        midpoint[token] = 0.5 * (lower[token] + cumulative);
      }
      marginal.cumulative.back() = 1.0;  // absorb rounding
      for (std::size_t r = 0; r < rows; ++r) {
        z(static_cast<Eigen::Index>(r)) = normal_quantile(midpoint[tokens[r]]);
      }
      constant = counts.size() < 2;
    }

    if (constant) model.constant_columns.push_back(spec.name);
    model.marginals.push_back(std::move(marginal));
    scores.push_back(std::move(z));
  }

  const auto d = static_cast<Eigen::Index>(scores.size());
  Eigen::MatrixXd z(static_cast<Eigen::Index>(rows), d);
  for (Eigen::Index j = 0; j < d; ++j) z.col(j) = scores[static_cast<std::size_t>(j)];
  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Eigen::MatrixXd centered = z.rowwise() - mean;
  const Eigen::VectorXd sd =
      (centered.array().square().colwise().sum() / static_cast<double>(rows))
          .sqrt()
          .transpose()
          .matrix();

  Eigen::MatrixXd correlation = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a + 1; b < d; ++b) {
      if (sd(a) <= 0.0 || sd(b) <= 0.0) continue;  // constant column: leave 0
      const double cov =
          centered.col(a).dot(centered.col(b)) / static_cast<double>(rows);
      correlation(a, b) = correlation(b, a) = cov / (sd(a) * sd(b));
    }
  }
  model.correlation = project_to_correlation(correlation);
  return model;
}

Dataset copula_sample(const CopulaModel& model, std::size_t n,
                      std::uint64_t seed) {
  if (n < 1) throw DataError("copula_sample: n must be >= 1");
  if (model.columns.empty()) throw DataError("copula_sample: empty model");

  const Eigen::MatrixXd factor = factor_for_sampling(model.correlation);
  const auto d = static_cast<Eigen::Index>(model.columns.size());

  Rng rng(seed);
  std::vector<ColumnData> columns(model.columns.size());
  Eigen::VectorXd g(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(j) = rng.normal();
    const Eigen::VectorXd z = factor * g;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double u = normal_cdf(z(j));
      const auto& marginal = model.marginals[static_cast<std::size_t>(j)];
      auto& column = columns[static_cast<std::size_t>(j)];
      if (marginal.kind == ColumnKind::Continuous) {
        const auto& table = marginal.sorted_values;
        const double pos = u * static_cast<double>(table.size() - 1);
        const auto lo = std::min(static_cast<std::size_t>(pos), table.size() - 1);
        const double value =
            lo + 1 < table.size()
                ? table[lo] + (pos - static_cast<double>(lo)) *
                                  (table[lo + 1] - table[lo])
                : table[lo];
        column.numeric.push_back(value);
      } else {
        const auto it = std::lower_bound(marginal.cumulative.begin(),
                                         marginal.cumulative.end(), u);
        const auto index = std::min(
            static_cast<std::size_t>(it - marginal.cumulative.begin()),
            marginal.categories.size() - 1);
        column.tokens.push_back(marginal.categories[index]);
      }
      column.nulls.push_back(0);
    }
  }
  return Dataset(Schema(model.columns), std::move(columns));
}

}  // namespace synthval
