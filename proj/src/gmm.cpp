#include "synthval/gmm.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>

#include "synthval/errors.hpp"
#include "synthval/rng.hpp"

namespace synthval {

namespace {

Eigen::MatrixXd continuous_matrix(const Dataset& real,
                                  std::vector<std::string>& columns) {
  for (std::size_t c = 0; c < real.column_count(); ++c) {
    const auto& spec = real.schema().column(c);
    if (spec.kind == ColumnKind::Discrete) {
      throw DataError("gmm_fit: discrete column '" + spec.name +
                      "' present; the mixture models continuous data only");
    }
    if (spec.role == ColumnRole::PrimaryKey) {
      throw DataError("gmm_fit: primary-key column '" + spec.name +
                      "' cannot be generated");
    }
  }
  Eigen::MatrixXd data(static_cast<Eigen::Index>(real.row_count()),
                       static_cast<Eigen::Index>(real.column_count()));
  for (std::size_t c = 0; c < real.column_count(); ++c) {
    columns.push_back(real.schema().column(c).name);
    for (std::size_t r = 0; r < real.row_count(); ++r) {
      if (real.is_null(r, c)) throw DataError("gmm_fit: null cell");
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          real.numeric_at(r, c);
    }
  }
  return data;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(data.rows());
}

// Cholesky factor with escalating eps * I until positive definite.
Eigen::LLT<Eigen::MatrixXd> robust_llt(const Eigen::MatrixXd& covariance,
                                       double eps) {
  Eigen::MatrixXd work = covariance;
  const Eigen::MatrixXd identity =
      Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols());
  double boost = eps;
  for (int attempt = 0; attempt < 12; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) return llt;
    work += boost * identity;
    boost *= 10.0;
  }
  throw DataError("gmm: covariance is not positive definite after regularization");
}

// log N(x | mean, covariance) for all rows, one column per component
Eigen::MatrixXd log_densities(const Eigen::MatrixXd& data,
                              const std::vector<GmmComponent>& components,
                              double eps) {
  const auto n = data.rows();
  const auto d = static_cast<double>(data.cols());
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(components.size()));
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& comp = components[k];
    const auto llt = robust_llt(comp.covariance, eps);
    const Eigen::MatrixXd l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const double log_norm =
        -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det);
    const Eigen::MatrixXd centered = data.rowwise() - comp.mean.transpose();
    // solve L y = (x - mu)^T for all rows at once
    const Eigen::MatrixXd y =
        l.triangularView<Eigen::Lower>().solve(centered.transpose());
    out.col(static_cast<Eigen::Index>(k)) =
        ((std::log(comp.weight) + log_norm) -
         0.5 * y.colwise().squaredNorm().transpose().array())
            .matrix();
  }
  return out;
}

std::vector<Eigen::VectorXd> kmeans_pp_means(const Eigen::MatrixXd& data, int k,
                                             Rng& rng) {
  std::vector<Eigen::VectorXd> means;
  means.push_back(data.row(static_cast<Eigen::Index>(
                               rng.uniform_index(static_cast<std::size_t>(data.rows()))))
                      .transpose());
  Eigen::VectorXd min_d2 = (data.rowwise() - means[0].transpose())
                               .rowwise()
                               .squaredNorm();
  while (static_cast<int>(means.size()) < k) {
    const double total = min_d2.sum();
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Eigen::Index i = 0; i < min_d2.size(); ++i) {
        cumulative += min_d2(i);
        if (cumulative >= target) {
          chosen = i;
          break;
        }
        chosen = i;
      }
    } else {
      chosen = static_cast<Eigen::Index>(
          rng.uniform_index(static_cast<std::size_t>(data.rows())));
    }
    means.push_back(data.row(chosen).transpose());
    min_d2 = min_d2.cwiseMin(
        (data.rowwise() - means.back().transpose()).rowwise().squaredNorm());
  }
  return means;
}

}  // namespace

GmmModel gmm_fit(const Dataset& real, const GmmConfig& config) {
  if (config.n_components < 1) {
    throw DataError("gmm_fit: n_components must be >= 1");
  }
  if (static_cast<std::size_t>(config.n_components) > real.row_count()) {
    throw DataError("gmm_fit: n_components exceeds the row count");
  }

  GmmModel model;
  const Eigen::MatrixXd data = continuous_matrix(real, model.columns);
  const auto n = static_cast<double>(data.rows());

  // eps = 1e-6 * mean feature variance keeps small fits non-singular
  const Eigen::RowVectorXd mean = data.colwise().mean();
  const double mean_variance =
      (data.rowwise() - mean).array().square().colwise().sum().mean() / n;
  const double eps = std::max(1e-6 * mean_variance, 1e-12);
  const Eigen::MatrixXd eps_identity =
      eps * Eigen::MatrixXd::Identity(data.cols(), data.cols());

  Rng rng(config.seed);
  const Eigen::MatrixXd initial_cov = sample_covariance(data) + eps_identity;
  for (auto& m : kmeans_pp_means(data, config.n_components, rng)) {
    model.components.push_back(
        {1.0 / config.n_components, std::move(m), initial_cov});
  }

  double previous_ll = -std::numeric_limits<double>::infinity();
  for (int update = 0; update <= config.max_iter; ++update) {
    const Eigen::MatrixXd log_dens = log_densities(data, model.components, eps);
    const Eigen::VectorXd row_max = log_dens.rowwise().maxCoeff();
    const Eigen::VectorXd lse =
        (row_max.array() +
         (log_dens.colwise() - row_max).array().exp().rowwise().sum().log())
            .matrix();
    const double ll = lse.sum();
    model.log_likelihood_history.push_back(ll);

    if (update > 0 && ll - previous_ll < config.tol) break;
    if (update == config.max_iter) break;
    previous_ll = ll;

    const Eigen::MatrixXd resp =
        (log_dens.colwise() - lse).array().exp().matrix();
    for (std::size_t k = 0; k < model.components.size(); ++k) {
      auto& comp = model.components[k];
      const Eigen::VectorXd r = resp.col(static_cast<Eigen::Index>(k));
      const double nk = r.sum();
      if (nk < 1e-8) {
        comp.weight = nk / n;  // effectively dead component, keep parameters
        continue;
      }
      comp.weight = nk / n;
      comp.mean = (data.transpose() * r) / nk;
      const Eigen::MatrixXd centered = data.rowwise() - comp.mean.transpose();
      comp.covariance =
          (centered.transpose() * (centered.array().colwise() * r.array()).matrix()) /
              nk +
          eps_identity;
    }
  }
  return model;
}

Dataset gmm_sample(const GmmModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DataError("gmm_sample: n must be >= 1");
  if (model.components.empty()) throw DataError("gmm_sample: empty model");

  std::vector<Eigen::MatrixXd> factors;
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(model.components[k].covariance);
    if (llt.info() != Eigen::Success) {
      throw DataError("gmm_sample: covariance of component " +
                      std::to_string(k) + " is not positive definite");
    }
    factors.emplace_back(llt.matrixL());
  }

  const auto dims = static_cast<Eigen::Index>(model.columns.size());
  Rng rng(seed);
  std::vector<ColumnData> columns(model.columns.size());
  Eigen::VectorXd z(dims);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t k = 0;
    double cumulative = 0.0;
    for (; k + 1 < model.components.size(); ++k) {
      cumulative += model.components[k].weight;
      if (u < cumulative) break;
    }
    for (Eigen::Index j = 0; j < dims; ++j) z(j) = rng.normal();
    const Eigen::VectorXd x = model.components[k].mean + factors[k] * z;
    for (Eigen::Index j = 0; j < dims; ++j) {
      columns[static_cast<std::size_t>(j)].numeric.push_back(x(j));
      columns[static_cast<std::size_t>(j)].nulls.push_back(0);
    }
  }

  std::vector<ColumnSpec> specs;
  for (const auto& name : model.columns) {
    specs.push_back({name, ColumnKind::Continuous, ColumnRole::Feature});
  }
  return Dataset(Schema(std::move(specs)), std::move(columns));
}

}  // namespace synthval
