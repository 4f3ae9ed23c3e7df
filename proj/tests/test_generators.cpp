#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synthval/copula.hpp"
#include "synthval/dataset.hpp"
#include "synthval/diagnostics.hpp"
#include "synthval/errors.hpp"
#include "synthval/gmm.hpp"
#include "synthval/model_io.hpp"
#include "synthval/rank_stats.hpp"
#include "synthval/rng.hpp"
#include "testutil.hpp"

using namespace synthval;

namespace {

Dataset two_cluster_data(std::size_t per_cluster, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < per_cluster; ++i) {
    x.push_back(0.0 + rng.normal());
    y.push_back(0.0 + rng.normal());
  }
  for (std::size_t i = 0; i < per_cluster; ++i) {
    x.push_back(10.0 + rng.normal());
    y.push_back(10.0 + rng.normal());
  }
  return testutil::continuous_dataset({"x", "y"}, {x, y});
}

Dataset random_continuous(std::size_t rows, std::size_t dims, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> columns(dims);
  std::vector<std::string> names;
  for (std::size_t d = 0; d < dims; ++d) {
    names.push_back("v" + std::to_string(d));
    const double center = rng.uniform(-5, 5);
    const double spread = rng.uniform(0.5, 3.0);
    for (std::size_t r = 0; r < rows; ++r) {
      columns[d].push_back(center + spread * rng.normal());
    }
  }
  return testutil::continuous_dataset(names, columns);
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cov += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

TEST_CASE("gmm_fit with one component reaches the sample moments") {
  const Dataset data = random_continuous(120, 2, 3);
  GmmConfig config;
  config.n_components = 1;
  config.seed = 1;
  const GmmModel model = gmm_fit(data, config);
  REQUIRE(model.components.size() == 1);
  CHECK(model.components[0].weight == doctest::Approx(1.0));

  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    mean(0) += data.numeric_at(r, 0);
    mean(1) += data.numeric_at(r, 1);
  }
  mean /= static_cast<double>(data.row_count());
  CHECK(model.components[0].mean(0) == doctest::Approx(mean(0)).epsilon(1e-9));
  CHECK(model.components[0].mean(1) == doctest::Approx(mean(1)).epsilon(1e-9));

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (std::size_t r = 0; r < data.row_count(); ++r) {
    Eigen::Vector2d v(data.numeric_at(r, 0) - mean(0),
                      data.numeric_at(r, 1) - mean(1));
    cov += v * v.transpose();
  }
  cov /= static_cast<double>(data.row_count());
  // covariance matches up to the eps * I regularization
  CHECK(model.components[0].covariance(0, 0) ==
        doctest::Approx(cov(0, 0)).epsilon(1e-4));
  CHECK(model.components[0].covariance(0, 1) ==
        doctest::Approx(cov(0, 1)).epsilon(1e-4));
}

TEST_CASE("gmm_fit recovers two well-separated clusters") {
  const Dataset data = two_cluster_data(100, 21);
  GmmConfig config;
  config.n_components = 2;
  config.seed = 5;
  const GmmModel model = gmm_fit(data, config);
  REQUIRE(model.components.size() == 2);
  // identify components by their distance to the true centers
  const Eigen::Vector2d low(0.0, 0.0), high(10.0, 10.0);
  double best_low = std::numeric_limits<double>::max();
  double best_high = best_low;
  for (const auto& comp : model.components) {
    best_low = std::min(best_low, (comp.mean - low).norm());
    best_high = std::min(best_high, (comp.mean - high).norm());
  }
  CHECK(best_low < 0.5);
  CHECK(best_high < 0.5);
}

TEST_CASE("gmm_fit stopping and error rules") {
  const Dataset data = random_continuous(50, 2, 9);

  SUBCASE("tol = inf performs exactly one EM update") {
    GmmConfig config;
    config.n_components = 3;
    config.tol = std::numeric_limits<double>::infinity();
    config.seed = 2;
    const GmmModel model = gmm_fit(data, config);
    // evaluations: initial parameters + the single update
    CHECK(model.log_likelihood_history.size() == 2);
  }

  SUBCASE("max_iter bounds the updates") {
    GmmConfig config;
    config.n_components = 3;
    config.tol = 0.0;
    config.max_iter = 4;
    config.seed = 2;
    const GmmModel model = gmm_fit(data, config);
    CHECK(model.log_likelihood_history.size() == 5);
  }

  SUBCASE("discrete column rejected") {
    std::vector<ColumnSpec> specs = {
        {"x", ColumnKind::Continuous, ColumnRole::Feature},
        {"c", ColumnKind::Discrete, ColumnRole::Feature}};
    const Dataset mixed(Schema(specs), {testutil::numeric_column({1, 2, 3}),
                                        testutil::token_column({"a", "b", "a"})});
    CHECK_THROWS_AS(gmm_fit(mixed, {}), DataError);
  }

  SUBCASE("more components than rows rejected") {
    GmmConfig config;
    config.n_components = 51;
    CHECK_THROWS_AS(gmm_fit(data, config), DataError);
  }
}

TEST_CASE("EM log-likelihood is non-decreasing on random data") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset data = random_continuous(60 + 10 * (seed % 5), 2 + seed % 3, seed);
    GmmConfig config;
    config.n_components = 1 + static_cast<int>(seed % 4);
    config.tol = 0.0;
    config.max_iter = 25;
    config.seed = seed;
    const GmmModel model = gmm_fit(data, config);
    for (std::size_t i = 1; i < model.log_likelihood_history.size(); ++i) {
      CHECK(model.log_likelihood_history[i] >=
            model.log_likelihood_history[i - 1] - 1e-8);
    }
  }
}

TEST_CASE("gmm_sample") {
  SUBCASE("near-degenerate covariance concentrates at the mean") {
    GmmModel model;
    model.columns = {"x", "y"};
    GmmComponent comp;
    comp.weight = 1.0;
    comp.mean = Eigen::Vector2d(3.0, 4.0);
    comp.covariance = 1e-10 * Eigen::Matrix2d::Identity();
    model.components.push_back(comp);
    const Dataset sample = gmm_sample(model, 50, 123);
    for (std::size_t r = 0; r < sample.row_count(); ++r) {
      CHECK(std::fabs(sample.numeric_at(r, 0) - 3.0) < 1e-3);
      CHECK(std::fabs(sample.numeric_at(r, 1) - 4.0) < 1e-3);
    }
  }

  SUBCASE("sample mean honors the CLT bound") {
    const Dataset data = random_continuous(300, 2, 33);
    GmmConfig config;
    config.n_components = 1;
    config.seed = 3;
    const GmmModel model = gmm_fit(data, config);
    const Dataset sample = gmm_sample(model, 1000, 77);
    for (Eigen::Index d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (std::size_t r = 0; r < sample.row_count(); ++r) {
        mean += sample.numeric_at(r, static_cast<std::size_t>(d));
      }
      mean /= 1000.0;
      const double sigma = std::sqrt(model.components[0].covariance(d, d));
      CHECK(std::fabs(mean - model.components[0].mean(d)) <=
            3.0 * sigma / std::sqrt(1000.0));
    }
  }

  SUBCASE("same seed reproduces bit-identically") {
    const Dataset data = random_continuous(100, 3, 41);
    GmmConfig config;
    config.n_components = 2;
    config.seed = 8;
    const GmmModel model = gmm_fit(data, config);
    const Dataset a = gmm_sample(model, 200, 5);
    const Dataset b = gmm_sample(model, 200, 5);
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      for (std::size_t c = 0; c < a.column_count(); ++c) {
        CHECK(a.numeric_at(r, c) == b.numeric_at(r, c));
      }
    }
  }

  SUBCASE("non-positive-definite covariance names the component") {
    GmmModel model;
    model.columns = {"x", "y"};
    GmmComponent comp;
    comp.weight = 1.0;
    comp.mean = Eigen::Vector2d::Zero();
    comp.covariance = (Eigen::Matrix2d() << 1.0, 2.0, 2.0, 1.0).finished();
    model.components.push_back(comp);
    CHECK_THROWS_WITH_AS(gmm_sample(model, 10, 0),
                         doctest::Contains("component 0"), DataError);
  }
}

TEST_CASE("copula_fit") {
  SUBCASE("perfect monotone dependence is captured") {
    std::vector<double> x;
    Rng rng(55);
    for (int i = 0; i < 100; ++i) x.push_back(rng.uniform(-3, 3));
    const auto data = testutil::continuous_dataset({"a", "b"}, {x, x});
    const CopulaModel model = copula_fit(data, 0);
    CHECK(model.correlation(0, 1) >= 0.99);
  }

  SUBCASE("independent features stay near zero correlation") {
    const Dataset data = random_continuous(500, 2, 66);
    const CopulaModel model = copula_fit(data, 0);
    CHECK(std::fabs(model.correlation(0, 1)) <= 0.15);
  }

  SUBCASE("single feature gives the 1x1 identity") {
    const Dataset data = random_continuous(50, 1, 67);
    const CopulaModel model = copula_fit(data, 0);
    REQUIRE(model.correlation.rows() == 1);
    CHECK(model.correlation(0, 0) == 1.0);
  }

  SUBCASE("constant column is noted and zeroed") {
    const auto data = testutil::continuous_dataset(
        {"flat", "x"}, {{2.0, 2.0, 2.0, 2.0}, {1.0, 4.0, 2.0, 3.0}});
    const CopulaModel model = copula_fit(data, 0);
    CHECK(model.constant_columns == std::vector<std::string>{"flat"});
    CHECK(model.correlation(0, 1) == 0.0);
    CHECK(model.correlation(0, 0) == 1.0);
  }

  SUBCASE("fewer than three rows rejected") {
    const auto data = testutil::continuous_dataset({"x"}, {{1.0, 2.0}});
    CHECK_THROWS_AS(copula_fit(data, 0), DataError);
  }
}

TEST_CASE("copula_sample") {
  SUBCASE("uniform marginal stays uniform (KS bound)") {
    CopulaModel model;
    model.columns = {{"u", ColumnKind::Continuous, ColumnRole::Feature}};
    CopulaMarginal marginal;
    marginal.column = "u";
    for (int i = 0; i <= 200; ++i) marginal.sorted_values.push_back(i / 200.0);
    model.marginals = {marginal};
    model.correlation = Eigen::MatrixXd::Identity(1, 1);
    const Dataset sample = copula_sample(model, 500, 9);

    std::vector<double> values = sample.column(0).numeric;
    std::sort(values.begin(), values.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double empirical_hi = static_cast<double>(i + 1) / 500.0;
      const double empirical_lo = static_cast<double>(i) / 500.0;
      ks = std::max(ks, std::fabs(empirical_hi - values[i]));
      ks = std::max(ks, std::fabs(values[i] - empirical_lo));
    }
    CHECK(ks <= 0.08);
  }

  SUBCASE("strong correlation survives the round trip") {
    CopulaModel model;
    model.columns = {{"a", ColumnKind::Continuous, ColumnRole::Feature},
                     {"b", ColumnKind::Continuous, ColumnRole::Feature}};
    CopulaMarginal ma, mb;
    ma.column = "a";
    mb.column = "b";
    for (int i = 0; i <= 100; ++i) {
      ma.sorted_values.push_back(i / 100.0);
      mb.sorted_values.push_back(5.0 + i / 50.0);
    }
    model.marginals = {ma, mb};
    model.correlation = (Eigen::Matrix2d() << 1.0, 0.95, 0.95, 1.0).finished();
    const Dataset sample = copula_sample(model, 1000, 13);
    CHECK(spearman(sample.column(0).numeric, sample.column(1).numeric) >= 0.85);
  }

  SUBCASE("discrete marginal frequencies are honored") {
    CopulaModel model;
    model.columns = {{"c", ColumnKind::Discrete, ColumnRole::Feature}};
    CopulaMarginal marginal;
    marginal.column = "c";
    marginal.kind = ColumnKind::Discrete;
    marginal.categories = {"A", "B"};
    marginal.cumulative = {0.7, 1.0};
    model.marginals = {marginal};
    model.correlation = Eigen::MatrixXd::Identity(1, 1);
    const Dataset sample = copula_sample(model, 1000, 17);
    double a_count = 0;
    for (const auto& token : sample.column(0).tokens) {
      if (token == "A") a_count += 1.0;
    }
    CHECK(std::fabs(a_count / 1000.0 - 0.7) <= 0.05);
  }

  SUBCASE("continuous outputs always pass the real range checks") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Dataset real = random_continuous(80, 3, 200 + seed);
      const CopulaModel model = copula_fit(real, seed);
      const Dataset sample = copula_sample(model, 400, seed + 1);
      const DiagnosticReport report = diagnose(real, sample);
      CHECK(report.passed);
    }
  }

  SUBCASE("sampling is deterministic per seed") {
    const Dataset real = random_continuous(50, 2, 90);
    const CopulaModel model = copula_fit(real, 0);
    const Dataset a = copula_sample(model, 100, 3);
    const Dataset b = copula_sample(model, 100, 3);
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      CHECK(a.numeric_at(r, 0) == b.numeric_at(r, 0));
      CHECK(a.numeric_at(r, 1) == b.numeric_at(r, 1));
    }
  }
}

TEST_CASE("mixed-type copula fit and sample") {
  std::vector<ColumnSpec> specs = {
      {"x", ColumnKind::Continuous, ColumnRole::Feature},
      {"c", ColumnKind::Discrete, ColumnRole::Feature}};
  Rng rng(99);
  std::vector<double> xs;
  std::vector<std::string> cs;
  for (int i = 0; i < 200; ++i) {
    const bool high = rng.uniform() < 0.4;
    xs.push_back((high ? 5.0 : 0.0) + rng.normal());
    cs.push_back(high ? "hi" : "lo");
  }
  const Dataset real(Schema(specs),
                     {testutil::numeric_column(xs), testutil::token_column(cs)});
  const CopulaModel model = copula_fit(real, 0);
  // x and the category are strongly associated
  CHECK(std::fabs(model.correlation(0, 1)) > 0.5);

  const Dataset sample = copula_sample(model, 500, 21);
  CHECK(diagnose(real, sample).passed);
}

TEST_CASE("model artifacts round-trip through JSON") {
  testutil::TempDir dir("models");

  SUBCASE("gmm") {
    const Dataset data = random_continuous(80, 2, 111);
    GmmConfig config;
    config.n_components = 2;
    config.seed = 6;
    const GmmModel model = gmm_fit(data, config);
    save_gmm(model, dir.file("m.json"));
    CHECK(model_type_of(dir.file("m.json")) == "gmm");
    const GmmModel loaded = load_gmm(dir.file("m.json"));
    const Dataset a = gmm_sample(model, 50, 4);
    const Dataset b = gmm_sample(loaded, 50, 4);
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      CHECK(a.numeric_at(r, 0) == b.numeric_at(r, 0));
    }
  }

  SUBCASE("copula") {
    const Dataset data = random_continuous(80, 2, 112);
    const CopulaModel model = copula_fit(data, 0);
    save_copula(model, dir.file("c.json"));
    CHECK(model_type_of(dir.file("c.json")) == "copula");
    const CopulaModel loaded = load_copula(dir.file("c.json"));
    const Dataset a = copula_sample(model, 50, 4);
    const Dataset b = copula_sample(loaded, 50, 4);
    for (std::size_t r = 0; r < a.row_count(); ++r) {
      CHECK(a.numeric_at(r, 0) == b.numeric_at(r, 0));
    }
  }
}
