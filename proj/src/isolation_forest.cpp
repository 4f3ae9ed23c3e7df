#include "synthval/isolation_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthval/errors.hpp"
#include "synthval/rng.hpp"

namespace synthval {

namespace {

constexpr double kEulerGamma = 0.5772156649015329;

int depth_limit_for(std::size_t subsample) {
  return subsample <= 1
             ? 0
             : static_cast<int>(std::ceil(std::log2(static_cast<double>(subsample))));
}

struct TreeBuilder {
  const Eigen::MatrixXd& data;
  int max_depth;
  Rng& rng;
  IsolationForest::Tree nodes;

  int build(std::vector<std::size_t>& rows, std::size_t lo, std::size_t hi,
            int depth) {
    const std::size_t count = hi - lo;
    const int index = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes[index].size = static_cast<int>(count);
    if (count <= 1 || depth >= max_depth) return index;

    // candidate features: those not constant over this node's rows
    std::vector<int> splittable;
    std::vector<std::pair<double, double>> bounds(
        static_cast<std::size_t>(data.cols()));
    for (Eigen::Index f = 0; f < data.cols(); ++f) {
      double lo_v = data(static_cast<Eigen::Index>(rows[lo]), f);
      double hi_v = lo_v;
      for (std::size_t i = lo + 1; i < hi; ++i) {
        const double v = data(static_cast<Eigen::Index>(rows[i]), f);
        lo_v = std::min(lo_v, v);
        hi_v = std::max(hi_v, v);
      }
      bounds[static_cast<std::size_t>(f)] = {lo_v, hi_v};
      if (hi_v > lo_v) splittable.push_back(static_cast<int>(f));
    }
    if (splittable.empty()) return index;  // all rows identical

    const int feature = splittable[rng.uniform_index(splittable.size())];
    const auto [min_v, max_v] = bounds[static_cast<std::size_t>(feature)];
    double threshold = rng.uniform(min_v, max_v);
    // keep the split proper: rows at the minimum must land left
    if (!(threshold > min_v)) threshold = std::nextafter(min_v, max_v);

    const auto mid_it = std::partition(
        rows.begin() + static_cast<std::ptrdiff_t>(lo),
        rows.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t r) {
          return data(static_cast<Eigen::Index>(r), feature) < threshold;
        });
    const std::size_t mid =
        static_cast<std::size_t>(mid_it - rows.begin());
    nodes[index].feature = feature;
    nodes[index].threshold = threshold;
    nodes[index].left = build(rows, lo, mid, depth + 1);
    nodes[index].right = build(rows, mid, hi, depth + 1);
    return index;
  }
};

double path_length_in_tree(const IsolationForest::Tree& tree,
                           const Eigen::RowVectorXd& row) {
  int node = 0;
  double depth = 0.0;
  while (tree[static_cast<std::size_t>(node)].feature >= 0) {
    const auto& n = tree[static_cast<std::size_t>(node)];
    node = row(n.feature) < n.threshold ? n.left : n.right;
    depth += 1.0;
  }
  return depth + average_path_length_norm(
                     static_cast<std::size_t>(tree[static_cast<std::size_t>(node)].size));
}

}  // namespace

double average_path_length_norm(std::size_t m) {
  if (m <= 1) return 0.0;
  const double n = static_cast<double>(m);
  return 2.0 * (std::log(n - 1.0) + kEulerGamma) - 2.0 * (n - 1.0) / n;
}

IsolationForest IsolationForest::fit(const Eigen::MatrixXd& rows,
                                     const IsolationForestConfig& config) {
  if (rows.rows() == 0) throw DataError("isolation forest: empty training data");
  if (config.trees < 1) throw DataError("isolation forest: trees must be >= 1");
  if (config.subsample < 2) {
    throw DataError("isolation forest: subsample must be >= 2");
  }

  IsolationForest forest;
  forest.subsample_ =
      std::min(config.subsample, static_cast<std::size_t>(rows.rows()));
  forest.c_norm_ = average_path_length_norm(forest.subsample_);
  const int max_depth = depth_limit_for(forest.subsample_);

  const Rng master(config.seed);
  forest.trees_.resize(static_cast<std::size_t>(config.trees));
  for (int t = 0; t < config.trees; ++t) {
    Rng rng = master.fork(static_cast<std::uint64_t>(t));

    std::vector<std::size_t> indices(static_cast<std::size_t>(rows.rows()));
    std::iota(indices.begin(), indices.end(), 0);
    rng.shuffle(indices);
    indices.resize(forest.subsample_);

    TreeBuilder builder{rows, max_depth, rng, {}};
    builder.build(indices, 0, indices.size(), 0);
    forest.trees_[static_cast<std::size_t>(t)] = std::move(builder.nodes);
  }
  return forest;
}

IsolationForest IsolationForest::from_trees(std::vector<Tree> trees,
                                            double c_norm) {
  IsolationForest forest;
  forest.trees_ = std::move(trees);
  forest.c_norm_ = c_norm;
  return forest;
}

double IsolationForest::mean_path_length(const Eigen::RowVectorXd& row) const {
  double total = 0.0;
  for (const auto& tree : trees_) total += path_length_in_tree(tree, row);
  return total / static_cast<double>(trees_.size());
}

double IsolationForest::score(const Eigen::RowVectorXd& row) const {
  return std::exp2(-mean_path_length(row) / c_norm_);
}

AnomalyModel isolation_forest_fit(const Dataset& real,
                                  const IsolationForestConfig& config) {
  if (real.row_count() < 2) {
    throw DataError("isolation forest: need at least 2 rows");
  }
  AnomalyModel model{FeatureEncoder::fit(real), {}};
  model.forest = IsolationForest::fit(model.encoder.encode(real), config);
  return model;
}

double anomaly_score_instance(const AnomalyModel& model, const Dataset& dataset,
                              std::size_t row) {
  return model.forest.score(model.encoder.encode_row(dataset, row));
}

namespace {

// quantile with linear interpolation between order statistics
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

}  // namespace

AnomalyTestResult anomaly_test(const Dataset& real, const Dataset& synthetic,
                               const IsolationForestConfig& config) {
  if (!(real.schema() == synthetic.schema())) {
    throw DataError("anomaly test: schemas differ");
  }
  if (synthetic.row_count() == 0) {
    throw DataError("anomaly test: empty synthetic dataset");
  }
  if (!(config.anomaly_quantile > 0.0 && config.anomaly_quantile < 1.0)) {
    throw DataError("anomaly test: anomaly_quantile must be in (0, 1)");
  }
  const AnomalyModel model = isolation_forest_fit(real, config);

  std::vector<double> real_scores(real.row_count());
  for (std::size_t r = 0; r < real.row_count(); ++r) {
    real_scores[r] = anomaly_score_instance(model, real, r);
  }
  AnomalyTestResult result;
  result.threshold = quantile(std::move(real_scores), config.anomaly_quantile);

  std::size_t flagged = 0;
  double score_sum = 0.0;
  for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
    const double s = anomaly_score_instance(model, synthetic, r);
    score_sum += s;
    if (s > result.threshold) ++flagged;
  }
  result.fraction_flagged =
      static_cast<double>(flagged) / static_cast<double>(synthetic.row_count());
  result.mean_instance_score =
      score_sum / static_cast<double>(synthetic.row_count());
  return result;
}

double anomaly_test_score(const Dataset& real, const Dataset& synthetic,
                          const IsolationForestConfig& config) {
  return anomaly_test(real, synthetic, config).fraction_flagged;
}

}  // namespace synthval
