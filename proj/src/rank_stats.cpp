#include "synthval/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "synthval/errors.hpp"
#include "synthval/special_functions.hpp"

namespace synthval {

void ScoreMatrix::validate() const {
  if (models.size() < 2) throw DataError("score matrix: need at least 2 models");
  if (tests.size() < 2) throw DataError("score matrix: need at least 2 tests");
  if (scores.size() != models.size()) {
    throw DataError("score matrix: row count does not match model count");
  }
  if (orientations.size() != tests.size()) {
    throw DataError("score matrix: orientation count does not match test count");
  }
  for (const auto& row : scores) {
    if (row.size() != tests.size()) {
      throw DataError("score matrix: ragged score row");
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw DataError("score matrix: non-finite score");
    }
  }
}

ScoreMatrix orient(ScoreMatrix matrix) {
  for (std::size_t j = 0; j < matrix.orientations.size(); ++j) {
    if (matrix.orientations[j] == Orientation::HigherBetter) {
      for (auto& row : matrix.scores) row[j] = -row[j];
      matrix.orientations[j] = Orientation::LowerBetter;
    }
  }
  return matrix;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // tie block [i, j]: every member gets the average of ranks i+1 .. j+1
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

AlignedRanks aligned_ranks(const ScoreMatrix& oriented) {
  oriented.validate();
  const std::size_t k = oriented.model_count();
  const std::size_t n = oriented.test_count();

  // Align: remove each test's location so observations pool across tests.
  std::vector<double> pooled(k * n);
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) mean += oriented.scores[i][j];
    mean /= static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
      pooled[i * n + j] = oriented.scores[i][j] - mean;
    }
  }

  const std::vector<double> pooled_ranks = average_ranks(pooled);

  AlignedRanks result;
  result.models = oriented.models;
  result.ranks.assign(k, std::vector<double>(n, 0.0));
  result.model_totals.assign(k, 0.0);
  result.test_totals.assign(n, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double r = pooled_ranks[i * n + j];
      result.ranks[i][j] = r;
      result.model_totals[i] += r;
      result.test_totals[j] += r;
    }
  }
  return result;
}

namespace {

std::vector<std::size_t> order_by_mean_rank(const AlignedRanks& ranks) {
  std::vector<std::size_t> order(ranks.model_count());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ranks.model_totals[a] < ranks.model_totals[b];
  });
  return order;
}

}  // namespace

FarResult far_statistic(const AlignedRanks& ranks) {
  const auto k = static_cast<double>(ranks.model_count());
  const auto n = static_cast<double>(ranks.test_count());
  const double kn = k * n;

  double model_sq = 0.0;
  for (double total : ranks.model_totals) model_sq += total * total;
  double test_sq = 0.0;
  for (double total : ranks.test_totals) test_sq += total * total;

  const double numerator =
      (k - 1.0) * (model_sq - (k * n * n / 4.0) * (kn + 1.0) * (kn + 1.0));
  const double denominator =
      kn * (kn + 1.0) * (2.0 * kn + 1.0) / 6.0 - test_sq / k;

  FarResult result;
  result.dof = static_cast<int>(k) - 1;
  if (denominator <= 0.0) {
    result.statistic = 0.0;
    result.p_value = 1.0;
  } else {
    result.statistic = numerator / denominator;
    // full ties give numerator 0 exactly; clamp any tiny negative residue
    if (result.statistic < 0.0) result.statistic = 0.0;
    result.p_value = chi_square_sf(result.statistic, result.dof);
  }

  result.mean_ranks.reserve(ranks.model_count());
  for (std::size_t i = 0; i < ranks.model_count(); ++i) {
    result.mean_ranks.push_back(ranks.mean_rank(i));
  }
  for (std::size_t i : order_by_mean_rank(ranks)) {
    result.ordering.push_back(ranks.models[i]);
  }
  return result;
}

std::vector<ControlComparison> control_pvalues(const AlignedRanks& ranks) {
  const auto k = static_cast<double>(ranks.model_count());
  const auto n = static_cast<double>(ranks.test_count());
  const std::size_t control = order_by_mean_rank(ranks).front();
  const double se = std::sqrt(k * (n + 1.0) / 6.0);

  std::vector<ControlComparison> comparisons;
  for (std::size_t i = 0; i < ranks.model_count(); ++i) {
    if (i == control) continue;
    ControlComparison cmp;
    cmp.model = ranks.models[i];
    cmp.z = (ranks.mean_rank(i) - ranks.mean_rank(control)) / se;
    cmp.p = 2.0 * (1.0 - normal_cdf(std::fabs(cmp.z)));
    comparisons.push_back(std::move(cmp));
  }
  return comparisons;
}

FinnerAdjusted finner_adjust(std::span<const double> pvalues, int k, double alpha) {
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DataError("finner_adjust: p-value outside [0, 1]");
    }
  }
  const std::size_t m = pvalues.size();
  if (m == 0 || static_cast<std::size_t>(k) != m + 1) {
    throw DataError("finner_adjust: expected k - 1 p-values");
  }

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pvalues[a] < pvalues[b];
  });

  FinnerAdjusted result;
  result.alpha = alpha;
  result.apv.assign(m, 1.0);
  result.rejected.assign(m, false);

  const double hypotheses = static_cast<double>(k - 1);
  double running_max = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double p = pvalues[order[j]];
    const double adjusted =
        1.0 - std::pow(1.0 - p, hypotheses / static_cast<double>(j + 1));
    running_max = std::max(running_max, adjusted);
    const double apv = std::min(1.0, running_max);
    result.apv[order[j]] = apv;
    result.rejected[order[j]] = apv <= alpha;
  }
  return result;
}

FinnerResult finner_posthoc(const AlignedRanks& ranks, double alpha) {
  const auto comparisons = control_pvalues(ranks);
  std::vector<double> pvalues;
  pvalues.reserve(comparisons.size());
  for (const auto& cmp : comparisons) pvalues.push_back(cmp.p);
  const auto adjusted =
      finner_adjust(pvalues, static_cast<int>(ranks.model_count()), alpha);

  FinnerResult result;
  result.control = ranks.models[order_by_mean_rank(ranks).front()];
  result.alpha = alpha;
  for (std::size_t i = 0; i < comparisons.size(); ++i) {
    result.rows.push_back({comparisons[i].model, comparisons[i].z,
                           comparisons[i].p, adjusted.apv[i],
                           adjusted.rejected[i]});
  }
  return result;
}

}  // namespace synthval
