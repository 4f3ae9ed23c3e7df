#include "synthval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "synthval/errors.hpp"
#include "synthval/rank_stats.hpp"

namespace synthval {

double wasserstein_1d(std::span<const double> real_values,
                      std::span<const double> synth_values) {
  if (real_values.empty() || synth_values.empty()) {
    throw DataError("wasserstein_1d: empty sample");
  }
  std::vector<double> a(real_values.begin(), real_values.end());
  std::vector<double> b(synth_values.begin(), synth_values.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  // Sweep the merged breakpoints; between consecutive distinct values both
  // CDFs are constant, so the area is |F_a - F_b| * segment width.
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double distance = 0.0;
  double previous = 0.0;
  bool first = true;
  while (ia < a.size() || ib < b.size()) {
    double x;
    if (ib == b.size() || (ia < a.size() && a[ia] <= b[ib])) {
      x = a[ia];
    } else {
      x = b[ib];
    }
    if (!first) {
      const double fa = static_cast<double>(ia) / na;
      const double fb = static_cast<double>(ib) / nb;
      distance += std::fabs(fa - fb) * (x - previous);
    }
    while (ia < a.size() && a[ia] == x) ++ia;
    while (ib < b.size() && b[ib] == x) ++ib;
    previous = x;
    first = false;
  }
  return distance;
}

double cramers_v(std::span<const std::string> real_tokens,
                 std::span<const std::string> synth_tokens) {
  if (real_tokens.empty() || synth_tokens.empty()) {
    throw DataError("cramers_v: empty sample");
  }
  std::map<std::string, std::array<double, 2>> table;
  for (const auto& token : real_tokens) table[token][0] += 1.0;
  for (const auto& token : synth_tokens) table[token][1] += 1.0;
  if (table.size() < 2) return 0.0;

  const double row0 = static_cast<double>(real_tokens.size());
  const double row1 = static_cast<double>(synth_tokens.size());
  const double total = row0 + row1;

  double chi2 = 0.0;
  for (const auto& [token, counts] : table) {
    const double col = counts[0] + counts[1];
    const double e0 = row0 * col / total;
    const double e1 = row1 * col / total;
    chi2 += (counts[0] - e0) * (counts[0] - e0) / e0;
    chi2 += (counts[1] - e1) * (counts[1] - e1) / e1;
  }
  // 2 x c table: min(2, c) - 1 == 1, so V = sqrt(chi2 / N)
  return std::sqrt(chi2 / total);
}

std::vector<FeatureScore> wc_feature_scores(const Dataset& real,
                                            const Dataset& synthetic) {
  if (!(real.schema() == synthetic.schema())) {
    throw DataError("wc_feature_scores: schemas differ");
  }
  std::vector<FeatureScore> scores;
  for (std::size_t c = 0; c < real.column_count(); ++c) {
    const auto& spec = real.schema().column(c);
    if (spec.role != ColumnRole::Feature) continue;
    FeatureScore score;
    score.column = spec.name;
    if (spec.kind == ColumnKind::Continuous) {
      score.metric = FeatureMetric::Wasserstein;
      score.value = wasserstein_1d(real.column(c).numeric, synthetic.column(c).numeric);
    } else {
      score.metric = FeatureMetric::CramersV;
      score.value = cramers_v(real.column(c).tokens, synthetic.column(c).tokens);
    }
    scores.push_back(std::move(score));
  }
  return scores;
}

std::vector<double> wc_aggregate(
    const std::vector<std::vector<double>>& per_model_feature_scores) {
  if (per_model_feature_scores.size() < 2) {
    throw DataError("wc_aggregate: need at least 2 models");
  }
  if (per_model_feature_scores.front().empty()) {
    throw DataError("wc_aggregate: no feature scores");
  }
  // single feature: aligning cannot change the ranks
  if (per_model_feature_scores.front().size() == 1) {
    std::vector<double> column;
    for (const auto& row : per_model_feature_scores) {
      if (row.size() != 1) throw DataError("wc_aggregate: ragged score rows");
      column.push_back(row.front());
    }
    return average_ranks(column);
  }
  ScoreMatrix matrix;
  matrix.scores = per_model_feature_scores;
  const std::size_t features = per_model_feature_scores.front().size();
  for (std::size_t i = 0; i < per_model_feature_scores.size(); ++i) {
    matrix.models.push_back("model" + std::to_string(i));
  }
  for (std::size_t j = 0; j < features; ++j) {
    matrix.tests.push_back("feature" + std::to_string(j));
    matrix.orientations.push_back(Orientation::LowerBetter);
  }
  const AlignedRanks ranks = aligned_ranks(matrix);

  std::vector<double> result;
  result.reserve(ranks.model_count());
  for (std::size_t i = 0; i < ranks.model_count(); ++i) {
    result.push_back(ranks.mean_rank(i));
  }
  return result;
}

double novelty_score(const Dataset& real, const Dataset& synthetic,
                     const NoveltyConfig& config) {
  if (!(real.schema() == synthetic.schema())) {
    throw DataError("novelty_score: schemas differ");
  }
  if (synthetic.row_count() == 0) {
    throw DataError("novelty_score: empty synthetic dataset");
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw DataError("novelty_score: alpha must be in (0, 1)");
  }

  // Normalize continuous features once, against the real ranges.
  const auto ranges = feature_ranges(real);
  std::vector<std::size_t> continuous_cols, discrete_cols;
  std::vector<std::vector<double>> real_norm, synth_norm;
  {
    std::size_t range_index = 0;
    for (std::size_t c = 0; c < real.column_count(); ++c) {
      const auto& spec = real.schema().column(c);
      if (spec.role != ColumnRole::Feature) continue;
      const FeatureRange& range = ranges[range_index++];
      if (spec.kind == ColumnKind::Continuous) {
        continuous_cols.push_back(c);
        real_norm.push_back(minmax_normalize(real.column(c).numeric, range));
        synth_norm.push_back(minmax_normalize(synthetic.column(c).numeric, range));
      } else {
        discrete_cols.push_back(c);
      }
    }
  }

  std::size_t unmatched = 0;
  for (std::size_t s = 0; s < synthetic.row_count(); ++s) {
    bool matched = false;
    for (std::size_t r = 0; r < real.row_count() && !matched; ++r) {
      bool close = true;
      for (std::size_t f = 0; f < continuous_cols.size() && close; ++f) {
        close = std::fabs(synth_norm[f][s] - real_norm[f][r]) < config.alpha;
      }
      for (std::size_t f = 0; f < discrete_cols.size() && close; ++f) {
        const std::size_t c = discrete_cols[f];
        close = synthetic.column(c).tokens[s] == real.column(c).tokens[r];
      }
      matched = close;
    }
    if (!matched) ++unmatched;
  }
  return static_cast<double>(unmatched) / static_cast<double>(synthetic.row_count());
}

}  // namespace synthval
