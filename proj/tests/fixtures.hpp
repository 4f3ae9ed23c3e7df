#pragma once

// Published 5x4 and 4x4 score matrices used as regression fixtures for the
// ranking stack, with their independently derived mean aligned ranks.

#include "synthval/rank_stats.hpp"

namespace fixtures {

inline synthval::ScoreMatrix matrix_5x4() {
  synthval::ScoreMatrix m;
  m.models = {"GaussianCopula", "GMM", "CTGAN", "TVAE", "CopulaGAN"};
  m.tests = {"wasserstein_cramers", "novelty", "domain_classifier", "anomaly"};
  m.scores = {{14.55, 0.0, 0.783, 0.0},
              {11.0, 0.001, 0.730, 0.001},
              {34.2, 0.001, 0.767, 0.0},
              {26.0, 0.0, 0.734, 0.001},
              {41.75, 0.0, 0.799, 0.013}};
  m.orientations.assign(4, synthval::Orientation::LowerBetter);
  return m;
}

// mean aligned ranks of matrix_5x4, model order
inline const double kMeanRanks5x4[5] = {8.375, 6.0, 12.75, 9.875, 15.5};

inline synthval::ScoreMatrix matrix_4x4() {
  synthval::ScoreMatrix m;
  m.models = {"GaussianCopula", "CTGAN", "TVAE", "CopulaGAN"};
  m.tests = {"wasserstein_cramers", "novelty", "domain_classifier", "anomaly"};
  m.scores = {{37.41, 0.0, 0.784, 0.005},
              {29.85, 0.0, 0.764, 0.011},
              {35.32, 0.0, 0.770, 0.0},
              {35.41, 0.0, 0.773, 0.021}};
  m.orientations.assign(4, synthval::Orientation::LowerBetter);
  return m;
}

inline const double kMeanRanks4x4[4] = {9.875, 5.625, 7.125, 11.375};

}  // namespace fixtures
