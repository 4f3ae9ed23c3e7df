#include "synthval/pipeline.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthval/encoding.hpp"
#include "synthval/errors.hpp"

namespace synthval {

namespace {

using ordered_json = nlohmann::ordered_json;

const std::array<const char*, 4> kTestNames = {
    "wasserstein_cramers", "novelty", "domain_classifier", "anomaly"};

EvaluationReport evaluate_override(const ScoreMatrix& matrix,
                                   const EvaluationConfig& config) {
  matrix.validate();
  EvaluationReport report;
  report.config = config;
  report.test_names = matrix.tests;
  for (std::size_t i = 0; i < matrix.model_count(); ++i) {
    ModelEvaluation eval;
    eval.name = matrix.models[i];
    eval.scored = true;
    eval.override_scores = matrix.scores[i];
    report.models.push_back(std::move(eval));
  }

  const AlignedRanks ranks = aligned_ranks(orient(matrix));
  report.far = far_statistic(ranks);
  report.finner = finner_posthoc(ranks, config.alpha_significance);
  report.ranking_skipped = false;
  report.selected = report.far->ordering.front();
  return report;
}

}  // namespace

EvaluationReport evaluate_all(const Dataset& real,
                              const std::vector<NamedDataset>& synthetics,
                              const EvaluationConfig& config) {
  if (config.score_override) {
    return evaluate_override(*config.score_override, config);
  }

  bool has_features = false;
  for (const auto& spec : real.schema().columns()) {
    has_features = has_features || spec.role == ColumnRole::Feature;
  }
  if (!has_features) {
    throw DataError("evaluate_all: the schema has no feature columns");
  }

  EvaluationReport report;
  report.config = config;
  report.test_names.assign(kTestNames.begin(), kTestNames.end());

  // Step 3: the validity gate removes a dataset on any violation.
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < synthetics.size(); ++i) {
    ModelEvaluation eval;
    eval.name = synthetics[i].name;
    eval.path = synthetics[i].path;
    eval.diagnostics = diagnose(real, synthetics[i].dataset);
    eval.excluded = !eval.diagnostics.passed;
    if (!eval.excluded) survivors.push_back(i);
    report.models.push_back(std::move(eval));
  }

  if (survivors.size() < 2) {
    report.ranking_skipped = true;
    report.skip_reason =
        survivors.empty()
            ? "no synthetic dataset passed the diagnostic validity test"
            : "only one synthetic dataset passed the diagnostic validity test; "
              "ranking needs at least two";
    if (survivors.size() == 1) {
      report.selected = report.models[survivors[0]].name;
      report.selected_path = report.models[survivors[0]].path;
    }
    return report;
  }

  DomainClassifierConfig classifier = config.classifier;
  classifier.seed = config.seed + 1;
  IsolationForestConfig forest = config.forest;
  forest.seed = config.seed + 2;

  // Steps 5-8: the same configuration is applied to every survivor, so a
  // model's scores do not depend on which other models are present.
  std::vector<std::vector<double>> wc_rows;
  for (std::size_t i : survivors) {
    auto& eval = report.models[i];
    const Dataset& synth = synthetics[i].dataset;
    eval.wc_per_feature = wc_feature_scores(real, synth);
    std::vector<double> row;
    row.reserve(eval.wc_per_feature.size());
    for (const auto& score : eval.wc_per_feature) row.push_back(score.value);
    wc_rows.push_back(std::move(row));

    eval.novelty = novelty_score(real, synth, config.novelty);
    const auto classifier_result = domain_classifier(real, synth, classifier);
    eval.domain_auc = classifier_result.mean_auc;
    eval.fold_aucs = classifier_result.fold_aucs;
    eval.anomaly = anomaly_test(real, synth, forest);
    eval.anomaly_fraction = eval.anomaly.fraction_flagged;
    eval.scored = true;
  }

  const std::vector<double> wc_scores = wc_aggregate(wc_rows);
  for (std::size_t s = 0; s < survivors.size(); ++s) {
    report.models[survivors[s]].wc_score = wc_scores[s];
  }

  // Step 9: assemble the oriented matrix and run the statistical analysis.
  ScoreMatrix matrix;
  matrix.tests.assign(kTestNames.begin(), kTestNames.end());
  matrix.orientations = {Orientation::LowerBetter,
                         config.novelty_higher_better ? Orientation::HigherBetter
                                                      : Orientation::LowerBetter,
                         Orientation::LowerBetter, Orientation::LowerBetter};
  for (std::size_t i : survivors) {
    const auto& eval = report.models[i];
    matrix.models.push_back(eval.name);
    matrix.scores.push_back(
        {eval.wc_score, eval.novelty, eval.domain_auc, eval.anomaly_fraction});
  }

  const AlignedRanks ranks = aligned_ranks(orient(matrix));
  report.far = far_statistic(ranks);
  report.finner = finner_posthoc(ranks, config.alpha_significance);
  report.ranking_skipped = false;

  // Step 10: best mean aligned rank wins.
  report.selected = report.far->ordering.front();
  for (const auto& eval : report.models) {
    if (eval.name == report.selected) report.selected_path = eval.path;
  }
  return report;
}

namespace {

ordered_json diagnostics_to_json(const DiagnosticReport& report) {
  ordered_json violations = ordered_json::array();
  for (const auto& violation : report.violations) {
    violations.push_back({{"check", to_string(violation.check)},
                          {"column", violation.column},
                          {"detail", violation.detail},
                          {"count", violation.count}});
  }
  return {{"passed", report.passed}, {"violations", std::move(violations)}};
}

ordered_json config_to_json(const EvaluationConfig& config) {
  return {{"seed", config.seed},
          {"alpha_novelty", config.novelty.alpha},
          {"novelty_higher_better", config.novelty_higher_better},
          {"folds", config.classifier.folds},
          {"learning_rate", config.classifier.learning_rate},
          {"epochs", config.classifier.epochs},
          {"trees", config.forest.trees},
          {"subsample", config.forest.subsample},
          {"anomaly_quantile", config.forest.anomaly_quantile},
          {"alpha_significance", config.alpha_significance},
          {"scores_override", config.score_override.has_value()}};
}

ordered_json ranking_to_json(const EvaluationReport& report) {
  ordered_json ranking;
  ranking["skipped"] = report.ranking_skipped;
  if (report.ranking_skipped) {
    ranking["reason"] = report.skip_reason;
    return ranking;
  }
  const FarResult& far = *report.far;
  ordered_json mean_ranks;
  std::size_t index = 0;
  for (const auto& eval : report.models) {
    if (!eval.scored) continue;
    mean_ranks[eval.name] = far.mean_ranks[index++];
  }
  ranking["far"] = {{"statistic", far.statistic},
                    {"dof", far.dof},
                    {"p_value", far.p_value},
                    {"mean_ranks", std::move(mean_ranks)},
                    {"ordering", far.ordering}};
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.finner->rows) {
    rows.push_back({{"model", row.model},
                    {"z", row.z},
                    {"p", row.p},
                    {"apv", row.apv},
                    {"decision", row.rejected ? "rejected" : "failed_to_reject"}});
  }
  ranking["finner"] = {{"control", report.finner->control},
                       {"alpha", report.finner->alpha},
                       {"rows", std::move(rows)}};
  return ranking;
}

}  // namespace

std::string report_to_json_string(const EvaluationReport& report) {
  ordered_json doc;
  doc["config"] = config_to_json(report.config);

  ordered_json diagnostics;
  for (const auto& eval : report.models) {
    if (report.config.score_override) break;  // no datasets were examined
    diagnostics[eval.name] = diagnostics_to_json(eval.diagnostics);
  }
  doc["diagnostics"] = std::move(diagnostics);

  ordered_json tests;
  if (report.config.score_override) {
    ordered_json scores;
    for (const auto& eval : report.models) {
      scores[eval.name] = eval.override_scores;
    }
    tests["override"] = {{"tests", report.test_names},
                         {"scores", std::move(scores)}};
  } else {
    ordered_json wc, wc_per_feature, novelty, domain, anomaly;
    for (const auto& eval : report.models) {
      if (!eval.scored) continue;
      ordered_json features = ordered_json::array();
      for (const auto& score : eval.wc_per_feature) {
        features.push_back(
            {{"column", score.column},
             {"metric", score.metric == FeatureMetric::Wasserstein
                            ? "wasserstein"
                            : "cramers_v"},
             {"value", score.value}});
      }
      wc_per_feature[eval.name] = std::move(features);
      wc[eval.name] = eval.wc_score;
      novelty[eval.name] = eval.novelty;
      domain[eval.name] = {{"mean_auc", eval.domain_auc},
                           {"per_fold", eval.fold_aucs}};
      anomaly[eval.name] = {{"fraction_flagged", eval.anomaly.fraction_flagged},
                            {"mean_instance_score", eval.anomaly.mean_instance_score},
                            {"threshold", eval.anomaly.threshold}};
    }
    tests["wasserstein_cramers"] = {{"per_feature", std::move(wc_per_feature)},
                                    {"scores", std::move(wc)}};
    tests["novelty"] = std::move(novelty);
    tests["domain_classifier"] = std::move(domain);
    tests["anomaly"] = std::move(anomaly);
  }
  doc["tests"] = std::move(tests);

  doc["ranking"] = ranking_to_json(report);
  doc["selected"] = report.selected;
  doc["selected_dataset_path"] = report.selected_path;
  return doc.dump(2) + "\n";
}

void write_report_json(const EvaluationReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << report_to_json_string(report);
}

namespace {

std::string fixed(double v, int precision) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(precision);
  out << v;
  return out.str();
}

}  // namespace

std::string report_to_text(const EvaluationReport& report) {
  std::ostringstream out;
  for (const auto& eval : report.models) {
    if (!eval.excluded) continue;
    out << "excluded: " << eval.name << " (";
    for (std::size_t i = 0; i < eval.diagnostics.violations.size(); ++i) {
      const auto& violation = eval.diagnostics.violations[i];
      if (i) out << "; ";
      out << to_string(violation.check) << " on " << violation.column << " x"
          << violation.count;
    }
    out << ")\n";
  }
  if (report.ranking_skipped) {
    out << "ranking skipped: " << report.skip_reason << "\n";
    if (!report.selected.empty()) out << "selected: " << report.selected << "\n";
    return out.str();
  }

  const FarResult& far = *report.far;
  out << "F_AR = " << fixed(far.statistic, 3) << " (dof " << far.dof
      << "), p-value = " << fixed(far.p_value, 4) << "\n\n";

  std::size_t width = 5;
  for (const auto& eval : report.models) {
    width = std::max(width, eval.name.size());
  }
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  out << pad("Model", width) << "  " << pad("Friedman Ranking", 16) << "  "
      << pad("APV", 10) << "H0\n";

  // rows in ranking order, control first
  std::size_t index = 0;
  std::vector<std::pair<std::string, double>> mean_rank_of;
  for (const auto& eval : report.models) {
    if (eval.scored) mean_rank_of.emplace_back(eval.name, far.mean_ranks[index++]);
  }
  for (const auto& name : far.ordering) {
    double mean_rank = 0.0;
    for (const auto& [n, r] : mean_rank_of) {
      if (n == name) mean_rank = r;
    }
    out << pad(name, width) << "  " << pad(fixed(mean_rank, 3), 16) << "  ";
    if (name == report.finner->control) {
      out << pad("-", 10) << "-\n";
      continue;
    }
    for (const auto& row : report.finner->rows) {
      if (row.model != name) continue;
      out << pad(fixed(row.apv, 6), 10)
          << (row.rejected ? "Rejected" : "Failed to reject") << "\n";
    }
  }
  out << "\nselected: " << report.selected << "\n";
  return out.str();
}

ScoreMatrix load_score_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score matrix '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("score matrix '" + path + "': " + e.what());
  }
  ScoreMatrix matrix;
  try {
    matrix.models = doc.at("models").get<std::vector<std::string>>();
    matrix.tests = doc.at("tests").get<std::vector<std::string>>();
    matrix.scores = doc.at("scores").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError("score matrix '" + path + "': " + e.what());
  }
  if (doc.contains("orientations")) {
    for (const auto& entry : doc["orientations"]) {
      const std::string value = entry.get<std::string>();
      if (value == "lower_better") {
        matrix.orientations.push_back(Orientation::LowerBetter);
      } else if (value == "higher_better") {
        matrix.orientations.push_back(Orientation::HigherBetter);
      } else {
        throw DataError("score matrix '" + path + "': unknown orientation '" +
                        value + "'");
      }
    }
  } else {
    matrix.orientations.assign(matrix.tests.size(), Orientation::LowerBetter);
  }
  matrix.validate();
  return matrix;
}

Projection2D project_2d(const Dataset& real,
                        const std::vector<NamedDataset>& synthetics) {
  const FeatureEncoder encoder = FeatureEncoder::fit(real);
  const Eigen::MatrixXd real_encoded = encoder.encode(real);
  const Standardizer scaler =
      Standardizer::fit(real_encoded, encoder.continuous_dims());
  const Eigen::MatrixXd real_std = scaler.apply(real_encoded);

  const auto d = real_std.cols();
  const Eigen::MatrixXd centered = real_std.rowwise() - real_std.colwise().mean();
  const Eigen::MatrixXd covariance =
      centered.transpose() * centered / static_cast<double>(real_std.rows());

  Projection2D projection;
  Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(d, 2);
  if (d == 1) {
    loadings(0, 0) = 1.0;
    projection.degenerate = true;
    projection.explained_variance_fraction = {1.0, 0.0};
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    // eigenvalues ascend; take the last two
    loadings.col(0) = solver.eigenvectors().col(d - 1);
    loadings.col(1) = solver.eigenvectors().col(d - 2);
    const double total = std::max(solver.eigenvalues().sum(), 1e-300);
    projection.explained_variance_fraction = {
        solver.eigenvalues()(d - 1) / total, solver.eigenvalues()(d - 2) / total};
    if (solver.eigenvalues()(d - 2) <= 1e-12 * solver.eigenvalues()(d - 1)) {
      projection.degenerate = true;
    }
  }

  auto project = [&](const Dataset& dataset) {
    const Eigen::MatrixXd coords =
        scaler.apply(encoder.encode(dataset)) * loadings;
    std::vector<std::array<double, 2>> points;
    points.reserve(static_cast<std::size_t>(coords.rows()));
    for (Eigen::Index r = 0; r < coords.rows(); ++r) {
      points.push_back({coords(r, 0), coords(r, 1)});
    }
    return points;
  };

  projection.names.push_back("real");
  projection.coordinates.push_back(project(real));
  for (const auto& synth : synthetics) {
    projection.names.push_back(synth.name);
    projection.coordinates.push_back(project(synth.dataset));
  }
  for (Eigen::Index c = 0; c < 2; ++c) {
    std::vector<double> component;
    component.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index r = 0; r < d; ++r) component.push_back(loadings(r, c));
    projection.loadings.push_back(std::move(component));
  }
  return projection;
}

void write_projection_csv(const Projection2D& projection,
                          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  auto format = [](double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  out << "dataset,x,y\n";
  for (std::size_t i = 0; i < projection.names.size(); ++i) {
    for (const auto& [x, y] : projection.coordinates[i]) {
      out << projection.names[i] << ',' << format(x) << ',' << format(y) << '\n';
    }
  }
}

}  // namespace synthval
