// Command-line front end: `evaluate` runs the full pipeline and writes the
// JSON report, `generate` fits and samples a baseline generator, `diagnose`
// runs the validity gate only. Exit codes: 0 success, 1 usage, 2 data error.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthval/copula.hpp"
#include "synthval/dataset.hpp"
#include "synthval/diagnostics.hpp"
#include "synthval/errors.hpp"
#include "synthval/gmm.hpp"
#include "synthval/model_io.hpp"
#include "synthval/pipeline.hpp"

namespace {

using namespace synthval;

struct SyntheticArg {
  std::string name;
  std::string path;
};

std::vector<SyntheticArg> parse_synthetic_args(const std::vector<std::string>& args) {
  std::vector<SyntheticArg> parsed;
  for (const auto& arg : args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
      parsed.push_back({std::filesystem::path(arg).stem().string(), arg});
    } else {
      parsed.push_back({arg.substr(0, eq), arg.substr(eq + 1)});
    }
  }
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    for (std::size_t j = i + 1; j < parsed.size(); ++j) {
      if (parsed[i].name == parsed[j].name) {
        throw DataError("duplicate synthetic dataset name '" + parsed[i].name +
                        "'; use name=path to disambiguate");
      }
    }
  }
  return parsed;
}

struct EvaluateArgs {
  std::string real_path, schema_path, out_path, projection_out, scores_override;
  std::vector<std::string> synthetic;
  EvaluationConfig config;
};

int run_evaluate(const EvaluateArgs& args) {
  EvaluationConfig config = args.config;
  if (!args.scores_override.empty()) {
    config.score_override = load_score_matrix(args.scores_override);
  }

  std::vector<NamedDataset> synthetics;
  EvaluationReport report;
  if (config.score_override && args.real_path.empty()) {
    // ranking-only run driven entirely by the override matrix
    const Schema empty_schema{std::vector<ColumnSpec>{}};
    const Dataset empty(empty_schema, {});
    report = evaluate_all(empty, synthetics, config);
  } else {
    const Dataset real = load_dataset(args.real_path, args.schema_path);
    const Schema schema = real.schema();
    for (const auto& arg : parse_synthetic_args(args.synthetic)) {
      synthetics.push_back({arg.name, arg.path, load_csv(arg.path, schema)});
    }
    report = evaluate_all(real, synthetics, config);
    if (!args.projection_out.empty()) {
      std::vector<NamedDataset> included;
      for (std::size_t i = 0; i < synthetics.size(); ++i) {
        if (!report.models[i].excluded) included.push_back(synthetics[i]);
      }
      write_projection_csv(project_2d(real, included), args.projection_out);
    }
  }

  if (!args.out_path.empty()) write_report_json(report, args.out_path);
  std::cout << report_to_text(report);
  return 0;
}

struct GenerateArgs {
  std::string real_path, schema_path, out_path, model = "gmm";
  std::string save_model, load_model;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  int components = 5;
  int max_iter = 100;
  std::size_t fit_sample = 0;  // 0 = use every row
};

int run_generate(const GenerateArgs& args) {
  Dataset sampled = [&]() -> Dataset {
    if (!args.load_model.empty()) {
      const std::string type = model_type_of(args.load_model);
      if (type == "gmm") return gmm_sample(load_gmm(args.load_model), args.n, args.seed);
      if (type == "copula") {
        return copula_sample(load_copula(args.load_model), args.n, args.seed);
      }
      throw DataError("unknown model type '" + type + "' in " + args.load_model);
    }

    Dataset real = load_dataset(args.real_path, args.schema_path);
    if (args.fit_sample > 0 && args.fit_sample < real.row_count()) {
      real = sample_rows(real, args.fit_sample, args.seed);
    }
    if (args.model == "gmm") {
      GmmConfig config;
      config.n_components = args.components;
      config.max_iter = args.max_iter;
      config.seed = args.seed;
      const GmmModel model = gmm_fit(real, config);
      if (!args.save_model.empty()) save_gmm(model, args.save_model);
      return gmm_sample(model, args.n, args.seed + 1);
    }
    if (args.model == "copula") {
      const CopulaModel model = copula_fit(real, args.seed);
      if (!args.save_model.empty()) save_copula(model, args.save_model);
      return copula_sample(model, args.n, args.seed + 1);
    }
    throw DataError("unknown generator '" + args.model + "' (expected gmm or copula)");
  }();

  write_csv(sampled, args.out_path);
  std::cout << "wrote " << sampled.row_count() << " rows to " << args.out_path
            << "\n";
  return 0;
}

struct DiagnoseArgs {
  std::string real_path, schema_path;
  std::vector<std::string> synthetic;
};

int run_diagnose(const DiagnoseArgs& args) {
  const Dataset real = load_dataset(args.real_path, args.schema_path);
  bool all_passed = true;
  for (const auto& arg : parse_synthetic_args(args.synthetic)) {
    const Dataset synth = load_csv(arg.path, real.schema());
    const DiagnosticReport report = diagnose(real, synth);
    std::cout << arg.name << ": " << (report.passed ? "passed" : "FAILED") << "\n";
    for (const auto& violation : report.violations) {
      std::cout << "  " << to_string(violation.check) << " on "
                << violation.column << ": " << violation.detail << " (x"
                << violation.count << ")\n";
    }
    all_passed = all_passed && report.passed;
  }
  return all_passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic tabular data evaluation: scores candidate synthetic "
               "datasets against a real dataset with five tests and selects "
               "the statistically best generator"};
  app.require_subcommand(1);

  EvaluateArgs evaluate_args;
  auto* evaluate = app.add_subcommand(
      "evaluate", "run diagnostics, the four quality tests and the ranking");
  evaluate->add_option("--real", evaluate_args.real_path, "real dataset CSV");
  evaluate->add_option("--schema", evaluate_args.schema_path, "schema JSON sidecar");
  evaluate->add_option("--synthetic", evaluate_args.synthetic,
                       "synthetic dataset CSV, repeatable, name=path allowed");
  evaluate->add_option("--out", evaluate_args.out_path, "JSON report path");
  evaluate->add_option("--seed", evaluate_args.config.seed, "master RNG seed");
  evaluate->add_option("--alpha-novelty", evaluate_args.config.novelty.alpha,
                       "novelty match threshold in (0,1)");
  evaluate->add_flag("--novelty-higher-better",
                     evaluate_args.config.novelty_higher_better,
                     "rank novelty with higher scores better");
  evaluate->add_option("--folds", evaluate_args.config.classifier.folds,
                       "domain classifier cross-validation folds");
  evaluate->add_option("--learning-rate",
                       evaluate_args.config.classifier.learning_rate,
                       "domain classifier learning rate");
  evaluate->add_option("--epochs", evaluate_args.config.classifier.epochs,
                       "domain classifier gradient-descent epochs");
  evaluate->add_option("--trees", evaluate_args.config.forest.trees,
                       "isolation forest size");
  evaluate->add_option("--subsample", evaluate_args.config.forest.subsample,
                       "isolation forest per-tree subsample");
  evaluate->add_option("--anomaly-quantile",
                       evaluate_args.config.forest.anomaly_quantile,
                       "real-score quantile used as the anomaly threshold");
  evaluate->add_option("--alpha-significance",
                       evaluate_args.config.alpha_significance,
                       "significance level for the post-hoc decisions");
  evaluate->add_option("--projection-out", evaluate_args.projection_out,
                       "write 2D PCA projection CSV here");
  evaluate->add_option("--scores-override", evaluate_args.scores_override,
                       "read the score matrix from a JSON file instead of "
                       "computing tests")
      ->group("");  // hidden

  GenerateArgs generate_args;
  auto* generate =
      app.add_subcommand("generate", "fit a baseline generator and sample rows");
  generate->add_option("--real", generate_args.real_path, "real dataset CSV");
  generate->add_option("--schema", generate_args.schema_path, "schema JSON sidecar");
  generate->add_option("--model", generate_args.model, "gmm or copula");
  generate->add_option("--n", generate_args.n, "rows to generate");
  generate->add_option("--seed", generate_args.seed, "RNG seed");
  generate->add_option("--components", generate_args.components,
                       "GMM mixture components");
  generate->add_option("--max-iter", generate_args.max_iter, "GMM EM iterations");
  generate->add_option("--fit-sample", generate_args.fit_sample,
                       "fit on a seeded uniform subsample of this many rows");
  generate->add_option("--save-model", generate_args.save_model,
                       "write the fitted model JSON here");
  generate->add_option("--load-model", generate_args.load_model,
                       "sample from a saved model instead of fitting");
  generate->add_option("--out", generate_args.out_path, "output CSV")->required();

  DiagnoseArgs diagnose_args;
  auto* diagnose_cmd =
      app.add_subcommand("diagnose", "run the validity gate only");
  diagnose_cmd->add_option("--real", diagnose_args.real_path, "real dataset CSV")
      ->required();
  diagnose_cmd->add_option("--schema", diagnose_args.schema_path, "schema JSON")
      ->required();
  diagnose_cmd
      ->add_option("--synthetic", diagnose_args.synthetic,
                   "synthetic dataset CSV, repeatable")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (evaluate->parsed()) {
      if (evaluate_args.scores_override.empty()) {
        if (evaluate_args.real_path.empty() || evaluate_args.schema_path.empty()) {
          std::cerr << "evaluate: --real and --schema are required\n";
          return 1;
        }
        if (evaluate_args.synthetic.empty()) {
          std::cerr << "evaluate: at least one --synthetic is required\n";
          return 1;
        }
      }
      return run_evaluate(evaluate_args);
    }
    if (generate->parsed()) {
      if (generate_args.load_model.empty() &&
          (generate_args.real_path.empty() || generate_args.schema_path.empty())) {
        std::cerr << "generate: --real and --schema are required unless "
                     "--load-model is given\n";
        return 1;
      }
      return run_generate(generate_args);
    }
    return run_diagnose(diagnose_args);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
