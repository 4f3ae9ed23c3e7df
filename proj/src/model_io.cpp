#include "synthval/model_io.hpp"

#include <fstream>

#include "json.hpp"
#include "synthval/errors.hpp"

namespace synthval {

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = r > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                    .get<double>();
    }
  }
  return m;
}

json load_document(const std::string& path, const std::string& expected_type) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open model file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("model '" + path + "': " + e.what());
  }
  if (!expected_type.empty() && doc.value("type", "") != expected_type) {
    throw DataError("model '" + path + "': expected type '" + expected_type +
                    "', found '" + doc.value("type", "") + "'");
  }
  return doc;
}

void write_document(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace

void save_gmm(const GmmModel& model, const std::string& path) {
  json components = json::array();
  for (const auto& comp : model.components) {
    json mean = json::array();
    for (Eigen::Index i = 0; i < comp.mean.size(); ++i) mean.push_back(comp.mean(i));
    components.push_back({{"weight", comp.weight},
                          {"mean", std::move(mean)},
                          {"covariance", to_json(comp.covariance)}});
  }
  write_document({{"type", "gmm"},
                  {"columns", model.columns},
                  {"components", std::move(components)}},
                 path);
}

GmmModel load_gmm(const std::string& path) {
  const json doc = load_document(path, "gmm");
  GmmModel model;
  model.columns = doc.at("columns").get<std::vector<std::string>>();
  for (const auto& entry : doc.at("components")) {
    GmmComponent comp;
    comp.weight = entry.at("weight").get<double>();
    const auto mean = entry.at("mean").get<std::vector<double>>();
    comp.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(),
                                                  static_cast<Eigen::Index>(mean.size()));
    comp.covariance = matrix_from_json(entry.at("covariance"));
    model.components.push_back(std::move(comp));
  }
  return model;
}

void save_copula(const CopulaModel& model, const std::string& path) {
  json columns = json::array();
  json marginals = json::array();
  for (std::size_t i = 0; i < model.columns.size(); ++i) {
    const auto& spec = model.columns[i];
    const auto& marginal = model.marginals[i];
    const bool continuous = spec.kind == ColumnKind::Continuous;
    columns.push_back({{"name", spec.name},
                       {"kind", continuous ? "continuous" : "discrete"}});
    if (continuous) {
      marginals.push_back({{"column", marginal.column},
                           {"sorted_values", marginal.sorted_values}});
    } else {
      marginals.push_back({{"column", marginal.column},
                           {"categories", marginal.categories},
                           {"cumulative", marginal.cumulative}});
    }
  }
  write_document({{"type", "copula"},
                  {"columns", std::move(columns)},
                  {"marginals", std::move(marginals)},
                  {"correlation", to_json(model.correlation)},
                  {"constant_columns", model.constant_columns}},
                 path);
}

CopulaModel load_copula(const std::string& path) {
  const json doc = load_document(path, "copula");
  CopulaModel model;
  for (const auto& entry : doc.at("columns")) {
    ColumnSpec spec;
    spec.name = entry.at("name").get<std::string>();
    spec.kind = entry.at("kind").get<std::string>() == "continuous"
                    ? ColumnKind::Continuous
                    : ColumnKind::Discrete;
    model.columns.push_back(std::move(spec));
  }
  for (std::size_t i = 0; i < model.columns.size(); ++i) {
    const auto& entry = doc.at("marginals")[i];
    CopulaMarginal marginal;
    marginal.column = entry.at("column").get<std::string>();
    marginal.kind = model.columns[i].kind;
    if (marginal.kind == ColumnKind::Continuous) {
      marginal.sorted_values = entry.at("sorted_values").get<std::vector<double>>();
    } else {
      marginal.categories = entry.at("categories").get<std::vector<std::string>>();
      marginal.cumulative = entry.at("cumulative").get<std::vector<double>>();
    }
    model.marginals.push_back(std::move(marginal));
  }
  model.correlation = matrix_from_json(doc.at("correlation"));
  model.constant_columns =
      doc.at("constant_columns").get<std::vector<std::string>>();
  return model;
}

std::string model_type_of(const std::string& path) {
  return load_document(path, "").value("type", "");
}

}  // namespace synthval
