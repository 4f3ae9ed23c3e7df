#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "synthval/dataset.hpp"
#include "synthval/rng.hpp"

namespace testutil {

inline synthval::ColumnData numeric_column(std::vector<double> values) {
  synthval::ColumnData column;
  column.nulls.assign(values.size(), 0);
  column.numeric = std::move(values);
  return column;
}

inline synthval::ColumnData token_column(std::vector<std::string> values) {
  synthval::ColumnData column;
  column.nulls.assign(values.size(), 0);
  column.tokens = std::move(values);
  return column;
}

// all-continuous feature dataset from column vectors
inline synthval::Dataset continuous_dataset(
    const std::vector<std::string>& names,
    const std::vector<std::vector<double>>& columns) {
  std::vector<synthval::ColumnSpec> specs;
  std::vector<synthval::ColumnData> data;
  for (std::size_t i = 0; i < names.size(); ++i) {
    specs.push_back({names[i], synthval::ColumnKind::Continuous,
                     synthval::ColumnRole::Feature});
    data.push_back(numeric_column(columns[i]));
  }
  return synthval::Dataset(synthval::Schema(std::move(specs)), std::move(data));
}

// scratch directory, removed on destruction
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("synthval_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace testutil
