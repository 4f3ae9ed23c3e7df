#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace synthval {

enum class ColumnKind { Continuous, Discrete };
enum class ColumnRole { Feature, PrimaryKey };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Continuous;
  ColumnRole role = ColumnRole::Feature;

  bool operator==(const ColumnSpec&) const = default;
};

// Ordered column list. Validates name uniqueness and the at-most-one
// primary-key rule on construction.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns);

  // Sidecar format: {"columns": [{"name", "kind", "role"}]}; "role" is
  // optional and defaults to "feature".
  static Schema load(const std::string& json_path);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t column_count() const { return columns_.size(); }
  const ColumnSpec& column(std::size_t i) const { return columns_[i]; }

  // -1 when absent
  int index_of(std::string_view name) const;
  std::optional<std::size_t> primary_key_index() const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<ColumnSpec> columns_;
};

// One column of cells. Continuous columns fill `numeric`, discrete columns
// fill `tokens`; `nulls[i]` marks empty cells (permitted until the
// diagnostic gate rejects them).
struct ColumnData {
  std::vector<double> numeric;
  std::vector<std::string> tokens;
  std::vector<std::uint8_t> nulls;
};

// Immutable after construction; safe to share across concurrent evaluations.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<ColumnData> columns);

  const Schema& schema() const { return schema_; }
  std::size_t row_count() const { return rows_; }
  std::size_t column_count() const { return schema_.column_count(); }

  const ColumnData& column(std::size_t i) const { return columns_[i]; }
  bool is_null(std::size_t row, std::size_t col) const {
    return columns_[col].nulls[row] != 0;
  }
  double numeric_at(std::size_t row, std::size_t col) const {
    return columns_[col].numeric[row];
  }
  const std::string& token_at(std::size_t row, std::size_t col) const {
    return columns_[col].tokens[row];
  }
  bool has_nulls() const;

 private:
  Schema schema_;
  std::vector<ColumnData> columns_;  // one per schema column
  std::size_t rows_;
};

// Reads an RFC-4180 CSV (first line header, UTF-8) against a JSON schema
// sidecar. Columns are reordered to schema order; continuous cells are parsed
// to finite doubles; empty cells become null. Reports the offending column or
// the (row, column) of the first unparseable numeric cell.
Dataset load_dataset(const std::string& csv_path, const std::string& schema_path);

// Same, with an already-parsed schema.
Dataset load_csv(const std::string& csv_path, const Schema& schema);

void write_csv(const Dataset& dataset, const std::string& csv_path);
void write_schema(const Schema& schema, const std::string& json_path);

// Seeded uniform subsample without replacement, row order preserved.
Dataset sample_rows(const Dataset& dataset, std::size_t n, std::uint64_t seed);

// Observed value range of one feature column of the real data.
struct FeatureRange {
  std::string column;
  ColumnKind kind = ColumnKind::Continuous;
  double min = 0.0;
  double max = 0.0;
  std::set<std::string> categories;
};

// One range per feature column (primary key excluded). Requires a non-empty
// dataset with no nulls in feature columns.
std::vector<FeatureRange> feature_ranges(const Dataset& real);

// Maps v to (v - min) / (max - min). Degenerate range (max == min) maps every
// value to 0. Values outside [min, max] intentionally land outside [0, 1].
std::vector<double> minmax_normalize(std::span<const double> values,
                                     const FeatureRange& range);

}  // namespace synthval
