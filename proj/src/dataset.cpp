#include "synthval/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "synthval/errors.hpp"
#include "synthval/rng.hpp"

namespace synthval {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// RFC-4180 field splitter: quoted fields may contain commas, escaped quotes
// ("") and line breaks. Returns one record per call, false on end of input.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  bool next_record(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    std::string field;
    bool quoted = false;
    while (true) {
      if (quoted) {
        if (c == EOF) throw DataError("unterminated quoted CSV field");
        if (c == '"') {
          const int peek = in_.peek();
          if (peek == '"') {
            field.push_back('"');
            in_.get();
          } else {
            quoted = false;
          }
        } else {
          field.push_back(static_cast<char>(c));
        }
      } else {
        if (c == EOF || c == '\n') {
          if (!field.empty() && field.back() == '\r') field.pop_back();
          fields.push_back(std::move(field));
          return true;
        }
        if (c == '"' && field.empty()) {
          quoted = true;
        } else if (c == ',') {
          fields.push_back(std::move(field));
          field.clear();
        } else {
          field.push_back(static_cast<char>(c));
        }
      }
      c = in_.get();
    }
  }

 private:
  std::istream& in_;
};

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

ColumnKind parse_kind(const std::string& s) {
  if (s == "continuous") return ColumnKind::Continuous;
  if (s == "discrete") return ColumnKind::Discrete;
  throw DataError("schema: unknown column kind '" + s + "'");
}

ColumnRole parse_role(const std::string& s) {
  if (s == "feature") return ColumnRole::Feature;
  if (s == "primary_key") return ColumnRole::PrimaryKey;
  throw DataError("schema: unknown column role '" + s + "'");
}

}  // namespace

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string> seen;
  std::size_t primary_keys = 0;
  for (const auto& col : columns_) {
    if (col.name.empty()) throw DataError("schema: empty column name");
    if (!seen.insert(col.name).second) {
      throw DataError("schema: duplicate column name '" + col.name + "'");
    }
    if (col.role == ColumnRole::PrimaryKey) ++primary_keys;
  }
  if (primary_keys > 1) {
    throw DataError("schema: more than one primary_key column");
  }
}

Schema Schema::load(const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw DataError("cannot open schema file '" + json_path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("schema '" + json_path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_array()) {
    throw DataError("schema '" + json_path + "': expected {\"columns\": [...]}");
  }
  std::vector<ColumnSpec> columns;
  for (const auto& entry : doc["columns"]) {
    ColumnSpec spec;
    if (!entry.contains("name") || !entry.contains("kind")) {
      throw DataError("schema '" + json_path + "': column entries need name and kind");
    }
    spec.name = entry["name"].get<std::string>();
    spec.kind = parse_kind(entry["kind"].get<std::string>());
    spec.role = entry.contains("role") ? parse_role(entry["role"].get<std::string>())
                                       : ColumnRole::Feature;
    columns.push_back(std::move(spec));
  }
  return Schema(std::move(columns));
}

int Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

std::optional<std::size_t> Schema::primary_key_index() const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].role == ColumnRole::PrimaryKey) return i;
  }
  return std::nullopt;
}

Dataset::Dataset(Schema schema, std::vector<ColumnData> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.column_count()) {
    throw DataError("dataset: column count does not match schema");
  }
  rows_ = columns_.empty() ? 0 : columns_[0].nulls.size();
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& col = columns_[i];
    const bool continuous = schema_.column(i).kind == ColumnKind::Continuous;
    const std::size_t values = continuous ? col.numeric.size() : col.tokens.size();
    if (col.nulls.size() != rows_ || values != rows_) {
      throw DataError("dataset: ragged column '" + schema_.column(i).name + "'");
    }
    if (continuous) {
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!col.nulls[r] && !std::isfinite(col.numeric[r])) {
          throw DataError("dataset: non-finite value in column '" +
                          schema_.column(i).name + "'");
        }
      }
    }
  }
}

bool Dataset::has_nulls() const {
  for (const auto& col : columns_) {
    for (auto n : col.nulls) {
      if (n) return true;
    }
  }
  return false;
}

Dataset load_csv(const std::string& csv_path, const Schema& schema) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file '" + csv_path + "'");

  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next_record(header)) {
    throw DataError("CSV '" + csv_path + "': missing header line");
  }

  // Map schema order -> CSV position; header may come in any order but must
  // match the schema name set exactly.
  std::unordered_map<std::string, std::size_t> positions;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!positions.emplace(trim(header[i]), i).second) {
      throw DataError("CSV '" + csv_path + "': duplicate header column '" +
                      trim(header[i]) + "'");
    }
  }
  std::vector<std::size_t> source_of(schema.column_count());
  for (std::size_t i = 0; i < schema.column_count(); ++i) {
    const auto it = positions.find(schema.column(i).name);
    if (it == positions.end()) {
      throw DataError("CSV '" + csv_path + "': missing schema column '" +
                      schema.column(i).name + "'");
    }
    source_of[i] = it->second;
    positions.erase(it);
  }
  if (!positions.empty()) {
    throw DataError("CSV '" + csv_path + "': column '" +
                    positions.begin()->first + "' is not in the schema");
  }

  std::vector<ColumnData> columns(schema.column_count());
  std::vector<std::string> record;
  std::size_t row = 0;
  while (reader.next_record(record)) {
    // tolerate a trailing blank line
    if (record.size() == 1 && record[0].empty()) continue;
    ++row;
    if (record.size() != header.size()) {
      throw DataError("CSV '" + csv_path + "': row " + std::to_string(row) +
                      " has " + std::to_string(record.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < schema.column_count(); ++i) {
      auto& col = columns[i];
      const std::string& raw = record[source_of[i]];
      if (schema.column(i).kind == ColumnKind::Continuous) {
        const std::string cell = trim(raw);
        if (cell.empty()) {
          col.numeric.push_back(0.0);
          col.nulls.push_back(1);
          continue;
        }
        double value = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
            !std::isfinite(value)) {
          throw DataError("CSV '" + csv_path + "': cannot parse '" + cell +
                          "' as a number at row " + std::to_string(row) +
                          ", column '" + schema.column(i).name + "'");
        }
        col.numeric.push_back(value);
        col.nulls.push_back(0);
      } else {
        col.tokens.push_back(raw);
        col.nulls.push_back(raw.empty() ? 1 : 0);
      }
    }
  }
  return Dataset(schema, std::move(columns));
}

Dataset load_dataset(const std::string& csv_path, const std::string& schema_path) {
  return load_csv(csv_path, Schema::load(schema_path));
}

void write_csv(const Dataset& dataset, const std::string& csv_path) {
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + csv_path + "' for writing");
  const auto& schema = dataset.schema();
  for (std::size_t i = 0; i < schema.column_count(); ++i) {
    if (i) out << ',';
    write_field(out, schema.column(i).name);
  }
  out << '\n';
  for (std::size_t r = 0; r < dataset.row_count(); ++r) {
    for (std::size_t i = 0; i < schema.column_count(); ++i) {
      if (i) out << ',';
      if (dataset.is_null(r, i)) continue;
      if (schema.column(i).kind == ColumnKind::Continuous) {
        out << format_double(dataset.numeric_at(r, i));
      } else {
        write_field(out, dataset.token_at(r, i));
      }
    }
    out << '\n';
  }
}

void write_schema(const Schema& schema, const std::string& json_path) {
  json columns = json::array();
  for (const auto& col : schema.columns()) {
    columns.push_back(
        {{"name", col.name},
         {"kind", col.kind == ColumnKind::Continuous ? "continuous" : "discrete"},
         {"role", col.role == ColumnRole::Feature ? "feature" : "primary_key"}});
  }
  std::ofstream out(json_path);
  if (!out) throw DataError("cannot open '" + json_path + "' for writing");
  out << json{{"columns", columns}}.dump(2) << '\n';
}

Dataset sample_rows(const Dataset& dataset, std::size_t n, std::uint64_t seed) {
  if (n > dataset.row_count()) {
    throw DataError("cannot sample " + std::to_string(n) + " rows from " +
                    std::to_string(dataset.row_count()));
  }
  std::vector<std::size_t> indices(dataset.row_count());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  Rng rng(seed);
  rng.shuffle(indices);
  indices.resize(n);
  std::sort(indices.begin(), indices.end());

  std::vector<ColumnData> columns(dataset.column_count());
  for (std::size_t c = 0; c < dataset.column_count(); ++c) {
    const auto& src = dataset.column(c);
    auto& dst = columns[c];
    for (std::size_t i : indices) {
      if (!src.numeric.empty()) dst.numeric.push_back(src.numeric[i]);
      if (!src.tokens.empty()) dst.tokens.push_back(src.tokens[i]);
      dst.nulls.push_back(src.nulls[i]);
    }
  }
  return Dataset(dataset.schema(), std::move(columns));
}

std::vector<FeatureRange> feature_ranges(const Dataset& real) {
  if (real.row_count() == 0) throw DataError("feature_ranges: empty dataset");
  std::vector<FeatureRange> ranges;
  for (std::size_t c = 0; c < real.column_count(); ++c) {
    const auto& spec = real.schema().column(c);
    if (spec.role != ColumnRole::Feature) continue;
    FeatureRange range;
    range.column = spec.name;
    range.kind = spec.kind;
    const auto& col = real.column(c);
    for (std::size_t r = 0; r < real.row_count(); ++r) {
      if (col.nulls[r]) {
        throw DataError("feature_ranges: null cell in column '" + spec.name + "'");
      }
    }
    if (spec.kind == ColumnKind::Continuous) {
      const auto [lo, hi] = std::minmax_element(col.numeric.begin(), col.numeric.end());
      range.min = *lo;
      range.max = *hi;
    } else {
      range.categories.insert(col.tokens.begin(), col.tokens.end());
    }
    ranges.push_back(std::move(range));
  }
  return ranges;
}

std::vector<double> minmax_normalize(std::span<const double> values,
                                     const FeatureRange& range) {
  std::vector<double> out;
  out.reserve(values.size());
  const double width = range.max - range.min;
  for (double v : values) {
    out.push_back(width == 0.0 ? 0.0 : (v - range.min) / width);
  }
  return out;
}

}  // namespace synthval
