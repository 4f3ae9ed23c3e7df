#include "synthval/diagnostics.hpp"

#include <unordered_map>
#include <unordered_set>

#include "synthval/errors.hpp"

namespace synthval {

std::string to_string(DiagnosticCheck check) {
  switch (check) {
    case DiagnosticCheck::PrimaryKeyUnique: return "primary_key_unique";
    case DiagnosticCheck::PrimaryKeyNonNull: return "primary_key_nonnull";
    case DiagnosticCheck::ContinuousRange: return "continuous_range";
    case DiagnosticCheck::DiscreteCategories: return "discrete_categories";
    case DiagnosticCheck::NullCell: return "null_cell";
  }
  return "unknown";
}

DiagnosticReport diagnose(const Dataset& real, const Dataset& synthetic) {
  if (!(real.schema() == synthetic.schema())) {
    throw DataError("diagnose: real and synthetic schemas differ");
  }
  DiagnosticReport report;
  auto add = [&report](DiagnosticCheck check, const std::string& column,
                       std::string detail, std::size_t count) {
    if (count == 0) return;
    report.violations.push_back({check, column, std::move(detail), count});
  };

  const auto& schema = synthetic.schema();

  if (const auto pk = schema.primary_key_index()) {
    const std::size_t c = *pk;
    const auto& col = synthetic.column(c);
    const std::string& name = schema.column(c).name;

    std::size_t nulls = 0;
    for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
      if (col.nulls[r]) ++nulls;
    }
    add(DiagnosticCheck::PrimaryKeyNonNull, name, "null primary key values", nulls);

    std::size_t duplicates = 0;
    if (schema.column(c).kind == ColumnKind::Discrete) {
      std::unordered_set<std::string> seen;
      for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
        if (!col.nulls[r] && !seen.insert(col.tokens[r]).second) ++duplicates;
      }
    } else {
      std::unordered_set<double> seen;
      for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
        if (!col.nulls[r] && !seen.insert(col.numeric[r]).second) ++duplicates;
      }
    }
    add(DiagnosticCheck::PrimaryKeyUnique, name, "duplicate primary key values",
        duplicates);
  }

  const auto ranges = feature_ranges(real);
  std::unordered_map<std::string, const FeatureRange*> range_of;
  for (const auto& range : ranges) range_of[range.column] = &range;

  for (std::size_t c = 0; c < schema.column_count(); ++c) {
    const auto& spec = schema.column(c);
    if (spec.role != ColumnRole::Feature) continue;
    const auto& col = synthetic.column(c);
    const FeatureRange& range = *range_of.at(spec.name);

    std::size_t nulls = 0;
    std::size_t out_of_range = 0;
    for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
      if (col.nulls[r]) {
        ++nulls;
        continue;
      }
      if (spec.kind == ColumnKind::Continuous) {
        const double v = col.numeric[r];
        if (v < range.min || v > range.max) ++out_of_range;
      } else {
        if (!range.categories.contains(col.tokens[r])) ++out_of_range;
      }
    }
    add(DiagnosticCheck::NullCell, spec.name, "null feature cells", nulls);
    if (spec.kind == ColumnKind::Continuous) {
      add(DiagnosticCheck::ContinuousRange, spec.name,
          "values outside the real range [" + std::to_string(range.min) + ", " +
              std::to_string(range.max) + "]",
          out_of_range);
    } else {
      add(DiagnosticCheck::DiscreteCategories, spec.name,
          "tokens outside the real category set", out_of_range);
    }
  }

  report.passed = report.violations.empty();
  return report;
}

}  // namespace synthval
