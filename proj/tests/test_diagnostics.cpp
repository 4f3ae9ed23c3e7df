#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "synthval/diagnostics.hpp"
#include "synthval/errors.hpp"
#include "testutil.hpp"

using namespace synthval;

namespace {

Dataset mixed(const std::vector<double>& x, const std::vector<std::string>& c) {
  std::vector<ColumnSpec> specs = {
      {"x", ColumnKind::Continuous, ColumnRole::Feature},
      {"c", ColumnKind::Discrete, ColumnRole::Feature}};
  return Dataset(Schema(specs),
                 {testutil::numeric_column(x), testutil::token_column(c)});
}

}  // namespace

TEST_CASE("diagnose passes a copy of the real data") {
  const Dataset real = mixed({1.0, 2.0, 5.0}, {"A", "B", "A"});
  const DiagnosticReport report = diagnose(real, real);
  CHECK(report.passed);
  CHECK(report.violations.empty());
}

TEST_CASE("out-of-range continuous value is flagged") {
  const Dataset real = mixed({1.0, 2.0, 5.0}, {"A", "B", "A"});
  const Dataset synth = mixed({1.0, 9.0, 2.0}, {"A", "A", "B"});
  const DiagnosticReport report = diagnose(real, synth);
  CHECK_FALSE(report.passed);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].check == DiagnosticCheck::ContinuousRange);
  CHECK(report.violations[0].column == "x");
  CHECK(report.violations[0].count == 1);
}

TEST_CASE("boundary values pass the closed-interval check") {
  const Dataset real = mixed({1.0, 5.0}, {"A", "B"});
  const Dataset synth = mixed({1.0, 5.0}, {"B", "A"});
  CHECK(diagnose(real, synth).passed);
}

TEST_CASE("unknown discrete token is flagged") {
  const Dataset real = mixed({1.0, 2.0}, {"A", "B"});
  const Dataset synth = mixed({1.5, 1.7}, {"Z", "A"});
  const DiagnosticReport report = diagnose(real, synth);
  CHECK_FALSE(report.passed);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].check == DiagnosticCheck::DiscreteCategories);
}

TEST_CASE("all violations are aggregated, not just the first") {
  const Dataset real = mixed({1.0, 2.0}, {"A", "B"});
  Dataset synth = [] {
    std::vector<ColumnSpec> specs = {
        {"x", ColumnKind::Continuous, ColumnRole::Feature},
        {"c", ColumnKind::Discrete, ColumnRole::Feature}};
    ColumnData x = testutil::numeric_column({9.0, 1.0, -4.0});
    ColumnData c = testutil::token_column({"Z", "", "B"});
    c.nulls[1] = 1;
    return Dataset(Schema(specs), {x, c});
  }();
  const DiagnosticReport report = diagnose(real, synth);
  CHECK_FALSE(report.passed);
  // continuous_range x2, discrete_categories x1, null_cell x1
  std::size_t range = 0, categories = 0, nulls = 0;
  for (const auto& violation : report.violations) {
    if (violation.check == DiagnosticCheck::ContinuousRange) range = violation.count;
    if (violation.check == DiagnosticCheck::DiscreteCategories) {
      categories = violation.count;
    }
    if (violation.check == DiagnosticCheck::NullCell) nulls = violation.count;
  }
  CHECK(range == 2);
  CHECK(categories == 1);
  CHECK(nulls == 1);
}

TEST_CASE("primary key checks") {
  std::vector<ColumnSpec> specs = {
      {"id", ColumnKind::Discrete, ColumnRole::PrimaryKey},
      {"x", ColumnKind::Continuous, ColumnRole::Feature}};
  const Dataset real(Schema(specs), {testutil::token_column({"a", "b", "c"}),
                                     testutil::numeric_column({1, 2, 3})});

  SUBCASE("duplicates counted") {
    const Dataset synth(Schema(specs),
                        {testutil::token_column({"a", "a", "a"}),
                         testutil::numeric_column({1, 2, 3})});
    const auto report = diagnose(real, synth);
    CHECK_FALSE(report.passed);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].check == DiagnosticCheck::PrimaryKeyUnique);
    CHECK(report.violations[0].count == 2);
  }

  SUBCASE("null keys flagged") {
    ColumnData id = testutil::token_column({"a", "", "c"});
    id.nulls[1] = 1;
    const Dataset synth(Schema(specs),
                        {id, testutil::numeric_column({1, 2, 3})});
    const auto report = diagnose(real, synth);
    CHECK_FALSE(report.passed);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].check == DiagnosticCheck::PrimaryKeyNonNull);
  }

  SUBCASE("key values outside the real set are fine") {
    const Dataset synth(Schema(specs),
                        {testutil::token_column({"x1", "x2", "x3"}),
                         testutil::numeric_column({1.5, 2.5, 3.0})});
    CHECK(diagnose(real, synth).passed);
  }
}

TEST_CASE("adding one out-of-range row flips a passing dataset") {
  const Dataset real = mixed({0.0, 10.0}, {"A", "B"});
  const Dataset good = mixed({5.0, 7.0}, {"A", "A"});
  REQUIRE(diagnose(real, good).passed);

  const Dataset bad = mixed({5.0, 7.0, 11.0}, {"A", "A", "B"});
  const auto report = diagnose(real, bad);
  CHECK_FALSE(report.passed);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].count == 1);
}

TEST_CASE("schema mismatch throws") {
  const Dataset real = mixed({1.0}, {"A"});
  const Dataset other = testutil::continuous_dataset({"x"}, {{1.0}});
  CHECK_THROWS_AS(diagnose(real, other), DataError);
}
