#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/table.hpp"
#include "support.hpp"

using namespace forge;

TEST_CASE("parse_number accepts plain decimals only") {
  CHECK(parse_number("3.5") == 3.5);
  CHECK(parse_number("+2") == 2.0);
  CHECK(parse_number("-1e3") == -1000.0);
  CHECK(parse_number(" 7 ") == 7.0);
  CHECK_FALSE(parse_number("abc"));
  CHECK_FALSE(parse_number("1.2.3"));
  CHECK_FALSE(parse_number("inf"));
  CHECK_FALSE(parse_number("nan"));
  CHECK_FALSE(parse_number(""));
}

TEST_CASE("parse_datetime") {
  CHECK(parse_datetime("1970-01-01") == 0.0);
  CHECK(parse_datetime("1970-01-02T00:00:01") == 86401.0);
  CHECK(parse_datetime("2000-03-01 12:00") == 951912000.0);
  CHECK(parse_datetime("1970-01-01T01:00:00+01:00") == 0.0);
  CHECK(parse_datetime("1970-01-01T00:00:00Z") == 0.0);
  CHECK_FALSE(parse_datetime("2021-02-30"));
  CHECK_FALSE(parse_datetime("yesterday"));
  CHECK(format_datetime(86400.0) == "1970-01-02");
  CHECK(format_datetime(86401.0) == "1970-01-02T00:00:01");
}

TEST_CASE("infer_kind follows the rule order") {
  std::vector<std::string> nums;
  for (int i = 0; i < 100; ++i) nums.push_back(std::to_string(i * 1.5));
  CHECK(infer_kind(nums) == ColumnKind::Numeric);
  nums[0] = "oops";  // 99 of 100 parse
  CHECK(infer_kind(nums) == ColumnKind::Numeric);
  nums[1] = "oops2";  // 98 of 100
  CHECK(infer_kind(nums) != ColumnKind::Numeric);

  CHECK(infer_kind(std::vector<std::string>{"true", "false", "NA", "true"}) == ColumnKind::Boolean);
  CHECK(infer_kind(std::vector<std::string>{"2020-01-01", "2020-01-02"}) == ColumnKind::Datetime);
  CHECK(infer_kind(std::vector<std::string>{"red", "blue", "red"}) == ColumnKind::Categorical);
  CHECK(infer_kind(std::vector<std::string>{"", "NA", "null"}) == ColumnKind::Text);

  // Categorical needs n_distinct <= max(20, 5% of n).
  std::vector<std::string> many;
  for (int i = 0; i < 21; ++i) many.push_back("w" + std::to_string(i));
  CHECK(infer_kind(many) == ColumnKind::Text);
  for (int i = 0; i < 400; ++i) many.push_back("w0");  // n = 421, 5% = 21.05
  CHECK(infer_kind(many) == ColumnKind::Categorical);
}

TEST_CASE("build_column marks missing and unparseable cells") {
  const std::vector<std::string> raw{"1", "NA", "x", "4"};
  const Column c = build_column("a", raw, ColumnKind::Numeric);
  CHECK(c.kind == ColumnKind::Numeric);
  CHECK(c.missing == std::vector<std::uint8_t>{0, 1, 1, 0});
  CHECK(c.values[3] == 4.0);
  CHECK(c.cell_text(1) == "");
  CHECK(c.cell_text(0) == "1");
}

TEST_CASE("Table is immutable and validates shape") {
  const Table t({test::num("a", {1, 2}), test::num("b", {3, 4})}, "b");
  CHECK(t.n_rows() == 2);
  CHECK(t.n_features() == 1);
  const Table u = t.with_column(test::num("c", {5, 6}));
  CHECK(t.n_cols() == 2);
  CHECK(u.n_cols() == 3);
  const std::vector<std::string> drop{"b"};
  CHECK_FALSE(t.without(drop).target());
  CHECK_THROWS_AS(Table({test::num("a", {1}), test::num("b", {1, 2})}), ContractViolation);
  CHECK_THROWS_AS(Table({test::num("a", {1}), test::num("a", {1})}), ContractViolation);
  const std::vector<std::size_t> rows{1};
  CHECK(t.take_rows(rows).column("a").values == std::vector<double>{2});
}
