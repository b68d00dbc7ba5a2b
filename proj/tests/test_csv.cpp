#include "doctest.h"
#include "forge/csv.hpp"
#include "forge/errors.hpp"

using namespace forge;

TEST_CASE("quoted fields, CRLF and BOM") {
  const Table t = parse_csv("\xEF\xBB\xBFname,note\r\n\"Smith, J\",\"said \"\"hi\"\"\"\r\nLee,\"two\nlines\"\r\n");
  REQUIRE(t.n_rows() == 2);
  CHECK(t.names() == std::vector<std::string>{"name", "note"});
  CHECK(t.column("name").labels[0] == "Smith, J");
  CHECK(t.column("note").labels[0] == "said \"hi\"");
  CHECK(t.column("note").labels[1] == "two\nlines");
}

TEST_CASE("ragged rows name the physical line") {
  try {
    parse_csv("a,b\n1,2\n\"x\ny\",3\n4\n");
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
}

TEST_CASE("ingestion errors") {
  CHECK_THROWS_AS(parse_csv(""), IngestError);
  CHECK_THROWS_AS(parse_csv("a,b\n"), IngestError);
  CHECK_THROWS_AS(parse_csv("a,a\n1,2\n"), IngestError);
  CHECK_THROWS_AS(parse_csv("a\n\"open\n"), IngestError);
  CHECK_THROWS_AS(ingest_csv("/nonexistent/file.csv"), IngestError);
  CHECK_THROWS_AS(ingest_csv("data.parquet"), IngestError);
}

TEST_CASE("to_csv round-trips") {
  const std::string text = "a,b,c\n1.5,\"x,y\",true\n,z,false\n";
  const Table t = parse_csv(text);
  CHECK(t.column("a").kind == ColumnKind::Numeric);
  CHECK(t.column("c").kind == ColumnKind::Boolean);
  CHECK(to_csv(t) == text);
  CHECK(parse_csv(to_csv(t)).same_values(t));
}

TEST_CASE("custom delimiter and missing tokens") {
  CsvOptions o;
  o.delimiter = ';';
  o.missing.tokens = {"", "?"};
  const Table t = parse_csv("a;b\n1;?\n2;3\n", o);
  CHECK(t.column("b").missing == std::vector<std::uint8_t>{1, 0});
}
