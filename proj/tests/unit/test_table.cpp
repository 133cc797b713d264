#include <doctest.h>

#include "fgnam/error.hpp"
#include "fgnam/table.hpp"

using namespace fgnam;

namespace {

TableSchema schema2() {
  TableSchema s;
  s.time_col = "time";
  s.event_col = "event";
  s.num_risks = 2;
  return s;
}

}  // namespace

TEST_CASE("missing cells are flagged, not zeroed") {
  RawTable t = table_from_csv_text("albumin,time,event\n34,1,1\n,2,0\n29.4,3,2\n", schema2());
  REQUIRE(t.n_rows() == 3);
  const int col = t.col_index("albumin");
  CHECK(!t.rows[0][static_cast<std::size_t>(col)].missing);
  CHECK(t.rows[1][static_cast<std::size_t>(col)].missing);
  int missing = 0;
  for (const auto& row : t.rows) missing += row[static_cast<std::size_t>(col)].missing ? 1 : 0;
  CHECK(missing == 1);
}

TEST_CASE("event out of range names the row") {
  try {
    table_from_csv_text("x,time,event\n1,1,1\n2,2,3\n", schema2());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("unparseable or negative time names the row") {
  CHECK_THROWS_AS(table_from_csv_text("x,time,event\n1,abc,1\n", schema2()), Error);
  CHECK_THROWS_AS(table_from_csv_text("x,time,event\n1,-2,1\n", schema2()), Error);
  CHECK_THROWS_AS(table_from_csv_text("x,time,event\n1,,1\n", schema2()), Error);
  try {
    table_from_csv_text("x,time,event\n1,1,1\n1,nope,1\n", schema2());
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("header-only file gives an empty table") {
  RawTable t = table_from_csv_text("x,time,event\n", schema2());
  CHECK(t.n_rows() == 0);
  CHECK(t.n_cols() == 3);
}

TEST_CASE("duplicate column names are rejected") {
  CHECK_THROWS_AS(table_from_csv_text("x,x,time,event\n1,2,3,1\n", schema2()), Error);
}

TEST_CASE("missing role columns are rejected") {
  CHECK_THROWS_AS(table_from_csv_text("x,event\n1,1\n", schema2()), Error);
  CHECK_THROWS_AS(table_from_csv_text("x,time\n1,1\n", schema2()), Error);
}

TEST_CASE("schema file parsing") {
  TableSchema s;
  s.strategies.clear();
  // exercise the from_file path through a temp file
  const std::string path = "test_schema_tmp.cfg";
  {
    FILE* f = fopen(path.c_str(), "wb");
    REQUIRE(f);
    fputs("time_col = t\nevent_col = e\nnum_risks = 2\nstrategy.hba1c = mim\n", f);
    fclose(f);
  }
  TableSchema loaded = TableSchema::from_file(path);
  CHECK(loaded.time_col == "t");
  CHECK(loaded.event_col == "e");
  CHECK(loaded.num_risks == 2);
  CHECK(loaded.strategies.at("hba1c") == "mim");
  remove(path.c_str());
}
