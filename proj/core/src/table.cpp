#include "fgnam/table.hpp"

#include <cmath>
#include <set>

#include "fgnam/config.hpp"
#include "fgnam/csv.hpp"
#include "fgnam/error.hpp"

namespace fgnam {

TableSchema TableSchema::from_file(const std::string& path) {
  KvConfig cfg = KvConfig::from_file(path);
  auto kv = cfg.section("schema");
  TableSchema s;
  s.time_col = config_str(kv, "time_col", s.time_col);
  s.event_col = config_str(kv, "event_col", s.event_col);
  s.num_risks = config_int(kv, "num_risks", s.num_risks);
  if (s.num_risks < 1) throw UsageError("schema: num_risks must be >= 1");
  for (const auto& [key, value] : kv) {
    if (key.rfind("strategy.", 0) == 0) {
      std::string col = key.substr(9);
      if (col.empty()) throw UsageError("schema: empty column in strategy key");
      s.strategies[col] = value;
    }
  }
  return s;
}

int RawTable::col_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

Cell make_cell(const std::string& raw) {
  Cell c;
  if (raw.empty()) {
    c.missing = true;
    return c;
  }
  c.text = raw;
  if (auto v = parse_double(raw)) {
    c.is_number = true;
    c.number = *v;
  }
  return c;
}

RawTable build_table(const CsvDoc& doc, const TableSchema& schema) {
  RawTable t;
  t.columns = doc.header;
  t.num_risks = schema.num_risks;

  std::set<std::string> seen;
  for (const auto& name : t.columns) {
    if (!seen.insert(name).second)
      throw Error("table: duplicate column name '" + name + "'");
  }
  t.time_col = t.col_index(schema.time_col);
  t.event_col = t.col_index(schema.event_col);
  if (t.time_col < 0) throw Error("table: time column '" + schema.time_col + "' not found");
  if (t.event_col < 0) throw Error("table: event column '" + schema.event_col + "' not found");

  t.rows.reserve(doc.rows.size());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& rec = doc.rows[r];
    if (rec.size() != t.columns.size())
      throw Error("table: row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                  " fields, expected " + std::to_string(t.columns.size()));
    std::vector<Cell> cells;
    cells.reserve(rec.size());
    for (const auto& f : rec) cells.push_back(make_cell(f));

    const Cell& tc = cells[static_cast<std::size_t>(t.time_col)];
    if (tc.missing || !tc.is_number || !std::isfinite(tc.number) || tc.number < 0.0)
      throw Error("table: row " + std::to_string(r) + ": time value '" +
                  (tc.missing ? std::string("<missing>") : tc.text) +
                  "' is not a finite non-negative number");
    const Cell& ec = cells[static_cast<std::size_t>(t.event_col)];
    if (ec.missing || !ec.is_number || ec.number != std::floor(ec.number) || ec.number < 0 ||
        ec.number > schema.num_risks)
      throw Error("table: row " + std::to_string(r) + ": event value '" +
                  (ec.missing ? std::string("<missing>") : ec.text) + "' is not an integer in 0.." +
                  std::to_string(schema.num_risks));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace

RawTable load_csv(const std::string& path, const TableSchema& schema) {
  return build_table(read_csv(path), schema);
}

RawTable table_from_csv_text(const std::string& text, const TableSchema& schema) {
  return build_table(parse_csv(text), schema);
}

}  // namespace fgnam
