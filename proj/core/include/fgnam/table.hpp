#pragma once
#include <map>
#include <string>
#include <vector>

namespace fgnam {

/// One parsed CSV cell. Numeric cells keep their original text so that
/// categorical strategies can treat numbers as labels.
struct Cell {
  bool missing = false;
  bool is_number = false;
  double number = 0.0;
  std::string text;
};

/// Column roles and per-column preprocessing strategies for a dataset file.
struct TableSchema {
  std::string time_col = "time";
  std::string event_col = "event";
  int num_risks = 1;
  std::map<std::string, std::string> strategies;  // column -> strategy name

  static TableSchema from_file(const std::string& path);
};

/// Typed tabular data as loaded from CSV, before any preprocessing.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  int time_col = -1;
  int event_col = -1;
  int num_risks = 0;

  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_cols() const { return static_cast<int>(columns.size()); }
  int col_index(const std::string& name) const;  // -1 if absent

  double time_of(int row) const { return rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(time_col)].number; }
  int event_of(int row) const { return static_cast<int>(rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(event_col)].number); }
};

/// Loads and validates a survival CSV. Times must parse to finite
/// non-negative numbers, events to integers in {0..num_risks}; violations
/// are hard errors naming the offending row.
RawTable load_csv(const std::string& path, const TableSchema& schema);

/// Same validation applied to already-parsed CSV text (for tests).
RawTable table_from_csv_text(const std::string& text, const TableSchema& schema);

}  // namespace fgnam
