#pragma once
#include <optional>
#include <string>
#include <vector>

namespace fgnam {

/// Locale-independent shortest round-trip formatting of a double.
/// Used for every numeric value we write to disk so that repeated runs
/// produce byte-identical artifacts.
std::string fmt_double(double v);

/// Fixed-precision variant for plot coordinates.
std::string fmt_fixed(double v, int digits);

/// RFC-4180 style CSV: quoted fields may contain commas, doubled quotes and
/// newlines; records end in LF or CRLF. An empty unquoted field is the
/// "missing" marker for our tabular formats.
struct CsvDoc {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvDoc read_csv(const std::string& path);
CsvDoc parse_csv(const std::string& text);

std::string csv_escape(const std::string& field);
void write_csv(const std::string& path, const CsvDoc& doc);

/// Parses a finite double; returns nullopt on any trailing garbage.
std::optional<double> parse_double(const std::string& s);

}  // namespace fgnam
