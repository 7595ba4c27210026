#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace covertsim {

/// Serialization used for every numeric CSV field: 9 significant digits
/// ("%.9g"), so rewriting a table never perturbs stored values.
std::string format_double(double value);

/// In-memory CSV with leading "# key=value" metadata lines. All cells are
/// stored as strings; writers format numbers with format_double.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Appends a row after checking its width. Cells must not contain the
  /// separator or line breaks.
  void add_row(std::vector<std::string> row);

  /// Index of a named column; throws std::invalid_argument if absent.
  std::size_t column_index(const std::string& name) const;
};

/// Renders metadata lines, the header row, then data rows.
std::string to_csv_string(const CsvTable& table);

void write_csv_file(const std::filesystem::path& path, const CsvTable& table);

/// Parses exactly what to_csv_string produces.
CsvTable parse_csv_string(const std::string& text);

CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace covertsim
