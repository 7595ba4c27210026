#include "covertsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covertsim {

namespace {

void check_cell(const std::string& cell) {
  if (cell.find_first_of(",\n\r") != std::string::npos)
    throw std::invalid_argument("csv: cell contains a separator or line break: " + cell);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("csv: row has " + std::to_string(row.size()) +
                                " cells, expected " + std::to_string(columns.size()));
  for (const std::string& cell : row) check_cell(cell);
  rows.push_back(std::move(row));
}

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::invalid_argument("csv: no column named " + name);
}

std::string to_csv_string(const CsvTable& table) {
  std::ostringstream out;
  for (const auto& [key, value] : table.metadata) out << "# " << key << "=" << value << "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    check_cell(table.columns[i]);
    out << (i ? "," : "") << table.columns[i];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  return out.str();
}

void write_csv_file(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("csv: cannot open for writing: " + path.string());
  out << to_csv_string(table);
  if (!out) throw std::runtime_error("csv: write failed: " + path.string());
}

CsvTable parse_csv_string(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header && line[0] == '#') {
      std::size_t start = 1;
      while (start < line.size() && line[start] == ' ') ++start;
      const std::size_t eq = line.find('=', start);
      if (eq == std::string::npos)
        throw std::invalid_argument("csv: malformed metadata line: " + line);
      table.metadata.emplace_back(line.substr(start, eq - start), line.substr(eq + 1));
      continue;
    }
    if (!have_header) {
      table.columns = split_line(line);
      have_header = true;
      continue;
    }
    table.add_row(split_line(line));
  }
  if (!have_header) throw std::invalid_argument("csv: no header row");
  return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("csv: cannot open for reading: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv_string(buf.str());
}

}  // namespace covertsim
