#include "olts/csv.hpp"

#include <charconv>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace olts::csv {

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

std::string format_u64(std::uint64_t value) { return std::to_string(value); }
std::string format_int(long long value) { return std::to_string(value); }

void Table::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("csv row width does not match header");
  rows.push_back(std::move(row));
}

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

void write_line(const std::vector<std::string>& fields, std::ostream& out) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << fields[i];
  }
  out << '\n';
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

void write(const Table& table, std::ostream& out) {
  write_line(table.columns, out);
  for (const auto& row : table.rows) write_line(row, out);
}

std::string to_string(const Table& table) {
  std::ostringstream out;
  write(table, out);
  return out.str();
}

Table read(std::istream& in) {
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header");
  table.columns = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.columns.size())
      throw std::runtime_error("csv: ragged row");
    table.rows.push_back(std::move(fields));
  }
  return table;
}

Table read_string(const std::string& text) {
  std::istringstream in(text);
  return read(in);
}

}  // namespace olts::csv
