#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace olts::csv {

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

std::string format_u64(std::uint64_t value);
std::string format_int(long long value);

// Plain rectangular CSV; fields here never contain commas, quotes or
// newlines, so no quoting dialect is needed.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  int column_index(const std::string& name) const;  // -1 when absent
  bool operator==(const Table&) const = default;
};

void write(const Table& table, std::ostream& out);
std::string to_string(const Table& table);
Table read(std::istream& in);
Table read_string(const std::string& text);

}  // namespace olts::csv
