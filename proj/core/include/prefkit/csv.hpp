#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefkit {

// In-memory comma-separated table with a header row. Quoted fields follow
// RFC-4180 (embedded commas, doubled quotes, embedded newlines). Column
// lookup is by header name so callers tolerate extra columns and arbitrary
// column order.
class CsvTable {
 public:
  struct Row {
    long line = 0;  // 1-based line of the row start in the source
    std::vector<std::string> fields;
  };

  static CsvTable read_file(const std::string& path);
  static CsvTable read_string(std::string_view text, std::string source_name);

  const std::string& source() const { return source_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }

  std::optional<size_t> column(std::string_view name) const;
  // Throws SchemaError naming the column and source when absent.
  size_t require_column(std::string_view name) const;

  // Field access; out-of-range (short row) yields an empty view.
  static std::string_view field(const Row& row, size_t col);

 private:
  std::string source_;
  std::vector<std::string> header_;
  std::vector<Row> rows_;
};

// Serialization helper: quotes a field only when it needs quoting.
std::string csv_escape(std::string_view field);

// Joins fields into one CSV line (no trailing newline).
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace prefkit
