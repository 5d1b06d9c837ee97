#include "prefkit/csv.hpp"

#include <fstream>
#include <sstream>

#include "prefkit/errors.hpp"

namespace prefkit {

namespace {

// Splits the full text into records honoring quotes. Tracks the physical
// line each record starts on so row errors can point at the file.
std::vector<CsvTable::Row> split_records(std::string_view text) {
  std::vector<CsvTable::Row> records;
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  bool row_has_content = false;
  long line = 1;
  long row_start_line = 1;

  auto end_field = [&] {
    fields.push_back(std::move(current));
    current.clear();
  };
  auto end_record = [&] {
    if (row_has_content || fields.size() > 0 || !current.empty()) {
      end_field();
      records.push_back({row_start_line, std::move(fields)});
      fields = {};
    }
    row_has_content = false;
    row_start_line = line;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        current.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        end_field();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        current.push_back(c);
        row_has_content = true;
        break;
    }
  }
  end_record();
  return records;
}

}  // namespace

CsvTable CsvTable::read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw SchemaError(path + ": cannot open file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_string(buf.str(), path);
}

CsvTable CsvTable::read_string(std::string_view text, std::string source_name) {
  CsvTable table;
  table.source_ = std::move(source_name);
  auto records = split_records(text);
  if (records.empty()) {
    throw SchemaError(table.source_ + ": empty table, header row required");
  }
  table.header_ = std::move(records.front().fields);
  records.erase(records.begin());
  table.rows_ = std::move(records);
  return table;
}

std::optional<size_t> CsvTable::column(std::string_view name) const {
  for (size_t i = 0; i < header_.size(); ++i) {
    if (header_[i] == name) return i;
  }
  return std::nullopt;
}

size_t CsvTable::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  throw SchemaError(source_ + ": missing required column '" +
                    std::string(name) + "'");
}

std::string_view CsvTable::field(const Row& row, size_t col) {
  if (col >= row.fields.size()) return {};
  return row.fields[col];
}

std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

}  // namespace prefkit
