#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace shorsim {

enum class CsvSchema { histogram, sweep, epsc };

const std::vector<std::string>& csv_header(CsvSchema schema);
CsvSchema parse_schema(std::string_view name);

using CsvRow = std::vector<std::string>;

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// '#'-prefixed comment lines, one header line, then the rows. Rows must match
/// the schema width. I/O failures throw std::runtime_error naming the path.
void write_csv(const std::filesystem::path& path, CsvSchema schema, const std::vector<CsvRow>& rows,
               const std::vector<std::string>& comments);
void write_csv(std::ostream& os, CsvSchema schema, const std::vector<CsvRow>& rows,
               const std::vector<std::string>& comments);

struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#'
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  /// Column position by name; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
/// Reads and checks that the header equals the schema's.
CsvTable read_csv(const std::filesystem::path& path, CsvSchema schema);

}  // namespace shorsim
