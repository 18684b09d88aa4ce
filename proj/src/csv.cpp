#include "shorsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shorsim {

const std::vector<std::string>& csv_header(CsvSchema schema) {
  static const std::vector<std::string> histogram{"c", "count", "W_exact"};
  static const std::vector<std::string> sweep{"N",       "x",  "r",      "n_q",     "n_l", "model",
                                              "epsilon", "xi", "xi_err", "R_total", "N_R", "seed"};
  static const std::vector<std::string> epsc{"N", "log2N", "x", "r", "model", "eps_c", "seed"};
  switch (schema) {
    case CsvSchema::histogram: return histogram;
    case CsvSchema::sweep: return sweep;
    case CsvSchema::epsc: return epsc;
  }
  throw std::invalid_argument("csv_header: unknown schema");
}

CsvSchema parse_schema(std::string_view name) {
  if (name == "histogram") return CsvSchema::histogram;
  if (name == "sweep") return CsvSchema::sweep;
  if (name == "epsc") return CsvSchema::epsc;
  throw std::invalid_argument("unknown CSV schema '" + std::string(name) + "'");
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return value;
}

void write_csv(std::ostream& os, CsvSchema schema, const std::vector<CsvRow>& rows,
               const std::vector<std::string>& comments) {
  const auto& header = csv_header(schema);
  for (const auto& c : comments) os << "# " << c << '\n';
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_csv: row has " + std::to_string(row.size()) + " fields, schema needs " +
                                  std::to_string(header.size()));
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << row[k];
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, CsvSchema schema, const std::vector<CsvRow>& rows,
               const std::vector<std::string>& comments) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_csv(os, schema, rows, comments);
  os.flush();
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  throw std::out_of_range("CSV has no column '" + std::string(name) + "'");
}

namespace {

CsvRow split(const std::string& line) {
  CsvRow out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      table.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!have_header) {
      table.header = split(line);
      have_header = true;
      continue;
    }
    table.rows.push_back(split(line));
    if (table.rows.back().size() != table.header.size())
      throw std::runtime_error("'" + path.string() + "': row width differs from header");
  }
  if (!have_header) throw std::runtime_error("'" + path.string() + "': missing header line");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path, CsvSchema schema) {
  CsvTable table = read_csv(path);
  if (table.header != csv_header(schema))
    throw std::runtime_error("'" + path.string() + "': header does not match the expected schema");
  return table;
}

}  // namespace shorsim
