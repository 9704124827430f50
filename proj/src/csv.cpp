#include "cds/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace cds {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(width) + " fields, found " +
                                              std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    bool numeric = true;
    for (const auto& f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        table.header = std::move(fields);
        continue;
      }
      throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": non-numeric field");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::parse_error, "no data rows");
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  if (!table.header.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j) {
      out << (j ? "," : "") << table.header[j];
    }
    out << '\n';
  }
  const auto old_precision = out.precision(17);
  for (Index i = 0; i < table.values.rows(); ++i) {
    for (Index j = 0; j < table.values.cols(); ++j) {
      out << (j ? "," : "") << table.values(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

CsvDataset split_response(const CsvTable& table, const std::optional<std::string>& response_column) {
  const Index cols = table.values.cols();
  if (cols < 2) throw Error(ErrorCode::parse_error, "need at least one predictor and a response");
  Index target = cols - 1;
  if (response_column) {
    const auto it = std::find(table.header.begin(), table.header.end(), *response_column);
    if (it == table.header.end()) {
      throw Error(ErrorCode::parse_error, "response column '" + *response_column + "' not found");
    }
    target = static_cast<Index>(it - table.header.begin());
  }
  CsvDataset out;
  out.y = table.values.col(target);
  out.x.resize(table.values.rows(), cols - 1);
  Index k = 0;
  for (Index j = 0; j < cols; ++j) {
    if (j == target) continue;
    out.x.col(k++) = table.values.col(j);
    out.predictor_names.push_back(table.header.empty() ? "x" + std::to_string(j + 1)
                                                       : table.header[static_cast<std::size_t>(j)]);
  }
  return out;
}

}  // namespace cds
