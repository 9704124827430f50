#pragma once

#include "cds/core_types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cds {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  Matrix values;
};

/// Comma-delimited numeric table. A first row containing any non-numeric
/// field is treated as the header. Throws Error(parse_error) with line info.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const CsvTable& table);

struct CsvDataset {
  Matrix x;
  Vector y;
  std::vector<std::string> predictor_names;
};

/// Splits a table into predictors and response. The response is the named
/// column when given, otherwise the last column.
CsvDataset split_response(const CsvTable& table,
                          const std::optional<std::string>& response_column = std::nullopt);

}  // namespace cds
