#pragma once

#include <string>
#include <vector>

#include "pairglm/design.hpp"

namespace pairglm {

struct CsvTable {
  std::vector<std::string> headers;
  arma::mat values;  // rows x columns, all numeric
};

// RFC-4180 reader: header row required, quoted fields unescaped, CRLF
// accepted. Every payload cell must parse as a finite number; empty cells
// and NA/NaN markers are rejected.
CsvTable read_csv(const std::string& path);

struct LoadedData {
  Dataset data;  // X = Z, symmetric
  std::vector<std::string> covariate_names;
  std::string response_name;
};

// Splits the named response column off; the remaining columns form the
// covariate block. An empty response name keeps every column as a covariate.
LoadedData load_dataset_csv(const std::string& path, const std::string& response_column);

void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const arma::mat& values);

}  // namespace pairglm
