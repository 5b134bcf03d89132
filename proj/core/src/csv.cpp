#include "pairglm/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pairglm/errors.hpp"

namespace pairglm {

namespace {

std::vector<std::string> split_record(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw CsvError("unterminated quote on line " + std::to_string(line_no));
  fields.push_back(std::move(field));
  return fields;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t col) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan" || cell == "na") {
    throw CsvError("missing value at line " + std::to_string(line_no) + ", column " +
                   std::to_string(col + 1));
  }
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw CsvError("cannot parse '" + cell + "' at line " + std::to_string(line_no) +
                   ", column " + std::to_string(col + 1));
  }
  return value;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError("cannot open '" + path + "'");
  std::string line;
  std::size_t line_no = 0;

  CsvTable table;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && table.headers.empty()) throw CsvError("empty header row");
    if (line.empty()) continue;
    auto fields = split_record(line, line_no);
    if (table.headers.empty()) {
      table.headers = std::move(fields);
      continue;
    }
    if (fields.size() != table.headers.size()) {
      throw CsvError("line " + std::to_string(line_no) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(table.headers.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_cell(fields[c], line_no, c);
    rows.push_back(std::move(row));
  }
  if (table.headers.empty()) throw CsvError("'" + path + "' is empty");
  if (rows.empty()) throw CsvError("'" + path + "' has no observations");

  table.values.set_size(rows.size(), table.headers.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) table.values(r, c) = rows[r][c];
  }
  return table;
}

LoadedData load_dataset_csv(const std::string& path, const std::string& response_column) {
  const CsvTable table = read_csv(path);
  LoadedData out;
  arma::sword response_idx = -1;
  if (!response_column.empty()) {
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
      if (table.headers[c] == response_column) {
        response_idx = static_cast<arma::sword>(c);
        break;
      }
    }
    if (response_idx < 0) {
      throw CsvError("response column '" + response_column + "' not found in '" + path + "'");
    }
    out.response_name = response_column;
  }
  if (table.headers.size() - (response_idx >= 0 ? 1 : 0) == 0) {
    throw CsvError("no covariate columns in '" + path + "'");
  }

  arma::mat X(table.values.n_rows, table.headers.size() - (response_idx >= 0 ? 1 : 0));
  arma::uword xc = 0;
  for (std::size_t c = 0; c < table.headers.size(); ++c) {
    if (static_cast<arma::sword>(c) == response_idx) continue;
    X.col(xc++) = table.values.col(c);
    out.covariate_names.push_back(table.headers[c]);
  }
  out.data.X = X;
  out.data.Z = std::move(X);
  out.data.symmetric = true;
  out.data.y = response_idx >= 0 ? arma::vec(table.values.col(response_idx))
                                 : arma::vec(table.values.n_rows, arma::fill::zeros);
  out.data.validate();
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& headers,
               const arma::mat& values) {
  if (values.n_cols != headers.size()) throw CsvError("header/value column mismatch");
  std::ostringstream body;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    if (c) body << ',';
    body << headers[c];
  }
  body << '\n';
  body.precision(17);
  for (arma::uword r = 0; r < values.n_rows; ++r) {
    for (arma::uword c = 0; c < values.n_cols; ++c) {
      if (c) body << ',';
      body << values(r, c);
    }
    body << '\n';
  }
  std::ofstream o(path);
  if (!o) throw CsvError("cannot write '" + path + "'");
  o << body.str();
}

}  // namespace pairglm
