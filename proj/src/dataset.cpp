#include "hoij/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoij/error.hpp"

namespace hoij {

Dataset::Dataset(Eigen::MatrixXd features, std::optional<Eigen::VectorXd> response)
    : features_(std::move(features)), response_(std::move(response)) {
  if (features_.rows() < 1) throw DataError("dataset has no rows");
  if (features_.cols() < 1) throw DataError("dataset has no feature columns");
  if (!features_.allFinite()) throw DataError("dataset contains non-finite feature values");
  if (response_) {
    if (response_->size() != features_.rows()) {
      throw DataError("response length " + std::to_string(response_->size()) +
                      " does not match row count " + std::to_string(features_.rows()));
    }
    if (!response_->allFinite()) throw DataError("dataset contains non-finite response values");
  }
}

const Eigen::VectorXd& Dataset::response() const {
  if (!response_) throw DataError("dataset has no response column");
  return *response_;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  const std::string_view token = trim(cell);
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  const std::string where =
      "line " + std::to_string(line) + ", column " + std::to_string(column);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw DataError("parse error at " + where + ": cannot read '" + std::string(token) +
                    "' as a number");
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite value '" + std::string(token) + "' at " + where);
  }
  return value;
}

Dataset assemble(const std::vector<std::vector<double>>& rows, bool has_response) {
  if (rows.empty()) throw DataError("no rows");
  const std::size_t width = rows.front().size();
  const std::size_t p = has_response ? width - 1 : width;
  if (p < 1) throw DataError("rows need at least one feature column");
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(p));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    if (has_response) y(static_cast<Eigen::Index>(i)) = rows[i][p];
  }
  if (has_response) return Dataset(std::move(x), std::move(y));
  return Dataset(std::move(x));
}

}  // namespace

Dataset parse_csv(std::string_view text, bool header, bool has_response) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool skipped_header = !header;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!skipped_header) {
      skipped_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    std::size_t column = 1;
    while (true) {
      auto comma = line.find(',', start);
      const bool last = comma == std::string_view::npos;
      if (last) comma = line.size();
      row.push_back(parse_cell(line.substr(start, comma - start), line_no, column));
      if (last) break;
      start = comma + 1;
      ++column;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                      " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  return assemble(rows, has_response);
}

Dataset parse_json(std::string_view text, bool has_response) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("JSON dataset must be an array of row objects");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& r = doc[i];
    const std::string where = "row " + std::to_string(i);
    if (!r.is_object() || !r.contains("x") || !r["x"].is_array()) {
      throw DataError(where + ": expected an object with an array field \"x\"");
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < r["x"].size(); ++j) {
      const json& v = r["x"][j];
      if (!v.is_number()) {
        throw DataError(where + ", x[" + std::to_string(j) + "]: not a number");
      }
      const double value = v.get<double>();
      if (!std::isfinite(value)) {
        throw DataError("non-finite value at " + where + ", x[" + std::to_string(j) + "]");
      }
      row.push_back(value);
    }
    if (has_response) {
      if (!r.contains("y") || !r["y"].is_number()) {
        throw DataError(where + ": missing numeric field \"y\"");
      }
      row.push_back(r["y"].get<double>());
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(where + " has a different length of \"x\" than row 0");
    }
    rows.push_back(std::move(row));
  }
  return assemble(rows, has_response);
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (options.format == DataFormat::json) return parse_json(text, options.has_response);
  return parse_csv(text, options.header, options.has_response);
}

}  // namespace hoij
