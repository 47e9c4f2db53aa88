#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>

#include <Eigen/Core>

namespace hoij {

// N rows of P finite features, optionally with one finite response per row.
class Dataset {
 public:
  // Validates the invariants (N >= 1, P >= 1, finite values, response length).
  Dataset(Eigen::MatrixXd features, std::optional<Eigen::VectorXd> response = std::nullopt);

  std::size_t rows() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t n_features() const { return static_cast<std::size_t>(features_.cols()); }
  const Eigen::MatrixXd& features() const { return features_; }
  bool has_response() const { return response_.has_value(); }
  const Eigen::VectorXd& response() const;

 private:
  Eigen::MatrixXd features_;
  std::optional<Eigen::VectorXd> response_;
};

enum class DataFormat { csv, json };

struct LoadOptions {
  DataFormat format = DataFormat::csv;
  // CSV only: skip the first line.
  bool header = false;
  // CSV: the last column is the response. JSON: every row must carry "y".
  bool has_response = false;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);

Dataset parse_csv(std::string_view text, bool header, bool has_response);
Dataset parse_json(std::string_view text, bool has_response);

}  // namespace hoij
