#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hoij/bounds.hpp"
#include "hoij/resampling.hpp"
#include "hoij/terms.hpp"

namespace hoij {

inline constexpr int kSchemaVersion = 1;

// Fully resolved command-line configuration, embedded in every output file.
struct RunConfig {
  std::string command;
  std::string model_id;
  std::string data_path;
  std::string data_format = "csv";
  bool header = false;
  int order = 1;
  double rho = kDefaultRho;
  std::optional<double> radius;  // unset: derived from radius-0 constants
  std::size_t samples = 256;
  std::uint64_t seed = 0;
  std::string scheme = "loo";
  std::size_t folds = 10;
  std::size_t kappa = 2;
  std::size_t draws = 1000;
  std::string out;
  std::string csv;
  bool with_bounds = false;
  bool epsilon_term = false;
  double epsilon = 0.0;
  std::size_t workers = 1;
  double l2 = 0.0;
  std::vector<std::size_t> n_grid;
  std::size_t features = 1;
  double noise = 0.5;
  bool timings = false;
  bool check_segments = false;
  int max_order = 3;
};

nlohmann::json to_json(const RunConfig& config);

// {"schema_version", "kind", "config", "result"}.
nlohmann::json envelope(const std::string& kind, const RunConfig& config, nlohmann::json result);

nlohmann::json vector_json(const Eigen::VectorXd& v);
nlohmann::json matrix_json(const Eigen::MatrixXd& m);

nlohmann::json term_table_json(const TermTable& table, int max_order);
nlohmann::json bounds_json(const BoundsSummary& summary);
// Runtimes are included only when `timings` is set, so that the default
// output is reproducible byte for byte.
nlohmann::json cv_report_json(const CvReport& report, bool timings);
nlohmann::json scaling_json(const ScalingReport& report);

// One row per weight per order.
std::string cv_report_csv(const CvReport& report);
// One row per grid point per order.
std::string scaling_csv(const ScalingReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace hoij
