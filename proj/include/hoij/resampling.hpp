#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hoij/bounds.hpp"
#include "hoij/dataset.hpp"
#include "hoij/expansion.hpp"
#include "hoij/weights.hpp"

namespace hoij {

struct CvRecord {
  std::size_t id = 0;
  std::string label;
  std::vector<Eigen::VectorXd> theta_ij;  // theta_IJ^k for k = 0..K
  std::optional<Eigen::VectorXd> exact;   // empty when the refit failed
  std::vector<double> error;              // ||theta_IJ^k - exact||_2; empty on failure
  std::optional<std::string> failure;
  double expand_seconds = 0.0;
  double refit_seconds = 0.0;
};

struct CvReport {
  std::string model_id;
  int order = 0;
  Eigen::VectorXd theta_hat;
  std::vector<CvRecord> records;  // sorted by id
  std::vector<double> max_error;  // per k over successful refits
  std::vector<double> mean_error;
  std::size_t failures = 0;
  std::optional<BoundsSummary> bounds;
};

struct CvOptions {
  int order = 1;
  std::size_t workers = 1;
  // When set, bounds are estimated with this sampler and attached to the report.
  std::optional<DomainSampler> bounds_sampler;
  ConstantsOptions bounds_options;
};

// Expansion and exact refit for every weight in the stream. Refit failures
// are recorded per weight; the report is ordered by weight id regardless of
// the worker count.
CvReport run_cv(const BaseFit& fit, WeightStream& stream, const CvOptions& options);

// H^{-1} S H^{-T} with S = (1/N^2) sum_n (g_n - gbar)(g_n - gbar)' at theta-hat.
Eigen::MatrixXd sandwich_covariance(const EstimatingProblem& problem,
                                    const Eigen::VectorXd& theta_hat, const HessianFactor& hfac);

// Covariance of the linear map w -> theta_IJ^1(w) under Multinomial(N, 1/N)
// weights, L (I - 11'/N) L', where column n of L is dtheta^1 for
// w - 1_N = e_n, computed through the expansion engine.
Eigen::MatrixXd ij_linear_covariance(const EstimatingProblem& problem,
                                     const Eigen::VectorXd& theta_hat, const HessianFactor& hfac);

struct MonteCarloCovariance {
  Eigen::MatrixXd covariance;
  Eigen::MatrixXd standard_error;  // per entry
  std::size_t draws = 0;
};

// Sample covariance of theta_IJ^order(w) over seeded bootstrap draws.
MonteCarloCovariance bootstrap_covariance(const BaseFit& fit, std::size_t draws,
                                          std::uint64_t seed, int order = 1);

struct GeneratorConfig {
  std::string model_id = "mean";
  std::size_t dim = 1;
  double noise = 0.5;
};

// Bounded synthetic data for a built-in model:
//   mean                 x ~ U[0, 1]^D
//   linear_regression    x = (1, u), u ~ U[-1, 1]^{D-1}, y = x'beta + U[-noise, noise]
//   logistic_regression  x as above, y ~ Bernoulli(sigmoid(x'beta))
//   exp_loss             x ~ U[-1, 1]^D
// with beta = (1, 1/2, 1/3, ...). The stream depends only on (seed, n).
Dataset generate_data(const GeneratorConfig& config, std::size_t n, std::uint64_t seed);

struct ScalingRow {
  std::size_t n = 0;
  std::vector<double> max_error;  // per k; empty when aborted
  std::optional<std::string> failure;
};

struct ScalingReport {
  std::string model_id;
  GeneratorConfig generator;
  std::vector<std::size_t> n_grid;
  int order = 0;
  std::uint64_t seed = 0;
  std::vector<ScalingRow> rows;
  std::vector<double> slope;  // per k
  std::vector<double> slope_se;
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};

// Least squares of log(y) on log(x). Needs at least two positive points.
LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

// Full-LOO max error per k on freshly generated data for each N in the grid.
ScalingReport scaling_study(const GeneratorConfig& generator, const std::vector<std::size_t>& n_grid,
                            int order, std::uint64_t seed, std::size_t workers = 1);

}  // namespace hoij
