#include "hoij/resampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "hoij/error.hpp"
#include "hoij/models.hpp"
#include "hoij/parallel.hpp"
#include "hoij/terms.hpp"

namespace hoij {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CvReport run_cv(const BaseFit& fit, WeightStream& stream, const CvOptions& options) {
  if (options.order < 0 || options.order > kMaxExpansionOrder) {
    throw OrderError("expansion order " + std::to_string(options.order) + " outside [0, " +
                     std::to_string(kMaxExpansionOrder) + "]");
  }
  std::vector<LabeledWeights> weights = stream.collect();
  std::sort(weights.begin(), weights.end(),
            [](const LabeledWeights& a, const LabeledWeights& b) { return a.id < b.id; });

  CvReport report;
  report.model_id = fit.problem().model_id();
  report.order = options.order;
  report.theta_hat = fit.theta_hat();
  report.records.resize(weights.size());

  parallel_for(weights.size(), options.workers, [&](std::size_t i) {
    const LabeledWeights& lw = weights[i];
    CvRecord& rec = report.records[i];
    rec.id = lw.id;
    rec.label = lw.label;
    auto t0 = std::chrono::steady_clock::now();
    const TaylorExpansion ex = fit.expand(lw.weights, options.order);
    for (int k = 0; k <= options.order; ++k) rec.theta_ij.push_back(ex.partial_sum(k));
    rec.expand_seconds = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    try {
      rec.exact = fit.refit(lw.weights).theta;
      for (const auto& t : rec.theta_ij) rec.error.push_back((t - *rec.exact).norm());
    } catch (const Error& e) {
      rec.failure = e.what();
    }
    rec.refit_seconds = seconds_since(t0);
  });

  const auto orders = static_cast<std::size_t>(options.order + 1);
  report.max_error.assign(orders, 0.0);
  report.mean_error.assign(orders, 0.0);
  std::size_t ok = 0;
  for (const auto& rec : report.records) {
    if (rec.failure) {
      ++report.failures;
      continue;
    }
    ++ok;
    for (std::size_t k = 0; k < orders; ++k) {
      report.max_error[k] = std::max(report.max_error[k], rec.error[k]);
      report.mean_error[k] += rec.error[k];
    }
  }
  for (auto& m : report.mean_error) m = ok ? m / static_cast<double>(ok) : 0.0;

  if (options.bounds_sampler) {
    report.bounds =
        compute_bounds(fit.problem(), *options.bounds_sampler, options.order, options.bounds_options);
  }
  return report;
}

Eigen::MatrixXd sandwich_covariance(const EstimatingProblem& problem,
                                    const Eigen::VectorXd& theta_hat, const HessianFactor& hfac) {
  const auto n = static_cast<Eigen::Index>(problem.n_terms());
  const auto d = static_cast<Eigen::Index>(problem.dim());
  Eigen::MatrixXd j(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    j.row(i) = problem.term(static_cast<std::size_t>(i + 1), theta_hat).transpose();
  }
  const Eigen::MatrixXd centered = j.rowwise() - j.colwise().mean();
  const Eigen::MatrixXd s =
      centered.transpose() * centered / (static_cast<double>(n) * static_cast<double>(n));
  const Eigen::MatrixXd hs = hfac.solve(s);
  return hfac.solve(Eigen::MatrixXd(hs.transpose())).transpose();
}

Eigen::MatrixXd ij_linear_covariance(const EstimatingProblem& problem,
                                     const Eigen::VectorXd& theta_hat, const HessianFactor& hfac) {
  const auto n = static_cast<Eigen::Index>(problem.n_terms());
  const auto d = static_cast<Eigen::Index>(problem.dim());
  const auto& theta1 = shared_term_table().order(1);
  Eigen::MatrixXd l(d, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e(i) = 1.0;
    l.col(i) = evaluate_dtheta(problem, 1, theta_hat, hfac, theta1, {}, e);
    e(i) = 0.0;
  }
  const Eigen::VectorXd l1 = l.rowwise().sum();
  return l * l.transpose() - l1 * l1.transpose() / static_cast<double>(n);
}

MonteCarloCovariance bootstrap_covariance(const BaseFit& fit, std::size_t draws,
                                          std::uint64_t seed, int order) {
  if (draws < 2) throw DataError("bootstrap covariance needs at least two draws");
  const auto d = static_cast<Eigen::Index>(fit.problem().dim());
  WeightStream stream = bootstrap_weights(fit.problem().n_terms(), draws, seed);
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(draws), d);
  Eigen::Index row = 0;
  while (auto lw = stream.next()) {
    samples.row(row++) = fit.expand(lw->weights, order).partial_sum(order).transpose();
  }
  const double b = static_cast<double>(draws);
  const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
  MonteCarloCovariance out;
  out.draws = draws;
  out.covariance = centered.transpose() * centered / (b - 1.0);
  out.standard_error.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const Eigen::ArrayXd prod = centered.col(i).array() * centered.col(k).array();
      const double mean = prod.mean();
      const double var = (prod - mean).square().sum() / (b - 1.0);
      out.standard_error(i, k) = std::sqrt(var / b);
    }
  }
  return out;
}

Dataset generate_data(const GeneratorConfig& config, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DataError("generator needs at least one row");
  if (config.dim == 0) throw DataError("generator needs at least one feature");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(config.dim);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  Eigen::VectorXd beta(cols);
  for (Eigen::Index j = 0; j < cols; ++j) beta(j) = 1.0 / static_cast<double>(j + 1);

  Eigen::MatrixXd x(rows, cols);
  const std::string& id = config.model_id;
  if (id == "mean") {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = unit(rng);
    return Dataset(std::move(x));
  }
  if (id == "exp_loss") {
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = sym(rng);
    return Dataset(std::move(x));
  }
  if (id != "linear_regression" && id != "logistic_regression") {
    throw ModelError("no data generator for model '" + id + "'");
  }
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < cols; ++j) x(i, j) = sym(rng);
    const double z = x.row(i).dot(beta);
    if (id == "linear_regression") {
      y(i) = z + config.noise * sym(rng);
    } else {
      y(i) = unit(rng) < sigmoid(z) ? 1.0 : 0.0;
    }
  }
  return Dataset(std::move(x), std::move(y));
}

LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DataError("log-log fit needs equal-length inputs");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) throw DataError("log-log fit needs at least two positive points");
  const double m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw DataError("log-log fit needs distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (lx.size() > 2) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - fit.intercept - fit.slope * lx[i];
      ssr += r * r;
    }
    fit.slope_se = std::sqrt(ssr / (m - 2.0) / sxx);
  }
  return fit;
}

ScalingReport scaling_study(const GeneratorConfig& generator, const std::vector<std::size_t>& n_grid,
                            int order, std::uint64_t seed, std::size_t workers) {
  if (n_grid.size() < 2) throw DataError("scaling study needs at least two grid points");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw DataError("scaling grid must be strictly increasing");
  }
  ScalingReport report;
  report.model_id = generator.model_id;
  report.generator = generator;
  report.n_grid = n_grid;
  report.order = order;
  report.seed = seed;
  for (std::size_t n : n_grid) {
    ScalingRow row;
    row.n = n;
    try {
      const Dataset data = generate_data(generator, n, seed);
      const BaseFit fit(make_problem(generator.model_id, data));
      WeightStream loo = loo_weights(n);
      CvOptions opts;
      opts.order = order;
      opts.workers = workers;
      const CvReport cv = run_cv(fit, loo, opts);
      if (cv.failures > 0) {
        for (const auto& rec : cv.records) {
          if (rec.failure) {
            row.failure = "refit failed for " + rec.label + ": " + *rec.failure;
            break;
          }
        }
      } else {
        row.max_error = cv.max_error;
      }
    } catch (const Error& e) {
      row.failure = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  for (int k = 0; k <= order; ++k) {
    std::vector<double> xs, ys;
    for (const auto& row : report.rows) {
      if (row.failure) continue;
      xs.push_back(static_cast<double>(row.n));
      ys.push_back(row.max_error[static_cast<std::size_t>(k)]);
    }
    try {
      const LogLogFit f = fit_log_log(xs, ys);
      report.slope.push_back(f.slope);
      report.slope_se.push_back(f.slope_se);
    } catch (const DataError&) {
      report.slope.push_back(std::numeric_limits<double>::quiet_NaN());
      report.slope_se.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  return report;
}

}  // namespace hoij
