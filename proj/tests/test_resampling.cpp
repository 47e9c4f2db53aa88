#include <doctest.h>

#include <cmath>
#include <random>

#include "hoij/error.hpp"
#include "hoij/expansion.hpp"
#include "hoij/models.hpp"
#include "hoij/report.hpp"
#include "hoij/resampling.hpp"
#include "hoij/weights.hpp"
#include "oracles.hpp"

using namespace hoij;

namespace {
const std::vector<double> kFour = {1, 2, 3, 6};
}  // namespace

TEST_CASE("mean model cross validation") {
  const BaseFit fit(oracle::mean_problem(kFour));
  auto stream = loo_weights(4);
  CvOptions opt;
  opt.order = 2;
  const CvReport r = run_cv(fit, stream, opt);
  REQUIRE(r.records.size() == 4);
  CHECK(r.failures == 0);
  CHECK(r.max_error[0] == doctest::Approx(1.0));
  CHECK(r.max_error[1] == doctest::Approx(0.25));
  CHECK(r.max_error[2] == doctest::Approx(0.0625));
  for (std::size_t i = 0; i < 4; ++i) {
    const CvRecord& rec = r.records[i];
    CHECK(rec.id == i);
    REQUIRE(rec.exact.has_value());
    CHECK((*rec.exact)(0) == doctest::Approx(oracle::mean_loo(kFour, i)).epsilon(1e-14));
    for (std::size_t k = 0; k < rec.theta_ij.size(); ++k) {
      CHECK(rec.error[k] == doctest::Approx((rec.theta_ij[k] - *rec.exact).norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("unit weights reproduce theta-hat at every order") {
  std::mt19937_64 rng(5);
  const Dataset d = oracle::random_dataset("logistic_regression", 30, 2, rng);
  const BaseFit fit(make_problem("logistic_regression", d));
  auto stream = unit_weights(30);
  CvOptions opt;
  opt.order = 4;
  const CvReport r = run_cv(fit, stream, opt);
  REQUIRE(r.records.size() == 1);
  for (const auto& t : r.records[0].theta_ij) CHECK(t == fit.theta_hat());
  for (double e : r.max_error) CHECK(e <= 1e-12);
}

TEST_CASE("max error decreases with the order for regression LOO") {
  std::mt19937_64 rng(77);
  const Dataset d = oracle::random_dataset("linear_regression", 60, 3, rng);
  const BaseFit fit(make_problem("linear_regression", d));
  auto stream = loo_weights(60);
  CvOptions opt;
  opt.order = 3;
  const CvReport r = run_cv(fit, stream, opt);
  for (std::size_t k = 1; k < r.max_error.size(); ++k) CHECK(r.max_error[k] < r.max_error[k - 1]);
}

TEST_CASE("report is independent of the worker count") {
  std::mt19937_64 rng(9);
  const Dataset d = oracle::random_dataset("logistic_regression", 40, 2, rng);
  const BaseFit fit(make_problem("logistic_regression", d));
  CvOptions opt;
  opt.order = 2;
  DomainSampler sampler;
  sampler.center = fit.theta_hat();
  sampler.radius = 0.1;
  sampler.n_samples = 16;
  opt.bounds_sampler = sampler;
  auto s1 = loo_weights(40);
  const auto a = cv_report_json(run_cv(fit, s1, opt), false).dump();
  opt.workers = 4;
  opt.bounds_options.workers = 3;
  auto s4 = loo_weights(40);
  const auto b = cv_report_json(run_cv(fit, s4, opt), false).dump();
  CHECK(a == b);
  CHECK(a.find("expand_seconds") == std::string::npos);
  CHECK(a.find("\"bounds\"") != std::string::npos);
}

TEST_CASE("k-fold and bootstrap schemes run through cross validation") {
  std::mt19937_64 rng(13);
  const Dataset d = oracle::random_dataset("linear_regression", 40, 2, rng);
  const BaseFit fit(make_problem("linear_regression", d));
  CvOptions opt;
  opt.order = 2;
  auto folds = kfold_weights(40, 5, 3);
  const CvReport kf = run_cv(fit, folds, opt);
  CHECK(kf.records.size() == 5);
  CHECK(kf.failures == 0);
  for (double e : kf.max_error) CHECK(std::isfinite(e));
  auto boot = bootstrap_weights(40, 10, 3);
  const CvReport bs = run_cv(fit, boot, opt);
  CHECK(bs.records.size() == 10);
  CHECK(bs.failures == 0);
}

TEST_CASE("refit failures are recorded per weight") {
  // Without its only negative point exp_loss has no root; Newton walks toward
  // -infinity and exhausts the iteration budget.
  Eigen::MatrixXd x(3, 1);
  x << -1.0, 1.0, 2.0;
  SolveConfig cfg;
  cfg.max_iter = 10;
  const BaseFit fit(make_problem("exp_loss", Dataset(x)), cfg);
  auto stream = loo_weights(3);
  CvOptions opt;
  opt.order = 1;
  const CvReport r = run_cv(fit, stream, opt);
  CHECK(r.failures == 1);
  CHECK(r.records[0].failure.has_value());
  CHECK_FALSE(r.records[0].exact.has_value());
  CHECK(r.records[0].error.empty());
  CHECK(r.records[1].exact.has_value());
  CHECK(std::isfinite(r.max_error[1]));
}

TEST_CASE("covariances") {
  SUBCASE("mean model sandwich") {
    const BaseFit fit(oracle::mean_problem(kFour));
    const Eigen::MatrixXd s = sandwich_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
    CHECK(s(0, 0) == doctest::Approx(0.875));
    const Eigen::MatrixXd ij = ij_linear_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
    CHECK(ij(0, 0) == doctest::Approx(0.875));
  }
  SUBCASE("identical data give zero covariance") {
    const BaseFit fit(oracle::mean_problem({2.0, 2.0, 2.0}));
    CHECK(sandwich_covariance(fit.problem(), fit.theta_hat(), fit.hessian()).norm() == 0.0);
  }
  SUBCASE("sandwich equals the linear jackknife form, and bootstrap agrees") {
    std::mt19937_64 rng(44);
    const Dataset d = oracle::random_dataset("logistic_regression", 60, 2, rng);
    const BaseFit fit(make_problem("logistic_regression", d));
    const Eigen::MatrixXd s = sandwich_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
    const Eigen::MatrixXd ij = ij_linear_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
    CHECK((s - s.transpose()).norm() <= 1e-15 * s.norm());
    CHECK((s - ij).norm() <= 1e-12 * s.norm());
    const MonteCarloCovariance mc = bootstrap_covariance(fit, 4000, 8);
    CHECK(mc.draws == 4000);
    for (Eigen::Index i = 0; i < 2; ++i) {
      for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(std::abs(mc.covariance(i, j) - s(i, j)) <= 5.0 * mc.standard_error(i, j));
      }
    }
    CHECK_THROWS_AS(bootstrap_covariance(fit, 1, 8), DataError);
  }
}

TEST_CASE("data generators") {
  GeneratorConfig cfg;
  cfg.model_id = "linear_regression";
  cfg.dim = 3;
  cfg.noise = 0.25;
  const Dataset a = generate_data(cfg, 50, 7);
  const Dataset b = generate_data(cfg, 50, 7);
  CHECK(a.features() == b.features());
  CHECK(a.response() == b.response());
  CHECK((a.features().col(0).array() == 1.0).all());
  CHECK(a.features().cwiseAbs().maxCoeff() <= 1.0);
  const Eigen::VectorXd fitted = a.features() * Eigen::Vector3d(1.0, 0.5, 1.0 / 3.0);
  CHECK((a.response() - fitted).cwiseAbs().maxCoeff() <= 0.25);
  CHECK(generate_data(cfg, 50, 8).features() != a.features());
  cfg.model_id = "mean";
  const Dataset m = generate_data(cfg, 20, 1);
  CHECK(m.features().minCoeff() >= 0.0);
  CHECK(m.features().maxCoeff() <= 1.0);
  cfg.model_id = "logistic_regression";
  const Dataset l = generate_data(cfg, 20, 1);
  CHECK(((l.response().array() == 0.0) || (l.response().array() == 1.0)).all());
  CHECK_THROWS_AS(generate_data(cfg, 0, 1), DataError);
  cfg.model_id = "nope";
  CHECK_THROWS_AS(generate_data(cfg, 10, 1), ModelError);
}

TEST_CASE("log-log fit") {
  const std::vector<double> x = {1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -2.0));
  const LogLogFit f = fit_log_log(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(f.slope_se <= 1e-12);
  CHECK_THROWS_AS(fit_log_log({1.0}, {1.0}), DataError);
  CHECK_THROWS_AS(fit_log_log({1.0, 2.0}, {1.0}), DataError);
  CHECK_THROWS_AS(fit_log_log({2.0, 2.0}, {1.0, 3.0}), DataError);
}

TEST_CASE("scaling study") {
  GeneratorConfig cfg;
  cfg.model_id = "mean";
  const ScalingReport r = scaling_study(cfg, {40, 80, 160, 320}, 2, 5);
  REQUIRE(r.rows.size() == 4);
  REQUIRE(r.slope.size() == 3);
  for (int k = 0; k <= 2; ++k) {
    CHECK(r.slope[static_cast<std::size_t>(k)] == doctest::Approx(-(k + 1.0)).epsilon(0.1));
  }
  CHECK_THROWS_AS(scaling_study(cfg, {100}, 1, 5), DataError);
  CHECK_THROWS_AS(scaling_study(cfg, {100, 50}, 1, 5), DataError);
  CHECK(scaling_csv(r).rfind("n,k,max_error,failure\n", 0) == 0);
}
