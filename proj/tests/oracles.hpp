#pragma once

// Independent numerical references used by the tests. Nothing here touches
// the AD engine or the term tables.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoij/dataset.hpp"
#include "hoij/models.hpp"
#include "hoij/problem.hpp"

namespace oracle {

using VecFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Central mixed difference
//   sum_{s in {-1,1}^k} prod(s) f(x + h sum_i s_i v_i) / (2h)^k,
// whose error expands in even powers of h.
inline Eigen::VectorXd mixed_central_difference(const VecFn& f, const Eigen::VectorXd& x,
                                                const std::vector<Eigen::VectorXd>& dirs,
                                                double h) {
  const std::size_t k = dirs.size();
  if (k == 0) return f(x);
  Eigen::VectorXd acc;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    Eigen::VectorXd p = x;
    double sign = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double s = (mask >> i) & 1u ? -1.0 : 1.0;
      sign *= s;
      p += h * s * dirs[i];
    }
    const Eigen::VectorXd v = sign * f(p);
    if (acc.size() == 0) acc = v; else acc += v;
  }
  return acc / std::pow(2.0 * h, static_cast<double>(k));
}

// Richardson extrapolation of the central mixed difference over step sizes
// h0, h0/2, ..., h0/2^(levels-1).
inline Eigen::VectorXd richardson_derivative(const VecFn& f, const Eigen::VectorXd& x,
                                             const std::vector<Eigen::VectorXd>& dirs, double h0,
                                             int levels = 4) {
  std::vector<std::vector<Eigen::VectorXd>> t(static_cast<std::size_t>(levels));
  double h = h0;
  for (int i = 0; i < levels; ++i, h /= 2.0) {
    auto& row = t[static_cast<std::size_t>(i)];
    row.push_back(mixed_central_difference(f, x, dirs, h));
    double factor = 4.0;
    for (int j = 1; j <= i; ++j, factor *= 4.0) {
      const auto& prev = t[static_cast<std::size_t>(i - 1)];
      row.push_back(row[static_cast<std::size_t>(j - 1)] +
                    (row[static_cast<std::size_t>(j - 1)] - prev[static_cast<std::size_t>(j - 1)]) /
                        (factor - 1.0));
    }
  }
  return t.back().back();
}

// k-th derivative at t = 0 of a curve t -> c(t) in R^D.
inline Eigen::VectorXd curve_derivative(const std::function<Eigen::VectorXd(double)>& c, int k,
                                        double h0, int levels = 4) {
  const VecFn f = [&](const Eigen::VectorXd& t) { return c(t(0)); };
  const std::vector<Eigen::VectorXd> dirs(static_cast<std::size_t>(k), Eigen::VectorXd::Ones(1));
  return richardson_derivative(f, Eigen::VectorXd::Zero(1), dirs, h0, levels);
}

// Closed-form LOO refits of the mean model.
inline double mean_loo(const std::vector<double>& x, std::size_t drop) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i != drop) s += x[i];
  }
  return s / static_cast<double>(x.size() - 1);
}

// Weighted normal equations for linear regression.
inline Eigen::VectorXd weighted_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& w) {
  const Eigen::MatrixXd a = x.transpose() * w.asDiagonal() * x;
  const Eigen::VectorXd b = x.transpose() * w.asDiagonal() * y;
  return a.fullPivLu().solve(b);
}

// g_0(theta) = theta, g_n(theta) = -x_n: theta-hat(w) = sum_n w_n x_n,
// which is affine in w.
struct AffineModel {
  std::vector<Eigen::VectorXd> x;

  template <class S>
  void term(std::size_t n, std::span<const S> theta, std::span<S> out) const {
    for (std::size_t d = 0; d < theta.size(); ++d) {
      out[d] = n == 0 ? theta[d] : S(-x[n - 1](static_cast<Eigen::Index>(d)));
    }
  }
};

inline hoij::EstimatingProblem affine_problem(std::vector<Eigen::VectorXd> x) {
  const std::size_t dim = static_cast<std::size_t>(x.front().size());
  const std::size_t n = x.size();
  auto m = std::make_shared<const AffineModel>(AffineModel{std::move(x)});
  return hoij::EstimatingProblem::from_model(m, "affine", dim, n);
}

inline hoij::EstimatingProblem mean_problem(const std::vector<double>& x) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) f(static_cast<Eigen::Index>(i), 0) = x[i];
  return hoij::make_problem("mean", hoij::Dataset(f));
}

// Random data for any built-in model: x ~ U[-1, 1]^D (first column 1 for the
// regressions), y from a well-specified model so the root is interior.
inline hoij::Dataset random_dataset(const std::string& model, std::size_t n, std::size_t d,
                                    std::mt19937_64& rng) {
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = sym(rng);
  }
  if (model == "mean" || model == "exp_loss") return hoij::Dataset(x);
  x.col(0).setOnes();
  Eigen::VectorXd beta(x.cols());
  for (Eigen::Index j = 0; j < beta.size(); ++j) beta(j) = 0.5 * sym(rng);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double z = x.row(i).dot(beta);
    if (model == "linear_regression") {
      y(i) = z + 0.3 * sym(rng);
    } else {
      y(i) = unit(rng) < 1.0 / (1.0 + std::exp(-z)) ? 1.0 : 0.0;
    }
  }
  return hoij::Dataset(x, y);
}

inline Eigen::VectorXd random_vector(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = scale * normal(rng);
  return v;
}

}  // namespace oracle
