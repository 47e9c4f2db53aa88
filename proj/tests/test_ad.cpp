#include <doctest.h>

#include <cmath>
#include <random>

#include "hoij/ad.hpp"
#include "hoij/dual.hpp"
#include "hoij/error.hpp"
#include "hoij/models.hpp"
#include "oracles.hpp"

using namespace hoij;

TEST_CASE("dual arithmetic") {
  using D = Dual<double>;
  const D x(2.0, 1.0);
  CHECK((x * x).d == 4.0);
  CHECK((1.0 / x).d == doctest::Approx(-0.25));
  CHECK((x / x).d == 0.0);
  CHECK(exp(x).d == doctest::Approx(std::exp(2.0)));
  CHECK(log(x).d == doctest::Approx(0.5));
  CHECK(pow(x, 3.0).d == doctest::Approx(12.0));
  CHECK(pow(x, 0.0).v == 1.0);
  CHECK(pow(x, 0.0).d == 0.0);
  const double s = sigmoid(2.0);
  CHECK(sigmoid(x).d == doctest::Approx(s * (1 - s)));
  CHECK(sigmoid(-800.0) == 0.0);
  CHECK(sigmoid(800.0) == 1.0);
}

TEST_CASE("nested duals give higher derivatives") {
  // f(x) = x^5: f'''(1) = 60, f''''(1) = 120.
  const auto f = [](auto x) { return x * x * x * x * x; };
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  for (int k = 0; k <= 5; ++k) {
    DirectionBundle dirs(static_cast<std::size_t>(k), one);
    const Eigen::VectorXd r = directional_derivative(
        [&](auto x, auto y) { y[0] = f(x[0]); }, one, dirs, 1);
    const double expected[] = {1, 5, 20, 60, 120, 120};
    CHECK(r(0) == doctest::Approx(expected[k]));
  }
}

TEST_CASE("mixed partial on a polynomial") {
  // f(a, b) = a^2 b^3; d^3 f / da db db = 12 a b.
  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  const Eigen::VectorXd ea = Eigen::Vector2d(1, 0);
  const Eigen::VectorXd eb = Eigen::Vector2d(0, 1);
  const DirectionBundle dirs = {ea, eb, eb};
  const Eigen::VectorXd r = directional_derivative(
      [](auto x, auto y) { y[0] = x[0] * x[0] * x[1] * x[1] * x[1]; }, theta, dirs, 1);
  CHECK(r(0) == doctest::Approx(12 * 1.5 * -0.5));
}

TEST_CASE("mean model derivatives") {
  const EstimatingProblem p = oracle::mean_problem({1, 2, 3, 6});
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 3.0);
  const Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
  CHECK(G_theta_derivative_unit(p, theta, DirectionBundle{v})(0) == 1.0);
  CHECK(G_theta_derivative_unit(p, theta, DirectionBundle{v, v})(0) == 0.0);
  // (1/N) sum_n g_n^(1) delta_n dtheta with delta = -e_4, dtheta = -0.75.
  const Eigen::VectorXd delta = Eigen::Vector4d(0, 0, 0, -1);
  const DirectionBundle d1 = {Eigen::VectorXd::Constant(1, -0.75)};
  CHECK(G_weight_derivative(p, theta, delta, d1)(0) == doctest::Approx(0.1875));
  // (1/N) delta_4 g_4(3) = (1/4)(-1)(3 - 6).
  CHECK(G_weight_derivative(p, theta, delta, {})(0) == doctest::Approx(0.75));
  CHECK(G_jacobian_unit(p, theta)(0, 0) == 1.0);
}

TEST_CASE("directional derivatives are multilinear") {
  std::mt19937_64 rng(5);
  const Dataset data = oracle::random_dataset("logistic_regression", 15, 3, rng);
  const EstimatingProblem p = make_problem("logistic_regression", data);
  const Eigen::VectorXd theta = oracle::random_vector(3, rng, 0.3);
  const Eigen::VectorXd u = oracle::random_vector(3, rng);
  const Eigen::VectorXd v = oracle::random_vector(3, rng);
  const Eigen::VectorXd w = oracle::random_vector(3, rng);
  const Eigen::VectorXd base = G_theta_derivative_unit(p, theta, DirectionBundle{u, v, w});
  SUBCASE("homogeneous of degree k under a common scaling") {
    const double c = -1.7;
    const Eigen::VectorXd scaled =
        G_theta_derivative_unit(p, theta, DirectionBundle{c * u, c * v, c * w});
    CHECK((scaled - c * c * c * base).norm() <= 1e-12 * (1 + base.norm()));
  }
  SUBCASE("symmetric in the directions") {
    const Eigen::VectorXd perm = G_theta_derivative_unit(p, theta, DirectionBundle{w, u, v});
    CHECK((perm - base).norm() <= 1e-13 * (1 + base.norm()));
  }
  SUBCASE("additive in one direction") {
    const Eigen::VectorXd a = G_theta_derivative_unit(p, theta, DirectionBundle{u + v, v, w});
    const Eigen::VectorXd b = G_theta_derivative_unit(p, theta, DirectionBundle{v, v, w});
    CHECK((a - base - b).norm() <= 1e-12 * (1 + a.norm()));
  }
  SUBCASE("a zero direction gives zero") {
    const Eigen::VectorXd z =
        G_theta_derivative_unit(p, theta, DirectionBundle{u, Eigen::VectorXd::Zero(3), w});
    CHECK(z.norm() == 0.0);
  }
}

TEST_CASE("jacobian matches basis-direction derivatives") {
  std::mt19937_64 rng(6);
  const Dataset data = oracle::random_dataset("exp_loss", 10, 2, rng);
  const EstimatingProblem p = make_problem("exp_loss", data);
  const Eigen::VectorXd theta = oracle::random_vector(2, rng, 0.3);
  const Eigen::MatrixXd h = G_jacobian_unit(p, theta);
  const oracle::VecFn f = [&](const Eigen::VectorXd& t) {
    return evaluate_G(p, t, WeightVector::ones(10));
  };
  for (Eigen::Index j = 0; j < 2; ++j) {
    const Eigen::VectorXd fd =
        oracle::richardson_derivative(f, theta, {Eigen::VectorXd::Unit(2, j)}, 0.1);
    CHECK((h.col(j) - fd).norm() <= 1e-9);
  }
}

TEST_CASE("order and shape validation") {
  const EstimatingProblem p = oracle::mean_problem({1, 2});
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(1);
  const DirectionBundle too_many(kMaxDerivativeOrder + 1, Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(G_theta_derivative_unit(p, theta, too_many), OrderError);
  CHECK_THROWS_AS(G_theta_derivative_unit(p, theta, DirectionBundle{Eigen::VectorXd::Ones(2)}),
                  ModelError);
  const DirectionBundle deepest(kMaxDerivativeOrder, Eigen::VectorXd::Ones(1));
  CHECK(G_theta_derivative_unit(p, theta, deepest)(0) == 0.0);
}

TEST_CASE("non-finite derivatives are reported") {
  Eigen::MatrixXd x(1, 1);
  x << 1.0;
  const EstimatingProblem p = make_problem("exp_loss", Dataset(x));
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 800.0);
  CHECK_THROWS_AS(G_theta_derivative_unit(p, theta, DirectionBundle{Eigen::VectorXd::Ones(1)}),
                  NonFiniteError);
}

TEST_CASE("symmetric multi-indices") {
  // C(D + k - 1, k) sorted indices; multiplicities sum to D^k.
  for (std::size_t d = 1; d <= 4; ++d) {
    for (int k = 0; k <= 4; ++k) {
      const auto mi = symmetric_multi_indices(d, k);
      double total = 0.0;
      for (const auto& [idx, m] : mi) total += m;
      CHECK(total == doctest::Approx(std::pow(static_cast<double>(d), k)));
    }
  }
  CHECK(symmetric_multi_indices(3, 2).size() == 6);
}

TEST_CASE("derivative array norms agree with a dense assembly") {
  std::mt19937_64 rng(12);
  const Dataset data = oracle::random_dataset("logistic_regression", 6, 3, rng);
  const EstimatingProblem p = make_problem("logistic_regression", data);
  const Eigen::VectorXd theta = oracle::random_vector(3, rng, 0.5);
  const auto arrays = term_derivative_arrays(p, theta, 2);
  // Dense D x D x D array of g_1^(2) from basis-pair derivatives.
  double sq = 0.0, l1 = 0.0, linf = 0.0;
  const std::vector<double> coeffs = {0, 1, 0, 0, 0, 0, 0};
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Eigen::VectorXd v = weighted_term_derivative(
          p, theta, coeffs, DirectionBundle{Eigen::VectorXd::Unit(3, i), Eigen::VectorXd::Unit(3, j)});
      sq += v.squaredNorm();
      l1 += v.lpNorm<1>();
      linf = std::max(linf, v.lpNorm<Eigen::Infinity>());
    }
  }
  const ArrayNorms n = arrays[1].norms();
  CHECK(n.l2 == doctest::Approx(std::sqrt(sq)).epsilon(1e-13));
  CHECK(n.l1 == doctest::Approx(l1).epsilon(1e-13));
  CHECK(n.linf == doctest::Approx(linf).epsilon(1e-13));
}
