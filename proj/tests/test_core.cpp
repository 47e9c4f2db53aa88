#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "hoij/dataset.hpp"
#include "hoij/error.hpp"
#include "hoij/models.hpp"
#include "hoij/problem.hpp"
#include "hoij/weights.hpp"
#include "oracles.hpp"

using namespace hoij;

TEST_CASE("csv parsing") {
  SUBCASE("features only") {
    const Dataset d = parse_csv("1,2\n3,4\n5,6\n", false, false);
    CHECK(d.rows() == 3);
    CHECK(d.n_features() == 2);
    CHECK(d.features()(2, 1) == 6.0);
    CHECK_FALSE(d.has_response());
  }
  SUBCASE("header and response column") {
    const Dataset d = parse_csv("x1,x2,y\n1,2,0.5\n3,4,1.5\n", true, true);
    CHECK(d.n_features() == 2);
    CHECK(d.response()(1) == 1.5);
  }
  SUBCASE("bad number reports its position") {
    try {
      parse_csv("1,2\n3,abc\n", false, false);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("column 2") != std::string::npos);
    }
  }
  SUBCASE("non-finite values are rejected") {
    CHECK_THROWS_AS(parse_csv("1\nnan\n", false, false), DataError);
    CHECK_THROWS_AS(parse_csv("1\ninf\n", false, false), DataError);
  }
  SUBCASE("ragged rows and empty input") {
    CHECK_THROWS_AS(parse_csv("1,2\n3\n", false, false), DataError);
    CHECK_THROWS_AS(parse_csv("", false, false), DataError);
  }
}

TEST_CASE("json parsing") {
  const Dataset d = parse_json(R"([{"x": [1, 2], "y": 3}, {"x": [4, 5], "y": 6}])", true);
  CHECK(d.rows() == 2);
  CHECK(d.features()(1, 0) == 4.0);
  CHECK(d.response()(0) == 3.0);
  CHECK_THROWS_AS(parse_json(R"([{"x": [1]}])", true), DataError);
  CHECK_THROWS_AS(parse_json("{not json", false), DataError);
}

TEST_CASE("dataset invariants") {
  CHECK_THROWS_AS(Dataset(Eigen::MatrixXd(0, 1)), DataError);
  Eigen::MatrixXd x(2, 1);
  x << 1, 2;
  CHECK_THROWS_AS(Dataset(x, Eigen::VectorXd::Ones(3)), DataError);
}

TEST_CASE("model registry") {
  CHECK(model_registry().size() == 4);
  CHECK_THROWS_AS(find_model("nope"), ModelError);
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 3, 4, 5, 6;
  const Dataset no_y(x);
  CHECK_THROWS_AS(make_problem("linear_regression", no_y), ModelError);
  ProblemOptions opt;
  opt.dim = 3;
  CHECK_THROWS_AS(make_problem("mean", no_y, opt), ModelError);
}

TEST_CASE("built-in terms on doubles") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, -1, 0.5;
  const Eigen::VectorXd y = Eigen::Vector2d(0.0, 1.0);
  const Dataset d(x, y);
  const Eigen::VectorXd theta = Eigen::Vector2d(0.3, -0.2);
  const double z = 0.3 * 1 - 0.2 * 2;
  const Eigen::VectorXd x1 = Eigen::Vector2d(1, 2);
  CHECK((make_problem("mean", d).term(1, theta) - (theta - x1)).norm() < 1e-15);
  CHECK((make_problem("linear_regression", d).term(1, theta) - z * x1).norm() < 1e-15);
  CHECK((make_problem("logistic_regression", d).term(1, theta) - (1 / (1 + std::exp(-z))) * x1)
            .norm() < 1e-15);
  CHECK((make_problem("exp_loss", d).term(1, theta) - std::exp(z) * x1).norm() < 1e-15);
  ProblemOptions ridge;
  ridge.l2 = 0.5;
  CHECK((make_problem("mean", d, ridge).term(0, theta) - 0.5 * theta).norm() < 1e-15);
  CHECK(make_problem("mean", d).term(0, theta).norm() == 0.0);
}

TEST_CASE("evaluate_G") {
  const EstimatingProblem p = oracle::mean_problem({1, 2, 3, 6});
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 3.0);
  CHECK(evaluate_G(p, theta, WeightVector::ones(4))(0) == 0.0);
  // (1/4)((3-1) + (3-2) + (3-3)) = 0.75
  CHECK(evaluate_G(p, theta, WeightVector(Eigen::Vector4d(1, 1, 1, 0)))(0) == doctest::Approx(0.75));
  CHECK_THROWS_AS(evaluate_G(p, theta, WeightVector::ones(3)), ModelError);
  CHECK_THROWS_AS(evaluate_G(p, Eigen::VectorXd::Zero(2), WeightVector::ones(4)), ModelError);
}

TEST_CASE("weight displacement is exact for integer weights") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int r = 0; r < 50; ++r) {
    Eigen::VectorXd v(10);
    for (Eigen::Index i = 0; i < 10; ++i) v(i) = pick(rng);
    const WeightVector w(v);
    CHECK(((w.values() - w.delta()).array() == 1.0).all());
  }
  CHECK(WeightVector::ones(5).is_unit());
  CHECK_FALSE(WeightVector(Eigen::Vector2d(1, 0)).is_unit());
}

TEST_CASE("weight schemes") {
  SUBCASE("leave one out") {
    auto all = loo_weights(5).collect();
    REQUIRE(all.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(all[i].weights.values().sum() == 4.0);
      CHECK(all[i].weights.values()(static_cast<Eigen::Index>(i)) == 0.0);
      CHECK(all[i].label == "loo:" + std::to_string(i));
    }
    CHECK(loo_weights(5, {3}).collect().size() == 1);
    CHECK_THROWS_AS(loo_weights(5, {5}), ModelError);
  }
  SUBCASE("k-fold partitions") {
    auto folds = kfold_weights(10, 3, 7).collect();
    REQUIRE(folds.size() == 3);
    std::set<Eigen::Index> held;
    for (const auto& f : folds) {
      CHECK(f.weights.values().sum() == 7.0);
      for (Eigen::Index i = 0; i < 10; ++i) {
        if (f.weights.values()(i) == 0.0) CHECK(held.insert(i).second);
      }
    }
    CHECK_THROWS_AS(kfold_weights(4, 5, 0), ModelError);
    CHECK_THROWS_AS(kfold_weights(4, 0, 0), ModelError);
  }
  SUBCASE("leave kappa out") {
    for (const auto& w : leave_kappa_out_weights(8, 3, 2, 20).collect()) {
      CHECK(w.weights.values().sum() == 5.0);
    }
    CHECK_THROWS_AS(leave_kappa_out_weights(3, 4, 0, 1), ModelError);
  }
  SUBCASE("bootstrap counts sum to N and are seeded") {
    auto a = bootstrap_weights(12, 30, 9).collect();
    auto b = bootstrap_weights(12, 30, 9).collect();
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].weights.values().sum() == 12.0);
      CHECK(a[i].weights.values() == b[i].weights.values());
    }
  }
  SUBCASE("unit weights") {
    auto u = unit_weights(4).collect();
    REQUIRE(u.size() == 1);
    CHECK(u[0].weights.is_unit());
  }
}
