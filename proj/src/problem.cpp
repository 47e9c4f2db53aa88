#include "hoij/problem.hpp"

#include <string>
#include <vector>

#include "hoij/error.hpp"

namespace hoij {

Eigen::VectorXd EstimatingProblem::term(std::size_t n, const Eigen::VectorXd& theta) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim_));
  term<double>(n, std::span<const double>(theta.data(), dim_), std::span<double>(out.data(), dim_));
  return out;
}

WeightVector::WeightVector(Eigen::VectorXd values)
    : values_(std::move(values)), delta_(values_.array() - 1.0) {}

WeightVector WeightVector::ones(std::size_t n) {
  return WeightVector(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
}

bool WeightVector::is_unit() const { return (delta_.array() == 0.0).all(); }

Eigen::VectorXd evaluate_G(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                           const WeightVector& w) {
  const auto d = static_cast<Eigen::Index>(problem.dim());
  if (theta.size() != d) {
    throw ModelError("theta has length " + std::to_string(theta.size()) + ", expected " +
                     std::to_string(d));
  }
  if (w.size() != problem.n_terms()) {
    throw ModelError("weight vector has length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(problem.n_terms()));
  }
  Eigen::VectorXd total = problem.term(0, theta);
  Eigen::VectorXd g(d);
  for (std::size_t n = 1; n <= problem.n_terms(); ++n) {
    const double wn = w.values()(static_cast<Eigen::Index>(n - 1));
    if (wn == 0.0) continue;
    problem.term<double>(n, std::span<const double>(theta.data(), problem.dim()),
                         std::span<double>(g.data(), problem.dim()));
    total += wn * g;
  }
  total /= static_cast<double>(problem.n_terms());
  if (!total.allFinite()) throw NonFiniteError("G(theta, w) is not finite");
  return total;
}

}  // namespace hoij
