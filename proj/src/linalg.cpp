#include "hoij/linalg.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "hoij/error.hpp"

namespace hoij {

double operator_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

namespace {

double inverse_norm_svd(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

// Power iteration on (A^{-1})' A^{-1}; its top eigenvalue is ||A^{-1}||_op^2.
double inverse_norm_power(const Eigen::MatrixXd& a) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(lu.rcond() > 0.0)) return std::numeric_limits<double>::infinity();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows()).normalized();
  // Deterministic, slightly asymmetric start vector.
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 1e-3 * static_cast<double>(i % 7);
  x.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 1000; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    const Eigen::VectorXd z = lu.transpose().solve(y);
    const double next = z.norm();
    if (!(next > 0.0) || !std::isfinite(next)) return std::numeric_limits<double>::infinity();
    x = z / next;
    if (std::abs(next - lambda) <= 1e-14 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

}  // namespace

double inverse_operator_norm(const Eigen::MatrixXd& a, OperatorNormMethod method) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw SingularMatrixError("inverse operator norm needs a nonempty square matrix");
  }
  if (method == OperatorNormMethod::automatic) {
    method = a.rows() <= kSvdDimensionLimit ? OperatorNormMethod::svd
                                            : OperatorNormMethod::power_iteration;
  }
  return method == OperatorNormMethod::svd ? inverse_norm_svd(a) : inverse_norm_power(a);
}

double perturbed_inverse_bound(double c_op, double r) {
  if (!(r > 0.0 && r < 1.0)) throw ConditionError("perturbation ratio r must lie in (0, 1)");
  return c_op / (1.0 - r);
}

}  // namespace hoij
