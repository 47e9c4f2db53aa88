#pragma once

#include <Eigen/Core>

namespace hoij {

enum class OperatorNormMethod { automatic, svd, power_iteration };

// Dimension above which `automatic` switches from SVD to power iteration.
inline constexpr Eigen::Index kSvdDimensionLimit = 200;

// Largest singular value of `a`.
double operator_norm(const Eigen::MatrixXd& a);

// ||a^{-1}||_op = 1 / sigma_min(a). Returns +inf for a singular matrix.
double inverse_operator_norm(const Eigen::MatrixXd& a,
                             OperatorNormMethod method = OperatorNormMethod::automatic);

// Bound on ||D^{-1}||_op from ||A - D||_2 <= r / c_op and ||A^{-1}||_op <= c_op:
// c_op / (1 - r). Requires 0 < r < 1.
double perturbed_inverse_bound(double c_op, double r);

}  // namespace hoij
