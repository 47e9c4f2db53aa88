#pragma once

// Forward-mode directional derivatives. A k-th order mixed derivative
// f^(k)(theta0) v_1 ... v_k is computed by evaluating f once on k-fold nested
// dual numbers, where nesting level j carries direction v_j, and reading off
// the coefficient of the product of all k infinitesimals. No derivative array
// is ever materialized, and there is no tape.

#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hoij/dual.hpp"
#include "hoij/error.hpp"
#include "hoij/problem.hpp"

namespace hoij {

// Ordered directions v_1..v_k, each of length D.
using DirectionBundle = std::vector<Eigen::VectorXd>;

// Throws OrderError / ModelError when the bundle cannot be applied to a
// D-dimensional function.
void check_directions(std::span<const Eigen::VectorXd> dirs, std::size_t dim);

namespace detail {

template <int L>
Nested<L> seed(double value, std::span<const Eigen::VectorXd> dirs, Eigen::Index i) {
  if constexpr (L == 0) {
    return value;
  } else {
    return Nested<L>(seed<L - 1>(value, dirs.first(L - 1), i),
                     Nested<L - 1>(dirs[L - 1](i)));
  }
}

// Coefficient of eps_1 * ... * eps_L.
template <int L>
double top_coefficient(const Nested<L>& x) {
  if constexpr (L == 0) {
    return x;
  } else {
    return top_coefficient<L - 1>(x.d);
  }
}

template <class Fn>
decltype(auto) dispatch_order(int k, Fn&& fn) {
  static_assert(kMaxDerivativeOrder == 7, "extend dispatch_order");
  switch (k) {
    case 0: return fn(std::integral_constant<int, 0>{});
    case 1: return fn(std::integral_constant<int, 1>{});
    case 2: return fn(std::integral_constant<int, 2>{});
    case 3: return fn(std::integral_constant<int, 3>{});
    case 4: return fn(std::integral_constant<int, 4>{});
    case 5: return fn(std::integral_constant<int, 5>{});
    case 6: return fn(std::integral_constant<int, 6>{});
    case 7: return fn(std::integral_constant<int, 7>{});
    default:
      throw OrderError("derivative order " + std::to_string(k) + " exceeds the maximum " +
                       std::to_string(kMaxDerivativeOrder));
  }
}

}  // namespace detail

// f^(k)(theta0) v_1 ... v_k for a generic callable
//   f(std::span<const S> x, std::span<S> out)
// instantiable for every S = Nested<L>, L <= kMaxDerivativeOrder. With an
// empty bundle this is f(theta0).
template <class F>
Eigen::VectorXd directional_derivative(F&& f, const Eigen::VectorXd& theta0,
                                       std::span<const Eigen::VectorXd> dirs,
                                       Eigen::Index out_dim) {
  check_directions(dirs, static_cast<std::size_t>(theta0.size()));
  return detail::dispatch_order(static_cast<int>(dirs.size()), [&](auto order) {
    constexpr int L = decltype(order)::value;
    std::vector<Nested<L>> x(static_cast<std::size_t>(theta0.size()));
    std::vector<Nested<L>> y(static_cast<std::size_t>(out_dim));
    for (Eigen::Index i = 0; i < theta0.size(); ++i) {
      x[static_cast<std::size_t>(i)] = detail::seed<L>(theta0(i), dirs, i);
    }
    f(std::span<const Nested<L>>(x), std::span<Nested<L>>(y));
    Eigen::VectorXd r(out_dim);
    for (Eigen::Index j = 0; j < out_dim; ++j) {
      const auto& yj = y[static_cast<std::size_t>(j)];
      if (!is_finite(yj)) throw NonFiniteError("non-finite value in directional derivative");
      r(j) = detail::top_coefficient<L>(yj);
    }
    return r;
  });
}

// Mixed theta-derivative of sum_{n=0}^{N} c_n g_n(theta) applied to dirs.
// `coeffs` has length N + 1; zero coefficients are skipped.
Eigen::VectorXd weighted_term_derivative(const EstimatingProblem& problem,
                                         const Eigen::VectorXd& theta,
                                         std::span<const double> coeffs,
                                         std::span<const Eigen::VectorXd> dirs);

// G^(k)(theta, w) v_1 ... v_k.
Eigen::VectorXd G_theta_derivative(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                                   const WeightVector& w, std::span<const Eigen::VectorXd> dirs);

// Same with w = 1_N, without building the weight vector.
Eigen::VectorXd G_theta_derivative_unit(const EstimatingProblem& problem,
                                        const Eigen::VectorXd& theta,
                                        std::span<const Eigen::VectorXd> dirs);

// (1/N) sum_n g_n^(k)(theta) v_1 ... v_k * delta_n. Excludes g_0; skips delta_n == 0.
Eigen::VectorXd G_weight_derivative(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& delta,
                                    std::span<const Eigen::VectorXd> dirs);

// H(theta, w) = G^(1)(theta, w), assembled column by column from D
// forward-mode passes against the basis directions.
Eigen::MatrixXd G_jacobian(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                           const WeightVector& w);
Eigen::MatrixXd G_jacobian_unit(const EstimatingProblem& problem, const Eigen::VectorXd& theta);

// Entrywise norms of a vectorized derivative array.
struct ArrayNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

// A symmetric k-th derivative array of a D-vector function, stored as one
// D-vector per sorted multi-index d_1 <= ... <= d_k together with the number of
// orderings of that multi-index.
class DerivativeArray {
 public:
  struct Entry {
    double multiplicity = 1.0;
    Eigen::VectorXd values;
  };

  DerivativeArray() = default;
  explicit DerivativeArray(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  const std::vector<Entry>& entries() const { return entries_; }
  ArrayNorms norms() const;

  // sum_i c_i A_i over arrays that share the same multi-index layout.
  static DerivativeArray combine(std::span<const DerivativeArray> arrays,
                                 std::span<const double> coeffs);

 private:
  std::vector<Entry> entries_;
};

// Sorted multi-indices of length k over {0..dim-1} and their multiplicities.
std::vector<std::pair<std::vector<Eigen::Index>, double>> symmetric_multi_indices(std::size_t dim,
                                                                                   int k);

// g_n^(k)(theta) as full arrays for every n = 0..N (index n in the result).
std::vector<DerivativeArray> term_derivative_arrays(const EstimatingProblem& problem,
                                                    const Eigen::VectorXd& theta, int k);

}  // namespace hoij
