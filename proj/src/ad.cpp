#include "hoij/ad.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hoij {

void check_directions(std::span<const Eigen::VectorXd> dirs, std::size_t dim) {
  if (dirs.size() > static_cast<std::size_t>(kMaxDerivativeOrder)) {
    throw OrderError("derivative order " + std::to_string(dirs.size()) +
                     " exceeds the maximum " + std::to_string(kMaxDerivativeOrder));
  }
  for (std::size_t j = 0; j < dirs.size(); ++j) {
    if (static_cast<std::size_t>(dirs[j].size()) != dim) {
      throw ModelError("direction " + std::to_string(j) + " has length " +
                       std::to_string(dirs[j].size()) + ", expected " + std::to_string(dim));
    }
  }
}

namespace {

template <int L>
Eigen::VectorXd weighted_impl(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                              std::span<const double> coeffs,
                              std::span<const Eigen::VectorXd> dirs) {
  const std::size_t dim = problem.dim();
  std::vector<Nested<L>> x(dim);
  std::vector<Nested<L>> y(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    x[i] = detail::seed<L>(theta(static_cast<Eigen::Index>(i)), dirs,
                           static_cast<Eigen::Index>(i));
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    const double c = coeffs[n];
    if (c == 0.0) continue;
    problem.term<Nested<L>>(n, x, y);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!is_finite(y[j])) {
        throw NonFiniteError("non-finite derivative of term " + std::to_string(n));
      }
      acc(static_cast<Eigen::Index>(j)) += c * detail::top_coefficient<L>(y[j]);
    }
  }
  return acc;
}

void check_theta(const EstimatingProblem& problem, const Eigen::VectorXd& theta) {
  if (static_cast<std::size_t>(theta.size()) != problem.dim()) {
    throw ModelError("theta has length " + std::to_string(theta.size()) + ", expected " +
                     std::to_string(problem.dim()));
  }
}

}  // namespace

Eigen::VectorXd weighted_term_derivative(const EstimatingProblem& problem,
                                         const Eigen::VectorXd& theta,
                                         std::span<const double> coeffs,
                                         std::span<const Eigen::VectorXd> dirs) {
  check_theta(problem, theta);
  check_directions(dirs, problem.dim());
  if (coeffs.size() != problem.n_terms() + 1) {
    throw ModelError("expected " + std::to_string(problem.n_terms() + 1) +
                     " term coefficients, got " + std::to_string(coeffs.size()));
  }
  // Multilinear in the directions: a zero direction gives exactly zero.
  for (const auto& v : dirs) {
    if ((v.array() == 0.0).all()) return Eigen::VectorXd::Zero(theta.size());
  }
  return detail::dispatch_order(static_cast<int>(dirs.size()), [&](auto order) {
    return weighted_impl<decltype(order)::value>(problem, theta, coeffs, dirs);
  });
}

Eigen::VectorXd G_theta_derivative(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                                   const WeightVector& w, std::span<const Eigen::VectorXd> dirs) {
  if (w.size() != problem.n_terms()) {
    throw ModelError("weight vector has length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(problem.n_terms()));
  }
  const double inv_n = 1.0 / static_cast<double>(problem.n_terms());
  std::vector<double> coeffs(problem.n_terms() + 1);
  coeffs[0] = inv_n;
  for (std::size_t n = 1; n <= problem.n_terms(); ++n) {
    coeffs[n] = w.values()(static_cast<Eigen::Index>(n - 1)) * inv_n;
  }
  return weighted_term_derivative(problem, theta, coeffs, dirs);
}

Eigen::VectorXd G_theta_derivative_unit(const EstimatingProblem& problem,
                                        const Eigen::VectorXd& theta,
                                        std::span<const Eigen::VectorXd> dirs) {
  const std::vector<double> coeffs(problem.n_terms() + 1,
                                   1.0 / static_cast<double>(problem.n_terms()));
  return weighted_term_derivative(problem, theta, coeffs, dirs);
}

Eigen::VectorXd G_weight_derivative(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                                    const Eigen::VectorXd& delta,
                                    std::span<const Eigen::VectorXd> dirs) {
  if (static_cast<std::size_t>(delta.size()) != problem.n_terms()) {
    throw ModelError("weight displacement has length " + std::to_string(delta.size()) +
                     ", expected " + std::to_string(problem.n_terms()));
  }
  const double inv_n = 1.0 / static_cast<double>(problem.n_terms());
  std::vector<double> coeffs(problem.n_terms() + 1, 0.0);
  for (std::size_t n = 1; n <= problem.n_terms(); ++n) {
    coeffs[n] = delta(static_cast<Eigen::Index>(n - 1)) * inv_n;
  }
  return weighted_term_derivative(problem, theta, coeffs, dirs);
}

namespace {

Eigen::MatrixXd jacobian_from_coeffs(const EstimatingProblem& problem,
                                     const Eigen::VectorXd& theta,
                                     std::span<const double> coeffs) {
  const auto dim = static_cast<Eigen::Index>(problem.dim());
  Eigen::MatrixXd h(dim, dim);
  DirectionBundle basis(1, Eigen::VectorXd::Zero(dim));
  for (Eigen::Index j = 0; j < dim; ++j) {
    basis[0].setZero();
    basis[0](j) = 1.0;
    h.col(j) = weighted_term_derivative(problem, theta, coeffs, basis);
  }
  return h;
}

}  // namespace

Eigen::MatrixXd G_jacobian(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                           const WeightVector& w) {
  if (w.size() != problem.n_terms()) {
    throw ModelError("weight vector has length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(problem.n_terms()));
  }
  const double inv_n = 1.0 / static_cast<double>(problem.n_terms());
  std::vector<double> coeffs(problem.n_terms() + 1);
  coeffs[0] = inv_n;
  for (std::size_t n = 1; n <= problem.n_terms(); ++n) {
    coeffs[n] = w.values()(static_cast<Eigen::Index>(n - 1)) * inv_n;
  }
  return jacobian_from_coeffs(problem, theta, coeffs);
}

Eigen::MatrixXd G_jacobian_unit(const EstimatingProblem& problem, const Eigen::VectorXd& theta) {
  const std::vector<double> coeffs(problem.n_terms() + 1,
                                   1.0 / static_cast<double>(problem.n_terms()));
  return jacobian_from_coeffs(problem, theta, coeffs);
}

ArrayNorms DerivativeArray::norms() const {
  ArrayNorms out;
  double sq = 0.0;
  for (const auto& e : entries_) {
    out.l1 += e.multiplicity * e.values.lpNorm<1>();
    sq += e.multiplicity * e.values.squaredNorm();
    if (e.values.size() > 0) out.linf = std::max(out.linf, e.values.lpNorm<Eigen::Infinity>());
  }
  out.l2 = std::sqrt(sq);
  return out;
}

DerivativeArray DerivativeArray::combine(std::span<const DerivativeArray> arrays,
                                         std::span<const double> coeffs) {
  if (arrays.empty()) return {};
  std::vector<Entry> entries = arrays.front().entries();
  for (auto& e : entries) e.values.setZero();
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    const auto& src = arrays[i].entries();
    for (std::size_t m = 0; m < entries.size(); ++m) entries[m].values += coeffs[i] * src[m].values;
  }
  return DerivativeArray(std::move(entries));
}

std::vector<std::pair<std::vector<Eigen::Index>, double>> symmetric_multi_indices(std::size_t dim,
                                                                                   int k) {
  std::vector<std::pair<std::vector<Eigen::Index>, double>> out;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k), 0);
  double k_fact = 1.0;
  for (int i = 2; i <= k; ++i) k_fact *= i;
  while (true) {
    // multiplicity = k! / prod(count_i!)
    double denom = 1.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= idx.size(); ++i) {
      if (i < idx.size() && idx[i] == idx[i - 1]) {
        ++run;
        denom *= static_cast<double>(run);
      } else {
        run = 1;
      }
    }
    out.emplace_back(idx, k_fact / denom);
    // Next nondecreasing sequence.
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == static_cast<Eigen::Index>(dim) - 1) {
      --pos;
    }
    if (pos < 0) break;
    const Eigen::Index next = idx[static_cast<std::size_t>(pos)] + 1;
    for (auto i = static_cast<std::size_t>(pos); i < idx.size(); ++i) idx[i] = next;
  }
  return out;
}

namespace {

template <int L>
std::vector<DerivativeArray> arrays_impl(const EstimatingProblem& problem,
                                         const Eigen::VectorXd& theta) {
  const std::size_t dim = problem.dim();
  const std::size_t terms = problem.n_terms() + 1;
  const auto layout = symmetric_multi_indices(dim, L);
  std::vector<std::vector<DerivativeArray::Entry>> entries(terms);
  for (auto& e : entries) e.reserve(layout.size());
  std::vector<Nested<L>> x(dim);
  std::vector<Nested<L>> y(dim);
  DirectionBundle dirs(static_cast<std::size_t>(L),
                       Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
  for (const auto& [mi, mult] : layout) {
    for (std::size_t j = 0; j < mi.size(); ++j) {
      dirs[j].setZero();
      dirs[j](mi[j]) = 1.0;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = detail::seed<L>(theta(static_cast<Eigen::Index>(i)), dirs,
                             static_cast<Eigen::Index>(i));
    }
    for (std::size_t n = 0; n < terms; ++n) {
      problem.term<Nested<L>>(n, x, y);
      Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
      for (std::size_t j = 0; j < dim; ++j) {
        if (!is_finite(y[j])) {
          throw NonFiniteError("non-finite derivative of term " + std::to_string(n));
        }
        v(static_cast<Eigen::Index>(j)) = detail::top_coefficient<L>(y[j]);
      }
      entries[n].push_back({mult, std::move(v)});
    }
  }
  std::vector<DerivativeArray> out;
  out.reserve(terms);
  for (auto& e : entries) out.emplace_back(std::move(e));
  return out;
}

}  // namespace

std::vector<DerivativeArray> term_derivative_arrays(const EstimatingProblem& problem,
                                                    const Eigen::VectorXd& theta, int k) {
  check_theta(problem, theta);
  return detail::dispatch_order(
      k, [&](auto order) { return arrays_impl<decltype(order)::value>(problem, theta); });
}

}  // namespace hoij
