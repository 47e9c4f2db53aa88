#include "hoij/expansion.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hoij/ad.hpp"
#include "hoij/error.hpp"

namespace hoij {

double SolveConfig::resolved_tol(std::size_t dim) const {
  return tol_grad > 0.0 ? tol_grad : 1e-10 * std::sqrt(static_cast<double>(dim));
}

void SolveConfig::validate() const {
  if (max_iter < 1) throw SolverError("max_iter must be at least 1", {});
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw SolverError("backtrack must lie in (0, 1)", {});
  if (!(armijo >= 0.0 && armijo < 1.0)) throw SolverError("armijo must lie in [0, 1)", {});
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

double residual_norm(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                     const WeightVector& w) {
  try {
    return evaluate_G(problem, theta, w).norm();
  } catch (const NonFiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

Eigen::VectorXd newton_step(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                            const WeightVector& w, const Eigen::VectorXd& g) {
  const Eigen::MatrixXd h = G_jacobian(problem, theta, w);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(h);
  const double rc = lu.rcond();
  if (!(rc >= kMinReciprocalCondition)) {
    throw SingularMatrixError("H(theta, w) is numerically singular (rcond " + std::to_string(rc) +
                              ") at iterate " + format_vector(theta));
  }
  Eigen::VectorXd step = -lu.solve(g);
  if (!step.allFinite()) {
    throw SingularMatrixError("Newton step is not finite at iterate " + format_vector(theta));
  }
  return step;
}

}  // namespace

SolveResult solve_base(const EstimatingProblem& problem, const WeightVector& w,
                       const SolveConfig& config) {
  config.validate();
  const auto dim = static_cast<Eigen::Index>(problem.dim());
  Eigen::VectorXd theta = config.warm_start ? *config.warm_start : Eigen::VectorXd::Zero(dim);
  if (theta.size() != dim) throw ModelError("warm start has the wrong dimension");
  const double tol = config.resolved_tol(problem.dim());

  for (int iter = 0; iter <= config.max_iter; ++iter) {
    Eigen::VectorXd g = evaluate_G(problem, theta, w);
    double gnorm = g.norm();
    if (gnorm <= tol) {
      for (int p = 0; p < config.polish_steps && gnorm > 0.0; ++p) {
        const Eigen::VectorXd cand = theta + newton_step(problem, theta, w, g);
        const double cnorm = residual_norm(problem, cand, w);
        if (!(cnorm < gnorm)) break;
        theta = cand;
        g = evaluate_G(problem, theta, w);
        gnorm = g.norm();
      }
      return {theta, gnorm, iter};
    }
    if (iter == config.max_iter) break;

    const Eigen::VectorXd step = newton_step(problem, theta, w, g);
    double t = 1.0;
    bool accepted = false;
    for (int b = 0; b <= config.max_backtracks; ++b) {
      const Eigen::VectorXd cand = theta + t * step;
      if (residual_norm(problem, cand, w) <= (1.0 - config.armijo * t) * gnorm) {
        theta = cand;
        accepted = true;
        break;
      }
      t *= config.backtrack;
    }
    if (!accepted) {
      throw SolverError("line search stalled with ||G|| = " + std::to_string(gnorm) +
                            " at iterate " + format_vector(theta),
                        to_std(theta));
    }
  }
  throw SolverError("no root within " + std::to_string(config.max_iter) +
                        " Newton iterations; last iterate " + format_vector(theta),
                    to_std(theta));
}

SolveResult exact_refit(const EstimatingProblem& problem, const WeightVector& w,
                        const Eigen::VectorXd& theta_hat, SolveConfig config) {
  if (!config.warm_start) config.warm_start = theta_hat;
  return solve_base(problem, w, config);
}

namespace {
std::atomic<std::size_t> g_factorizations{0};
}

HessianFactor::HessianFactor(Eigen::MatrixXd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw SingularMatrixError("Hessian must be a nonempty square matrix");
  }
  if (!matrix_.allFinite()) throw NonFiniteError("Hessian has non-finite entries");
  lu_.compute(matrix_);
  ++g_factorizations;
  rcond_ = lu_.rcond();
  if (!(rcond_ >= kMinReciprocalCondition)) {
    throw SingularMatrixError(
        "H-hat is numerically singular (reciprocal condition " + std::to_string(rcond_) +
        " < 1e-12); the expansion needs H(theta, 1_N) strongly positive definite near theta-hat");
  }
}

HessianFactor::HessianFactor(const HessianFactor& other)
    : matrix_(other.matrix_), lu_(other.lu_), rcond_(other.rcond_) {}

Eigen::VectorXd HessianFactor::solve(const Eigen::VectorXd& b) const {
  ++solves_;
  return lu_.solve(b);
}

Eigen::MatrixXd HessianFactor::solve(const Eigen::MatrixXd& b) const {
  ++solves_;
  return lu_.solve(b);
}

std::size_t HessianFactor::factorization_count() { return g_factorizations.load(); }

HessianFactor factorize_hessian(const EstimatingProblem& problem,
                                const Eigen::VectorXd& theta_hat) {
  return HessianFactor(G_jacobian_unit(problem, theta_hat));
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Eigen::VectorXd TaylorExpansion::partial_sum(int k) const {
  if (k < 0 || k > order()) {
    throw OrderError("partial sum order " + std::to_string(k) + " outside [0, " +
                     std::to_string(order()) + "]");
  }
  Eigen::VectorXd t = theta_hat;
  for (int j = 1; j <= k; ++j) t += dthetas[static_cast<std::size_t>(j - 1)] / factorial(j);
  return t;
}

Eigen::VectorXd evaluate_term(const EstimatingProblem& problem, const DerivativeTerm& term,
                              std::span<const Eigen::VectorXd> dset,
                              const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& delta) {
  DirectionBundle dirs;
  dirs.reserve(term.kset.size());
  for (int j : term.kset) {
    if (j < 1 || static_cast<std::size_t>(j) > dset.size()) {
      throw OrderError("term " + term.to_string() + " needs dtheta^" + std::to_string(j) +
                       ", which has not been computed");
    }
    dirs.push_back(dset[static_cast<std::size_t>(j - 1)]);
  }
  if (term.omega == 1) {
    if ((delta.array() == 0.0).all()) return Eigen::VectorXd::Zero(theta_hat.size());
    return G_weight_derivative(problem, theta_hat, delta, dirs);
  }
  return G_theta_derivative_unit(problem, theta_hat, dirs);
}

Eigen::VectorXd evaluate_dtheta(const EstimatingProblem& problem, int k,
                                const Eigen::VectorXd& theta_hat, const HessianFactor& hfac,
                                std::span<const DerivativeTerm> terms,
                                std::span<const Eigen::VectorXd> dset,
                                const Eigen::VectorXd& delta) {
  if (k < 1) throw OrderError("dtheta order must be at least 1");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(theta_hat.size());
  for (const auto& t : terms) {
    d += static_cast<double>(t.coeff) * evaluate_term(problem, t, dset, theta_hat, delta);
  }
  if ((d.array() == 0.0).all()) return d;
  return -hfac.solve(d);
}

TaylorExpansion evaluate_theta_ij(const EstimatingProblem& problem, int order,
                                  const Eigen::VectorXd& theta_hat, const HessianFactor& hfac,
                                  const TermTable& table, const Eigen::VectorXd& delta) {
  if (order < 0 || order > kMaxExpansionOrder) {
    throw OrderError("expansion order " + std::to_string(order) + " outside [0, " +
                     std::to_string(kMaxExpansionOrder) + "]");
  }
  if (order > table.max_order()) {
    throw OrderError("term table only reaches order " + std::to_string(table.max_order()));
  }
  TaylorExpansion out{theta_hat, {}};
  out.dthetas.reserve(static_cast<std::size_t>(order));
  for (int k = 1; k <= order; ++k) {
    out.dthetas.push_back(
        evaluate_dtheta(problem, k, theta_hat, hfac, table.order(k), out.dthetas, delta));
  }
  return out;
}

BaseFit::BaseFit(EstimatingProblem problem, const SolveConfig& config)
    : problem_(std::move(problem)), config_(config) {
  solve_ = solve_base(problem_, WeightVector::ones(problem_.n_terms()), config_);
  hfac_ = std::make_unique<HessianFactor>(factorize_hessian(problem_, solve_.theta));
}

TaylorExpansion BaseFit::expand(const WeightVector& w, int order) const {
  if (w.size() != problem_.n_terms()) {
    throw ModelError("weight vector has length " + std::to_string(w.size()) + ", expected " +
                     std::to_string(problem_.n_terms()));
  }
  return evaluate_theta_ij(problem_, order, solve_.theta, *hfac_, shared_term_table(), w.delta());
}

SolveResult BaseFit::refit(const WeightVector& w) const {
  SolveConfig cfg = config_;
  cfg.warm_start = solve_.theta;
  return solve_base(problem_, w, cfg);
}

}  // namespace hoij
