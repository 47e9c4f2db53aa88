#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "hoij/problem.hpp"
#include "hoij/terms.hpp"

namespace hoij {

struct SolveConfig {
  // Stopping tolerance on ||G(theta, w)||_2; <= 0 selects 1e-10 * sqrt(D).
  double tol_grad = 0.0;
  int max_iter = 100;
  // Backtracking on ||G||_2: accept step t when ||G(theta + t p)|| <= (1 - armijo t) ||G||.
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
  // Extra full Newton steps after convergence, kept only if they reduce ||G||.
  int polish_steps = 1;
  std::optional<Eigen::VectorXd> warm_start;

  double resolved_tol(std::size_t dim) const;
  void validate() const;
};

struct SolveResult {
  Eigen::VectorXd theta;
  double grad_norm = 0.0;
  int iterations = 0;
};

// Damped Newton on G(theta, w) = 0. Throws SolverError when max_iter is
// exceeded or the line search stalls, and SingularMatrixError (with the
// iterate in the message) when H(theta, w) cannot be factorized.
SolveResult solve_base(const EstimatingProblem& problem, const WeightVector& w,
                       const SolveConfig& config = {});

// Same as solve_base, started from theta_hat unless config already has a warm start.
SolveResult exact_refit(const EstimatingProblem& problem, const WeightVector& w,
                        const Eigen::VectorXd& theta_hat, SolveConfig config = {});

// Reciprocal condition number below which H-hat is rejected.
inline constexpr double kMinReciprocalCondition = 1e-12;

// LU factorization (partial pivoting) of H-hat, reused for every solve.
class HessianFactor {
 public:
  // Throws SingularMatrixError when the reciprocal condition estimate is
  // below kMinReciprocalCondition.
  explicit HessianFactor(Eigen::MatrixXd matrix);

  HessianFactor(const HessianFactor& other);
  HessianFactor& operator=(const HessianFactor&) = delete;

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double rcond() const { return rcond_; }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // H^{-1} B for a matrix right-hand side.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

  std::size_t solve_count() const { return solves_.load(); }
  // Number of factorizations performed by all HessianFactor objects.
  static std::size_t factorization_count();

 private:
  Eigen::MatrixXd matrix_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  double rcond_ = 0.0;
  mutable std::atomic<std::size_t> solves_{0};
};

// H-hat = G^(1)(theta_hat, 1_N) assembled by forward mode, then factorized.
HessianFactor factorize_hessian(const EstimatingProblem& problem, const Eigen::VectorXd& theta_hat);

struct TaylorExpansion {
  Eigen::VectorXd theta_hat;
  std::vector<Eigen::VectorXd> dthetas;  // dtheta^1(1_N) .. dtheta^K(1_N)

  int order() const { return static_cast<int>(dthetas.size()); }
  // theta_hat + sum_{j <= k} dtheta^j / j!; k = 0 gives theta_hat.
  Eigen::VectorXd partial_sum(int k) const;
};

// T(K, omega, 1_N) without its coefficient. `dset[j-1]` holds dtheta^j.
Eigen::VectorXd evaluate_term(const EstimatingProblem& problem, const DerivativeTerm& term,
                              std::span<const Eigen::VectorXd> dset,
                              const Eigen::VectorXd& theta_hat, const Eigen::VectorXd& delta);

// -H^{-1} sum_i a_i T(K_i, omega_i, 1_N) over Theta_k.
Eigen::VectorXd evaluate_dtheta(const EstimatingProblem& problem, int k,
                                const Eigen::VectorXd& theta_hat, const HessianFactor& hfac,
                                std::span<const DerivativeTerm> terms,
                                std::span<const Eigen::VectorXd> dset,
                                const Eigen::VectorXd& delta);

TaylorExpansion evaluate_theta_ij(const EstimatingProblem& problem, int order,
                                  const Eigen::VectorXd& theta_hat, const HessianFactor& hfac,
                                  const TermTable& table, const Eigen::VectorXd& delta);

// theta-hat, its factorized Hessian and the term table: everything an
// expansion needs, immutable once built and shareable across threads.
class BaseFit {
 public:
  BaseFit(EstimatingProblem problem, const SolveConfig& config = {});

  const EstimatingProblem& problem() const { return problem_; }
  const Eigen::VectorXd& theta_hat() const { return solve_.theta; }
  const SolveResult& solve_result() const { return solve_; }
  const HessianFactor& hessian() const { return *hfac_; }
  const SolveConfig& config() const { return config_; }

  TaylorExpansion expand(const WeightVector& w, int order) const;
  SolveResult refit(const WeightVector& w) const;

 private:
  EstimatingProblem problem_;
  SolveConfig config_;
  SolveResult solve_;
  std::unique_ptr<HessianFactor> hfac_;
};

// n! in floating point; exact for the supported orders.
double factorial(int n);

}  // namespace hoij
