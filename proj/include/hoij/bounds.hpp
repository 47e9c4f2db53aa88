#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hoij/expansion.hpp"
#include "hoij/problem.hpp"
#include "hoij/weights.hpp"

namespace hoij {

// Finite stand-in for a supremum over the parameter domain: the center, the
// 2D axis points center +- radius e_i, and n_samples uniform draws from the
// ball of the given radius. Radius 0 yields the center only.
struct DomainSampler {
  Eigen::VectorXd center;
  double radius = 0.0;
  std::size_t n_samples = 256;
  std::uint64_t seed = 0;

  std::vector<Eigen::VectorXd> points() const;
};

inline constexpr double kDefaultRho = 0.5;

struct ConstantsOptions {
  double rho = kDefaultRho;
  // Adds epsilon * M_k to every delta_k when positive.
  double epsilon = 0.0;
  // Threads used over domain samples; results do not depend on it.
  std::size_t workers = 1;
};

// All entries are maxima over the sampled points ("sampled sup").
struct BoundConstants {
  int order = 0;  // K; per-k vectors run over k = 0..max(K + 1, 3)
  double c_op = 0.0;
  double l_h = 0.0;     // M_2
  double l_h_m3 = 0.0;  // M_3, reported alongside
  std::vector<double> m;              // ||G^(k)(theta, 1_N)||_2, full array
  std::vector<double> m_triangle;     // (1/N) sum_{n=0}^N ||g_n^(k)||_2
  std::vector<double> delta;          // LOO: (1/N) max_n ||g_n^(k)||_2 (+ epsilon M_k)
  std::vector<double> delta_variance; // sqrt(V_k / N)
  std::vector<double> delta_uniform;  // T_k / N
  std::vector<double> v;              // (1/N) sum_{n>=1} ||g_n^(k)||_2^2
  std::vector<double> t;              // max_n ||g_n^(k)||_inf
  double delta_max = 0.0;
  double epsilon = 0.0;
  double rho = kDefaultRho;
  double c_set = 0.0;
  double c_tilde_op = 0.0;
  bool condition_satisfied = false;
  double radius = 0.0;
  std::size_t n_points = 0;
  std::string sup_label = "sampled sup";
};

// C_op, M_k, V_k, T_k and the LOO delta_k over the sampled domain.
// Throws SingularMatrixError naming the sample where H(theta, 1_N) is singular.
BoundConstants estimate_constants(const EstimatingProblem& problem, const DomainSampler& sampler,
                                  int order, const ConstantsOptions& options = {});

// LOO set complexities: exact maxima and the two analytic alternatives.
struct DeltaEstimates {
  std::vector<double> exact;
  std::vector<double> variance;
  std::vector<double> uniform;
};
DeltaEstimates loo_delta(const EstimatingProblem& problem, const DomainSampler& sampler, int order,
                         double epsilon = 0.0);

// max over the given weights and sampled theta of
// ||G^(k)(theta, w) - G^(k)(theta, 1_N)||_2. A heuristic for weights such as
// bootstrap draws, for which no analytic control is available.
std::vector<double> empirical_delta(const EstimatingProblem& problem, const DomainSampler& sampler,
                                    int order, const std::vector<LabeledWeights>& weights);

struct ConditionCheck {
  bool satisfied = false;
  double c_set = 0.0;
  double c_tilde_op = 0.0;
};

// C_set = C_op delta_1 + C_op^2 L_H delta_0 <= rho. Throws ConditionError
// unless 0 < rho < 1.
ConditionCheck check_condition(const BoundConstants& constants, double rho);

// B_1..B_{K+1} (element k - 1 holds B_k) with
//   B_k = C~_op sum_{(a, K, omega) in Theta_k} a (delta_|K| + (1 - omega) M_|K|) prod_{j in K} B_j.
// Throws ConditionError when the condition does not hold.
std::vector<double> derivative_norm_bounds(const BoundConstants& constants, int order);

// B_{K+1} / K!, a bound on ||theta_IJ^K - theta-hat(w)||_2.
double taylor_error_bound(int order, const std::vector<double>& b);

struct SegmentPoint {
  double t = 0.0;
  double inverse_norm = 0.0;
};

struct SegmentCheck {
  bool ok = true;
  double max_inverse_norm = 0.0;
  std::vector<SegmentPoint> points;
  std::vector<SegmentPoint> violations;
};

// Solves theta-hat(w~) for w~ = 1_N + t (w - 1_N) on `n_points` evenly spaced t
// in [0, 1] and checks ||H(theta-hat(w~), w~)^{-1}||_op <= c_tilde_op.
SegmentCheck hessian_inverse_norm_check(const EstimatingProblem& problem,
                                        const Eigen::VectorXd& theta_hat, const WeightVector& w,
                                        double c_tilde_op, std::size_t n_points = 5,
                                        const SolveConfig& config = {});

// 2 C_op delta_0 from radius-0 constants at theta_hat.
double default_radius(const EstimatingProblem& problem, const Eigen::VectorXd& theta_hat);

struct BoundsSummary {
  BoundConstants constants;
  std::vector<double> b;                  // B_1..B_{K+1}; empty when the condition fails
  std::vector<double> error_bound;        // taylor_error_bound(k) for k = 0..K
  double zeroth_order_bound = 0.0;        // C_op delta_0
  std::optional<std::string> diagnostic;  // set when the condition fails
};

BoundsSummary compute_bounds(const EstimatingProblem& problem, const DomainSampler& sampler,
                             int order, const ConstantsOptions& options = {});

}  // namespace hoij
