#include "hoij/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hoij/ad.hpp"
#include "hoij/error.hpp"
#include "hoij/linalg.hpp"
#include "hoij/parallel.hpp"
#include "hoij/terms.hpp"

namespace hoij {

std::vector<Eigen::VectorXd> DomainSampler::points() const {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw ConditionError("sampler radius must be finite and non-negative");
  }
  std::vector<Eigen::VectorXd> out{center};
  if (radius == 0.0) return out;
  const Eigen::Index dim = center.size();
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (double s : {1.0, -1.0}) {
      Eigen::VectorXd p = center;
      p(i) += s * radius;
      out.push_back(std::move(p));
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Eigen::VectorXd dir(dim);
    double nrm = 0.0;
    do {
      for (Eigen::Index i = 0; i < dim; ++i) dir(i) = normal(rng);
      nrm = dir.norm();
    } while (nrm == 0.0);
    const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    out.push_back(center + (r / nrm) * dir);
  }
  return out;
}

namespace {

std::string format_point(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

struct SampleStats {
  double inv_norm = 0.0;
  std::vector<double> m, m_tri, dmax, v, t;

  explicit SampleStats(std::size_t orders)
      : m(orders, 0.0), m_tri(orders, 0.0), dmax(orders, 0.0), v(orders, 0.0), t(orders, 0.0) {}

  void merge(const SampleStats& o) {
    inv_norm = std::max(inv_norm, o.inv_norm);
    for (std::size_t k = 0; k < m.size(); ++k) {
      m[k] = std::max(m[k], o.m[k]);
      m_tri[k] = std::max(m_tri[k], o.m_tri[k]);
      dmax[k] = std::max(dmax[k], o.dmax[k]);
      v[k] = std::max(v[k], o.v[k]);
      t[k] = std::max(t[k], o.t[k]);
    }
  }
};

SampleStats sample_stats(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                         int kmax) {
  SampleStats s(static_cast<std::size_t>(kmax + 1));
  const double inv = inverse_operator_norm(G_jacobian_unit(problem, theta));
  if (!std::isfinite(inv)) {
    throw SingularMatrixError("H(theta, 1_N) is singular at sampled theta " + format_point(theta));
  }
  s.inv_norm = inv;
  const double n = static_cast<double>(problem.n_terms());
  for (int k = 0; k <= kmax; ++k) {
    const auto arrays = term_derivative_arrays(problem, theta, k);
    const std::vector<double> coeffs(arrays.size(), 1.0 / n);
    const auto ku = static_cast<std::size_t>(k);
    s.m[ku] = DerivativeArray::combine(arrays, coeffs).norms().l2;
    double tri = 0.0;
    double vsum = 0.0;
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      const ArrayNorms a = arrays[i].norms();
      tri += a.l2;
      if (i == 0) continue;
      s.dmax[ku] = std::max(s.dmax[ku], a.l2);
      vsum += a.l2 * a.l2;
      s.t[ku] = std::max(s.t[ku], a.linf);
    }
    s.m_tri[ku] = tri / n;
    s.v[ku] = vsum / n;
  }
  return s;
}

SampleStats collect_stats(const EstimatingProblem& problem, const std::vector<Eigen::VectorXd>& pts,
                          int kmax, std::size_t workers) {
  std::vector<SampleStats> per(pts.size(), SampleStats(static_cast<std::size_t>(kmax + 1)));
  parallel_for(pts.size(), workers,
               [&](std::size_t i) { per[i] = sample_stats(problem, pts[i], kmax); });
  SampleStats total(static_cast<std::size_t>(kmax + 1));
  for (const auto& s : per) total.merge(s);
  return total;
}

void check_order(int order) {
  if (order < 0 || order > kMaxExpansionOrder) {
    throw OrderError("expansion order " + std::to_string(order) + " outside [0, " +
                     std::to_string(kMaxExpansionOrder) + "]");
  }
}

void check_sampler(const EstimatingProblem& problem, const DomainSampler& sampler) {
  if (static_cast<std::size_t>(sampler.center.size()) != problem.dim()) {
    throw ModelError("sampler center has length " + std::to_string(sampler.center.size()) +
                     ", expected " + std::to_string(problem.dim()));
  }
}

}  // namespace

BoundConstants estimate_constants(const EstimatingProblem& problem, const DomainSampler& sampler,
                                  int order, const ConstantsOptions& options) {
  check_order(order);
  check_sampler(problem, sampler);
  if (!(options.epsilon >= 0.0)) throw ConditionError("epsilon must be non-negative");
  const int kmax = std::max(order + 1, 3);
  const auto pts = sampler.points();
  const SampleStats s = collect_stats(problem, pts, kmax, options.workers);
  const double n = static_cast<double>(problem.n_terms());

  BoundConstants c;
  c.order = order;
  c.c_op = s.inv_norm;
  c.m = s.m;
  c.m_triangle = s.m_tri;
  c.v = s.v;
  c.t = s.t;
  c.l_h = c.m[2];
  c.l_h_m3 = c.m[3];
  c.epsilon = options.epsilon;
  for (int k = 0; k <= kmax; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    c.delta.push_back(s.dmax[ku] / n + options.epsilon * c.m[ku]);
    c.delta_variance.push_back(std::sqrt(s.v[ku] / n));
    c.delta_uniform.push_back(s.t[ku] / n);
  }
  c.delta_max = *std::max_element(c.delta.begin(), c.delta.begin() + order + 2);
  c.radius = sampler.radius;
  c.n_points = pts.size();
  const ConditionCheck cc = check_condition(c, options.rho);
  c.rho = options.rho;
  c.c_set = cc.c_set;
  c.c_tilde_op = cc.c_tilde_op;
  c.condition_satisfied = cc.satisfied;
  return c;
}

DeltaEstimates loo_delta(const EstimatingProblem& problem, const DomainSampler& sampler, int order,
                         double epsilon) {
  ConstantsOptions opts;
  opts.epsilon = epsilon;
  const BoundConstants c = estimate_constants(problem, sampler, order, opts);
  const auto len = static_cast<std::ptrdiff_t>(order + 2);
  return {{c.delta.begin(), c.delta.begin() + len},
          {c.delta_variance.begin(), c.delta_variance.begin() + len},
          {c.delta_uniform.begin(), c.delta_uniform.begin() + len}};
}

std::vector<double> empirical_delta(const EstimatingProblem& problem, const DomainSampler& sampler,
                                    int order, const std::vector<LabeledWeights>& weights) {
  check_order(order);
  check_sampler(problem, sampler);
  const double n = static_cast<double>(problem.n_terms());
  std::vector<double> out(static_cast<std::size_t>(order + 2), 0.0);
  for (const auto& theta : sampler.points()) {
    for (int k = 0; k <= order + 1; ++k) {
      const auto arrays = term_derivative_arrays(problem, theta, k);
      std::vector<double> coeffs(arrays.size(), 0.0);
      for (const auto& lw : weights) {
        if (lw.weights.size() != problem.n_terms()) {
          throw ModelError("weight vector '" + lw.label + "' has the wrong length");
        }
        const Eigen::VectorXd& d = lw.weights.delta();
        for (std::size_t i = 1; i < arrays.size(); ++i) {
          coeffs[i] = d(static_cast<Eigen::Index>(i - 1)) / n;
        }
        const double v = DerivativeArray::combine(arrays, coeffs).norms().l2;
        auto& slot = out[static_cast<std::size_t>(k)];
        slot = std::max(slot, v);
      }
    }
  }
  return out;
}

ConditionCheck check_condition(const BoundConstants& constants, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ConditionError("rho must lie strictly inside (0, 1), got " + std::to_string(rho));
  }
  if (constants.delta.size() < 2) throw ConditionError("constants lack delta_0 and delta_1");
  ConditionCheck out;
  out.c_set = constants.c_op * constants.delta[1] +
              constants.c_op * constants.c_op * constants.l_h * constants.delta[0];
  out.c_tilde_op = perturbed_inverse_bound(constants.c_op, rho);
  out.satisfied = out.c_set <= rho;
  return out;
}

std::vector<double> derivative_norm_bounds(const BoundConstants& constants, int order) {
  check_order(order);
  if (!constants.condition_satisfied) {
    std::ostringstream os;
    os << "condition fails: C_set = " << constants.c_set << " > rho = " << constants.rho
       << " (C_op = " << constants.c_op << ", delta_0 = " << constants.delta[0]
       << ", delta_1 = " << constants.delta[1] << ", L_H = " << constants.l_h << ")";
    throw ConditionError(os.str());
  }
  const auto need = static_cast<std::size_t>(order + 2);
  if (constants.delta.size() < need || constants.m.size() < need) {
    throw OrderError("constants were estimated for a lower order than " + std::to_string(order));
  }
  const TermTable& table = shared_term_table();
  std::vector<double> b;
  for (int k = 1; k <= order + 1; ++k) {
    double sum = 0.0;
    for (const auto& term : table.order(k)) {
      const std::size_t s = term.kset.size();
      double prod = 1.0;
      for (int j : term.kset) prod *= b[static_cast<std::size_t>(j - 1)];
      const double g = constants.delta[s] + (term.omega == 0 ? constants.m[s] : 0.0);
      sum += static_cast<double>(term.coeff) * g * prod;
    }
    b.push_back(constants.c_tilde_op * sum);
  }
  return b;
}

double taylor_error_bound(int order, const std::vector<double>& b) {
  if (order < 0 || static_cast<std::size_t>(order) >= b.size()) {
    throw OrderError("taylor_error_bound(" + std::to_string(order) + ") needs B_" +
                     std::to_string(order + 1));
  }
  return b[static_cast<std::size_t>(order)] / factorial(order);
}

SegmentCheck hessian_inverse_norm_check(const EstimatingProblem& problem,
                                        const Eigen::VectorXd& theta_hat, const WeightVector& w,
                                        double c_tilde_op, std::size_t n_points,
                                        const SolveConfig& config) {
  if (n_points < 2) throw ConditionError("segment check needs at least two points");
  SegmentCheck out;
  Eigen::VectorXd start = theta_hat;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_points - 1);
    const WeightVector wt(Eigen::VectorXd::Ones(w.values().size()) + t * w.delta());
    SolveConfig cfg = config;
    cfg.warm_start = start;
    const SolveResult r = solve_base(problem, wt, cfg);
    start = r.theta;
    const double inv = inverse_operator_norm(G_jacobian(problem, r.theta, wt));
    const SegmentPoint p{t, inv};
    out.points.push_back(p);
    out.max_inverse_norm = std::max(out.max_inverse_norm, inv);
    if (!(inv <= c_tilde_op)) {
      out.ok = false;
      out.violations.push_back(p);
    }
  }
  return out;
}

double default_radius(const EstimatingProblem& problem, const Eigen::VectorXd& theta_hat) {
  DomainSampler s{theta_hat, 0.0, 0, 0};
  const BoundConstants c = estimate_constants(problem, s, 0);
  return 2.0 * c.c_op * c.delta[0];
}

BoundsSummary compute_bounds(const EstimatingProblem& problem, const DomainSampler& sampler,
                             int order, const ConstantsOptions& options) {
  BoundsSummary out;
  out.constants = estimate_constants(problem, sampler, order, options);
  out.zeroth_order_bound = out.constants.c_op * out.constants.delta[0];
  if (!out.constants.condition_satisfied) {
    try {
      derivative_norm_bounds(out.constants, order);
    } catch (const ConditionError& e) {
      out.diagnostic = e.what();
    }
    return out;
  }
  out.b = derivative_norm_bounds(out.constants, order);
  for (int k = 0; k <= order; ++k) out.error_bound.push_back(taylor_error_bound(k, out.b));
  return out;
}

}  // namespace hoij
