#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hoij/bounds.hpp"
#include "hoij/dataset.hpp"
#include "hoij/error.hpp"
#include "hoij/expansion.hpp"
#include "hoij/models.hpp"
#include "hoij/report.hpp"
#include "hoij/resampling.hpp"
#include "hoij/terms.hpp"
#include "hoij/weights.hpp"

using namespace hoij;
using nlohmann::json;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> model_ids() {
  std::vector<std::string> ids;
  for (const auto& e : model_registry()) ids.push_back(e.model_id);
  return ids;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream os;
  os.precision(10);
  os << "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

EstimatingProblem load_problem(const RunConfig& cfg) {
  const ModelRegistryEntry& entry = find_model(cfg.model_id);
  LoadOptions lo;
  lo.format = cfg.data_format == "json" ? DataFormat::json : DataFormat::csv;
  lo.header = cfg.header;
  lo.has_response = entry.requires_response;
  const Dataset data = load_dataset(cfg.data_path, lo);
  ProblemOptions po;
  po.l2 = cfg.l2;
  return make_problem(cfg.model_id, data, po);
}

// Writes the JSON document to --out (and the CSV to --csv when given);
// without --out the document goes to stdout and the summary to stderr.
void emit(const RunConfig& cfg, const std::string& kind, json result, const std::string& summary,
          const std::string& csv = {}) {
  const std::string text = envelope(kind, cfg, std::move(result)).dump(2) + "\n";
  if (!cfg.csv.empty() && !csv.empty()) write_text(cfg.csv, csv);
  if (cfg.out.empty()) {
    std::cout << text;
    std::cerr << summary << "\n";
  } else {
    write_text(cfg.out, text);
    std::cout << summary << "\n";
  }
}

DomainSampler make_sampler(const RunConfig& cfg, const EstimatingProblem& problem,
                           const Eigen::VectorXd& theta_hat) {
  const double r = cfg.radius ? *cfg.radius : default_radius(problem, theta_hat);
  return DomainSampler{theta_hat, r, cfg.samples, cfg.seed};
}

ConstantsOptions constants_options(const RunConfig& cfg) {
  ConstantsOptions o;
  o.rho = cfg.rho;
  o.epsilon = cfg.epsilon_term ? cfg.epsilon : 0.0;
  o.workers = cfg.workers;
  return o;
}

WeightStream make_stream(const RunConfig& cfg, std::size_t n) {
  if (cfg.scheme == "loo") return loo_weights(n);
  if (cfg.scheme == "kfold") return kfold_weights(n, cfg.folds, cfg.seed);
  if (cfg.scheme == "kappa") return leave_kappa_out_weights(n, cfg.kappa, cfg.seed, cfg.draws);
  return bootstrap_weights(n, cfg.draws, cfg.seed);
}

int run_fit(RunConfig& cfg) {
  const BaseFit fit(load_problem(cfg));
  json r;
  r["model"] = cfg.model_id;
  r["theta_hat"] = vector_json(fit.theta_hat());
  r["grad_norm"] = fit.solve_result().grad_norm;
  r["iterations"] = fit.solve_result().iterations;
  r["hessian"] = matrix_json(fit.hessian().matrix());
  r["hessian_rcond"] = fit.hessian().rcond();
  emit(cfg, "fit", std::move(r),
       "fit " + cfg.model_id + ": theta_hat = " + format_vector(fit.theta_hat()) + " after " +
           std::to_string(fit.solve_result().iterations) + " Newton iterations");
  return 0;
}

int run_expand(RunConfig& cfg, const std::vector<std::size_t>& drop) {
  const BaseFit fit(load_problem(cfg));
  const std::size_t n = fit.problem().n_terms();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  for (std::size_t i : drop) {
    if (i >= n) throw DataError("--drop index " + std::to_string(i) + " outside [0, " + std::to_string(n) + ")");
    w(static_cast<Eigen::Index>(i)) = 0.0;
  }
  const TaylorExpansion ex = fit.expand(WeightVector(w), cfg.order);
  json r;
  r["theta_hat"] = vector_json(ex.theta_hat);
  r["dropped"] = drop;
  json d = json::array();
  json ps = json::array();
  for (const auto& v : ex.dthetas) d.push_back(vector_json(v));
  for (int k = 0; k <= cfg.order; ++k) ps.push_back(vector_json(ex.partial_sum(k)));
  r["dtheta"] = std::move(d);
  r["theta_ij"] = std::move(ps);
  emit(cfg, "expand", std::move(r),
       "expand order " + std::to_string(cfg.order) + ": theta_ij = " +
           format_vector(ex.partial_sum(cfg.order)));
  return 0;
}

int run_cv_command(RunConfig& cfg) {
  const BaseFit fit(load_problem(cfg));
  WeightStream stream = make_stream(cfg, fit.problem().n_terms());
  CvOptions opts;
  opts.order = cfg.order;
  opts.workers = cfg.workers;
  if (cfg.with_bounds) {
    opts.bounds_sampler = make_sampler(cfg, fit.problem(), fit.theta_hat());
    opts.bounds_options = constants_options(cfg);
  }
  const CvReport report = run_cv(fit, stream, opts);
  json r = cv_report_json(report, cfg.timings);
  if (cfg.check_segments) {
    if (!report.bounds || !report.bounds->constants.condition_satisfied) {
      throw ConditionError("--check-segments needs --with-bounds and a satisfied condition");
    }
    const double c_tilde = report.bounds->constants.c_tilde_op;
    WeightStream again = make_stream(cfg, fit.problem().n_terms());
    json checks = json::array();
    bool all_ok = true;
    while (auto lw = again.next()) {
      const SegmentCheck sc = hessian_inverse_norm_check(fit.problem(), fit.theta_hat(),
                                                         lw->weights, c_tilde, 5, fit.config());
      all_ok = all_ok && sc.ok;
      checks.push_back({{"id", lw->id}, {"ok", sc.ok}, {"max_inverse_norm", sc.max_inverse_norm}});
    }
    r["segment_checks"] = {{"ok", all_ok}, {"c_tilde_op", c_tilde}, {"weights", std::move(checks)}};
  }
  std::ostringstream summary;
  summary.precision(6);
  summary << "cv " << cfg.scheme << " on " << report.records.size() << " weights, order "
          << cfg.order << ": max error " << report.max_error.back() << " (" << report.failures
          << " refit failures)";
  emit(cfg, "cv", std::move(r), summary.str(), cv_report_csv(report));
  return 0;
}

int run_bootstrap(RunConfig& cfg) {
  const BaseFit fit(load_problem(cfg));
  const Eigen::MatrixXd sandwich =
      sandwich_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
  const Eigen::MatrixXd linear =
      ij_linear_covariance(fit.problem(), fit.theta_hat(), fit.hessian());
  const MonteCarloCovariance mc = bootstrap_covariance(fit, cfg.draws, cfg.seed, cfg.order);
  json r;
  r["theta_hat"] = vector_json(fit.theta_hat());
  r["sandwich_covariance"] = matrix_json(sandwich);
  r["sandwich_scaling"] = "H^-1 S H^-T, S = (1/N^2) sum_n (g_n - gbar)(g_n - gbar)'";
  r["ij_linear_covariance"] = matrix_json(linear);
  r["identity_max_abs_diff"] = (sandwich - linear).cwiseAbs().maxCoeff();
  r["monte_carlo"] = {{"order", cfg.order},
                      {"draws", mc.draws},
                      {"covariance", matrix_json(mc.covariance)},
                      {"standard_error", matrix_json(mc.standard_error)}};
  std::ostringstream summary;
  summary.precision(6);
  summary << "bootstrap: sandwich vs linear IJ max diff "
          << (sandwich - linear).cwiseAbs().maxCoeff() << ", " << mc.draws << " draws";
  emit(cfg, "bootstrap", std::move(r), summary.str());
  return 0;
}

int run_bounds(RunConfig& cfg) {
  const BaseFit fit(load_problem(cfg));
  const DomainSampler sampler = make_sampler(cfg, fit.problem(), fit.theta_hat());
  const BoundsSummary s = compute_bounds(fit.problem(), sampler, cfg.order, constants_options(cfg));
  std::ostringstream summary;
  summary.precision(6);
  summary << "bounds: C_op " << s.constants.c_op << ", C_set " << s.constants.c_set
          << (s.constants.condition_satisfied ? " <= " : " > ") << "rho " << cfg.rho;
  if (!s.error_bound.empty()) summary << ", error bound at K=" << cfg.order << " " << s.error_bound.back();
  emit(cfg, "bounds", bounds_json(s), summary.str());
  return 0;
}

int run_terms(RunConfig& cfg) {
  const TermTable& table = shared_term_table();
  const TableReport check = verify_table_invariants(table);
  if (!check.ok) throw OrderError("term table failed its invariants");
  std::size_t count = 0;
  for (int k = 1; k <= cfg.max_order; ++k) count += table.order(k).size();
  emit(cfg, "terms", term_table_json(table, cfg.max_order),
       "terms: " + std::to_string(count) + " terms through order " + std::to_string(cfg.max_order));
  return 0;
}

int run_scaling(RunConfig& cfg) {
  GeneratorConfig gen;
  gen.model_id = cfg.model_id;
  gen.dim = cfg.features;
  gen.noise = cfg.noise;
  const ScalingReport r = scaling_study(gen, cfg.n_grid, cfg.order, cfg.seed, cfg.workers);
  std::ostringstream summary;
  summary.precision(4);
  summary << "scaling " << cfg.model_id << ": slopes";
  for (std::size_t k = 0; k < r.slope.size(); ++k) summary << " k=" << k << ":" << r.slope[k];
  emit(cfg, "scaling", scaling_json(r), summary.str(), scaling_csv(r));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order infinitesimal jackknife for M-estimators"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::vector<std::size_t> drop;
  double radius = -1.0;

  const auto ids = model_ids();
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model_id, "Model id")->required()->check(CLI::IsMember(ids));
    sub->add_option("--data", cfg.data_path, "Data file")->required()->check(CLI::ExistingFile);
    sub->add_option("--format", cfg.data_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--header", cfg.header, "CSV has a header line");
    sub->add_option("--l2", cfg.l2, "Ridge penalty in g_0")->check(CLI::NonNegativeNumber);
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "JSON output path (stdout when omitted)");
    sub->add_option("--seed", cfg.seed, "Seed for all randomness");
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto add_order = [&](CLI::App* sub) {
    sub->add_option("--order", cfg.order, "Expansion order K")
        ->check(CLI::Range(0, kMaxExpansionOrder));
  };
  auto add_bounds = [&](CLI::App* sub) {
    sub->add_option("--rho", cfg.rho, "Condition level in (0, 1)")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
              double v = 0.0;
              try {
                v = std::stod(s);
              } catch (const std::exception&) {
                return "rho must be a number";
              }
              return (v > 0.0 && v < 1.0) ? "" : "rho must lie strictly inside (0, 1)";
            },
            "(0, 1)", "OPEN_UNIT_INTERVAL"));
    sub->add_option("--radius", radius, "Sampler radius (default 2 C_op delta_0)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--samples", cfg.samples, "Random domain samples");
    sub->add_flag("--epsilon-term", cfg.epsilon_term, "Add epsilon * M_k to delta_k");
    sub->add_option("--epsilon", cfg.epsilon, "Epsilon used with --epsilon-term")
        ->check(CLI::NonNegativeNumber);
  };

  auto* fit = app.add_subcommand("fit", "Solve G(theta, 1_N) = 0");
  add_data(fit);
  add_common(fit);

  auto* expand = app.add_subcommand("expand", "Taylor expansion for a weight vector");
  add_data(expand);
  add_common(expand);
  add_order(expand);
  expand->add_option("--drop", drop, "Zero-based indices given weight 0");

  auto* cv = app.add_subcommand("cv", "Approximate versus exact cross validation");
  add_data(cv);
  add_common(cv);
  add_order(cv);
  add_bounds(cv);
  cv->add_option("--scheme", cfg.scheme, "Weight scheme")
      ->check(CLI::IsMember({"loo", "kfold", "kappa", "bootstrap"}));
  cv->add_option("--folds", cfg.folds, "Folds for kfold")->check(CLI::PositiveNumber);
  cv->add_option("--kappa", cfg.kappa, "Points left out for kappa")->check(CLI::PositiveNumber);
  cv->add_option("--draws", cfg.draws, "Weight vectors for kappa and bootstrap")
      ->check(CLI::PositiveNumber);
  cv->add_flag("--with-bounds", cfg.with_bounds, "Attach error bounds");
  cv->add_flag("--check-segments", cfg.check_segments,
               "Check the inverse Hessian bound along each weight segment");
  cv->add_option("--csv", cfg.csv, "CSV output path");
  cv->add_flag("--timings", cfg.timings, "Include per-weight runtimes");

  auto* boot = app.add_subcommand("bootstrap", "Sandwich and bootstrap covariance");
  add_data(boot);
  add_common(boot);
  add_order(boot);
  boot->add_option("--draws", cfg.draws, "Bootstrap draws")->check(CLI::Range(2, 100000000));

  auto* bounds = app.add_subcommand("bounds", "Constants and finite-sample error bounds");
  add_data(bounds);
  add_common(bounds);
  add_order(bounds);
  add_bounds(bounds);

  auto* terms = app.add_subcommand("terms", "Dump the term tables as JSON");
  terms->add_option("--out", cfg.out, "JSON output path (stdout when omitted)");
  terms->add_option("--max-order", cfg.max_order, "Highest order")
      ->check(CLI::Range(1, kMaxDerivativeOrder));

  auto* scaling = app.add_subcommand("scaling", "LOO error rates on synthetic data");
  add_common(scaling);
  add_order(scaling);
  scaling->add_option("--model", cfg.model_id, "Model id")->required()->check(CLI::IsMember(ids));
  scaling->add_option("--n-grid", cfg.n_grid, "Sample sizes")->delimiter(',');
  scaling->add_option("--features", cfg.features, "Feature count")->check(CLI::PositiveNumber);
  scaling->add_option("--noise", cfg.noise, "Response noise half-width")
      ->check(CLI::NonNegativeNumber);
  scaling->add_option("--csv", cfg.csv, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (radius >= 0.0) cfg.radius = radius;
  if (scaling->parsed() && cfg.n_grid.empty()) cfg.n_grid = {50, 100, 200, 400, 800};

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    if (fit->parsed()) return run_fit(cfg);
    if (expand->parsed()) return run_expand(cfg, drop);
    if (cv->parsed()) return run_cv_command(cfg);
    if (boot->parsed()) return run_bootstrap(cfg);
    if (bounds->parsed()) return run_bounds(cfg);
    if (terms->parsed()) return run_terms(cfg);
    if (scaling->parsed()) return run_scaling(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}
