#include "hoij/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hoij/error.hpp"

namespace hoij {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = c.model_id;
  j["data"] = c.data_path;
  j["format"] = c.data_format;
  j["header"] = c.header;
  j["order"] = c.order;
  j["rho"] = c.rho;
  j["radius"] = c.radius ? json(*c.radius) : json("auto: 2 C_op delta_0");
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["scheme"] = c.scheme;
  j["folds"] = c.folds;
  j["kappa"] = c.kappa;
  j["draws"] = c.draws;
  j["out"] = c.out;
  j["csv"] = c.csv;
  j["with_bounds"] = c.with_bounds;
  j["epsilon_term"] = c.epsilon_term;
  j["epsilon"] = c.epsilon;
  j["workers"] = c.workers;
  j["l2"] = c.l2;
  j["n_grid"] = c.n_grid;
  j["features"] = c.features;
  j["noise"] = c.noise;
  j["timings"] = c.timings;
  j["check_segments"] = c.check_segments;
  j["max_order"] = c.max_order;
  return j;
}

json envelope(const std::string& kind, const RunConfig& config, json result) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["config"] = to_json(config);
  j["result"] = std::move(result);
  return j;
}

json term_table_json(const TermTable& table, int max_order) {
  json orders = json::array();
  for (int k = 1; k <= max_order; ++k) {
    json terms = json::array();
    for (const auto& t : table.order(k)) {
      terms.push_back({{"a", t.coeff}, {"kset", t.kset}, {"omega", t.omega}});
    }
    orders.push_back({{"k", k}, {"terms", std::move(terms)}});
  }
  return orders;
}

json bounds_json(const BoundsSummary& s) {
  const BoundConstants& c = s.constants;
  json per_k = json::array();
  for (std::size_t k = 0; k < static_cast<std::size_t>(c.order + 2); ++k) {
    json e;
    e["k"] = k;
    e["M"] = number(c.m[k]);
    e["M_triangle"] = number(c.m_triangle[k]);
    e["delta_exact"] = number(c.delta[k]);
    e["delta_v"] = number(c.delta_variance[k]);
    e["delta_t"] = number(c.delta_uniform[k]);
    e["V"] = number(c.v[k]);
    e["T"] = number(c.t[k]);
    e["B"] = (k >= 1 && k <= s.b.size()) ? number(s.b[k - 1]) : json(nullptr);
    per_k.push_back(std::move(e));
  }
  json j;
  j["label"] = c.sup_label;
  j["radius"] = number(c.radius);
  j["sample_points"] = c.n_points;
  j["C_op"] = number(c.c_op);
  j["L_H"] = number(c.l_h);
  j["L_H_M3"] = number(c.l_h_m3);
  j["C_tilde_op"] = number(c.c_tilde_op);
  j["C_set"] = number(c.c_set);
  j["rho"] = number(c.rho);
  j["epsilon"] = number(c.epsilon);
  j["delta_max"] = number(c.delta_max);
  j["condition_satisfied"] = c.condition_satisfied;
  j["per_k"] = std::move(per_k);
  j["err_bound_per_K"] = numbers(s.error_bound);
  j["zeroth_order_bound"] = number(s.zeroth_order_bound);
  j["diagnostic"] = s.diagnostic ? json(*s.diagnostic) : json(nullptr);
  return j;
}

json cv_report_json(const CvReport& r, bool timings) {
  json recs = json::array();
  for (const auto& rec : r.records) {
    json e;
    e["id"] = rec.id;
    e["label"] = rec.label;
    json tij = json::array();
    for (const auto& t : rec.theta_ij) tij.push_back(vector_json(t));
    e["theta_ij"] = std::move(tij);
    e["exact"] = rec.exact ? vector_json(*rec.exact) : json(nullptr);
    e["error"] = numbers(rec.error);
    e["failure"] = rec.failure ? json(*rec.failure) : json(nullptr);
    if (timings) {
      e["expand_seconds"] = rec.expand_seconds;
      e["refit_seconds"] = rec.refit_seconds;
    }
    recs.push_back(std::move(e));
  }
  json j;
  j["model"] = r.model_id;
  j["order"] = r.order;
  j["theta_hat"] = vector_json(r.theta_hat);
  j["n_weights"] = r.records.size();
  j["failures"] = r.failures;
  j["max_error"] = numbers(r.max_error);
  j["mean_error"] = numbers(r.mean_error);
  if (r.bounds) j["bounds"] = bounds_json(*r.bounds);
  j["records"] = std::move(recs);
  return j;
}

json scaling_json(const ScalingReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"max_error", numbers(row.max_error)},
                    {"failure", row.failure ? json(*row.failure) : json(nullptr)}});
  }
  json j;
  j["model"] = r.model_id;
  j["generator"] = {{"model", r.generator.model_id},
                    {"dim", r.generator.dim},
                    {"noise", r.generator.noise}};
  j["n_grid"] = r.n_grid;
  j["order"] = r.order;
  j["seed"] = r.seed;
  j["rows"] = std::move(rows);
  j["slope"] = numbers(r.slope);
  j["slope_se"] = numbers(r.slope_se);
  return j;
}

std::string cv_report_csv(const CvReport& r) {
  std::ostringstream os;
  os << "id,label,k,error";
  const auto d = r.theta_hat.size();
  for (Eigen::Index i = 0; i < d; ++i) os << ",theta_ij_" << i;
  for (Eigen::Index i = 0; i < d; ++i) os << ",exact_" << i;
  os << ",failure\n";
  for (const auto& rec : r.records) {
    for (std::size_t k = 0; k < rec.theta_ij.size(); ++k) {
      os << rec.id << "," << csv_field(rec.label) << "," << k << ","
         << (rec.error.empty() ? "" : csv_number(rec.error[k]));
      for (Eigen::Index i = 0; i < d; ++i) os << "," << csv_number(rec.theta_ij[k](i));
      for (Eigen::Index i = 0; i < d; ++i) os << "," << (rec.exact ? csv_number((*rec.exact)(i)) : "");
      os << "," << csv_field(rec.failure.value_or("")) << "\n";
    }
  }
  return os.str();
}

std::string scaling_csv(const ScalingReport& r) {
  std::ostringstream os;
  os << "n,k,max_error,failure\n";
  for (const auto& row : r.rows) {
    for (int k = 0; k <= r.order; ++k) {
      os << row.n << "," << k << ","
         << (row.max_error.empty() ? "" : csv_number(row.max_error[static_cast<std::size_t>(k)]))
         << "," << csv_field(row.failure.value_or("")) << "\n";
    }
  }
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open '" + path.string() + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace hoij
