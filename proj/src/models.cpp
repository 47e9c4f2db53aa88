#include "hoij/models.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hoij/error.hpp"

namespace hoij {
namespace {

// Row-major copy of the data shared by all built-in models.
struct DataBlock {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<double> x;  // n * p
  std::vector<double> y;  // n, empty when unused
  double l2 = 0.0;

  DataBlock(const Dataset& data, double ridge, bool with_response)
      : n(data.rows()), p(data.n_features()), l2(ridge) {
    x.resize(n * p);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        x[i * p + j] = data.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    if (with_response) {
      const auto& r = data.response();
      y.assign(r.data(), r.data() + r.size());
    }
  }

  const double* row(std::size_t n1) const { return x.data() + (n1 - 1) * p; }

  template <class S>
  void prior(std::span<const S> theta, std::span<S> out) const {
    for (std::size_t d = 0; d < theta.size(); ++d) out[d] = l2 * theta[d];
  }

  template <class S>
  S linear_index(std::size_t n1, std::span<const S> theta) const {
    const double* xr = row(n1);
    S z(0.0);
    for (std::size_t d = 0; d < p; ++d) z += theta[d] * xr[d];
    return z;
  }
};

struct MeanModel : DataBlock {
  using DataBlock::DataBlock;
  template <class S>
  void term(std::size_t n1, std::span<const S> theta, std::span<S> out) const {
    if (n1 == 0) return prior(theta, out);
    const double* xr = row(n1);
    for (std::size_t d = 0; d < p; ++d) out[d] = theta[d] - xr[d];
  }
};

struct LinearRegressionModel : DataBlock {
  using DataBlock::DataBlock;
  template <class S>
  void term(std::size_t n1, std::span<const S> theta, std::span<S> out) const {
    if (n1 == 0) return prior(theta, out);
    const double* xr = row(n1);
    const S r = linear_index(n1, theta) - y[n1 - 1];
    for (std::size_t d = 0; d < p; ++d) out[d] = r * xr[d];
  }
};

struct LogisticRegressionModel : DataBlock {
  using DataBlock::DataBlock;
  template <class S>
  void term(std::size_t n1, std::span<const S> theta, std::span<S> out) const {
    if (n1 == 0) return prior(theta, out);
    const double* xr = row(n1);
    const S r = sigmoid(linear_index(n1, theta)) - y[n1 - 1];
    for (std::size_t d = 0; d < p; ++d) out[d] = r * xr[d];
  }
};

struct ExpLossModel : DataBlock {
  using DataBlock::DataBlock;
  template <class S>
  void term(std::size_t n1, std::span<const S> theta, std::span<S> out) const {
    if (n1 == 0) return prior(theta, out);
    using std::exp;
    const double* xr = row(n1);
    const S e = exp(linear_index(n1, theta));
    for (std::size_t d = 0; d < p; ++d) out[d] = e * xr[d];
  }
};

void check_dim(const Dataset& data, const ProblemOptions& options, std::string_view id) {
  if (options.dim && *options.dim != data.n_features()) {
    throw ModelError("model '" + std::string(id) + "' configured with dimension " +
                     std::to_string(*options.dim) + " but the data rows have " +
                     std::to_string(data.n_features()) + " features");
  }
  if (!(options.l2 >= 0.0)) throw ModelError("l2 penalty must be nonnegative");
}

template <class Model>
ModelRegistryEntry entry(std::string id, std::string description, bool requires_response) {
  ModelRegistryEntry e;
  e.model_id = id;
  e.description = std::move(description);
  e.requires_response = requires_response;
  e.builder = [id, requires_response](const Dataset& data, const ProblemOptions& options) {
    check_dim(data, options, id);
    if (requires_response && !data.has_response()) {
      throw ModelError("model '" + id + "' requires a response column");
    }
    auto model = std::make_shared<const Model>(data, options.l2, requires_response);
    return EstimatingProblem::from_model(std::move(model), id, data.n_features(), data.rows());
  };
  return e;
}

}  // namespace

const std::vector<ModelRegistryEntry>& model_registry() {
  static const std::vector<ModelRegistryEntry> registry = [] {
    std::vector<ModelRegistryEntry> r;
    r.push_back(entry<MeanModel>("mean", "g_n = theta - x_n", false));
    r.push_back(
        entry<LinearRegressionModel>("linear_regression", "g_n = (theta'x_n - y_n) x_n", true));
    r.push_back(entry<LogisticRegressionModel>(
        "logistic_regression", "g_n = (sigmoid(theta'x_n) - y_n) x_n", true));
    r.push_back(entry<ExpLossModel>("exp_loss", "g_n = exp(theta'x_n) x_n", false));
    return r;
  }();
  return registry;
}

const ModelRegistryEntry& find_model(std::string_view model_id) {
  for (const auto& e : model_registry()) {
    if (e.model_id == model_id) return e;
  }
  std::string known;
  for (const auto& e : model_registry()) known += (known.empty() ? "" : ", ") + e.model_id;
  throw ModelError("unknown model '" + std::string(model_id) + "' (known: " + known + ")");
}

EstimatingProblem make_problem(std::string_view model_id, const Dataset& data,
                               const ProblemOptions& options) {
  return find_model(model_id).builder(data, options);
}

}  // namespace hoij
