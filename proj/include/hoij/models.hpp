#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoij/dataset.hpp"
#include "hoij/problem.hpp"

namespace hoij {

struct ProblemOptions {
  // Ridge strength: g_0(theta) = l2 * theta. Zero leaves g_0 identically zero.
  double l2 = 0.0;
  // When set, the dataset's feature count must equal this parameter dimension.
  std::optional<std::size_t> dim;
};

struct ModelRegistryEntry {
  std::string model_id;
  std::string description;
  bool requires_response = false;
  std::function<EstimatingProblem(const Dataset&, const ProblemOptions&)> builder;
};

// Built-in models, in a fixed order:
//   mean                 g_n = theta - x_n
//   linear_regression    g_n = (theta'x_n - y_n) x_n
//   logistic_regression  g_n = (sigmoid(theta'x_n) - y_n) x_n
//   exp_loss             g_n = exp(theta'x_n) x_n
const std::vector<ModelRegistryEntry>& model_registry();

const ModelRegistryEntry& find_model(std::string_view model_id);

EstimatingProblem make_problem(std::string_view model_id, const Dataset& data,
                               const ProblemOptions& options = {});

}  // namespace hoij
