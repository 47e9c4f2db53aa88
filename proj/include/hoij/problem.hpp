#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>

#include <Eigen/Core>

#include "hoij/dual.hpp"

namespace hoij {

// Highest nesting depth the AD engine instantiates. Expansions go up to order
// kMaxExpansionOrder; bounds for such an expansion need one more derivative.
inline constexpr int kMaxExpansionOrder = 6;
inline constexpr int kMaxDerivativeOrder = kMaxExpansionOrder + 1;

// g_n evaluated on scalar type S: writes D outputs for term n (n = 0 is the
// prior / regularizer term g_0).
template <class S>
using TermFunction =
    std::function<void(std::size_t n, std::span<const S> theta, std::span<S> out)>;

namespace detail {
template <class Seq>
struct TermFunctionsFor;
template <int... Ls>
struct TermFunctionsFor<std::integer_sequence<int, Ls...>> {
  using type = std::tuple<TermFunction<Nested<Ls>>...>;
};
using TermFunctions =
    typename TermFunctionsFor<std::make_integer_sequence<int, kMaxDerivativeOrder + 1>>::type;
}  // namespace detail

// Axis-aligned box describing where the terms are known to be smooth.
struct DomainHint {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

// The estimating equation
//   G(theta, w) = (1/N) (g_0(theta) + sum_n w_n g_n(theta)),
// with every g_n evaluable on plain doubles and on nested dual numbers up to
// kMaxDerivativeOrder levels. Immutable and cheap to copy (terms are shared).
class EstimatingProblem {
 public:
  // Model must expose
  //   template <class S> void term(std::size_t n, std::span<const S>, std::span<S>) const;
  template <class Model>
  static EstimatingProblem from_model(std::shared_ptr<const Model> model, std::string model_id,
                                      std::size_t dim_theta, std::size_t n_terms,
                                      std::optional<DomainHint> domain = std::nullopt) {
    EstimatingProblem p;
    p.model_id_ = std::move(model_id);
    p.dim_ = dim_theta;
    p.n_terms_ = n_terms;
    p.domain_ = std::move(domain);
    p.bind(model, std::make_integer_sequence<int, kMaxDerivativeOrder + 1>{});
    return p;
  }

  std::size_t dim() const { return dim_; }
  std::size_t n_terms() const { return n_terms_; }
  const std::string& model_id() const { return model_id_; }
  const std::optional<DomainHint>& domain_hint() const { return domain_; }

  template <class S>
  void term(std::size_t n, std::span<const S> theta, std::span<S> out) const {
    std::get<TermFunction<S>>(terms_)(n, theta, out);
  }

  // g_n(theta) on doubles.
  Eigen::VectorXd term(std::size_t n, const Eigen::VectorXd& theta) const;

 private:
  EstimatingProblem() = default;

  template <class Model, int... Ls>
  void bind(const std::shared_ptr<const Model>& model, std::integer_sequence<int, Ls...>) {
    ((std::get<Ls>(terms_) = [model](std::size_t n, std::span<const Nested<Ls>> theta,
                                     std::span<Nested<Ls>> out) { model->term(n, theta, out); }),
     ...);
  }

  std::string model_id_;
  std::size_t dim_ = 0;
  std::size_t n_terms_ = 0;
  std::optional<DomainHint> domain_;
  detail::TermFunctions terms_;
};

// Data weights w together with the cached displacement w - 1_N.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd values);
  static WeightVector ones(std::size_t n);

  const Eigen::VectorXd& values() const { return values_; }
  const Eigen::VectorXd& delta() const { return delta_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }
  bool is_unit() const;

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXd delta_;
};

// (1/N) (g_0(theta) + sum_n w_n g_n(theta)).
Eigen::VectorXd evaluate_G(const EstimatingProblem& problem, const Eigen::VectorXd& theta,
                           const WeightVector& w);

}  // namespace hoij
