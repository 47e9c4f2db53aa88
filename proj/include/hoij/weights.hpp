#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hoij/problem.hpp"

namespace hoij {

struct LabeledWeights {
  std::size_t id = 0;
  std::string label;
  WeightVector weights;
};

// Single-consumer lazy sequence of weight vectors.
class WeightStream {
 public:
  using Generator = std::function<std::optional<LabeledWeights>()>;

  WeightStream(Generator next, std::size_t size) : next_(std::move(next)), size_(size) {}

  std::optional<LabeledWeights> next() { return next_(); }
  // Number of vectors the stream yields in total.
  std::size_t size() const { return size_; }
  // Drains the remaining vectors.
  std::vector<LabeledWeights> collect();

 private:
  Generator next_;
  std::size_t size_;
};

// Indices are zero-based. Each vector has a single zero at one index of
// `subset`; an empty subset means all of 0..n-1.
WeightStream loo_weights(std::size_t n, std::vector<std::size_t> subset = {});

// Random partition into `folds` folds of floor(n / folds) held-out points each.
WeightStream kfold_weights(std::size_t n, std::size_t folds, std::uint64_t seed);

// `count` vectors, each with `kappa` zeros at uniformly random distinct indices.
WeightStream leave_kappa_out_weights(std::size_t n, std::size_t kappa, std::uint64_t seed,
                                     std::size_t count);

// `draws` Multinomial(n, 1/n) count vectors.
WeightStream bootstrap_weights(std::size_t n, std::size_t draws, std::uint64_t seed);

// Single vector 1_N; every expansion of it collapses to theta-hat.
WeightStream unit_weights(std::size_t n);

}  // namespace hoij
