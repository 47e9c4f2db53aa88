#include "hoij/weights.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <string>

#include "hoij/error.hpp"

namespace hoij {

std::vector<LabeledWeights> WeightStream::collect() {
  std::vector<LabeledWeights> out;
  out.reserve(size_);
  while (auto w = next()) out.push_back(std::move(*w));
  return out;
}

namespace {

Eigen::VectorXd ones(std::size_t n) { return Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)); }

void require_rows(std::size_t n) {
  if (n < 1) throw ModelError("weight schemes need N >= 1");
}

}  // namespace

WeightStream loo_weights(std::size_t n, std::vector<std::size_t> subset) {
  require_rows(n);
  if (subset.empty()) {
    subset.resize(n);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
  }
  for (std::size_t i : subset) {
    if (i >= n) {
      throw ModelError("leave-one-out index " + std::to_string(i) + " is out of range for N = " +
                       std::to_string(n));
    }
  }
  const std::size_t size = subset.size();
  auto state = std::make_shared<std::pair<std::vector<std::size_t>, std::size_t>>(
      std::move(subset), 0);
  return WeightStream(
      [n, state]() -> std::optional<LabeledWeights> {
        auto& [indices, pos] = *state;
        if (pos >= indices.size()) return std::nullopt;
        const std::size_t drop = indices[pos];
        Eigen::VectorXd w = ones(n);
        w(static_cast<Eigen::Index>(drop)) = 0.0;
        LabeledWeights out{pos, "loo:" + std::to_string(drop), WeightVector(std::move(w))};
        ++pos;
        return out;
      },
      size);
}

WeightStream kfold_weights(std::size_t n, std::size_t folds, std::uint64_t seed) {
  require_rows(n);
  if (folds < 1 || folds > n) {
    throw ModelError("fold count " + std::to_string(folds) + " must lie in [1, N = " +
                     std::to_string(n) + "]");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t fold_size = n / folds;
  auto pos = std::make_shared<std::size_t>(0);
  return WeightStream(
      [n, folds, fold_size, perm = std::move(perm), pos]() -> std::optional<LabeledWeights> {
        if (*pos >= folds) return std::nullopt;
        Eigen::VectorXd w = ones(n);
        for (std::size_t i = *pos * fold_size; i < (*pos + 1) * fold_size; ++i) {
          w(static_cast<Eigen::Index>(perm[i])) = 0.0;
        }
        LabeledWeights out{*pos, "fold:" + std::to_string(*pos), WeightVector(std::move(w))};
        ++*pos;
        return out;
      },
      folds);
}

WeightStream leave_kappa_out_weights(std::size_t n, std::size_t kappa, std::uint64_t seed,
                                     std::size_t count) {
  require_rows(n);
  if (kappa > n) {
    throw ModelError("kappa = " + std::to_string(kappa) + " exceeds N = " + std::to_string(n));
  }
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto pos = std::make_shared<std::size_t>(0);
  return WeightStream(
      [n, kappa, count, rng, pos]() -> std::optional<LabeledWeights> {
        if (*pos >= count) return std::nullopt;
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        // Partial Fisher-Yates: the first kappa entries become the held-out set.
        for (std::size_t i = 0; i < kappa; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, n - 1);
          std::swap(idx[i], idx[pick(*rng)]);
        }
        Eigen::VectorXd w = ones(n);
        for (std::size_t i = 0; i < kappa; ++i) w(static_cast<Eigen::Index>(idx[i])) = 0.0;
        LabeledWeights out{*pos, "kappa:" + std::to_string(*pos), WeightVector(std::move(w))};
        ++*pos;
        return out;
      },
      count);
}

WeightStream bootstrap_weights(std::size_t n, std::size_t draws, std::uint64_t seed) {
  require_rows(n);
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto pos = std::make_shared<std::size_t>(0);
  return WeightStream(
      [n, draws, rng, pos]() -> std::optional<LabeledWeights> {
        if (*pos >= draws) return std::nullopt;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        for (std::size_t i = 0; i < n; ++i) w(static_cast<Eigen::Index>(pick(*rng))) += 1.0;
        LabeledWeights out{*pos, "boot:" + std::to_string(*pos), WeightVector(std::move(w))};
        ++*pos;
        return out;
      },
      draws);
}

WeightStream unit_weights(std::size_t n) {
  require_rows(n);
  auto done = std::make_shared<bool>(false);
  return WeightStream(
      [n, done]() -> std::optional<LabeledWeights> {
        if (*done) return std::nullopt;
        *done = true;
        return LabeledWeights{0, "unit", WeightVector(ones(n))};
      },
      1);
}

}  // namespace hoij
