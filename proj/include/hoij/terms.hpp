#pragma once

// Derivative-term calculus. Differentiating G(theta-hat(w), w) = 0 repeatedly
// along dw produces only terms of the form
//
//   omega = 0:  G^(|K|)(w~) dtheta^{k_1} ... dtheta^{k_m}
//   omega = 1:  G^{w(|K|)}(theta-hat(w~)) dtheta^{k_1} ... dtheta^{k_m}
//
// for a multiset K = {k_1, ..., k_m}. The k-th order expression always has
// exactly one term H dtheta^k, so dtheta^k = -H^{-1} sum_i a_i T(K_i, omega_i)
// over a problem-independent table Theta_k built here.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hoij {

struct DerivativeTerm {
  std::uint64_t coeff = 1;
  std::vector<int> kset;  // sorted descending
  int omega = 0;

  int total_order() const;
  int max_k() const;  // 0 for the empty multiset
  bool same_shape(const DerivativeTerm& other) const {
    return omega == other.omega && kset == other.kset;
  }
  std::string to_string() const;

  friend bool operator==(const DerivativeTerm&, const DerivativeTerm&) = default;
};

// Builds a term with its multiset canonicalized.
DerivativeTerm make_term(std::uint64_t coeff, std::vector<int> kset, int omega);

// d/dw of a single term, with t.coeff carried onto every product and equal
// shapes merged: each k in K bumped to k+1, one 1 adjoined to K, and (for
// omega = 0 only) the w-derivative with omega set to 1.
std::vector<DerivativeTerm> differentiate_term(const DerivativeTerm& t);

// Adds `terms` into `acc`, merging equal shapes by summing coefficients.
void merge_terms(std::vector<DerivativeTerm>& acc, const std::vector<DerivativeTerm>& terms);

inline constexpr std::size_t kDefaultTermCap = 100000;

class TermTable {
 public:
  TermTable() = default;
  explicit TermTable(std::vector<std::vector<DerivativeTerm>> orders)
      : orders_(std::move(orders)) {}

  int max_order() const { return static_cast<int>(orders_.size()); }
  // Theta_k for 1 <= k <= max_order().
  const std::vector<DerivativeTerm>& order(int k) const;
  // Mutable access for tests that forge tables.
  std::vector<std::vector<DerivativeTerm>>& orders() { return orders_; }
  const std::vector<std::vector<DerivativeTerm>>& orders() const { return orders_; }

 private:
  std::vector<std::vector<DerivativeTerm>> orders_;
};

// Theta_1..Theta_K. Each order is sorted by (omega, kset) for stable output.
// Throws OrderError when K is out of range or a table exceeds term_cap terms.
TermTable build_term_tables(int max_order, std::size_t term_cap = kDefaultTermCap);

// Process-wide table through the largest supported order, built on first use.
const TermTable& shared_term_table();

struct TermCheck {
  int order = 0;
  std::size_t index = 0;
  DerivativeTerm term;
  bool ok = true;
  std::string message;
};

struct TableReport {
  bool ok = true;
  std::vector<TermCheck> checks;
};

// Checks max(K) < k, omega + sum(K) = k, positive coefficients, canonical
// ordering of K and uniqueness of shapes within each order.
TableReport verify_table_invariants(const TermTable& table);

}  // namespace hoij
