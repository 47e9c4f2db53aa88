#include "hoij/terms.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "hoij/error.hpp"
#include "hoij/problem.hpp"

namespace hoij {

int DerivativeTerm::total_order() const {
  return omega + std::accumulate(kset.begin(), kset.end(), 0);
}

int DerivativeTerm::max_k() const { return kset.empty() ? 0 : *std::max_element(kset.begin(), kset.end()); }

std::string DerivativeTerm::to_string() const {
  std::string s = "(" + std::to_string(coeff) + ", {";
  for (std::size_t i = 0; i < kset.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(kset[i]);
  }
  return s + "}, " + std::to_string(omega) + ")";
}

DerivativeTerm make_term(std::uint64_t coeff, std::vector<int> kset, int omega) {
  std::sort(kset.begin(), kset.end(), std::greater<>());
  return DerivativeTerm{coeff, std::move(kset), omega};
}

void merge_terms(std::vector<DerivativeTerm>& acc, const std::vector<DerivativeTerm>& terms) {
  for (const auto& t : terms) {
    auto it = std::find_if(acc.begin(), acc.end(),
                           [&](const DerivativeTerm& a) { return a.same_shape(t); });
    if (it == acc.end()) {
      acc.push_back(t);
    } else {
      it->coeff += t.coeff;
    }
  }
}

std::vector<DerivativeTerm> differentiate_term(const DerivativeTerm& t) {
  std::vector<DerivativeTerm> raw;
  // Chain rule through each dtheta^k factor.
  for (std::size_t i = 0; i < t.kset.size(); ++i) {
    std::vector<int> k = t.kset;
    k[i] += 1;
    raw.push_back(make_term(t.coeff, std::move(k), t.omega));
  }
  // Through the theta argument of G^(|K|).
  {
    std::vector<int> k = t.kset;
    k.push_back(1);
    raw.push_back(make_term(t.coeff, std::move(k), t.omega));
  }
  // Through the weight argument; G^{w} no longer depends on w.
  if (t.omega == 0) raw.push_back(make_term(t.coeff, t.kset, 1));
  std::vector<DerivativeTerm> out;
  merge_terms(out, raw);
  return out;
}

const std::vector<DerivativeTerm>& TermTable::order(int k) const {
  if (k < 1 || k > max_order()) {
    throw OrderError("term table has orders 1.." + std::to_string(max_order()) +
                     ", requested " + std::to_string(k));
  }
  return orders_[static_cast<std::size_t>(k - 1)];
}

namespace {

bool canonical_less(const DerivativeTerm& a, const DerivativeTerm& b) {
  if (a.omega != b.omega) return a.omega < b.omega;
  return a.kset < b.kset;
}

}  // namespace

TermTable build_term_tables(int max_order, std::size_t term_cap) {
  if (max_order < 1 || max_order > kMaxDerivativeOrder) {
    throw OrderError("term table order must lie in [1, " + std::to_string(kMaxDerivativeOrder) +
                     "], got " + std::to_string(max_order));
  }
  // Full k-th derivative of G(theta-hat(w), w): starts as T({1},0) + T({},1).
  std::vector<DerivativeTerm> full = {make_term(1, {1}, 0), make_term(1, {}, 1)};
  std::vector<std::vector<DerivativeTerm>> orders;
  for (int k = 1; k <= max_order; ++k) {
    if (k > 1) {
      std::vector<DerivativeTerm> next;
      for (const auto& t : full) merge_terms(next, differentiate_term(t));
      full = std::move(next);
    }
    const DerivativeTerm solved = make_term(1, {k}, 0);
    std::vector<DerivativeTerm> theta_k;
    bool found = false;
    for (const auto& t : full) {
      if (t.same_shape(solved)) {
        if (t.coeff != 1) {
          throw OrderError("solved-for term at order " + std::to_string(k) +
                           " has coefficient " + std::to_string(t.coeff));
        }
        found = true;
      } else {
        theta_k.push_back(t);
      }
    }
    if (!found) throw OrderError("no H dtheta^" + std::to_string(k) + " term at order " + std::to_string(k));
    if (theta_k.size() > term_cap) {
      throw OrderError("term table at order " + std::to_string(k) + " has " +
                       std::to_string(theta_k.size()) + " terms, above the cap of " +
                       std::to_string(term_cap));
    }
    std::sort(theta_k.begin(), theta_k.end(), canonical_less);
    orders.push_back(std::move(theta_k));
  }
  return TermTable(std::move(orders));
}

const TermTable& shared_term_table() {
  static const TermTable table = build_term_tables(kMaxDerivativeOrder);
  return table;
}

TableReport verify_table_invariants(const TermTable& table) {
  TableReport report;
  for (int k = 1; k <= table.max_order(); ++k) {
    const auto& terms = table.order(k);
    std::set<std::pair<int, std::vector<int>>> seen;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const DerivativeTerm& t = terms[i];
      TermCheck c{k, i, t, true, {}};
      auto fail = [&](const std::string& why) {
        c.ok = false;
        if (!c.message.empty()) c.message += "; ";
        c.message += why;
      };
      if (t.omega != 0 && t.omega != 1) fail("omega must be 0 or 1");
      if (t.coeff == 0) fail("coefficient must be positive");
      if (!std::is_sorted(t.kset.begin(), t.kset.end(), std::greater<>())) {
        fail("multiset is not sorted descending");
      }
      if (std::any_of(t.kset.begin(), t.kset.end(), [](int v) { return v < 1; })) {
        fail("multiset entries must be positive");
      }
      if (t.max_k() >= k) {
        fail("max(K) < k violated: max(K) = " + std::to_string(t.max_k()) + " at order " +
             std::to_string(k) + " (the solved-for order must be absent)");
      }
      if (t.total_order() != k) {
        fail("omega + sum(K) = " + std::to_string(t.total_order()) + " != " + std::to_string(k));
      }
      if (!seen.insert({t.omega, t.kset}).second) fail("duplicate (K, omega) shape");
      if (!c.ok) report.ok = false;
      report.checks.push_back(std::move(c));
    }
  }
  return report;
}

}  // namespace hoij
