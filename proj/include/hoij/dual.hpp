#pragma once

// Forward-mode dual numbers that nest: Dual<Dual<double>> carries two
// independent infinitesimals, so K levels of nesting yield exact K-th order
// mixed directional derivatives. Each level is a first-order truncated Taylor
// polynomial, (a*b)_1 = a_0 b_1 + a_1 b_0, and elementary functions use their
// first-order recurrences applied recursively to the inner level.

#include <cmath>
#include <type_traits>
#include <utility>

namespace hoij {

template <class T>
struct Dual {
  T v{};  // value (lower infinitesimals included)
  T d{};  // coefficient of this level's infinitesimal

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit on purpose
  constexpr Dual(T value, T deriv) : v(std::move(value)), d(std::move(deriv)) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator+=(double c) {
    v += c;
    return *this;
  }
  Dual& operator-=(double c) {
    v -= c;
    return *this;
  }
  Dual& operator*=(double c) {
    v *= c;
    d *= c;
    return *this;
  }
  Dual& operator/=(double c) {
    v /= c;
    d /= c;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

// Nested<0> is double, Nested<L> = Dual<Nested<L-1>>.
namespace detail {
template <int L>
struct NestedImpl {
  using type = Dual<typename NestedImpl<L - 1>::type>;
};
template <>
struct NestedImpl<0> {
  using type = double;
};
}  // namespace detail

template <int L>
using Nested = typename detail::NestedImpl<L>::type;

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
  return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator+(const Dual<T>& a, double c) {
  return {a.v + c, a.d};
}
template <class T>
Dual<T> operator+(double c, const Dual<T>& a) {
  return {c + a.v, a.d};
}

template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
  return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, double c) {
  return {a.v - c, a.d};
}
template <class T>
Dual<T> operator-(double c, const Dual<T>& a) {
  return {c - a.v, -a.d};
}

template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
  return {a.v * b.v, a.v * b.d + a.d * b.v};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double c) {
  return {a.v * c, a.d * c};
}
template <class T>
Dual<T> operator*(double c, const Dual<T>& a) {
  return {c * a.v, c * a.d};
}

template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
  T q = a.v / b.v;
  return {q, (a.d - q * b.d) / b.v};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double c) {
  return {a.v / c, a.d / c};
}
template <class T>
Dual<T> operator/(double c, const Dual<T>& a) {
  T q = c / a.v;
  return {q, -(q * a.d) / a.v};
}

template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  T e = exp(a.v);
  return {e, a.d * e};
}

template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}

template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
  using std::pow;
  if (p == 0.0) return Dual<T>(1.0);
  return {pow(a.v, p), a.d * (p * pow(a.v, p - 1.0))};
}

// Logistic sigmoid 1 / (1 + exp(-x)), evaluated without overflow.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <class T>
Dual<T> sigmoid(const Dual<T>& a) {
  T s = sigmoid(a.v);
  return {s, a.d * (s * (1.0 - s))};
}

inline bool is_finite(double x) { return std::isfinite(x); }

template <class T>
bool is_finite(const Dual<T>& a) {
  return is_finite(a.v) && is_finite(a.d);
}

// Value with every infinitesimal stripped.
inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& a) {
  return primal(a.v);
}

}  // namespace hoij
