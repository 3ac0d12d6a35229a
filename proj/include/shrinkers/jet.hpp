#pragma once

// Truncated bivariate Taylor polynomials ("jets").
//
// A Jet stores the Taylor coefficients of a function of two chart parameters
// around a base point, up to total degree kMaxOrder. Arithmetic propagates the
// truncation exactly, so evaluating a chart map on Jet arguments yields all of
// its partial derivatives up to that order with no step-size error. The
// `order()` of a jet is the highest degree whose coefficients are valid;
// products and compositions take the minimum, differentiation lowers it by one.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace shrinkers {

class Jet {
 public:
  static constexpr int kMaxOrder = 4;
  static constexpr int kSize = (kMaxOrder + 1) * (kMaxOrder + 2) / 2;

  static constexpr int index(int i, int j) {
    const int d = i + j;
    return d * (d + 1) / 2 + j;
  }
  static constexpr int degreeOf(int idx) {
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= idx) ++d;
    return d;
  }

  Jet() = default;
  // NOLINTNEXTLINE(google-explicit-constructor): constants mix freely with jets.
  Jet(double value) { c_[0] = value; }

  /// Jet of the coordinate function `value + t_axis`, valid to `order`.
  static Jet variable(double value, int axis, int order = kMaxOrder) {
    Jet j(value);
    j.order_ = order;
    if (order >= 1) j.c_[axis == 0 ? index(1, 0) : index(0, 1)] = 1.0;
    return j;
  }

  double value() const { return c_[0]; }
  int order() const { return order_; }
  void setOrder(int order) {
    order_ = order;
    for (int k = 0; k < kSize; ++k)
      if (degreeOf(k) > order) c_[k] = 0.0;
  }

  double coeff(int i, int j) const { return c_[index(i, j)]; }
  double& coeff(int i, int j) { return c_[index(i, j)]; }

  /// Partial derivative d^{i+j} / du^i dv^j at the base point.
  double derivative(int i, int j) const {
    return coeff(i, j) * factorial(i) * factorial(j);
  }

  Jet partial(int axis) const {
    Jet r;
    r.order_ = order_ - 1;
    for (int d = 1; d <= order_; ++d) {
      for (int j = 0; j <= d; ++j) {
        const int i = d - j;
        if (axis == 0 && i > 0) r.coeff(i - 1, j) = i * coeff(i, j);
        if (axis == 1 && j > 0) r.coeff(i, j - 1) = j * coeff(i, j);
      }
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] += o.c_[k];
    order_ = std::min(order_, o.order_);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < kSize; ++k) c_[k] -= o.c_[k];
    order_ = std::min(order_, o.order_);
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this * o.reciprocal(); }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) {
    for (double& v : a.c_) v = -v;
    return a;
  }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * b.reciprocal(); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.order_ = std::min(a.order_, b.order_);
    for (const auto& t : productTable()) {
      if (t.degree > r.order_) continue;
      r.c_[t.out] += a.c_[t.lhs] * b.c_[t.rhs];
    }
    return r;
  }

  /// f(this) given the Taylor coefficients f^{(k)}(x0)/k! of a scalar function.
  Jet compose(const std::array<double, kMaxOrder + 1>& taylor) const {
    Jet h = *this;
    h.c_[0] = 0.0;
    Jet result(taylor[0]);
    result.order_ = order_;
    Jet power(1.0);
    for (int k = 1; k <= order_; ++k) {
      power = power * h;
      result += taylor[k] * power;
    }
    result.order_ = order_;
    return result;
  }

  Jet reciprocal() const {
    const double x0 = c_[0];
    std::array<double, kMaxOrder + 1> t{};
    double p = 1.0 / x0;
    for (int k = 0; k <= kMaxOrder; ++k) {
      t[k] = (k % 2 == 0 ? 1.0 : -1.0) * p;
      p /= x0;
    }
    return compose(t);
  }

  static constexpr double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  }

 private:
  struct ProductTerm {
    int lhs, rhs, out, degree;
  };
  static const std::vector<ProductTerm>& productTable() {
    static const std::vector<ProductTerm> table = [] {
      std::vector<ProductTerm> t;
      for (int a = 0; a < kSize; ++a) {
        for (int b = 0; b < kSize; ++b) {
          const int da = degreeOf(a), db = degreeOf(b);
          if (da + db > kMaxOrder) continue;
          const int ja = a - da * (da + 1) / 2, jb = b - db * (db + 1) / 2;
          const int ia = da - ja, ib = db - jb;
          t.push_back({a, b, index(ia + ib, ja + jb), da + db});
        }
      }
      return t;
    }();
    return table;
  }

  std::array<double, kSize> c_{};
  int order_ = kMaxOrder;
};

inline Jet sqrt(const Jet& x) {
  const double x0 = x.value();
  std::array<double, Jet::kMaxOrder + 1> t{};
  double binom = 1.0;
  for (int k = 0; k <= Jet::kMaxOrder; ++k) {
    t[k] = binom * std::sqrt(x0) / std::pow(x0, k);
    binom *= (0.5 - k) / (k + 1);
  }
  return x.compose(t);
}

inline Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  std::array<double, Jet::kMaxOrder + 1> t{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) t[k] = e / Jet::factorial(k);
  return x.compose(t);
}

inline Jet log(const Jet& x) {
  const double x0 = x.value();
  std::array<double, Jet::kMaxOrder + 1> t{};
  t[0] = std::log(x0);
  for (int k = 1; k <= Jet::kMaxOrder; ++k)
    t[k] = (k % 2 == 1 ? 1.0 : -1.0) / (k * std::pow(x0, k));
  return x.compose(t);
}

inline Jet sin(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cycle[4] = {s, c, -s, -c};
  std::array<double, Jet::kMaxOrder + 1> t{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) t[k] = cycle[k % 4] / Jet::factorial(k);
  return x.compose(t);
}

inline Jet cos(const Jet& x) {
  const double s = std::sin(x.value()), c = std::cos(x.value());
  const double cycle[4] = {c, -s, -c, s};
  std::array<double, Jet::kMaxOrder + 1> t{};
  for (int k = 0; k <= Jet::kMaxOrder; ++k) t[k] = cycle[k % 4] / Jet::factorial(k);
  return x.compose(t);
}

inline Jet pow(const Jet& x, int p) {
  if (p < 0) return pow(x, -p).reciprocal();
  Jet r(1.0);
  r.setOrder(x.order());
  for (int k = 0; k < p; ++k) r = r * x;
  return r;
}

using JetVec = std::vector<Jet>;

inline Jet dot(const JetVec& a, const JetVec& b) {
  Jet s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline JetVec partial(const JetVec& v, int axis) {
  JetVec r;
  r.reserve(v.size());
  for (const Jet& j : v) r.push_back(j.partial(axis));
  return r;
}

}  // namespace shrinkers
