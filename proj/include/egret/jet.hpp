#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace egret {

using cplx = std::complex<double>;
using MultiIndex = std::array<int, 4>;

inline int total(const MultiIndex& a) { return a[0] + a[1] + a[2] + a[3]; }
inline MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
inline MultiIndex unit_index(int dim) {
  MultiIndex a{0, 0, 0, 0};
  a[dim] = 1;
  return a;
}
inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
inline double multi_factorial(const MultiIndex& a) {
  return factorial(a[0]) * factorial(a[1]) * factorial(a[2]) * factorial(a[3]);
}

/// Multi-indices of n variables and total degree <= order, graded then
/// lexicographic, with the product table of truncated Taylor polynomials.
class JetLayout {
 public:
  JetLayout(int nvars, int order);

  static std::shared_ptr<const JetLayout> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(alphas_.size()); }
  const MultiIndex& alpha(int i) const { return alphas_[i]; }
  int index(const MultiIndex& a) const;

  struct Triple {
    int i, j, k;
  };
  const std::vector<Triple>& products() const { return products_; }

 private:
  int nvars_;
  int order_;
  std::vector<MultiIndex> alphas_;
  std::map<MultiIndex, int> lookup_;
  std::vector<Triple> products_;
};

/// Truncated multivariate Taylor polynomial ("jet") with coefficients in T.
/// Coefficients are Taylor coefficients, i.e. d^a f / a!. A jet without a
/// layout is a constant and broadcasts against any layout.
template <class T>
class Jet {
 public:
  Jet() : c_(1, T(0.0)) {}
  Jet(double v) : c_(1, T(v)) {}  // NOLINT(google-explicit-constructor)
  Jet(const T& v) : c_(1, v) {}   // NOLINT(google-explicit-constructor)

  /// The coordinate function y_var + value, expanded about the point.
  static Jet variable(std::shared_ptr<const JetLayout> layout, int var, const T& value) {
    Jet j;
    j.layout_ = std::move(layout);
    j.c_.assign(j.layout_->size(), T(0.0));
    j.c_[0] = value;
    if (j.layout_->order() >= 1) j.c_[j.layout_->index(unit_index(var))] = T(1.0);
    return j;
  }

  bool is_constant() const { return !layout_; }
  const std::shared_ptr<const JetLayout>& layout() const { return layout_; }
  const T& value() const { return c_[0]; }
  const std::vector<T>& coefficients() const { return c_; }

  /// Taylor coefficient for multi-index a (zero when beyond the order).
  T coefficient(const MultiIndex& a) const {
    if (!layout_) return total(a) == 0 ? c_[0] : T(0.0);
    if (total(a) > layout_->order()) return T(0.0);
    return c_[layout_->index(a)];
  }
  /// Partial derivative d^a f at the expansion point.
  T derivative(const MultiIndex& a) const { return coefficient(a) * multi_factorial(a); }

  Jet& operator+=(const Jet& o) {
    adopt(o);
    if (o.layout_)
      for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    else
      c_[0] += o.c_[0];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    adopt(o);
    if (o.layout_)
      for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    else
      c_[0] -= o.c_[0];
    return *this;
  }
  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (!a.layout_) return b.scaled(a.c_[0]);
    if (!b.layout_) return a.scaled(b.c_[0]);
    Jet r;
    r.layout_ = a.layout_;
    r.c_.assign(a.c_.size(), T(0.0));
    for (const auto& t : a.layout_->products()) r.c_[t.k] += a.c_[t.i] * b.c_[t.j];
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (!b.layout_) return a.scaled(T(1.0) / b.c_[0]);
    return a * reciprocal(b);
  }

  Jet scaled(const T& s) const {
    Jet r = *this;
    for (auto& v : r.c_) v = v * s;
    return r;
  }

  /// Nilpotent part (value removed).
  Jet nilpotent() const {
    Jet r = *this;
    r.c_[0] = T(0.0);
    return r;
  }

  /// sum_j coeffs[j] * u^j with u = nilpotent part.
  Jet compose(const std::vector<T>& coeffs) const {
    Jet u = nilpotent();
    Jet result(coeffs.empty() ? T(0.0) : coeffs[0]);
    if (!layout_) return result;
    result.layout_ = layout_;
    result.c_.assign(c_.size(), T(0.0));
    result.c_[0] = coeffs.empty() ? T(0.0) : coeffs[0];
    Jet power = u;
    for (std::size_t j = 1; j < coeffs.size() && static_cast<int>(j) <= layout_->order(); ++j) {
      for (std::size_t i = 0; i < c_.size(); ++i) result.c_[i] += coeffs[j] * power.c_[i];
      power = power * u;
    }
    return result;
  }

  int order() const { return layout_ ? layout_->order() : 0; }

  template <class F>
  Jet map(F f) const {
    Jet r = *this;
    for (auto& v : r.c_) v = f(v);
    return r;
  }

  friend Jet reciprocal(const Jet& a) {
    const T v = a.c_[0];
    std::vector<T> k(a.order() + 1);
    T inv = T(1.0) / v;
    T p = inv;
    for (int j = 0; j <= a.order(); ++j) {
      k[j] = (j % 2 == 0) ? p : -p;
      p = p * inv;
    }
    return a.compose(k);
  }

 private:
  void adopt(const Jet& o) {
    if (layout_ || !o.layout_) return;
    T v = c_[0];
    layout_ = o.layout_;
    c_.assign(layout_->size(), T(0.0));
    c_[0] = v;
  }

  std::shared_ptr<const JetLayout> layout_;
  std::vector<T> c_;
};

template <class T>
Jet<T> operator+(const Jet<T>& a, double b) { return a + Jet<T>(T(b)); }
template <class T>
Jet<T> operator+(double b, const Jet<T>& a) { return a + Jet<T>(T(b)); }
template <class T>
Jet<T> operator-(const Jet<T>& a, double b) { return a - Jet<T>(T(b)); }
template <class T>
Jet<T> operator-(double b, const Jet<T>& a) { return Jet<T>(T(b)) - a; }
template <class T>
Jet<T> operator*(const Jet<T>& a, double b) { return a.scaled(T(b)); }
template <class T>
Jet<T> operator*(double b, const Jet<T>& a) { return a.scaled(T(b)); }
template <class T>
Jet<T> operator/(const Jet<T>& a, double b) { return a.scaled(T(1.0 / b)); }
template <class T>
Jet<T> operator/(double b, const Jet<T>& a) { return Jet<T>(T(b)) / a; }

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  const T e = exp(a.value());
  std::vector<T> k(a.order() + 1);
  for (int j = 0; j <= a.order(); ++j) k[j] = e * (1.0 / factorial(j));
  return a.compose(k);
}

template <class T>
Jet<T> log(const Jet<T>& a) {
  using std::log;
  const T v = a.value();
  std::vector<T> k(a.order() + 1);
  k[0] = log(v);
  T inv = T(1.0) / v;
  T p = inv;
  for (int j = 1; j <= a.order(); ++j) {
    k[j] = p * ((j % 2 == 1 ? 1.0 : -1.0) / j);
    p = p * inv;
  }
  return a.compose(k);
}

template <class T>
Jet<T> sin(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.value()), c = cos(a.value());
  std::vector<T> k(a.order() + 1);
  // sin(v + u) = sum_j sin^{(j)}(v) u^j / j!
  for (int j = 0; j <= a.order(); ++j) {
    const T d = (j % 4 == 0) ? s : (j % 4 == 1) ? c : (j % 4 == 2) ? -s : -c;
    k[j] = d * (1.0 / factorial(j));
  }
  return a.compose(k);
}

template <class T>
Jet<T> cos(const Jet<T>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.value()), c = cos(a.value());
  std::vector<T> k(a.order() + 1);
  for (int j = 0; j <= a.order(); ++j) {
    const T d = (j % 4 == 0) ? c : (j % 4 == 1) ? -s : (j % 4 == 2) ? -c : s;
    k[j] = d * (1.0 / factorial(j));
  }
  return a.compose(k);
}

/// a^p for a non-integer exponent: needs a nonvanishing value.
template <class T, class P>
Jet<T> pow(const Jet<T>& a, const P& p) {
  using std::pow;
  const T v = a.value();
  std::vector<T> k(a.order() + 1);
  T binom = T(1.0);
  const T inv = T(1.0) / v;
  T vp = pow(v, p);
  for (int j = 0; j <= a.order(); ++j) {
    k[j] = vp * binom;
    binom = binom * (T(p) - T(double(j))) * (1.0 / (j + 1));
    vp = vp * inv;
  }
  return a.compose(k);
}

template <class T>
Jet<T> sqrt(const Jet<T>& a) {
  return pow(a, 0.5);
}

/// Real part of the value, used for branch decisions in piecewise functions.
inline double value_real(double v) { return v; }
inline double value_real(const cplx& v) { return v.real(); }
template <class T>
double value_real(const Jet<T>& j) {
  return value_real(j.value());
}

template <class S>
struct jet_depth : std::integral_constant<int, 0> {};
template <class T>
struct jet_depth<Jet<T>> : std::integral_constant<int, 1 + jet_depth<T>::value> {};

}  // namespace egret
