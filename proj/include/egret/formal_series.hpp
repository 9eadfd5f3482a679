#pragma once

#include <algorithm>
#include <climits>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "egret/errors.hpp"

namespace egret {

/// Multidegree of a formal series term: powers of hbar, the coupling kappa and
/// two auxiliary linearisation parameters lambda, lambda2 (used for the
/// derivatives at zero in the Bogoliubov and GLZ formulas).
struct Degree {
  int hbar = 0;
  int kappa = 0;
  int lambda = 0;
  int lambda2 = 0;

  auto operator<=>(const Degree&) const = default;

  Degree operator+(const Degree& o) const {
    return {hbar + o.hbar, kappa + o.kappa, lambda + o.lambda, lambda2 + o.lambda2};
  }
  int coupling_total() const { return kappa + lambda + lambda2; }
};

inline constexpr int kUnbounded = INT_MAX / 4;

/// Per-parameter truncation bounds. A bound equal to kUnbounded means "not
/// truncated"; two series with different finite bounds are incompatible for
/// strict combination.
struct Truncation {
  int kappa = kUnbounded;
  int lambda = 1;
  int lambda2 = 1;
  bool laurent = false;

  bool operator==(const Truncation&) const = default;

  bool admits(const Degree& d) const {
    if (d.kappa < 0 || d.lambda < 0 || d.lambda2 < 0) return false;
    if (!laurent && d.hbar < 0) return false;
    return d.kappa <= kappa && d.lambda <= lambda && d.lambda2 <= lambda2;
  }

  static Truncation meet(const Truncation& a, const Truncation& b) {
    return {std::min(a.kappa, b.kappa), std::min(a.lambda, b.lambda),
            std::min(a.lambda2, b.lambda2), a.laurent || b.laurent};
  }

  static bool compatible(const Truncation& a, const Truncation& b) {
    auto ok = [](int x, int y) { return x == y || x == kUnbounded || y == kUnbounded; };
    return ok(a.kappa, b.kappa) && ok(a.lambda, b.lambda) && ok(a.lambda2, b.lambda2);
  }
};

namespace detail {
inline bool is_zero_value(double v) { return v == 0.0; }
inline bool is_zero_value(const std::complex<double>& v) { return v == 0.0; }
template <class V>
bool is_zero_value(const V& v) {
  return v.is_zero();
}
}  // namespace detail

/// Sparse graded formal series with coefficients in V. Terms are kept in
/// lexicographic multidegree order, so every reduction over the terms is
/// performed in the same order regardless of how the series was built.
template <class V>
class FormalSeries {
 public:
  using map_type = std::map<Degree, V>;

  FormalSeries() = default;
  explicit FormalSeries(Truncation t) : trunc_(t) {}
  FormalSeries(V constant, Truncation t) : trunc_(t) { add_term(Degree{}, std::move(constant)); }

  static FormalSeries constant(V c, Truncation t = {}) { return FormalSeries(std::move(c), t); }
  static FormalSeries monomial(Degree d, V c, Truncation t = {}) {
    if (d.hbar < 0) t.laurent = true;
    FormalSeries s(t);
    s.add_term(d, std::move(c));
    return s;
  }

  const Truncation& truncation() const { return trunc_; }
  const map_type& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Re-truncates to a tighter (or equal) bound.
  void restrict_to(const Truncation& t) {
    trunc_ = Truncation::meet(trunc_, t);
    trunc_.laurent = t.laurent || trunc_.laurent;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (!trunc_.admits(it->first))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  /// Widens the truncation; only legal before any term would be lost.
  void set_truncation(const Truncation& t) {
    trunc_ = t;
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (!trunc_.admits(it->first))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  void add_term(const Degree& d, V c) {
    if (d.hbar < 0 && !trunc_.laurent)
      throw ConfigurationError("negative hbar power in a non-Laurent series");
    if (!trunc_.admits(d)) return;
    auto it = terms_.find(d);
    if (it == terms_.end()) {
      if (!detail::is_zero_value(c)) terms_.emplace(d, std::move(c));
      return;
    }
    it->second = it->second + c;
    if (detail::is_zero_value(it->second)) terms_.erase(it);
  }

  V coefficient(const Degree& d) const {
    auto it = terms_.find(d);
    return it == terms_.end() ? V{} : it->second;
  }

  int min_hbar() const {
    int m = kUnbounded;
    for (const auto& [d, c] : terms_) m = std::min(m, d.hbar);
    return m;
  }
  int max_kappa() const {
    int m = -1;
    for (const auto& [d, c] : terms_) m = std::max(m, d.kappa);
    return m;
  }

  /// Applies fn to every coefficient (e.g. conjugation), dropping zeros.
  template <class Fn>
  FormalSeries map_coefficients(Fn&& fn) const {
    FormalSeries r(trunc_);
    for (const auto& [d, c] : terms_) r.add_term(d, fn(c));
    return r;
  }

  /// Keeps only terms for which pred(degree) holds.
  template <class Pred>
  FormalSeries filter(Pred&& pred) const {
    FormalSeries r(trunc_);
    for (const auto& [d, c] : terms_)
      if (pred(d)) r.terms_.emplace(d, c);
    return r;
  }

  FormalSeries shifted(const Degree& by) const {
    Truncation t = trunc_;
    if (by.hbar < 0) t.laurent = true;
    FormalSeries r(t);
    for (const auto& [d, c] : terms_) r.add_term(d + by, c);
    return r;
  }

  FormalSeries& operator+=(const FormalSeries& o) {
    trunc_ = Truncation::meet(trunc_, o.trunc_);
    restrict_to(trunc_);
    for (const auto& [d, c] : o.terms_) add_term(d, c);
    return *this;
  }
  FormalSeries& operator-=(const FormalSeries& o) { return *this += -o; }
  friend FormalSeries operator+(FormalSeries a, const FormalSeries& b) { return a += b; }
  friend FormalSeries operator-(FormalSeries a, const FormalSeries& b) { return a -= b; }
  FormalSeries operator-() const {
    FormalSeries r(trunc_);
    for (const auto& [d, c] : terms_) r.terms_.emplace(d, -c);
    return r;
  }

  template <class S>
  FormalSeries scaled(const S& s) const {
    FormalSeries r(trunc_);
    for (const auto& [d, c] : terms_) r.add_term(d, c * s);
    return r;
  }

  /// Cauchy product with coefficient product `prod`, truncated to the meet of
  /// both truncations. Use series_combine for the strict variant.
  template <class Prod>
  static FormalSeries cauchy(const FormalSeries& a, const FormalSeries& b, Prod&& prod) {
    FormalSeries r(Truncation::meet(a.trunc_, b.trunc_));
    for (const auto& [da, ca] : a.terms_)
      for (const auto& [db, cb] : b.terms_) {
        const Degree d = da + db;
        if (d.hbar < 0) r.trunc_.laurent = true;
        if (!r.trunc_.admits(d)) continue;
        r.add_term(d, prod(ca, cb));
      }
    return r;
  }

  friend FormalSeries operator*(const FormalSeries& a, const FormalSeries& b) {
    return cauchy(a, b, [](const V& x, const V& y) { return x * y; });
  }

  bool operator==(const FormalSeries& o) const { return terms_ == o.terms_; }

 private:
  map_type terms_;
  Truncation trunc_{};
};

using ScalarSeries = FormalSeries<std::complex<double>>;

/// Strict Cauchy product: both operands must have compatible truncations.
template <class V, class Prod>
FormalSeries<V> series_combine(const FormalSeries<V>& a, const FormalSeries<V>& b, Prod&& prod) {
  if (!Truncation::compatible(a.truncation(), b.truncation()))
    throw ConfigurationError("series_combine: truncation orders differ");
  return FormalSeries<V>::cauchy(a, b, std::forward<Prod>(prod));
}

/// n-th lambda-derivative at lambda = 0: n! times the lambda^n coefficient,
/// returned as a series without lambda dependence.
template <class V>
FormalSeries<V> derivative_at_zero(const FormalSeries<V>& s, int n) {
  if (n < 0) throw ConfigurationError("derivative_at_zero: negative order");
  if (s.truncation().lambda < n) throw OrderError("derivative_at_zero: series not stored to the requested lambda order");
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  Truncation t = s.truncation();
  t.lambda = 1;
  FormalSeries<V> r(t);
  for (const auto& [d, c] : s.terms())
    if (d.lambda == n) r.add_term(Degree{d.hbar, d.kappa, 0, d.lambda2}, c * fact);
  return r;
}

/// Number of powers of a nilpotent element needed before the truncation kills
/// every product; throws if some coupling in `nilpotent` is untruncated.
inline int nilpotency_bound(const Truncation& t, bool has_kappa, bool has_lambda, bool has_lambda2) {
  long bound = 0;
  auto add = [&](bool used, int b) {
    if (!used) return;
    if (b >= kUnbounded) throw ConfigurationError("inverse requires a finite truncation in every coupling present");
    bound += b;
  };
  add(has_kappa, t.kappa);
  add(has_lambda, t.lambda);
  add(has_lambda2, t.lambda2);
  return static_cast<int>(bound);
}

/// Geometric-series inverse of (one + nilpotent) in an arbitrary associative
/// algebra, with the number of terms fixed by `max_power`.
template <class A, class Prod>
A geometric_inverse(const A& one, const A& nilpotent, Prod&& prod, int max_power) {
  A result = one;
  A power = one;
  for (int k = 1; k <= max_power; ++k) {
    power = prod(power, nilpotent);
    if (power.is_zero()) break;
    if (k % 2 == 1)
      result = result - power;
    else
      result = result + power;
  }
  return result;
}

/// Inverse of s = 1 + N where every term of N has strictly positive total
/// coupling degree; `product` must be associative.
template <class V, class Prod>
FormalSeries<V> invert_unit_plus_nilpotent(const FormalSeries<V>& s, Prod&& product, const V& one) {
  const V lead = s.coefficient(Degree{});
  if (!(lead == one)) throw NotInvertibleError("leading coefficient is not the unit");
  FormalSeries<V> n(s.truncation());
  bool hk = false, hl = false, hl2 = false;
  for (const auto& [d, c] : s.terms()) {
    if (d == Degree{}) continue;
    if (d.coupling_total() <= 0) throw NotInvertibleError("non-unit part has zero coupling degree");
    hk |= d.kappa > 0;
    hl |= d.lambda > 0;
    hl2 |= d.lambda2 > 0;
    n.add_term(d, c);
  }
  const int bound = nilpotency_bound(s.truncation(), hk, hl, hl2);
  const FormalSeries<V> unit(one, s.truncation());
  auto prod = [&](const FormalSeries<V>& a, const FormalSeries<V>& b) {
    return FormalSeries<V>::cauchy(a, b, product);
  };
  return geometric_inverse(unit, n, prod, bound);
}

/// Largest coefficient-wise absolute difference between two scalar series.
inline double max_abs_difference(const ScalarSeries& a, const ScalarSeries& b) {
  double m = 0.0;
  for (const auto& [d, c] : a.terms()) m = std::max(m, std::abs(c - b.coefficient(d)));
  for (const auto& [d, c] : b.terms())
    if (a.terms().find(d) == a.terms().end()) m = std::max(m, std::abs(c));
  return m;
}

inline double max_abs(const ScalarSeries& a) {
  double m = 0.0;
  for (const auto& [d, c] : a.terms()) m = std::max(m, std::abs(c));
  return m;
}

/// Sums the series at concrete parameter values.
inline std::complex<double> evaluate_series(const ScalarSeries& s, double hbar, double kappa = 1.0) {
  std::complex<double> acc = 0.0;
  for (const auto& [d, c] : s.terms())
    acc += c * std::pow(hbar, d.hbar) * std::pow(kappa, d.kappa);
  return acc;
}

std::string to_string(const Degree& d);
std::string to_string(const ScalarSeries& s);

}  // namespace egret
