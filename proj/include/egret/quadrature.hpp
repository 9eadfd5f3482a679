#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace egret {

/// n-point Gauss-Legendre rule on [-1, 1]; cached per n.
struct GaussRule {
  std::vector<double> x, w;
  static const GaussRule& get(int n);
};

struct QuadratureSpec {
  int points = 20;   // nodes per panel
  int subdiv = 2;    // equal panels between consecutive breakpoints
};

/// Panels [a,b] split at the sorted breakpoints lying strictly inside.
std::vector<double> panel_edges(double a, double b, const std::vector<double>& breaks, int subdiv);

/// Composite Gauss-Legendre of f over [a, b] with panels at the breakpoints.
template <class F>
auto integrate_1d(F&& f, double a, double b, const std::vector<double>& breaks, const QuadratureSpec& q = {})
    -> decltype(f(0.0)) {
  using R = decltype(f(0.0));
  R sum{};
  if (!(b > a)) return sum;
  const GaussRule& g = GaussRule::get(q.points);
  const auto edges = panel_edges(a, b, breaks, q.subdiv);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]);
    const double h = 0.5 * (edges[p + 1] - edges[p]);
    R panel{};
    for (std::size_t i = 0; i < g.x.size(); ++i) panel += f(c + h * g.x[i]) * (g.w[i] * h);
    sum += panel;
  }
  return sum;
}

/// Integral over [a, inf) of a function decaying at least like a power: the
/// substitution y = a + s/(1-s) maps it to [0, 1).
template <class F>
auto integrate_half_line(F&& f, double a, const QuadratureSpec& q = {}) -> decltype(f(0.0)) {
  auto g = [&](double s) {
    const double one = 1.0 - s;
    return f(a + s / one) * (1.0 / (one * one));
  };
  return integrate_1d(g, 0.0, 1.0, {0.5, 0.75, 0.875, 0.9375}, q);
}

/// Halton low-discrepancy sequence in [0,1)^dim, Cranley-Patterson shifted.
class Halton {
 public:
  explicit Halton(int dim, std::vector<double> shift = {});
  std::vector<double> point(long index) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<int> primes_;
  std::vector<double> shift_;
};

/// Richardson-style extrapolation of samples f(h_i) to h -> 0 assuming an
/// expansion in the supplied powers of h. Returns the constant term.
std::complex<double> extrapolate_to_zero(const std::vector<double>& h, const std::vector<std::complex<double>>& v,
                                         const std::vector<double>& powers);

}  // namespace egret
