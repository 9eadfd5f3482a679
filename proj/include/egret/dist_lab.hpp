#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "egret/quadrature.hpp"
#include "egret/test_function.hpp"

namespace egret {

struct PairOptions {
  QuadratureSpec quad{20, 2};
  double tol = 1e-11;     // target for the refinement estimate
  int max_refinements = 3;
};

/// Linear functional on test functions over R^k. Distributions defined only
/// off the origin are flagged; pairing them with h that does not vanish near
/// 0 is the caller's responsibility (it is an improper integral at best).
class Distribution {
 public:
  using PairFn = std::function<cplx(const TestFunction&)>;

  Distribution() = default;
  Distribution(int k, PairFn f, std::string name, bool off_origin = false);

  /// Density t(y) paired by quadrature. declared (D, N) are used by the
  /// extension engine when present.
  static Distribution density(int k, std::function<cplx(std::span<const double>)> t, std::string name,
                              std::optional<cplx> D = std::nullopt, int N = 0, PairOptions opt = {});
  /// c * d^a delta: h -> c (-1)^{|a|} d^a h(0).
  static Distribution delta(int k, const MultiIndex& a, cplx c = 1.0);
  static Distribution zero(int k);

  cplx pair(const TestFunction& h) const;
  cplx operator()(const TestFunction& h) const { return pair(h); }

  int dim() const { return k_; }
  const std::string& name() const { return name_; }
  bool off_origin() const { return off_origin_; }
  std::optional<cplx> declared_degree() const { return D_; }
  int declared_power() const { return N_; }
  Distribution with_declared(std::optional<cplx> D, int N) const;

  Distribution operator+(const Distribution& o) const;
  Distribution operator-(const Distribution& o) const;
  Distribution scaled(cplx c) const;
  /// t o D^T: h -> sum_a c_a (-1)^{|a|} <t, d^a h>, i.e. the distribution D t.
  Distribution differentiated(const std::map<MultiIndex, cplx>& op) const;

 private:
  int k_ = 1;
  std::shared_ptr<const PairFn> f_;
  std::string name_;
  bool off_origin_ = false;
  std::optional<cplx> D_;
  int N_ = 0;
};

/// Quadrature of int t(y) h(y) dy over supp h, geometric panels towards the
/// origin. k = 1 is one-dimensional; k = 2, 3 use polar / spherical
/// coordinates around the origin.
cplx pair_density(int k, const std::function<cplx(std::span<const double>)>& t, const TestFunction& h,
                  const PairOptions& opt = {});

/// rho^{-k} h(. / rho).
TestFunction scaled_test_function(const TestFunction& h, double rho);

/// Multi-indices in k dimensions with |a| <= max_order, graded then lexicographic.
std::vector<MultiIndex> multi_indices(int k, int max_order);

/// Panels of closed-form bumps: supported away from 0, or generic around 0.
std::vector<TestFunction> off_origin_panel(int k);
std::vector<TestFunction> origin_panel(int k);

struct ScalingFit {
  double sd = 0.0;
  double ci = 0.0;        // two standard errors of the slope
  double log_power = 0.0; // coefficient of log|log rho| at the maximiser
  bool almost_homogeneous = false;
  std::vector<double> per_function;
};

/// Slope fit of log|<t, rho^{-k} h(./rho)>| = alpha - sd log rho + gamma log|log rho|
/// on the last `rungs` of the ladder rho = 2^0 .. 2^-ladder.
ScalingFit scaling_degree_estimate(const Distribution& t, const std::vector<TestFunction>& panel, int ladder = 16,
                                   int rungs = 8);
ScalingFit scaling_degree_estimate(const Distribution& t);

/// max_h |<t, ((D-k) - E)^{N+1} h>| over the panel.
double almost_homogeneity_check(const Distribution& t, cplx D, int N, const std::vector<TestFunction>& panel);
double almost_homogeneity_check(const Distribution& t, cplx D, int N);

/// Mass-dependent variant (E + D - m d/dm)^{N+1} t^{(m)} = 0 at the mass m,
/// m-derivatives by central differences in log m.
double almost_homogeneity_check(const std::function<Distribution(double)>& family, double m, cplx D, int N,
                                const std::vector<TestFunction>& panel, double step = 1e-2);

/// Default jet bumps w_a = y^a/a! (1 - chi(y/r0)) for |a| <= omega.
std::map<MultiIndex, TestFunction> default_jet_bumps(int k, int omega, double r0 = 0.5,
                                                     ChiProfile profile = ChiProfile::Standard);
/// W h = h - sum_{|a|<=omega} d^a h(0) w_a. Throws InvalidProjector when the
/// supplied w_a do not reproduce the jets d^b w_a(0) = delta_ab.
TestFunction project_W(const TestFunction& h, int omega, const std::map<MultiIndex, TestFunction>& w);
/// Checks d^b h(0) = 0 for |b| <= omega analytically (jets); returns max |d^b h(0)|.
double jet_at_origin_norm(const TestFunction& h, int omega);

}  // namespace egret
