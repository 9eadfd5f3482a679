#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "egret/dist_lab.hpp"

namespace egret {

struct ExtensionOptions {
  ChiProfile profile = ChiProfile::Standard;
  int ladder_start = 2;   // rho = 2^ladder_start ...
  int ladder_max = 24;
  int taylor_terms = 4;   // jet orders kept in the rho^{-p} error model
  double tol = 1e-10;     // successive-extrapolation difference
  double sd_margin = 0.05;
  double verify_tol = 1e-8;
};

struct ExtensionResult {
  Distribution t;
  std::string method;
  int omega = -1;
  std::map<MultiIndex, cplx> counterterms;
  /// pole order p -> coefficients C_a of d^a delta in the principal part.
  std::map<int, std::map<MultiIndex, cplx>> poles;

  cplx pair(const TestFunction& h) const { return t.pair(h); }
};

/// lim_{rho -> inf} <t0, chi(rho .) g> by Richardson extrapolation on rho = 2^j
/// with error model rho^{-(k + |a| - D)} (log rho)^i, |a| >= first_order, i <= N.
cplx limit_pairing(const Distribution& t0, const TestFunction& g, cplx D, int N, int first_order,
                   const ExtensionOptions& opt = {});

ExtensionResult direct_extend(const Distribution& t0, const ExtensionOptions& opt = {});

struct SingularOrder {
  int omega = 0;
  double sd = 0.0;
  bool ambiguous = false;
};
SingularOrder singular_order(const Distribution& t0);

ExtensionResult w_extend(const Distribution& t0, int omega, const std::map<MultiIndex, TestFunction>& w,
                         const ExtensionOptions& opt = {});
ExtensionResult w_extend(const Distribution& t0, const ExtensionOptions& opt = {});

enum class AmbiguityMode { General, AlmostHomogeneous };
/// t + sum_a C_a d^a delta. General mode allows |a| <= omega; the almost
/// homogeneous mode only |a| = D - k.
ExtensionResult ambiguity_shift(const ExtensionResult& t, const std::map<MultiIndex, cplx>& C,
                                AmbiguityMode mode = AmbiguityMode::General, double D = 0.0);

/// t = D f with f the direct extension of f0; D f0 = t0 is verified off the
/// origin on a panel.
ExtensionResult diff_renorm(const Distribution& f0, const std::map<MultiIndex, cplx>& op, const Distribution& t0,
                            const ExtensionOptions& opt = {});

struct MsOptions {
  std::vector<double> radii{0.02, 0.03, 0.045, 0.0675, 0.1, 0.15};
  int max_power = 12;
  double fit_tol = 1e-8;
  double locality_tol = 1e-7;
  double r0 = 0.5;
};

/// Minimal subtraction for an analytic family zeta -> t^zeta (each already
/// extended). Regular part at zeta = 0 and the principal part record.
ExtensionResult analytic_ms(const std::function<Distribution(cplx)>& family, int k, int pole_order, int omega,
                            const MsOptions& opt = {});
/// Laurent coefficients c_{-P} .. c_M of zeta -> <t^zeta, h> (index p + P).
std::vector<cplx> laurent_fit(const std::function<Distribution(cplx)>& family, const TestFunction& h, int pole_order,
                              const MsOptions& opt = {});

/// |y|^{-s} on R with the extension from the rule table: d^2/dy^2 of
/// |y|^{2-s}/((2-s)(1-s)), directly extended. Requires Re s < 3, s != 1, 2.
ExtensionResult regularized_power_1d(cplx s, const ExtensionOptions& opt = {});
Distribution power_density_1d(cplx s);

/// Coefficients c_a of a pure delta-type distribution sum_a c_a d^a delta,
/// read off by pairing with jet bumps.
std::map<MultiIndex, cplx> delta_coefficients(const Distribution& d, int omega, double r0 = 0.5);

struct MassTaylor {
  int order = 0;
  std::vector<Distribution> u;                      // u_l = d^l/dm^l t^{(m)} at m = 0
  std::function<Distribution(double)> remainder;    // t_red^{(m)}
};
/// Expansion to the given order with forward differences of step `step`.
MassTaylor mass_taylor_split(const std::function<Distribution(double)>& family, int k, int order, double step = 1e-2,
                             double tol = 1e-6);
/// order = D - d(n-1).
MassTaylor mass_taylor_split(const std::function<Distribution(double)>& family, int k, int D, int d, int n);

}  // namespace egret
