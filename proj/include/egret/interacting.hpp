#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egret/tproduct.hpp"

namespace egret {

/// F_S = (hbar/i) d/dlambda S(S)^{*-1} * S(S + lambda F) at lambda = 0.
struct InteractingField {
  Field base;   // F
  Field S;      // interaction, kappa graded
  int order = 0;
  Field value;  // F_S up to kappa^order

  /// kappa^k coefficient of F_S.
  Field coefficient(int k) const;
  /// Number of terms carrying a negative hbar power.
  int negative_hbar_terms() const;
};

/// S and F are Fields; a lambda2 component of S (GLZ) is kept in the result.
InteractingField bogoliubov(const TMap& T, const Field& S, const Field& F, int order);
InteractingField bogoliubov(const TMap& T, const Interaction& S, const Field& F);

/// The retarded product R(S; F) = (i/hbar)(T_2(S x F) - S * F): the kappa^1
/// term of F_S for S linear in kappa.
Field retarded_product(const TMap& T, const Field& S, const Field& F);

struct PropertyConfig {
  int order = 2;
  int random_h = 4;
  unsigned seed = 7;
  double tol = 1e-6;
  EvalOptions eval{QuadratureSpec{16, 2}};  // overlapping bumps need more than the default rule
};

/// Bogoliubov identity at kappa^0, hbar bookkeeping, causality under a
/// future-supported perturbation, GLZ, unitarity transport and the interacting
/// field equation, all on the d = 1 backend with S = kappa L(h).
std::vector<AxiomCheck> interacting_property_checks(const TMap& T, const FieldPolynomial& L,
                                                    const PropertyConfig& cfg = {});

/// [F_S, G_S] paired in the vacuum for F = phi(f), G = phi(g) in the d = 2
/// backend, S = kappa phi^2(h). With eps > 0 on the backend the value is
/// extrapolated to eps -> 0, with eps = 0 the boundary value is used directly.
AxiomCheck spacelike_commutativity_check(const Backend& b2, const TestFunction& f, const TestFunction& g,
                                         const TestFunction& h, int order = 2, double tol = 1e-4,
                                         const EvalOptions& eval = {});
/// The default geometry: f, g spacelike, h in their common past.
AxiomCheck spacelike_commutativity_check(const Backend& b2, int order = 2, double tol = 1e-4,
                                         const EvalOptions& eval = {});

struct LocalAlgebraReport {
  bool skipped = false;
  std::string notice;
  double residual = 0.0;
  bool passed = false;
};

/// F_{S(g1)} against F_{S(g2)} for F supported in the interval O = [lo, hi]
/// (d = 1). Requires g1 = g2 on O and its past; otherwise skipped with a notice.
LocalAlgebraReport local_algebra_check(const TMap& T, double lo, double hi, const TestFunction& g1,
                                       const TestFunction& g2, const FieldPolynomial& L, const Field& F, int order,
                                       double tol = 1e-6, const EvalOptions& eval = {QuadratureSpec{16, 2}});

}  // namespace egret
