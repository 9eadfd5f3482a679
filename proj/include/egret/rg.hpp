#pragma once

#include <map>
#include <utility>
#include <vector>

#include "egret/tproduct.hpp"

namespace egret {

/// Renormalization map Z = Id + Z^(2)/2! + ..., kept to second order. The
/// kernel of Z^(2) on the sub-monomials (M1, M2) is sum_a C_a d^a delta(x1 - x2);
/// on full local fields Z^(2) acts through the causal Wick expansion, which
/// makes it field independent by construction.
class ZMap {
 public:
  using Key = std::pair<Monomial, Monomial>;
  using Kernel2 = std::map<MultiIndex, ScalarSeries>;

  explicit ZMap(Backend b) : b_(std::move(b)) {}
  static ZMap identity(const Backend& b) { return ZMap(b); }

  /// Adds C d^a delta to z(M1, M2); stored with M1 <= M2, z(M2, M1)(y) = z(M1, M2)(-y).
  void add(Monomial m1, Monomial m2, const MultiIndex& a, const ScalarSeries& c);
  const std::map<Key, Kernel2>& kernels() const { return z2_; }
  const Backend& backend() const { return b_; }
  bool is_identity() const { return z2_.empty(); }
  static constexpr int order() { return 2; }

 private:
  Backend b_;
  std::map<Key, Kernel2> z2_;
};

/// Z^(2)(F1 x F2) for fields whose terms have one factor-carrying vertex.
Field z2_apply(const ZMap& z, const Field& f1, const Field& f2);
/// Z(F) = F + Z^(2)(F x F)/2.
Field z_apply(const ZMap& z, const Field& f);
/// Z1 o Z2 and the inverse, to second order.
ZMap z_compose(const ZMap& z1, const ZMap& z2);
ZMap z_inverse(const ZMap& z);
/// Largest kernel-coefficient difference between two maps.
double z_distance(const ZMap& a, const ZMap& b);

/// The T-product of S o Z: T^_2 = T_2 + (hbar/i) Z^(2),
/// T^_3(F1,F2,F3) = T_3 + (hbar/i) sum_{pairs} T_2(Z^(2)(Fi,Fj), Fk).
class RenormalizedT : public TMap {
 public:
  RenormalizedT(const TMap& base, ZMap z) : base_(base), z_(std::move(z)) {}
  const Backend& backend() const override { return base_.backend(); }
  Field apply(const std::vector<Field>& args) const override;
  const ZMap& z() const { return z_; }

 private:
  const TMap& base_;
  ZMap z_;
};

/// Random Z compatible with the axioms (real, symmetric, parity even,
/// hbar^{(|M1|+|M2|)/2 - 1}, no kernel with a single field).
ZMap random_admissible_z(const Backend& b, const std::vector<Monomial>& monomials, unsigned seed, int max_a = 2);

struct SolveOptions {
  int max_a = 2;       // derivative orders of the fitted delta kernels
  double tol = 1e-8;
};

/// Z with S^ = S o Z, from the kappa lambda coefficient of S^(kA + lB) - S(kA + lB)
/// for all sub-monomial pairs of the given monomials. Throws InconsistencyError
/// when the difference is not of that form.
ZMap solve_Z(const TMap& T, const TMap& That, const std::vector<Monomial>& monomials, int order = 2,
             const SolveOptions& opt = {});

/// Residual of S^ against S o Z on the probes (full fields, all phi degrees).
double verify_Z(const ZMap& z, const TMap& T, const TMap& That, const std::vector<Monomial>& monomials);

/// Largest coefficient difference over term keys.
double field_distance(const Field& a, const Field& b);

}  // namespace egret
