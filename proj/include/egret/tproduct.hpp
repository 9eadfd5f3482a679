#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "egret/dist_lab.hpp"
#include "egret/field.hpp"
#include "egret/field_eval.hpp"

namespace egret {

/// Interaction S = sum_k kappa^k int g^k L_k, truncated at kappa^order.
struct Interaction {
  std::vector<FieldPolynomial> L;  // L[k-1] multiplies kappa^k
  TestFunction g;
  int order = 2;

  Field field(const Backend& b) const;
  Truncation truncation() const { return Truncation{order, 1, 1, false}; }
};

/// Counterterms per kernel class of a two-vertex subgraph: the class key lists
/// its edges (e.g. "HF*HF"), the value the coefficients C_a of d^a delta.
using CountertermPolicy = std::map<std::string, std::map<MultiIndex, cplx>>;

/// A time-ordered product T_n on local (or balanced multi-vertex) arguments.
class TMap {
 public:
  virtual ~TMap() = default;
  virtual const Backend& backend() const = 0;
  /// T_n(args[0] x ... x args[n-1]); n = 0 gives 1.
  virtual Field apply(const std::vector<Field>& args) const = 0;
  Field operator()(const std::vector<Field>& args) const { return apply(args); }
};

struct FeynmanOptions {
  Kernel kernel = Kernel::HF;
  /// != 1 multiplies partially contracted terms: a wrong combinatorial factor.
  double broken_factor = 1.0;
  std::optional<CountertermPolicy> policy;
};

/// Feynman-graph T-product: all contractions between different arguments with
/// kernel edges, after moving derivatives off the arguments onto the
/// smearings (balanced decomposition).
class FeynmanT : public TMap {
 public:
  explicit FeynmanT(Backend b, FeynmanOptions opt = {}) : b_(std::move(b)), opt_(std::move(opt)) {}
  const Backend& backend() const override { return b_; }
  Field apply(const std::vector<Field>& args) const override;
  const FeynmanOptions& options() const { return opt_; }

 private:
  Backend b_;
  FeynmanOptions opt_;
};

/// Terms of A(g) rewritten as sum_a B_a((-1)^{|a|} d^a g) with balanced B_a.
std::vector<GraphTerm> awi_lift(const Backend& b, const GraphTerm& t);

/// Sub-multisets of a monomial: (sub, rest, prod_a C(n_a, k_a)).
struct SubMonomial {
  Monomial sub, rest;
  double weight = 1.0;
};
std::vector<SubMonomial> sub_monomials(const Monomial& m);

/// Edge list key of a kernel class, e.g. "HF*HF".
std::string kernel_class(const std::vector<Edge>& edges);

/// S(F) = 1 + sum_{n<=order} i^n / (n! hbar^n) T_n(F^{(x)n}).
Field smatrix(const TMap& T, const Field& F, int order);

/// Causal Wick expansion of T_n(A_1(g_1) x ... ): sum over sub-monomials of
/// prod binom * (vacuum part of T_n on the sub-monomials) * remaining factors.
Field causal_wick_expand(const TMap& T, const std::vector<std::pair<Monomial, TestFunction>>& args);

/// omega_0(T_n(...)).
ScalarSeries t_vev(const TMap& T, const std::vector<Field>& args, const EvalOptions& opt = {});

/// T_{n+1}(phi(g) x F) predicted by the off-shell field equation:
/// phi(g) T_n(F) + hbar sum_j T_n(.., int g(x) HF(x - .) dF_j/dphi, ..).
Field field_equation_rhs(const TMap& T, const TestFunction& g, const std::vector<Field>& F);

/// The kernel HF(y)^k on R^2 (d=2 backend) paired in light-cone coordinates.
Distribution feynman_power_distribution(const Backend& b, int k);

struct AxiomCheck {
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool passed = false;
  std::string detail;
};

struct AxiomConfig {
  FieldPolynomial L = FieldPolynomial::phi(4);
  int max_n = 3;
  int random_h = 10;
  unsigned seed = 1;
  double tol = 1e-6;
  EvalOptions eval{};
};

/// The axiom suite in d = 1: symmetry, causal factorization on five support
/// geometries, S-matrix causality and unitarity at kappa^2, field independence,
/// the causal Wick expansion, parity, hbar grading, odd vanishing and the
/// off-shell field equation.
std::vector<AxiomCheck> check_axioms(const TMap& T, const AxiomConfig& cfg = {});

/// Adjoint-Euler residual of HF^k in d = 2 (degree 0, log power k).
AxiomCheck scaling_axiom_check(const Backend& b2, int k, double tol = 1e-5);

}  // namespace egret
