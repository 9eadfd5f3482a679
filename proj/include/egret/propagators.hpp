#pragma once

#include <span>
#include <string>
#include <vector>

#include "egret/jet.hpp"

namespace egret {

/// Two-point kernels. H is the two-point function driving the star product
/// (the Wightman function in d=1, the mu-scale Hadamard function in d=2);
/// Hrev(z) = H(-z). HF/HFbar are the Feynman kernel and its conjugate.
/// Contact is the delta function.
enum class Kernel { H, Hrev, HF, HFbar, Delta, Ret, Adv, Contact };

std::string kernel_name(Kernel k);
Kernel kernel_from_name(const std::string& s);
/// K(-z) = sign * reflect(K)(z).
Kernel reflected(Kernel k, int& sign);
/// conj K(z) = conjugated(K)(z).
Kernel conjugated(Kernel k);

/// Numeric/symbolic backend: spacetime dimension, mass, Hadamard scale mu and
/// the i0 smoothing eps (d=2 only; eps = 0 means the boundary value).
struct Backend {
  std::string name;
  int dim = 1;
  double mass = 1.0;
  double mu = 1.0;
  double eps = 0.0;
  bool numeric = true;

  static Backend d1_massive(double m = 1.0);
  static Backend d2_massless(double mu = 1.0, double eps = 0.0);
  /// Four-dimensional kernel class with no numeric backend; sd(HF) = 2.
  static Backend mock_d4(double m = 0.0);

  bool operator==(const Backend& o) const {
    return name == o.name && dim == o.dim && mass == o.mass && mu == o.mu && eps == o.eps;
  }
  Backend with_eps(double e) const {
    Backend b = *this;
    b.eps = e;
    return b;
  }
};

/// d^c K at the point z (z.size() == dim). Kernels with a jump (Delta, Ret,
/// Adv in d=1 are continuous; in d=2 they are piecewise constant) are
/// evaluated pointwise off their singular set. Contact cannot be evaluated.
cplx eval_kernel(const Backend& b, Kernel k, const MultiIndex& c, std::span<const double> z);
inline cplx eval_kernel(const Backend& b, Kernel k, std::span<const double> z) {
  return eval_kernel(b, k, MultiIndex{0, 0, 0, 0}, z);
}

/// Scaling degree at the origin of d^c K restricted to z != 0.
double kernel_scaling_degree(const Backend& b, Kernel k, const MultiIndex& c);

/// Whether d^c K is smooth away from z = 0 (so that pointwise products and
/// Gauss quadrature with a breakpoint at the coincidence are accurate).
bool kernel_kinked(Kernel k);

// -- self-consistency checks

/// max |(box + m^2) H| over the samples (analytic second derivatives).
double kg_residual(const Backend& b, Kernel k, const std::vector<std::vector<double>>& samples);
/// max |(1/i)(H(z) - H(-z)) - Delta(z)|.
double antisymmetry_residual(const Backend& b, const std::vector<std::vector<double>>& samples);
/// max |conj H(z) - H(-z)|.
double conjugation_residual(const Backend& b, const std::vector<std::vector<double>>& samples);
/// max |HF(z) - (theta(z0) H(z) + theta(-z0) H(-z))|.
double feynman_residual(const Backend& b, const std::vector<std::vector<double>>& samples);
/// Green's function test: -Delta^ret against (box + m^2) f for test functions f
/// must return f(0). Max residual over the panel (d=1 only).
double green_residual(const Backend& b, int panel_size = 4);
/// max over samples and rhos of |rho^{d-2} H_{m/rho}(rho z) - H_m(z)|; for the
/// d=2 massless kernel the predicted mu-shift -(1/2pi) ln rho is subtracted
/// when `subtract_log` is set.
double homogeneous_scaling_residual(const Backend& b, const std::vector<double>& rhos,
                                    const std::vector<std::vector<double>>& samples, bool subtract_log = false);

}  // namespace egret
