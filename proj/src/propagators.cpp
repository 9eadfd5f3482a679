#include "egret/propagators.hpp"

#include <numbers>

#include "egret/errors.hpp"
#include "egret/quadrature.hpp"
#include "egret/test_function.hpp"

namespace egret {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx ipow(cplx b, int n) {
  cplx r = 1.0;
  for (int i = 0; i < n; ++i) r *= b;
  return r;
}

// n-th derivative of -sin(m t)/m
double delta_d1(double m, int n, double t) { return -std::pow(m, n - 1) * std::sin(m * t + n * kPi / 2); }

cplx eval_d1(const Backend& b, Kernel k, int n, double t) {
  const double m = b.mass;
  const double s = t < 0.0 ? -1.0 : 1.0;
  switch (k) {
    case Kernel::H:
      return ipow(-I * m, n) * std::exp(-I * m * t) / (2 * m);
    case Kernel::Hrev:
      return ipow(I * m, n) * std::exp(I * m * t) / (2 * m);
    case Kernel::HF:
      return ipow(-I * m * s, n) * std::exp(-I * m * std::abs(t)) / (2 * m);
    case Kernel::HFbar:
      return ipow(I * m * s, n) * std::exp(I * m * std::abs(t)) / (2 * m);
    case Kernel::Delta:
      return delta_d1(m, n, t);
    case Kernel::Ret:
      return t >= 0.0 ? delta_d1(m, n, t) : 0.0;
    case Kernel::Adv:
      return t <= 0.0 ? -delta_d1(m, n, t) : 0.0;
    case Kernel::Contact:
      break;
  }
  throw UnsupportedEvaluation("contact kernels have no pointwise value");
}

// -(1/4pi) ln(mu^2 Q) with Q = z1^2 - w^2, w = z0 - i eps (|z0| - i eps for
// the Feynman kernel). At eps = 0 the boundary value is taken:
// ln|mu^2 Q| + i pi sign(z0) theta(-Q).
template <class S>
S hadamard_d2(const Backend& b, const S& z0, const S& z1, bool feynman) {
  using detail::lift;
  using std::log;
  const S w0 = (feynman && value_real(z0) < 0.0) ? lift<S>(-1.0) * z0 : z0;
  const double pref = -1.0 / (4 * kPi);
  if (b.eps > 0.0) {
    const S w = w0 - lift<S>(I * b.eps);
    return lift<S>(pref) * log((z1 * z1 - w * w) * lift<S>(b.mu * b.mu));
  }
  const S q = z1 * z1 - w0 * w0;
  const double qr = value_real(q);
  if (qr == 0.0) throw UnsupportedEvaluation("d=2 kernel evaluated on the light cone");
  const double sg = qr < 0.0 ? -1.0 : 1.0;
  const cplx jump = qr < 0.0 ? I * kPi * (value_real(w0) >= 0.0 ? 1.0 : -1.0) : cplx(0.0);
  return lift<S>(pref) * (log(q * lift<S>(sg * b.mu * b.mu)) + lift<S>(jump));
}

template <class S>
S eval_d2_generic(const Backend& b, Kernel k, const S& z0, const S& z1) {
  using detail::lift;
  switch (k) {
    case Kernel::H:
      return hadamard_d2(b, z0, z1, false);
    case Kernel::Hrev:
      return hadamard_d2(b, lift<S>(-1.0) * z0, lift<S>(-1.0) * z1, false);
    case Kernel::HF:
      return hadamard_d2(b, z0, z1, true);
    case Kernel::HFbar:
      return detail::conj_scalar(hadamard_d2(b, z0, z1, true));
    default:
      break;
  }
  // piecewise constant kernels
  const double t = value_real(z0), x = std::abs(value_real(z1));
  switch (k) {
    case Kernel::Delta:
      return lift<S>(t > x ? -0.5 : (t < -x ? 0.5 : 0.0));
    case Kernel::Ret:
      return lift<S>(t > x ? -0.5 : 0.0);
    case Kernel::Adv:
      return lift<S>(t < -x ? -0.5 : 0.0);
    default:
      throw UnsupportedEvaluation("contact kernels have no pointwise value");
  }
}

}  // namespace

std::string kernel_name(Kernel k) {
  switch (k) {
    case Kernel::H: return "H";
    case Kernel::Hrev: return "Hrev";
    case Kernel::HF: return "HF";
    case Kernel::HFbar: return "HFbar";
    case Kernel::Delta: return "Delta";
    case Kernel::Ret: return "Ret";
    case Kernel::Adv: return "Adv";
    case Kernel::Contact: return "delta";
  }
  return "?";
}

Kernel kernel_from_name(const std::string& s) {
  for (Kernel k : {Kernel::H, Kernel::Hrev, Kernel::HF, Kernel::HFbar, Kernel::Delta, Kernel::Ret, Kernel::Adv,
                   Kernel::Contact})
    if (kernel_name(k) == s) return k;
  throw SchemaError("unknown kernel label '" + s + "'");
}

Kernel reflected(Kernel k, int& sign) {
  sign = 1;
  switch (k) {
    case Kernel::H: return Kernel::Hrev;
    case Kernel::Hrev: return Kernel::H;
    case Kernel::Delta: sign = -1; return Kernel::Delta;
    case Kernel::Ret: return Kernel::Adv;
    case Kernel::Adv: return Kernel::Ret;
    default: return k;
  }
}

Kernel conjugated(Kernel k) {
  switch (k) {
    case Kernel::H: return Kernel::Hrev;
    case Kernel::Hrev: return Kernel::H;
    case Kernel::HF: return Kernel::HFbar;
    case Kernel::HFbar: return Kernel::HF;
    default: return k;
  }
}

Backend Backend::d1_massive(double m) {
  if (!(m > 0.0)) throw ConfigurationError("d=1 backend needs a positive mass");
  return {"d1-massive", 1, m, 1.0, 0.0, true};
}
Backend Backend::d2_massless(double mu, double eps) { return {"d2-massless", 2, 0.0, mu, eps, true}; }
Backend Backend::mock_d4(double m) { return {"mock-d4-kernel", 4, m, 1.0, 0.0, false}; }

cplx eval_kernel(const Backend& b, Kernel k, const MultiIndex& c, std::span<const double> z) {
  if (!b.numeric) throw UnsupportedEvaluation("backend '" + b.name + "' has no numeric evaluation");
  if (static_cast<int>(z.size()) != b.dim) throw ConfigurationError("eval_kernel: point dimension mismatch");
  if (b.dim == 1) return eval_d1(b, k, c[0], z[0]);
  if (b.dim == 2) {
    const int order = total(c);
    if (order == 0) return eval_d2_generic<cplx>(b, k, cplx(z[0]), cplx(z[1]));
    if (k == Kernel::Delta || k == Kernel::Ret || k == Kernel::Adv) return 0.0;
    auto layout = JetLayout::get(2, order);
    using J = Jet<cplx>;
    J v = eval_d2_generic<J>(b, k, J::variable(layout, 0, z[0]), J::variable(layout, 1, z[1]));
    return v.derivative(c);
  }
  throw UnsupportedEvaluation("no numeric kernel in dimension " + std::to_string(b.dim));
}

double kernel_scaling_degree(const Backend& b, Kernel k, const MultiIndex& c) {
  const int n = total(c);
  if (k == Kernel::Contact) return b.dim + n;
  if (b.dim == 1) return 0.0;  // bounded off the origin, whatever the derivative
  if (b.dim == 2) {
    if (k == Kernel::Delta || k == Kernel::Ret || k == Kernel::Adv) return 0.0;
    return n;  // log singularity, each derivative adds one
  }
  return b.dim - 2 + n;
}

bool kernel_kinked(Kernel k) { return k != Kernel::H && k != Kernel::Hrev; }

// -- checks

namespace {

cplx box_plus_m2(const Backend& b, Kernel k, std::span<const double> z) {
  MultiIndex two{0, 0, 0, 0};
  two[0] = 2;
  cplx r = eval_kernel(b, k, two, z) + b.mass * b.mass * eval_kernel(b, k, z);
  for (int i = 1; i < b.dim; ++i) {
    MultiIndex a{0, 0, 0, 0};
    a[i] = 2;
    r -= eval_kernel(b, k, a, z);
  }
  return r;
}

std::vector<double> neg(std::span<const double> z) {
  std::vector<double> r(z.begin(), z.end());
  for (auto& v : r) v = -v;
  return r;
}

}  // namespace

double kg_residual(const Backend& b, Kernel k, const std::vector<std::vector<double>>& samples) {
  double m = 0.0;
  for (const auto& z : samples) m = std::max(m, std::abs(box_plus_m2(b, k, z)));
  return m;
}

double antisymmetry_residual(const Backend& b, const std::vector<std::vector<double>>& samples) {
  double m = 0.0;
  for (const auto& z : samples) {
    const cplx lhs = (eval_kernel(b, Kernel::H, z) - eval_kernel(b, Kernel::H, neg(z))) / I;
    m = std::max(m, std::abs(lhs - eval_kernel(b, Kernel::Delta, z)));
  }
  return m;
}

double conjugation_residual(const Backend& b, const std::vector<std::vector<double>>& samples) {
  double m = 0.0;
  for (const auto& z : samples)
    m = std::max(m, std::abs(std::conj(eval_kernel(b, Kernel::H, z)) - eval_kernel(b, Kernel::H, neg(z))));
  return m;
}

double feynman_residual(const Backend& b, const std::vector<std::vector<double>>& samples) {
  double m = 0.0;
  for (const auto& z : samples) {
    const cplx expect = z[0] >= 0.0 ? eval_kernel(b, Kernel::H, z) : eval_kernel(b, Kernel::H, neg(z));
    m = std::max(m, std::abs(eval_kernel(b, Kernel::HF, z) - expect));
  }
  return m;
}

double green_residual(const Backend& b, int panel_size) {
  double worst = 0.0;
  for (int p = 0; p < panel_size; ++p) {
    const double c0 = -0.3 + 0.25 * p, c1 = 0.2 - 0.15 * p, r = 0.8 + 0.1 * p;
    if (b.dim == 1) {
      auto f = TestFunction::poly_bump({c0}, {r}, 6);
      auto rhs = f.derivative({2}) + f.scaled(b.mass * b.mass);
      const QuadratureSpec q{24, 4};
      const double lo = std::max(0.0, c0 - r), hi = c0 + r;
      cplx v = integrate_1d([&](double t) { return -eval_d1(b, Kernel::Ret, 0, t) * rhs({t}); }, lo, hi, {c0}, q);
      worst = std::max(worst, std::abs(v - f({0.0})));
    } else if (b.dim == 2) {
      // -Delta^ret = 1/2 on the forward cone; light-cone coordinates u, v
      auto f = TestFunction::poly_bump({c0, c1}, {r, r}, 6);
      auto box = f.derivative({2, 0}) - f.derivative({0, 2});
      const QuadratureSpec q{24, 4};
      const double ext = 2 * (std::abs(c0) + std::abs(c1) + r);
      cplx v = integrate_1d(
          [&](double u) {
            return integrate_1d(
                [&](double v) {
                  const double z0 = 0.5 * (u + v), z1 = 0.5 * (v - u);
                  return box({z0, z1}) * 0.25;  // 1/2 kernel times 1/2 Jacobian
                },
                0.0, ext, {}, q);
          },
          0.0, ext, {}, q);
      worst = std::max(worst, std::abs(v - f({0.0, 0.0})));
    } else {
      throw UnsupportedEvaluation("green_residual: no numeric backend");
    }
  }
  return worst;
}

double homogeneous_scaling_residual(const Backend& b, const std::vector<double>& rhos,
                                    const std::vector<std::vector<double>>& samples, bool subtract_log) {
  double m = 0.0;
  for (double rho : rhos) {
    Backend br = b;
    br.mass = b.mass / rho;
    br.eps = b.eps * rho;
    const double pref = std::pow(rho, b.dim - 2);
    for (const auto& z : samples) {
      std::vector<double> rz(z);
      for (auto& v : rz) v *= rho;
      cplx lhs = pref * eval_kernel(br, Kernel::H, rz);
      if (subtract_log) lhs += std::log(rho) / (2 * kPi);
      m = std::max(m, std::abs(lhs - eval_kernel(b, Kernel::H, z)));
    }
  }
  return m;
}

}  // namespace egret
