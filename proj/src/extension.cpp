#include "egret/extension.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "egret/errors.hpp"

namespace egret {

namespace {

double sign_of(const MultiIndex& a) { return total(a) % 2 ? -1.0 : 1.0; }

struct Degree0 {
  cplx D;
  int N;
};

Degree0 degree_of(const Distribution& t0) {
  if (auto D = t0.declared_degree()) return {*D, t0.declared_power()};
  ScalingFit fit;
  try {
    fit = scaling_degree_estimate(t0);
  } catch (const ConvergenceError&) {
    // vanishes near the origin: any degree is an upper bound
    return {cplx(-std::numeric_limits<double>::infinity()), 0};
  }
  return {cplx(fit.sd), fit.almost_homogeneous ? 1 : 0};
}

}  // namespace

cplx limit_pairing(const Distribution& t0, const TestFunction& g, cplx D, int N, int first_order,
                   const ExtensionOptions& opt) {
  // bounded density: the direct extension is the plain integral
  if (D.real() < 0.0) return t0.pair(g);
  if (D.imag() != 0.0) throw ConfigurationError("limit_pairing: complex degree needs Re D < 0");
  const int k = t0.dim();
  std::vector<double> p;
  for (int a = first_order; a < first_order + opt.taylor_terms; ++a) {
    p.push_back(k + a - D.real());
    if (p.back() <= 1e-9) throw ExtensionRefused("limit_pairing: the cut-off limit diverges (sd >= k + order)");
  }
  const int M = 1 + static_cast<int>(p.size()) * (N + 1);
  const int L = M + 2;
  std::vector<cplx> v;
  std::vector<int> js;
  auto sample = [&](int j) {
    const double rho = std::ldexp(1.0, j);
    return t0.pair(TestFunction::chi(k, rho, opt.profile) * g);
  };
  cplx prev = 0.0;
  bool have = false;
  for (int j = opt.ladder_start; j <= opt.ladder_max; ++j) {
    v.push_back(sample(j));
    js.push_back(j);
    if (static_cast<int>(v.size()) < L) continue;
    Eigen::MatrixXcd X(L, M);
    Eigen::VectorXcd y(L);
    const int off = static_cast<int>(v.size()) - L;
    for (int r = 0; r < L; ++r) {
      const double rho = std::ldexp(1.0, js[off + r]);
      const double lr = std::log(rho);
      X(r, 0) = 1.0;
      int c = 1;
      for (double e : p)
        for (int i = 0; i <= N; ++i) X(r, c++) = std::pow(rho, -e) * std::pow(lr, i);
      y(r) = v[off + r];
    }
    Eigen::VectorXd scale(M);
    for (int c = 0; c < M; ++c) {
      scale(c) = X.col(c).cwiseAbs().maxCoeff();
      if (scale(c) > 0) X.col(c) /= scale(c);
    }
    const Eigen::VectorXcd beta = X.colPivHouseholderQr().solve(y);
    const cplx est = beta(0) / scale(0);
    if (have && std::abs(est - prev) <= opt.tol * std::max(1.0, std::abs(est))) return est;
    prev = est;
    have = true;
  }
  ConvergenceError e("limit_pairing: rho ladder exhausted before convergence");
  e.partial_value = prev;
  throw e;
}

ExtensionResult direct_extend(const Distribution& t0, const ExtensionOptions& opt) {
  const int k = t0.dim();
  const Degree0 deg = degree_of(t0);
  if (deg.D.real() >= k - opt.sd_margin) {
    std::ostringstream os;
    os << "direct extension refused: sd = " << deg.D.real() << " >= k = " << k;
    throw ExtensionRefused(os.str());
  }
  ExtensionResult r;
  r.method = "direct";
  r.omega = std::isfinite(deg.D.real()) ? static_cast<int>(std::floor(deg.D.real())) - k : -k - 1;
  r.t = Distribution(
            k, [t0, deg, opt](const TestFunction& h) { return limit_pairing(t0, h, deg.D, deg.N, 0, opt); },
            "direct(" + t0.name() + ")")
            .with_declared(deg.D, deg.N);
  return r;
}

SingularOrder singular_order(const Distribution& t0) {
  const ScalingFit fit = scaling_degree_estimate(t0);
  const double r = std::round(fit.sd);
  return {static_cast<int>(r) - t0.dim(), fit.sd, std::abs(fit.sd - r) > 0.3};
}

ExtensionResult w_extend(const Distribution& t0, int omega, const std::map<MultiIndex, TestFunction>& w,
                         const ExtensionOptions& opt) {
  if (omega < 0) throw ConfigurationError("w_extend: singular order must be >= 0");
  const int k = t0.dim();
  // validates the jets of the w_a up front
  project_W(origin_panel(k).front(), omega, w);
  const Degree0 deg = degree_of(t0);
  ExtensionResult r;
  r.method = "w";
  r.omega = omega;
  r.t = Distribution(
            k,
            [t0, deg, opt, omega, w](const TestFunction& h) {
              return limit_pairing(t0, project_W(h, omega, w), deg.D, deg.N, omega + 1, opt);
            },
            "W(" + t0.name() + ")")
            .with_declared(deg.D, deg.N + 1);
  return r;
}

ExtensionResult w_extend(const Distribution& t0, const ExtensionOptions& opt) {
  const SingularOrder so = singular_order(t0);
  return w_extend(t0, so.omega, default_jet_bumps(t0.dim(), so.omega), opt);
}

ExtensionResult ambiguity_shift(const ExtensionResult& t, const std::map<MultiIndex, cplx>& C, AmbiguityMode mode,
                                double D) {
  ExtensionResult r = t;
  const int k = t.t.dim();
  for (const auto& [a, c] : C) {
    if (c == cplx(0.0)) continue;
    if (mode == AmbiguityMode::General && total(a) > t.omega)
      throw ExtensionRefused("ambiguity_shift: |a| exceeds the singular order");
    if (mode == AmbiguityMode::AlmostHomogeneous && std::abs(total(a) - (D - k)) > 1e-12)
      throw ExtensionRefused("ambiguity_shift: almost homogeneous mode requires |a| = D - k");
    r.t = r.t + Distribution::delta(k, a, c);
    r.counterterms[a] += c;
  }
  r.t = r.t.with_declared(t.t.declared_degree(), t.t.declared_power());
  return r;
}

ExtensionResult diff_renorm(const Distribution& f0, const std::map<MultiIndex, cplx>& op, const Distribution& t0,
                            const ExtensionOptions& opt) {
  const int k = t0.dim();
  const Distribution applied = f0.differentiated(op);
  for (const auto& h : off_origin_panel(k)) {
    const cplx a = t0.pair(h), b = applied.pair(h);
    if (std::abs(a - b) > opt.verify_tol * std::max(1.0, std::abs(a))) {
      std::ostringstream os;
      os << "diff_renorm: D f0 != t0 off the origin (|diff| = " << std::abs(a - b) << ")";
      throw WrongOperatorError(os.str());
    }
  }
  const ExtensionResult f = direct_extend(f0, opt);
  int order = 0;
  for (const auto& [a, c] : op) order = std::max(order, total(a));
  ExtensionResult r;
  r.method = "diffren";
  std::optional<cplx> D = t0.declared_degree();
  if (!D && f.t.declared_degree()) D = *f.t.declared_degree() + cplx(order);
  if (D) r.omega = static_cast<int>(std::lround(D->real())) - k;
  r.t = f.t.differentiated(op).with_declared(D, t0.declared_power() + 1);
  return r;
}

// -- minimal subtraction

std::vector<cplx> laurent_fit(const std::function<Distribution(cplx)>& family, const TestFunction& h, int pole_order,
                              const MsOptions& opt) {
  if (pole_order < 0 || pole_order > 2) throw ConfigurationError("laurent_fit: pole order is capped at 2");
  const std::vector<cplx> rays{1.0, -1.0, cplx(0, 1), cplx(0, -1)};
  const int P = pole_order, M = opt.max_power;
  const int n = static_cast<int>(rays.size() * opt.radii.size());
  const int cols = P + M + 1;
  if (n < cols) throw ConfigurationError("laurent_fit: too few samples");
  double rref = 0.0;
  for (double r : opt.radii) rref = std::max(rref, r);
  Eigen::MatrixXcd X(n, cols);
  Eigen::VectorXcd y(n);
  int row = 0;
  for (double r : opt.radii)
    for (cplx u : rays) {
      const cplx z = r * u;
      const cplx zs = z / rref;
      for (int c = 0; c < cols; ++c) X(row, c) = std::pow(zs, c - P);
      y(row) = family(z).pair(h);
      ++row;
    }
  const Eigen::VectorXcd beta = X.colPivHouseholderQr().solve(y);
  const double res = (X * beta - y).norm();
  if (res > opt.fit_tol * std::max(1.0, y.norm())) {
    std::ostringstream os;
    os << "laurent_fit: residual " << res << " exceeds tolerance; pole order above " << P << " or non-analytic family";
    throw NotAnalyticError(os.str());
  }
  std::vector<cplx> c(cols);
  for (int i = 0; i < cols; ++i) c[i] = beta(i) / std::pow(rref, i - P);
  return c;
}

ExtensionResult analytic_ms(const std::function<Distribution(cplx)>& family, int k, int pole_order, int omega,
                            const MsOptions& opt) {
  ExtensionResult r;
  r.method = "ms";
  r.omega = omega;
  const int P = pole_order;
  for (const auto& h : off_origin_panel(k)) {
    const auto c = laurent_fit(family, h, P, opt);
    for (int p = 1; p <= P; ++p)
      if (std::abs(c[P - p]) > opt.locality_tol)
        throw InconsistencyError("analytic_ms: principal part pairs non-trivially away from the origin");
  }
  if (P > 0 && omega >= 0) {
    for (const auto& [a, w] : default_jet_bumps(k, omega, opt.r0)) {
      const auto c = laurent_fit(family, w, P, opt);
      for (int p = 1; p <= P; ++p) r.poles[p][a] = sign_of(a) * c[P - p];
    }
  }
  r.t = Distribution(
      k, [family, P, opt](const TestFunction& h) { return laurent_fit(family, h, P, opt)[P]; }, "MS");
  return r;
}

Distribution power_density_1d(cplx s) {
  std::ostringstream os;
  os << "|y|^-(" << s << ")";
  return Distribution::density(
      1, [s](std::span<const double> y) { return std::exp(-s * std::log(std::abs(y[0]))); }, os.str(), s, 0);
}

ExtensionResult regularized_power_1d(cplx s, const ExtensionOptions& opt) {
  const cplx norm = (2.0 - s) * (1.0 - s);
  if (std::abs(norm) < 1e-14) throw ConfigurationError("regularized_power_1d: s = 1, 2 are poles of the rule");
  const cplx e = 2.0 - s;
  Distribution f0 = Distribution::density(
      1, [e, norm](std::span<const double> y) { return std::exp(e * std::log(std::abs(y[0]))) / norm; }, "f0",
      s - 2.0, 0);
  return diff_renorm(f0, {{MultiIndex{2, 0, 0, 0}, 1.0}}, power_density_1d(s), opt);
}

std::map<MultiIndex, cplx> delta_coefficients(const Distribution& d, int omega, double r0) {
  std::map<MultiIndex, cplx> c;
  for (const auto& [a, w] : default_jet_bumps(d.dim(), omega, r0)) c[a] = sign_of(a) * d.pair(w);
  return c;
}

// -- mass expansion

namespace {

// derivatives d^l/dm^l at m = 0 for l <= order from a polynomial fit through
// m_j = j * step
std::vector<cplx> forward_derivatives(const std::function<cplx(double)>& f, int order, double step) {
  const int deg = order + 4, n = order + 6;
  Eigen::MatrixXd X(n, deg + 1);
  Eigen::VectorXcd y(n);
  for (int j = 0; j < n; ++j) {
    for (int c = 0; c <= deg; ++c) X(j, c) = std::pow(static_cast<double>(j), c);
    y(j) = f(j * step);
  }
  const Eigen::VectorXcd beta = X.cast<cplx>().colPivHouseholderQr().solve(y);
  std::vector<cplx> d(order + 1);
  for (int l = 0; l <= order; ++l) d[l] = beta(l) * factorial(l) / std::pow(step, l);
  return d;
}

}  // namespace

MassTaylor mass_taylor_split(const std::function<Distribution(double)>& family, int k, int order, double step,
                             double tol) {
  if (order < 0) order = -1;
  MassTaylor mt;
  mt.order = order;
  struct Cache {
    std::mutex mu;
    std::map<std::string, std::vector<cplx>> values;
  };
  auto cache = std::make_shared<Cache>();
  auto derivs = [family, order, step, tol, cache](const TestFunction& h) {
    {
      std::lock_guard<std::mutex> lock(cache->mu);
      auto it = cache->values.find(h.key());
      if (it != cache->values.end()) return it->second;
    }
    auto f = [&](double m) { return family(m).pair(h); };
    const auto coarse = forward_derivatives(f, order, step);
    const auto fine = forward_derivatives(f, order, step / 2);
    for (int l = 0; l <= order; ++l)
      if (std::abs(coarse[l] - fine[l]) > tol * std::max(1.0, std::abs(fine[l]))) {
        std::ostringstream os;
        os << "mass_taylor_split: unstable finite differences at order " << l << " (step " << step << ": "
           << coarse[l] << ", step " << step / 2 << ": " << fine[l] << ")";
        throw StepSizeError(os.str());
      }
    std::lock_guard<std::mutex> lock(cache->mu);
    cache->values[h.key()] = fine;
    return fine;
  };
  for (int l = 0; l <= order; ++l)
    mt.u.push_back(Distribution(
        k, [derivs, l](const TestFunction& h) { return derivs(h)[l]; }, "u" + std::to_string(l), true));
  mt.remainder = [family, derivs, order, k](double m) {
    return Distribution(
        k,
        [family, derivs, order, m](const TestFunction& h) {
          cplx v = family(m).pair(h);
          if (order >= 0) {
            const auto d = derivs(h);
            for (int l = 0; l <= order; ++l) v -= std::pow(m, l) / factorial(l) * d[l];
          }
          return v / std::pow(m, order + 1);
        },
        "t_red", true);
  };
  return mt;
}

MassTaylor mass_taylor_split(const std::function<Distribution(double)>& family, int k, int D, int d, int n) {
  return mass_taylor_split(family, k, D - d * (n - 1));
}

}  // namespace egret
