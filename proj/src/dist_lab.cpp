#include "egret/dist_lab.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "egret/errors.hpp"

namespace egret {

Distribution::Distribution(int k, PairFn f, std::string name, bool off_origin)
    : k_(k), f_(std::make_shared<const PairFn>(std::move(f))), name_(std::move(name)), off_origin_(off_origin) {}

Distribution Distribution::density(int k, std::function<cplx(std::span<const double>)> t, std::string name,
                                   std::optional<cplx> D, int N, PairOptions opt) {
  Distribution d(
      k, [k, t = std::move(t), opt](const TestFunction& h) { return pair_density(k, t, h, opt); }, std::move(name),
      true);
  d.D_ = D;
  d.N_ = N;
  return d;
}

Distribution Distribution::delta(int k, const MultiIndex& a, cplx c) {
  const double sign = total(a) % 2 ? -1.0 : 1.0;
  std::vector<double> origin(k, 0.0);
  Distribution d(
      k, [a, c, sign, origin](const TestFunction& h) { return c * sign * h.derivative_at(a, origin); },
      "delta" + std::to_string(total(a)));
  d.D_ = cplx(k + total(a));
  return d;
}

Distribution Distribution::zero(int k) {
  return Distribution(k, [](const TestFunction&) { return cplx(0.0); }, "0");
}

cplx Distribution::pair(const TestFunction& h) const {
  if (!f_) throw ConfigurationError("pairing with an empty distribution");
  if (h.dim() != k_) throw ConfigurationError("pairing: dimension mismatch");
  if (h.is_zero()) return 0.0;
  return (*f_)(h);
}

Distribution Distribution::with_declared(std::optional<cplx> D, int N) const {
  Distribution d = *this;
  d.D_ = D;
  d.N_ = N;
  return d;
}

Distribution Distribution::operator+(const Distribution& o) const {
  auto a = f_, b = o.f_;
  Distribution d(k_, [a, b](const TestFunction& h) { return (*a)(h) + (*b)(h); }, name_ + "+" + o.name_,
                 off_origin_ || o.off_origin_);
  return d;
}

Distribution Distribution::operator-(const Distribution& o) const { return *this + o.scaled(-1.0); }

Distribution Distribution::scaled(cplx c) const {
  auto a = f_;
  Distribution d(k_, [a, c](const TestFunction& h) { return c * (*a)(h); }, name_, off_origin_);
  d.D_ = D_;
  d.N_ = N_;
  return d;
}

Distribution Distribution::differentiated(const std::map<MultiIndex, cplx>& op) const {
  auto a = f_;
  Distribution d(
      k_,
      [a, op](const TestFunction& h) {
        cplx s = 0.0;
        for (const auto& [idx, c] : op) s += c * (total(idx) % 2 ? -1.0 : 1.0) * (*a)(h.derivative(idx));
        return s;
      },
      "D(" + name_ + ")", off_origin_);
  return d;
}

// -- quadrature

namespace {

std::vector<double> geometric_breaks(double r_min, double r_max) {
  std::vector<double> out;
  for (int e = static_cast<int>(std::ceil(std::log2(r_max))); e > -64; --e) {
    const double g = std::ldexp(1.0, e);
    if (g <= r_min) break;
    if (g < r_max) out.push_back(g);
  }
  return out;
}

cplx density_1d(const std::function<cplx(std::span<const double>)>& t, const TestFunction& h,
                const QuadratureSpec& q) {
  const Support& s = h.support();
  const double a = s.lo[0], b = s.hi[0], r = s.r_inner;
  std::vector<double> br = h.breakpoints()[0];
  br.push_back(0.0);
  const double rmax = std::max(std::abs(a), std::abs(b));
  for (double g : geometric_breaks(r, rmax)) {
    br.push_back(g);
    br.push_back(-g);
  }
  auto f = [&](double y) {
    const double yy[1] = {y};
    const cplx hv = h(std::span<const double>(yy, 1));
    if (hv == cplx(0.0)) return hv;
    return t(std::span<const double>(yy, 1)) * hv;
  };
  if (r <= 0.0) return integrate_1d(f, a, b, br, q);
  cplx sum = 0.0;
  if (a < -r) sum += integrate_1d(f, a, std::min(b, -r), br, q);
  if (b > r) sum += integrate_1d(f, std::max(a, r), b, br, q);
  return sum;
}

// polar (k=2) or spherical (k=3) coordinates around the origin
cplx density_radial(int k, const std::function<cplx(std::span<const double>)>& t, const TestFunction& h,
                    const QuadratureSpec& q) {
  const Support& s = h.support();
  double rmax = 0.0;
  for (int i = 0; i < k; ++i) rmax += std::pow(std::max(std::abs(s.lo[i]), std::abs(s.hi[i])), 2);
  rmax = std::sqrt(rmax);
  double dist = 0.0;
  for (int i = 0; i < k; ++i) {
    const double g = std::max({s.lo[i], -s.hi[i], 0.0});
    dist += g * g;
  }
  const double rmin = std::max(s.r_inner, std::sqrt(dist));
  std::vector<double> br = geometric_breaks(rmin, rmax);
  for (const auto& bp : h.breakpoints())
    for (double v : bp)
      if (std::abs(v) > rmin && std::abs(v) < rmax) br.push_back(std::abs(v));
  const int nphi = 32 * q.points / 5 * q.subdiv;
  const GaussRule& gt = GaussRule::get(q.points * q.subdiv);
  std::vector<double> y(k);
  auto shell = [&](double r) -> cplx {
    cplx acc = 0.0;
    if (k == 2) {
      for (int j = 0; j < nphi; ++j) {
        const double ph = 2 * std::numbers::pi * (j + 0.5) / nphi;
        y[0] = r * std::cos(ph);
        y[1] = r * std::sin(ph);
        const cplx hv = h(y);
        if (hv != cplx(0.0)) acc += t(y) * hv;
      }
      return acc * (2 * std::numbers::pi / nphi) * r;
    }
    for (std::size_t i = 0; i < gt.x.size(); ++i) {
      const double ct = gt.x[i], st = std::sqrt(1 - ct * ct);
      for (int j = 0; j < nphi; ++j) {
        const double ph = 2 * std::numbers::pi * (j + 0.5) / nphi;
        y[0] = r * st * std::cos(ph);
        y[1] = r * st * std::sin(ph);
        y[2] = r * ct;
        const cplx hv = h(y);
        if (hv != cplx(0.0)) acc += t(y) * hv * gt.w[i];
      }
    }
    return acc * (2 * std::numbers::pi / nphi) * r * r;
  };
  return integrate_1d(shell, rmin, rmax, br, q);
}

}  // namespace

cplx pair_density(int k, const std::function<cplx(std::span<const double>)>& t, const TestFunction& h,
                  const PairOptions& opt) {
  const Support& s = h.support();
  if (s.empty || h.is_zero()) return 0.0;
  if (!s.bounded()) throw UnsupportedEvaluation("pairing: test function without compact support");
  if (k > 3) throw UnsupportedEvaluation("pairing: densities are supported for k <= 3");
  auto run = [&](const QuadratureSpec& q) { return k == 1 ? density_1d(t, h, q) : density_radial(k, t, h, q); };
  QuadratureSpec q = opt.quad;
  cplx prev = run(q);
  for (int r = 0; r < opt.max_refinements; ++r) {
    q.subdiv *= 2;
    const cplx next = run(q);
    if (std::abs(next - prev) <= opt.tol * std::max(1.0, std::abs(next))) return next;
    prev = next;
  }
  ConvergenceError e("pairing: quadrature refinement did not converge");
  e.partial_value = prev;
  throw e;
}

TestFunction scaled_test_function(const TestFunction& h, double rho) {
  return h.dilated(rho).scaled(std::pow(rho, -h.dim()));
}

std::vector<MultiIndex> multi_indices(int k, int max_order) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= max_order; ++n) {
    MultiIndex a{0, 0, 0, 0};
    auto rec = [&](auto&& self, int i, int left) -> void {
      if (i == k - 1) {
        a[i] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[i] = v;
        self(self, i + 1, left - v);
      }
      a[i] = 0;
    };
    rec(rec, 0, n);
  }
  return out;
}

std::vector<TestFunction> off_origin_panel(int k) {
  std::vector<TestFunction> p;
  const std::vector<std::vector<double>> centres{{1.5, 0.2, -0.3}, {-1.2, 0.4, 0.1}, {0.9, -1.1, 0.5}};
  const std::vector<double> radii{0.5, 0.6, 0.4};
  for (std::size_t i = 0; i < centres.size(); ++i) {
    std::vector<double> c(centres[i].begin(), centres[i].begin() + k);
    p.push_back(TestFunction::poly_bump(c, std::vector<double>(k, radii[i]), 6));
  }
  return p;
}

std::vector<TestFunction> origin_panel(int k) {
  std::vector<TestFunction> p;
  const std::vector<std::vector<double>> centres{{0.31, -0.17, 0.23}, {-0.22, 0.29, -0.13}};
  for (const auto& cc : centres) {
    std::vector<double> c(cc.begin(), cc.begin() + k);
    p.push_back(TestFunction::poly_bump(c, std::vector<double>(k, 1.0), 8));
  }
  return p;
}

// -- scaling

ScalingFit scaling_degree_estimate(const Distribution& t, const std::vector<TestFunction>& panel, int ladder,
                                   int rungs) {
  ScalingFit fit;
  fit.sd = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& h : panel) {
    Eigen::MatrixXd X(rungs, 3);
    Eigen::VectorXd y(rungs);
    bool ok = true;
    for (int i = 0; i < rungs; ++i) {
      const int j = ladder - rungs + 1 + i;
      const double rho = std::ldexp(1.0, -j);
      const cplx v = t.pair(scaled_test_function(h, rho));
      if (!(std::abs(v) > 1e-280)) {
        ok = false;
        break;
      }
      const double lr = std::log(rho);
      X(i, 0) = 1.0;
      X(i, 1) = lr;
      X(i, 2) = std::log(std::abs(lr));
      y(i) = std::log(std::abs(v));
    }
    if (!ok) {
      fit.per_function.push_back(std::nan(""));
      continue;
    }
    const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd res = y - X * beta;
    const double s2 = res.squaredNorm() / std::max(1, rungs - 3);
    const Eigen::MatrixXd cov = (X.transpose() * X).inverse() * s2;
    const double sd = -beta(1);
    fit.per_function.push_back(sd);
    if (!any || sd > fit.sd) {
      fit.sd = sd;
      fit.ci = 2.0 * std::sqrt(std::max(0.0, cov(1, 1)));
      fit.log_power = beta(2);
      any = true;
    }
  }
  if (!any) throw ConvergenceError("scaling degree: every panel pairing vanished");
  fit.almost_homogeneous = std::abs(fit.log_power) > 0.5;
  return fit;
}

ScalingFit scaling_degree_estimate(const Distribution& t) {
  return scaling_degree_estimate(t, t.off_origin() ? off_origin_panel(t.dim()) : origin_panel(t.dim()));
}

namespace {

std::vector<cplx> adjoint_euler_coeffs(cplx D, int k, int n) {
  // ((D - k) - E)^n = sum_j C(n, j) (D - k)^{n-j} (-E)^j
  std::vector<cplx> c(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double binom = factorial(n) / (factorial(j) * factorial(n - j));
    c[j] = binom * std::pow(D - cplx(k), n - j) * (j % 2 ? -1.0 : 1.0);
  }
  return c;
}

}  // namespace

double almost_homogeneity_check(const Distribution& t, cplx D, int N, const std::vector<TestFunction>& panel) {
  const auto c = adjoint_euler_coeffs(D, t.dim(), N + 1);
  double worst = 0.0;
  for (const auto& h : panel) worst = std::max(worst, std::abs(t.pair(h.euler_poly(c))));
  return worst;
}

double almost_homogeneity_check(const Distribution& t, cplx D, int N) {
  return almost_homogeneity_check(t, D, N, off_origin_panel(t.dim()));
}

double almost_homogeneity_check(const std::function<Distribution(double)>& family, double m, cplx D, int N,
                                const std::vector<TestFunction>& panel, double step) {
  const int n = N + 1;
  if (n > 3) throw ConfigurationError("mass-dependent homogeneity check supports N <= 2");
  const int k = family(m).dim();
  double worst = 0.0;
  for (const auto& h : panel) {
    cplx total_v = 0.0;
    for (int j = 0; j <= n; ++j) {
      // (m d/dm)^j <t^{(m)}, ((D-k) - E)^{n-j} h>, derivatives in s = log m
      const TestFunction ph = h.euler_poly(adjoint_euler_coeffs(D, k, n - j));
      auto f = [&](int shift) { return family(m * std::exp(shift * step)).pair(ph); };
      cplx der;
      switch (j) {
        case 0: der = f(0); break;
        case 1: der = (f(1) - f(-1)) / (2 * step); break;
        case 2: der = (f(1) - 2.0 * f(0) + f(-1)) / (step * step); break;
        default: der = (f(2) - 2.0 * f(1) + 2.0 * f(-1) - f(-2)) / (2 * step * step * step); break;
      }
      const double binom = factorial(n) / (factorial(j) * factorial(n - j));
      total_v += binom * (j % 2 ? -1.0 : 1.0) * der;
    }
    worst = std::max(worst, std::abs(total_v));
  }
  return worst;
}

// -- W projector

std::map<MultiIndex, TestFunction> default_jet_bumps(int k, int omega, double r0, ChiProfile profile) {
  std::map<MultiIndex, TestFunction> w;
  for (const auto& a : multi_indices(k, omega)) w.emplace(a, TestFunction::jet_bump(k, a, r0, profile));
  return w;
}

double jet_at_origin_norm(const TestFunction& h, int omega) {
  if (omega < 0) return 0.0;
  std::vector<double> origin(h.dim(), 0.0);
  const Jet<cplx> j = h.jet_at(origin, omega);
  double worst = 0.0;
  for (const auto& b : multi_indices(h.dim(), omega)) worst = std::max(worst, std::abs(j.derivative(b)));
  return worst;
}

TestFunction project_W(const TestFunction& h, int omega, const std::map<MultiIndex, TestFunction>& w) {
  if (omega < 0) return h;
  const int k = h.dim();
  const auto idx = multi_indices(k, omega);
  std::vector<double> origin(k, 0.0);
  for (const auto& a : idx) {
    auto it = w.find(a);
    if (it == w.end()) throw InvalidProjector("project_W: missing w_a for |a| <= omega");
    const Jet<cplx> j = it->second.jet_at(origin, omega);
    for (const auto& b : idx) {
      const cplx want = (a == b) ? 1.0 : 0.0;
      if (std::abs(j.derivative(b) - want) > 1e-12) throw InvalidProjector("project_W: w_a does not reproduce jets");
    }
  }
  const Jet<cplx> hj = h.jet_at(origin, omega);
  TestFunction out = h;
  for (const auto& a : idx) {
    const cplx c = hj.derivative(a);
    if (c != cplx(0.0)) out = out - w.at(a).scaled(c);
  }
  return out;
}

}  // namespace egret
