#include "doctest.h"
#include "egret/dist_lab.hpp"
#include "egret/errors.hpp"
#include "egret/extension.hpp"

using namespace egret;

namespace {

template <class F>
cplx simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  cplx s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

double bump(double t, double c, double r, int p) {
  const double u = (t - c) / r;
  return std::abs(u) < 1 ? std::pow(1 - u * u, p) : 0.0;
}

Distribution inv_abs() {
  return Distribution::density(1, [](std::span<const double> y) { return cplx(1.0 / std::abs(y[0])); }, "1/|y|", 1.0,
                               0);
}
Distribution log_abs() {
  return Distribution::density(1, [](std::span<const double> y) { return cplx(std::log(std::abs(y[0]))); }, "log|y|",
                               0.0, 1);
}

}  // namespace

TEST_CASE("pairing: oracle, zero, linearity") {
  auto t = inv_abs();
  auto h = TestFunction::poly_bump({1.5}, {0.5}, 4);
  cplx ref = simpson([](double y) { return bump(y, 1.5, 0.5, 4) / y; }, 1.0, 2.0);
  CHECK(std::abs(t.pair(h) - ref) < 1e-10);
  CHECK(t.pair(TestFunction::zero(1)) == cplx(0.0));
  auto h2 = TestFunction::poly_bump({-1.3}, {0.7}, 3, cplx(0.0, 2.0));
  CHECK(std::abs(t.pair(h + h2) - t.pair(h) - t.pair(h2)) < 1e-9);
}

TEST_CASE("scaling degree of delta derivatives") {
  for (int k = 1; k <= 3; ++k)
    for (const auto& a : multi_indices(k, 2)) {
      ExtensionResult z{Distribution::zero(k), "zero", 2, {}, {}};
      auto d = ambiguity_shift(z, {{a, 1.0}});
      auto fit = scaling_degree_estimate(d.t, origin_panel(k));
      CHECK(std::abs(fit.sd - (k + total(a))) < 0.1);
      CHECK_FALSE(fit.almost_homogeneous);
    }
}

TEST_CASE("scaling degree of densities") {
  auto f1 = scaling_degree_estimate(inv_abs());
  CHECK(std::abs(f1.sd - 1.0) < 1e-6);
  CHECK_FALSE(f1.almost_homogeneous);
  auto fl = scaling_degree_estimate(log_abs());
  CHECK(std::abs(fl.sd) < 0.1);
  CHECK(fl.almost_homogeneous);
}

TEST_CASE("almost homogeneity residuals") {
  CHECK(almost_homogeneity_check(inv_abs(), 1.0, 0) < 1e-8);
  CHECK(almost_homogeneity_check(log_abs(), 0.0, 1) < 1e-8);
  CHECK(almost_homogeneity_check(log_abs(), 0.0, 0) > 1e-3);
  // k = 2: |y|^{-1} is homogeneous of degree 1
  auto t2 = Distribution::density(2, [](std::span<const double> y) { return cplx(1.0 / std::hypot(y[0], y[1])); },
                                  "1/|y|");
  CHECK(almost_homogeneity_check(t2, 1.0, 0) < 1e-8);
  CHECK(almost_homogeneity_check(t2, 1.5, 0) > 1e-3);

  // e^{-m|y|}/|y| scales with (y, m) -> (rho y, m / rho) at degree 1
  auto fam = [](double m) {
    return Distribution::density(
        1, [m](std::span<const double> y) { return cplx(std::exp(-m * std::abs(y[0])) / std::abs(y[0])); }, "yuk");
  };
  auto panel = off_origin_panel(1);
  CHECK(almost_homogeneity_check(fam, 0.7, 1.0, 0, panel, 1e-3) < 1e-6);
  CHECK(almost_homogeneity_check(fam, 0.7, 2.0, 0, panel, 1e-3) > 1e-3);
}

TEST_CASE("W projector") {
  const int omega = 2;
  auto w = default_jet_bumps(1, omega);
  auto off = TestFunction::poly_bump({1.5}, {0.5}, 5);
  CHECK(project_W(off, omega, w) == off);
  for (const auto& [b, wb] : w) {
    auto p = project_W(wb, omega, w);
    for (double y : {-0.7, -0.2, 0.0, 0.1, 0.45, 0.9}) CHECK(std::abs(p({y})) < 1e-14);
  }
  auto h = TestFunction::poly_bump({0.2}, {1.0}, 6, cplx(1.0, -0.5));
  auto wh = project_W(h, omega, w);
  CHECK(jet_at_origin_norm(wh, omega) < 1e-14);
  CHECK(jet_at_origin_norm(h, omega) > 0.1);
  auto wwh = project_W(wh, omega, w);
  for (double y : {-0.6, 0.05, 0.3, 0.8}) CHECK(std::abs(wwh({y}) - wh({y})) < 1e-14);
  // k = 2
  auto w2 = default_jet_bumps(2, 1);
  auto h2 = TestFunction::poly_bump({0.1, -0.2}, {1.0, 1.0}, 6);
  CHECK(jet_at_origin_norm(project_W(h2, 1, w2), 1) < 1e-14);
  // a bad projector
  auto bad = w;
  bad.at(MultiIndex{1, 0, 0, 0}) = TestFunction::jet_bump(1, {1, 0, 0, 0}, 0.5).scaled(2.0);
  CHECK_THROWS_AS(project_W(h, omega, bad), InvalidProjector);
  bad.erase(MultiIndex{2, 0, 0, 0});
  CHECK_THROWS_AS(project_W(h, omega, bad), InvalidProjector);
}
