#include "doctest.h"
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

Distribution density(std::function<double(double)> f, std::string name, std::optional<cplx> D, int N) {
  return Distribution::density(1, [f](std::span<const double> y) { return cplx(f(y[0])); }, std::move(name), D, N);
}

Distribution inv_abs() { return density([](double y) { return 1.0 / std::abs(y); }, "1/|y|", 1.0, 0); }
Distribution log_abs() { return density([](double y) { return std::log(std::abs(y)); }, "log|y|", 0.0, 1); }
Distribution inv_sq() { return density([](double y) { return 1.0 / (y * y); }, "1/y^2", 2.0, 0); }

const MultiIndex d0{0, 0, 0, 0}, d1{1, 0, 0, 0}, d2{2, 0, 0, 0}, d3{3, 0, 0, 0};

// functions in D_0 vanishing at the origin
std::vector<TestFunction> vanishing_at_zero() {
  return {TestFunction::monomial(1, d1) * TestFunction::poly_bump({0.1}, {1.0}, 6),
          TestFunction::poly_bump({0.6}, {0.5}, 4), TestFunction::monomial(1, d2, cplx(0, 1)) *
                                                         TestFunction::poly_bump({-0.2}, {0.9}, 5)};
}

}  // namespace

TEST_CASE("direct extension") {
  auto h = TestFunction::poly_bump({0.1}, {1.0}, 6);
  ExtensionOptions a, b;
  b.profile = ChiProfile::Steep;
  auto ta = direct_extend(log_abs(), a), tb = direct_extend(log_abs(), b);
  cplx va = ta.pair(h), vb = tb.pair(h);
  CHECK(std::abs(va - vb) < 1e-7);
  // oracle: y = +-u^4 substitution makes the log singularity harmless
  auto side = [](double s) {
    return simpson([s](double u) { return u == 0 ? 0.0 : 4 * u * u * u * std::log(std::pow(u, 4)) * bump(s * std::pow(u, 4), 0.1, 1.0, 6); }, 0, 1.1);
  };
  cplx ref = side(1.0) + side(-1.0);
  CHECK(std::abs(va - ref) < 1e-8);

  // |y|^{-1/2}: the improper integral
  auto half = power_density_1d(0.5);
  cplx v = direct_extend(half).pair(h);
  auto iside = [](double s) { return simpson([s](double u) { return 2 * bump(s * u * u, 0.1, 1.0, 6); }, 0, 1.1); };
  CHECK(std::abs(v - (iside(1.0) + iside(-1.0))) < 1e-8);

  // density vanishing near 0
  auto far = density([](double y) { return std::abs(y) < 0.5 ? 0.0 : std::pow(std::abs(y) - 0.5, 4) / y; }, "far",
                     std::nullopt, 0);
  CHECK(std::abs(direct_extend(far).pair(h) - far.pair(h)) < 1e-8);

  CHECK_THROWS_AS(direct_extend(inv_abs()), ExtensionRefused);
  // extension property
  for (const auto& g : off_origin_panel(1)) CHECK(std::abs(ta.pair(g) - log_abs().pair(g)) < 1e-7);
}

TEST_CASE("singular order") {
  CHECK(singular_order(inv_sq()).omega == 1);
  CHECK(singular_order(inv_abs()).omega == 0);
  CHECK(singular_order(density([](double y) { return std::exp(-y * y); }, "gauss", std::nullopt, 0)).omega < 0);
  CHECK_FALSE(singular_order(inv_abs()).ambiguous);
  CHECK(singular_order(power_density_1d(1.5)).ambiguous);
}

TEST_CASE("W extension") {
  auto t0 = inv_abs();
  auto w = default_jet_bumps(1, 0, 0.5);
  auto tw = w_extend(t0, 0, w);
  for (const auto& g : off_origin_panel(1)) CHECK(std::abs(tw.pair(g) - t0.pair(g)) < 1e-7);
  // regularised integral with an even bump, h(0) = 1
  auto h = TestFunction::poly_bump({0.0}, {1.0}, 6);
  auto w0 = w.at(d0);
  auto integrand = [&](double y) { return (bump(y, 0, 1, 6) - w0({y}).real()) / std::abs(y); };
  cplx ref = simpson(integrand, -1.2, -1e-300) + simpson(integrand, 1e-300, 1.2);
  CHECK(std::abs(tw.pair(h) - ref) < 1e-7);

  // two W-extensions differ by c delta with c = 2 log(r0/r0') (Frullani)
  auto tw2 = w_extend(t0, 0, default_jet_bumps(1, 0, 0.25));
  Distribution diff = tw2.t - tw.t;
  for (const auto& g : vanishing_at_zero()) CHECK(std::abs(diff.pair(g)) < 1e-7);
  auto c = delta_coefficients(diff, 0);
  CHECK(std::abs(c.at(d0) - 2 * std::log(0.5 / 0.25)) < 1e-7);
  CHECK(std::abs(diff.pair(h) - c.at(d0)) < 1e-7);
  CHECK_THROWS_AS(w_extend(t0, -1, w), ConfigurationError);
}

TEST_CASE("ambiguity shift") {
  auto t = w_extend(inv_sq(), 1, default_jet_bumps(1, 1));
  auto h = TestFunction::poly_bump({0.2}, {1.0}, 6);
  CHECK(ambiguity_shift(t, {{d0, 0.0}}).pair(h) == t.pair(h));
  auto s = ambiguity_shift(t, {{d0, 1.5}, {d1, cplx(0, 2)}});
  CHECK(s.counterterms.size() == 2);
  auto back = ambiguity_shift(s, {{d0, -1.5}, {d1, cplx(0, -2)}});
  CHECK(std::abs(back.pair(h) - t.pair(h)) < 1e-9);
  CHECK_THROWS_AS(ambiguity_shift(t, {{d2, 1.0}}), ExtensionRefused);
  CHECK_THROWS_AS(ambiguity_shift(t, {{d0, 1.0}}, AmbiguityMode::AlmostHomogeneous, 2.0), ExtensionRefused);
  CHECK_NOTHROW(ambiguity_shift(t, {{d1, 1.0}}, AmbiguityMode::AlmostHomogeneous, 2.0));
}

TEST_CASE("differential renormalization") {
  auto t = diff_renorm(log_abs(), {{d2, -1.0}}, inv_sq());
  for (const auto& g : off_origin_panel(1)) CHECK(std::abs(t.pair(g) - inv_sq().pair(g)) < 1e-7);
  CHECK(almost_homogeneity_check(t.t, 2.0, 1, origin_panel(1)) < 1e-6);
  // |y|^lambda has no pole at lambda = -2, so this extension is even homogeneous
  CHECK(almost_homogeneity_check(t.t, 2.0, 0, origin_panel(1)) < 1e-6);

  auto inv_cube = density([](double y) { return 1.0 / (y * y * y); }, "1/y^3", 3.0, 0);
  auto t3 = diff_renorm(log_abs(), {{d3, 0.5}}, inv_cube);
  for (const auto& g : off_origin_panel(1)) CHECK(std::abs(t3.pair(g) - inv_cube.pair(g)) < 1e-7);

  CHECK_THROWS_AS(diff_renorm(log_abs(), {{d2, 1.0}}, inv_sq()), WrongOperatorError);
  // identity operator: direct extension
  auto half = power_density_1d(0.5);
  auto h = TestFunction::poly_bump({0.1}, {1.0}, 6);
  CHECK(std::abs(diff_renorm(half, {{d0, 1.0}}, half).pair(h) - direct_extend(half).pair(h)) < 1e-12);
}

TEST_CASE("minimal subtraction") {
  auto family = [](cplx z) { return regularized_power_1d(1.0 + z).t; };
  auto ms = analytic_ms(family, 1, 1, 0);
  REQUIRE(ms.poles.count(1));
  CHECK(std::abs(ms.poles.at(1).at(d0) - (-2.0)) < 0.01);
  CHECK(std::abs(ms.poles.at(1).at(d0) - (-2.0)) < 1e-6);
  // finite part against int (h - h(0) 1_{|y|<=1}) / |y|
  auto h = TestFunction::poly_bump({0.0}, {1.5}, 6);
  auto hb = [](double y) { return bump(y, 0, 1.5, 6); };
  cplx ref = 2.0 * (simpson([&](double y) { return y == 0 ? 0.0 : (hb(y) - 1.0) / y; }, 0, 1) +
                    simpson([&](double y) { return hb(y) / y; }, 1, 1.5));
  CHECK(std::abs(ms.pair(h) - ref) < 1e-7);

  // t^MS - t^W is delta-type
  auto tw = w_extend(inv_abs(), 0, default_jet_bumps(1, 0));
  Distribution diff = ms.t - tw.t;
  for (const auto& g : vanishing_at_zero()) CHECK(std::abs(diff.pair(g)) < 1e-7);

  // no pole: MS = direct extension
  auto reg = [](cplx z) { return regularized_power_1d(0.5 + 0.25 * z).t; };
  auto ms0 = analytic_ms(reg, 1, 0, -1);
  CHECK(ms0.poles.empty());
  auto g = TestFunction::poly_bump({0.1}, {1.0}, 6);
  CHECK(std::abs(ms0.pair(g) - direct_extend(power_density_1d(0.5)).pair(g)) < 1e-7);

  // a double pole declared as simple is rejected
  auto dbl = [](cplx z) { return Distribution::delta(1, d0, 1.0 / (z * z)); };
  CHECK_THROWS_AS(analytic_ms(dbl, 1, 1, 0), NotAnalyticError);
  // a non-local principal part is inconsistent
  auto nonlocal = [](cplx z) { return inv_abs().scaled(1.0 / z); };
  CHECK_THROWS_AS(analytic_ms(nonlocal, 1, 1, 0), InconsistencyError);
}

TEST_CASE("mass Taylor split") {
  auto panel = off_origin_panel(1);
  auto constant = [](double) { return log_abs(); };
  auto mt = mass_taylor_split(constant, 1, 1);
  for (const auto& g : panel) {
    CHECK(std::abs(mt.u[0].pair(g) - log_abs().pair(g)) < 1e-8);
    CHECK(std::abs(mt.u[1].pair(g)) < 1e-8);
  }
  auto quad = [](double m) {
    return density([m](double y) { return m * m * std::log(std::abs(y)); }, "m2log", 0.0, 1);
  };
  auto m2 = mass_taylor_split(quad, 1, 2);
  for (const auto& g : panel) {
    CHECK(std::abs(m2.u[2].pair(g) - 2.0 * log_abs().pair(g)) < 1e-6);
    CHECK(std::abs(m2.remainder(0.3).pair(g)) < 1e-6);
  }
  // order D - d(n-1) = 1 leaves everything to the remainder
  auto m1 = mass_taylor_split(quad, 1, 2, 1, 2);
  CHECK(m1.order == 1);
  auto yuk = [](double m) {
    return density([m](double y) { return std::exp(-m * std::abs(y)) / std::abs(y); }, "yuk", 1.0, 0);
  };
  auto my = mass_taylor_split(yuk, 1, 2);
  for (double m : {0.2, 0.7})
    for (const auto& g : panel) {
      cplx re = my.remainder(m).pair(g) * std::pow(m, 3);
      for (int l = 0; l <= 2; ++l) re += std::pow(m, l) / factorial(l) * my.u[l].pair(g);
      CHECK(std::abs(re - yuk(m).pair(g)) < 1e-6);
    }
  auto rough = [](double m) { return density([m](double y) { return std::sqrt(m) / std::abs(y); }, "sqrt", 1.0, 0); };
  CHECK_THROWS_AS(mass_taylor_split(rough, 1, 1).u[1].pair(panel[0]), StepSizeError);
}
