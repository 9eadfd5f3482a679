#include "doctest.h"
#include "egret/quadrature.hpp"
#include "egret/test_function.hpp"

#include <numbers>

using namespace egret;

namespace {

double fd_derivative(const TestFunction& f, double y, int order, double h = 1e-3) {
  // central differences of order 1 and 2
  if (order == 1) return ((f({y + h}) - f({y - h})) / (2 * h)).real();
  return ((f({y + h}) - 2.0 * f({y}) + f({y - h})) / (h * h)).real();
}

}  // namespace

TEST_CASE("bump values and support") {
  auto b = TestFunction::poly_bump({0.5}, {1.0}, 4);
  CHECK(std::abs(b({0.5}) - 1.0) < 1e-15);
  CHECK(b({1.6}) == cplx(0.0));
  CHECK(b.support().lo[0] == doctest::Approx(-0.5));
  CHECK(b.support().hi[0] == doctest::Approx(1.5));
  auto s = TestFunction::smooth_bump({0.0, 0.0}, {1.0, 2.0});
  CHECK(std::abs(s({0.0, 0.0}) - 1.0) < 1e-15);
  CHECK(s({0.0, 2.5}) == cplx(0.0));
}

TEST_CASE("jet derivatives agree with finite differences") {
  auto f = TestFunction::smooth_bump({0.1}, {1.3}) * TestFunction::cosine({2.0}) + TestFunction::monomial(1, {3});
  for (double y : {-0.7, 0.0, 0.4, 0.9}) {
    CHECK(std::abs(f.derivative_at({1}, std::vector<double>{y}).real() - fd_derivative(f, y, 1)) < 1e-5);
    CHECK(std::abs(f.derivative_at({2}, std::vector<double>{y}).real() - fd_derivative(f, y, 2, 1e-4)) < 1e-4);
  }
  auto df = f.derivative({1});
  for (double y : {-0.3, 0.55})
    CHECK(std::abs(df({y}) - f.derivative_at({1}, std::vector<double>{y})) < 1e-13);
  // nested derivative nodes and a derivative of a derivative node evaluated as a jet
  auto ddf = df.derivative({1});
  CHECK(std::abs(ddf.derivative_at({1}, std::vector<double>{0.2}) - f.derivative_at({3}, std::vector<double>{0.2})) <
        1e-11);
}

TEST_CASE("jet bumps reproduce the Taylor basis at the origin") {
  for (int k = 1; k <= 3; ++k) {
    std::vector<MultiIndex> idx;
    for (int a0 = 0; a0 <= 2; ++a0)
      for (int a1 = 0; a1 <= (k > 1 ? 2 : 0); ++a1)
        for (int a2 = 0; a2 <= (k > 2 ? 2 : 0); ++a2)
          if (a0 + a1 + a2 <= 2) idx.push_back({a0, a1, a2, 0});
    std::vector<double> origin(k, 0.0);
    for (const auto& a : idx) {
      auto w = TestFunction::jet_bump(k, a, 0.5);
      auto jet = w.jet_at(origin, 2);
      for (const auto& b : idx) CHECK(std::abs(jet.derivative(b) - (a == b ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("Euler operator polynomial") {
  // E y^3 = 3 y^3, (E^2 - 1) y^3 = 8 y^3
  auto m = TestFunction::monomial(1, {3});
  auto e = m.euler_poly({-1.0, 0.0, 1.0});
  CHECK(std::abs(e({0.7}) - 8.0 * std::pow(0.7, 3)) < 1e-13);
  // E on a bump: y f'(y)
  auto b = TestFunction::smooth_bump({0.2}, {1.0});
  auto eb = b.euler_poly({0.0, 1.0});
  CHECK(std::abs(eb({0.5}) - 0.5 * b.derivative_at({1}, std::vector<double>{0.5})) < 1e-13);
  // d E f = (E + 1) d f
  auto lhs = eb.derivative({1});
  auto rhs = b.derivative({1}).euler_poly({1.0, 1.0});
  CHECK(std::abs(lhs({0.43}) - rhs({0.43})) < 1e-12);
}

TEST_CASE("chi profiles") {
  for (auto p : {ChiProfile::Standard, ChiProfile::Steep}) {
    auto c = TestFunction::chi(1, 1.0, p);
    CHECK(c({0.9}) == cplx(0.0));
    CHECK(c({2.1}) == cplx(1.0));
    CHECK(c({-2.1}) == cplx(1.0));
    CHECK(std::abs(c({1.5}).real() - 0.5) < 0.5);
    auto cc = TestFunction::chi(1, 1.0, p, true);
    CHECK(std::abs(c({1.3}) + cc({1.3}) - 1.0) < 1e-15);
  }
}

TEST_CASE("conjugation and keys") {
  auto f = TestFunction::plane_wave({1.5}, cplx(0.3, 0.4));
  auto g = f.conj();
  CHECK(std::abs(g({0.2}) - std::conj(f({0.2}))) < 1e-15);
  CHECK(f.conj().conj() == f);
  auto t = f.translated({0.5});
  CHECK(std::abs(t({0.7}) - f({0.2})) < 1e-15);
  CHECK(TestFunction::poly_bump({0.0}, {1.0}, 3).key() == TestFunction::poly_bump({0.0}, {1.0}, 3).key());
}

TEST_CASE("Gauss-Legendre quadrature against closed forms") {
  const auto& g = GaussRule::get(12);
  double s = 0.0;
  for (double w : g.w) s += w;
  CHECK(std::abs(s - 2.0) < 1e-14);
  // int_{-1}^{1} (1-u^2)^p du = sqrt(pi) Gamma(p+1) / Gamma(p+3/2)
  for (int p : {2, 4, 6}) {
    auto b = TestFunction::poly_bump({0.0}, {1.0}, p);
    auto v = integrate_1d([&](double y) { return b({y}); }, -1.0, 1.0, {});
    const double exact = std::sqrt(std::numbers::pi) * std::tgamma(p + 1.0) / std::tgamma(p + 1.5);
    CHECK(std::abs(v - exact) < 1e-13);
  }
  // smooth bump integral converges under refinement
  auto sb = TestFunction::smooth_bump({0.0}, {1.0});
  auto f = [&](double y) { return sb({y}); };
  auto v1 = integrate_1d(f, -1, 1, {0.0}, {20, 4});
  auto v2 = integrate_1d(f, -1, 1, {0.0}, {30, 8});
  CHECK(std::abs(v1 - v2) < 1e-10);
  auto tail = integrate_half_line([](double y) { return 1.0 / (y * y); }, 1.0);
  CHECK(std::abs(tail - 1.0) < 1e-12);
}

TEST_CASE("Halton points are deterministic and in the unit cube") {
  Halton h(3);
  auto p = h.point(0);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(1.0 / 3.0));
  for (long i = 0; i < 100; ++i)
    for (double v : h.point(i)) CHECK((v >= 0.0 && v < 1.0));
}
