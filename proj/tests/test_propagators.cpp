#include "doctest.h"
#include "egret/errors.hpp"
#include "egret/propagators.hpp"
#include "egret/quadrature.hpp"

#include <numbers>
#include <random>

using namespace egret;

namespace {

std::vector<std::vector<double>> samples_1d() {
  std::vector<std::vector<double>> s;
  for (double t = -3.1; t <= 3.2; t += 0.37) s.push_back({t});
  return s;
}

std::vector<std::vector<double>> samples_2d(bool off_cone_margin = true) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<std::vector<double>> s;
  while (s.size() < 40) {
    double t = u(rng), x = u(rng);
    if (off_cone_margin && std::abs(std::abs(t) - std::abs(x)) < 0.2) continue;
    s.push_back({t, x});
  }
  return s;
}

}  // namespace

TEST_CASE("d=1 closed forms") {
  auto b = Backend::d1_massive(1.0);
  CHECK(std::abs(eval_kernel(b, Kernel::H, std::vector<double>{0.0}) - 0.5) < 1e-15);
  CHECK(std::abs(eval_kernel(b, Kernel::Delta, std::vector<double>{0.0})) < 1e-15);
  for (double t : {0.3, 1.7, 2.9}) {
    CHECK(std::abs(eval_kernel(b, Kernel::HF, std::vector<double>{t}) -
                   eval_kernel(b, Kernel::HF, std::vector<double>{-t})) < 1e-15);
    CHECK(eval_kernel(b, Kernel::Ret, std::vector<double>{-t}) == cplx(0.0));
  }
}

TEST_CASE("d=1 requirements hold to 1e-8") {
  for (double m : {1.0, 0.6, 2.3}) {
    auto b = Backend::d1_massive(m);
    auto s = samples_1d();
    CHECK(kg_residual(b, Kernel::H, s) < 1e-10);
    CHECK(kg_residual(b, Kernel::Hrev, s) < 1e-10);
    CHECK(kg_residual(b, Kernel::Delta, s) < 1e-10);
    CHECK(antisymmetry_residual(b, s) < 1e-12);
    CHECK(conjugation_residual(b, s) < 1e-12);
    CHECK(feynman_residual(b, s) < 1e-12);
    CHECK(green_residual(b) < 1e-8);
    CHECK(homogeneous_scaling_residual(b, {0.5, 2.0, 3.0}, s) < 1e-10);
    CHECK(homogeneous_scaling_residual(b, {1.0}, s) == 0.0);
  }
}

TEST_CASE("Feynman kernel is a Green's function up to -i") {
  // int HF (f'' + m^2 f) = -i f(0)
  auto b = Backend::d1_massive(1.3);
  for (double c : {-0.4, 0.0, 0.35}) {
    const auto& g = GaussRule::get(30);
    (void)g;
    auto fpp = [&](double t) {
      const double r = 1.0, u = (t - c) / r;
      // f = (1-u^2)^4
      const double f = std::pow(1 - u * u, 4);
      const double d2 = (-8 * std::pow(1 - u * u, 3) + 48 * u * u * std::pow(1 - u * u, 2)) / (r * r);
      return d2 + 1.3 * 1.3 * f;
    };
    cplx v = integrate_1d([&](double t) { return eval_kernel(b, Kernel::HF, std::vector<double>{t}) * fpp(t); },
                          c - 1.0, c + 1.0, {0.0}, {24, 4});
    const double f0 = std::pow(1 - c * c, 4);
    CHECK(std::abs(v - cplx(0.0, -1.0) * f0) < 1e-10);
  }
}

TEST_CASE("d=2 massless kernel: boundary values and eps extrapolation") {
  auto s = samples_2d();
  auto b0 = Backend::d2_massless(1.0, 0.0);
  CHECK(kg_residual(b0, Kernel::H, s) < 1e-12);
  CHECK(antisymmetry_residual(b0, s) < 1e-12);
  CHECK(conjugation_residual(b0, s) < 1e-12);
  CHECK(feynman_residual(b0, s) < 1e-12);
  CHECK(green_residual(b0) < 1e-8);
  // regularized kernels: KG exact at every eps, (ii) converges as eps -> 0
  std::vector<double> eps{0.04, 0.02, 0.01, 0.005};
  double worst = 0.0;
  for (const auto& z : s) {
    std::vector<cplx> vals;
    for (double e : eps) vals.push_back(antisymmetry_residual(Backend::d2_massless(1.0, e), {z}));
    worst = std::max(worst, std::abs(extrapolate_to_zero(eps, vals, {1.0, 2.0})));
    CHECK(kg_residual(Backend::d2_massless(1.0, 0.01), Kernel::H, {z}) < 1e-10);
    CHECK(conjugation_residual(Backend::d2_massless(1.0, 0.01), {z}) < 1e-14);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("d=2 massless kernel scales up to a mu shift") {
  auto b = Backend::d2_massless(1.7, 0.0);
  auto s = samples_2d();
  CHECK(homogeneous_scaling_residual(b, {0.5, 2.0, 5.0}, s, true) < 1e-12);
  CHECK(homogeneous_scaling_residual(b, {2.0}, s, false) ==
        doctest::Approx(std::log(2.0) / (2 * std::numbers::pi)).epsilon(1e-9));
}

TEST_CASE("reflection and conjugation tables") {
  auto b = Backend::d1_massive(0.8);
  for (Kernel k : {Kernel::H, Kernel::Hrev, Kernel::HF, Kernel::HFbar, Kernel::Delta, Kernel::Ret, Kernel::Adv}) {
    int sign = 1;
    Kernel r = reflected(k, sign);
    for (double t : {0.4, -1.1}) {
      CHECK(std::abs(eval_kernel(b, k, std::vector<double>{-t}) - double(sign) * eval_kernel(b, r, std::vector<double>{t})) < 1e-14);
      CHECK(std::abs(std::conj(eval_kernel(b, k, std::vector<double>{t})) -
                     eval_kernel(b, conjugated(k), std::vector<double>{t})) < 1e-14);
    }
  }
  CHECK_THROWS_AS(eval_kernel(Backend::mock_d4(), Kernel::HF, std::vector<double>{0, 0, 0, 1}), UnsupportedEvaluation);
  CHECK(kernel_scaling_degree(Backend::mock_d4(), Kernel::HF, {}) == 2.0);
}
