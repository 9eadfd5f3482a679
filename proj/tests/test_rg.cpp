#include "doctest.h"
#include "egret/errors.hpp"
#include "egret/rg.hpp"

using namespace egret;

namespace {

const Backend B1 = Backend::d1_massive(1.0);
const cplx I(0.0, 1.0);
const MultiIndex d0{0, 0, 0, 0}, d1{1, 0, 0, 0}, d2{2, 0, 0, 0};

Monomial phi_n(int n) { return FieldPolynomial::phi(n).terms().begin()->first; }

}  // namespace

TEST_CASE("identity and the action of Z on local fields") {
  ZMap id = ZMap::identity(B1);
  auto g = TestFunction::poly_bump({0.0}, {1.0}, 6), f = TestFunction::poly_bump({0.4}, {0.8}, 6);
  Field A = Field::local(B1, FieldPolynomial::phi(3), g), B = Field::local(B1, FieldPolynomial::phi(2), f);
  CHECK(z_apply(id, A + B) == A + B);
  CHECK(z2_apply(id, A, B).is_zero());

  ZMap z(B1);
  z.add(phi_n(2), phi_n(2), d0, ScalarSeries(0.5, Truncation{}));
  CHECK(z_apply(z, Field(B1)).is_zero());
  // phi^3(g) x phi^2(f): 3 ways to pick phi^2 from phi^3, leaving phi (g f) with 3 * 0.5
  Field r = z2_apply(z, A, B);
  Field ref = Field::local(B1, FieldPolynomial::phi(1), g * f).scaled(1.5);
  CHECK(r == ref);
  // symmetric storage
  CHECK(z2_apply(z, B, A) == ref);
  // odd kernels on equal monomials are dropped
  ZMap w(B1);
  w.add(phi_n(2), phi_n(2), d1, ScalarSeries(1.0, Truncation{}));
  CHECK(w.is_identity());
}

TEST_CASE("group law and inverse at second order") {
  FeynmanT T(B1);
  ZMap z1 = random_admissible_z(B1, {phi_n(4)}, 3), z2 = random_admissible_z(B1, {phi_n(4)}, 4);
  CHECK(z_distance(z_compose(z1, z_inverse(z1)), ZMap::identity(B1)) < 1e-14);
  CHECK(z_distance(z_compose(z1, z2), z_compose(z2, z1)) < 1e-14);
  RenormalizedT T1(T, z1);
  RenormalizedT T12(T1, z2);
  ZMap got = solve_Z(T, T12, {phi_n(4)});
  CHECK(z_distance(got, z_compose(z1, z2)) < 1e-8);
  ZMap back = solve_Z(T12, T1, {phi_n(4)});
  CHECK(z_distance(back, z_inverse(z2)) < 1e-8);
}

TEST_CASE("random admissible Z is recovered and keeps the axioms") {
  FeynmanT T(B1);
  ZMap z = random_admissible_z(B1, {phi_n(4)}, 11);
  CHECK_FALSE(z.is_identity());
  RenormalizedT That(T, z);
  ZMap got = solve_Z(T, That, {phi_n(4)});
  CHECK(z_distance(got, z) < 1e-8);
  CHECK(solve_Z(T, T, {phi_n(4)}).is_identity());

  AxiomConfig cfg;
  cfg.random_h = 3;
  for (const auto& c : check_axioms(That, cfg)) {
    INFO(c.name << " residual " << c.residual);
    CHECK(c.passed);
  }
  Field a = Field::local(B1, FieldPolynomial::phi(2), TestFunction::poly_bump({0.0}, {1.0}, 6));
  CHECK_THROWS_AS(That({a, a, a, a}), OrderError);
  CHECK_THROWS_AS(solve_Z(T, That, {phi_n(4)}, 3), OrderError);
}

TEST_CASE("mock d=4 counterterms are recovered") {
  const Backend b4 = Backend::mock_d4();
  CountertermPolicy zero{{"HF*HF", {}}, {"HF*HF*HF", {}}, {"HF*HF*HF*HF", {}}};
  CountertermPolicy inject = zero;
  inject["HF*HF"][d0] = 0.75;
  inject["HF*HF*HF"][MultiIndex{0, 2, 0, 0}] = -0.4;
  inject["HF*HF*HF*HF"][d0] = 0.2;
  inject["HF*HF*HF*HF"][MultiIndex{1, 1, 0, 0}] = 1.3;
  const FeynmanT T(b4, {Kernel::HF, 1.0, zero}), That(b4, {Kernel::HF, 1.0, inject});
  ZMap got = solve_Z(T, That, {phi_n(4)});
  // z(phi^j, phi^j) = i j! hbar^{j-1} C
  ZMap truth(b4);
  for (const auto& [cls, ker] : inject) {
    const int j = static_cast<int>(std::count(cls.begin(), cls.end(), '*')) + 1;
    for (const auto& [a, c] : ker)
      truth.add(phi_n(j), phi_n(j), a, ScalarSeries::monomial(Degree{j - 1}, I * factorial(j) * c, Truncation{}));
  }
  CHECK(z_distance(got, truth) < 1e-8);
  CHECK(verify_Z(got, T, That, {phi_n(4)}) < 1e-8);
  // odd orders are orientation dependent and refused
  CountertermPolicy odd = zero;
  odd["HF*HF"][d1] = 1.0;
  const FeynmanT Todd(b4, {Kernel::HF, 1.0, odd});
  CHECK_THROWS_AS(solve_Z(T, Todd, {phi_n(2)}), ConfigurationError);
}

TEST_CASE("a non-local difference is not a renormalization") {
  FeynmanT T(B1), Tbar(B1, {Kernel::HFbar, 1.0, std::nullopt});
  CHECK_THROWS_AS(solve_Z(T, Tbar, {phi_n(2)}), InconsistencyError);
  FeynmanT Tbroken(B1, {Kernel::HF, 1.5, std::nullopt});
  CHECK_THROWS_AS(solve_Z(T, Tbroken, {phi_n(3)}), InconsistencyError);
}

TEST_CASE("recovered kernels are supported on the diagonal") {
  FeynmanT T(B1);
  ZMap z = solve_Z(T, RenormalizedT(T, random_admissible_z(B1, {phi_n(4)}, 5)), {phi_n(4)});
  // arguments with disjoint supports see no Z^(2)
  auto g = TestFunction::poly_bump({-1.0}, {0.5}, 6), f = TestFunction::poly_bump({1.0}, {0.5}, 6);
  Field A = Field::local(B1, FieldPolynomial::phi(4), g), B = Field::local(B1, FieldPolynomial::phi(3), f);
  CHECK(max_abs(evaluate(z2_apply(z, A, B), TestFunction::constant(1, 0.5))) < 1e-8);
  CHECK(z_apply(z, A + B) == A + B + z2_apply(z, A, A).scaled(0.5) + z2_apply(z, B, B).scaled(0.5));
}
