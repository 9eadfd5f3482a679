#include <algorithm>
#include <random>

#include "egret/errors.hpp"
#include "egret/star.hpp"
#include "egret/tproduct.hpp"

namespace egret {

namespace {

struct Harness {
  const TMap& T;
  const AxiomConfig& cfg;
  Backend b;
  Evaluator ev;
  std::vector<std::optional<TestFunction>> configs;

  Harness(const TMap& t, const AxiomConfig& c) : T(t), cfg(c), b(t.backend()), ev(c.eval) {
    std::mt19937 rng(c.seed);
    std::uniform_real_distribution<double> centre(-2.0, 2.0), radius(0.6, 1.6), amp(-1.0, 1.0);
    configs.push_back(std::nullopt);
    for (int i = 0; i < c.random_h; ++i) {
      const double x = centre(rng), r = radius(rng), a = amp(rng);
      configs.push_back(TestFunction::poly_bump({x}, {r}, 6, a));
    }
  }

  // max over omega_0 and the random configurations of |F - G| / max(1, |F|)
  double residual(const Field& f, const Field& g) {
    const Field d = f - g;
    double worst = 0.0;
    for (const auto& h : configs) {
      const ScalarSeries dv = ev.evaluate(d, h);
      if (dv.is_zero()) continue;
      const double scale = std::max(1.0, max_abs(ev.evaluate(f, h)));
      worst = std::max(worst, max_abs(dv) / scale);
    }
    return worst;
  }

  Field local(const FieldPolynomial& a, const TestFunction& g) const { return Field::local(b, a, g); }
};

AxiomCheck make(std::string name, double residual, double tol, std::string detail = {}) {
  return {std::move(name), residual, tol, residual <= tol, std::move(detail)};
}

}  // namespace

std::vector<AxiomCheck> check_axioms(const TMap& T, const AxiomConfig& cfg) {
  if (T.backend().dim != 1 || !T.backend().numeric)
    throw ConfigurationError("check_axioms: the numeric suite runs on the d=1 backend");
  Harness H(T, cfg);
  const int N = std::clamp(cfg.max_n, 2, 3);
  std::vector<AxiomCheck> out;

  // supports: A late, B and C overlapping in the middle, D early
  const auto gA = TestFunction::poly_bump({1.6}, {0.4}, 6);
  const auto gB = TestFunction::poly_bump({-0.1}, {0.5}, 6);
  const auto gC = TestFunction::poly_bump({0.3}, {0.6}, 6);
  const auto gD = TestFunction::poly_bump({-1.8}, {0.4}, 6);
  const auto gE = TestFunction::poly_bump({0.5}, {0.7}, 6);
  const FieldPolynomial P2 = FieldPolynomial::phi(2), P3 = FieldPolynomial::phi(3);
  const Field LA = H.local(cfg.L, gA), LB = H.local(cfg.L, gB), LD = H.local(cfg.L, gD);
  const Field C2 = H.local(P2, gC), B2 = H.local(P2, gB), B3 = H.local(P3, gB), C3 = H.local(P3, gC),
              A3 = H.local(P3, gA), D3 = H.local(P3, gD);

  // symmetry
  {
    int bad = 0;
    if (!(T({LB, C3}) == T({C3, LB}))) ++bad;
    if (N >= 3) {
      std::vector<Field> args{LB, C2, A3};
      const Field ref = T(args);
      std::vector<int> p{0, 1, 2};
      while (std::next_permutation(p.begin(), p.end()))
        if (!(T({args[p[0]], args[p[1]], args[p[2]]}) == ref)) ++bad;
    }
    out.push_back(make("symmetry", bad, 0.0, "symbolic comparison of permuted arguments"));
  }

  // causal factorization on five support geometries
  {
    double r = 0.0;
    r = std::max(r, H.residual(T({LA, B3}), star(LA, B3)));
    r = std::max(r, H.residual(T({B3, LA}), star(LA, B3)));
    if (N >= 3) {
      r = std::max(r, H.residual(T({LA, B2, C3}), star(LA, T({B2, C3}))));
      r = std::max(r, H.residual(T({B2, C3, LD}), star(T({B2, C3}), LD)));
      r = std::max(r, H.residual(T({B2, LA, D3}), star({LA, B2, D3})));
    }
    out.push_back(make("causal factorization", r, cfg.tol, "five support geometries"));
  }

  // S-matrix causality and unitarity at kappa^2
  {
    const Truncation tr{2, 1, 1, false};
    auto kap = [&](const Field& f) { return f.scaled(ScalarSeries::monomial(Degree{0, 1, 0, 0}, 1.0, tr)); };
    const Field Hf = kap(LA), Gf = kap(H.local(cfg.L, gC)), Ff = kap(LD);
    auto S = [&](const Field& f) { return smatrix(T, f, 2); };
    const Field SG = S(Gf);
    const Field one = Field::constant(H.b, ScalarSeries(1.0, Truncation{2, 1, 1, true}));
    const Field SGinv = geometric_inverse(one, SG - one, [](const Field& x, const Field& y) { return star(x, y); }, 2);
    const Field lhs = S(Hf + Gf + Ff);
    const Field rhs = star({S(Hf + Gf), SGinv, S(Gf + Ff)});
    out.push_back(make("S-matrix causality (kappa^2)", H.residual(lhs, rhs), cfg.tol));

    const Field Fr = kap(LB + C2);
    const Field SF = S(Fr);
    out.push_back(make("unitarity (kappa^2)", H.residual(star(star_conjugate(SF), SF), one), cfg.tol));
  }

  // field independence: dT/dphi against T of the derivative
  {
    const auto eta = TestFunction::poly_bump({0.2}, {1.0}, 5);
    auto dsmear = [&](const Field& f) { return smear_legs(functional_derivative(f, 1), {eta}); };
    double r = 0.0;
    std::vector<std::vector<Field>> cases{{LB, C3}};
    if (N >= 3) cases.push_back({LB, C2, A3});
    for (const auto& args : cases) {
      Field rhs(H.b);
      for (std::size_t j = 0; j < args.size(); ++j) {
        auto a = args;
        a[j] = dsmear(args[j]);
        rhs += T(a);
      }
      r = std::max(r, H.residual(dsmear(T(args)), rhs));
    }
    out.push_back(make("field independence", r, cfg.tol, "delta T / delta phi = sum_j T(.., delta A_j, ..)"));
  }

  // causal Wick expansion
  {
    auto mono = [](const FieldPolynomial& p) {
      if (p.terms().size() != 1) throw ConfigurationError("causal Wick check needs a monomial interaction");
      return p.terms().begin()->first;
    };
    const double cL = cfg.L.terms().begin()->second;
    double r = H.residual(T({LB, C3}), causal_wick_expand(T, {{mono(cfg.L), gB.scaled(cL)}, {mono(P3), gC}}));
    if (N >= 3)
      r = std::max(r, H.residual(T({LB, C2, A3}), causal_wick_expand(T, {{mono(cfg.L), gB.scaled(cL)},
                                                                         {mono(P2), gC},
                                                                         {mono(P3), gA}})));
    out.push_back(make("causal Wick expansion", r, cfg.tol));
  }

  // parity, hbar grading, odd vanishing: symbolic
  {
    std::vector<Field> args{B3, C2, A3};
    args.resize(N);
    std::vector<Field> pargs;
    for (const auto& f : args) pargs.push_back(field_parity(f));
    const Field t = T(args);
    out.push_back(make("parity", field_parity(t) == T(pargs) ? 0.0 : 1.0, 0.0));

    // hbar power = (number of consumed factors) / 2, arguments at hbar^0
    int bad = 0;
    auto grading = [&](const std::vector<Field>& a) {
      int total = 0;
      for (const auto& f : a) total += f.max_phi_degree();
      const Field t = T(a);
      for (const auto& [k, term] : t.terms())
        for (const auto& [d, c] : term.coef.terms())
          if (2 * d.hbar != total - term.phi_degree()) ++bad;
    };
    grading(args);
    grading({LB, C3});
    grading({LB, LA});
    grading({LB, H.local(cfg.L, gC)});
    out.push_back(make("hbar grading", bad, 0.0, "hbar power is half the number of consumed factors"));

    int odd = 0;
    if (!phi_degree_part(T({B3, C2}), 0).is_zero()) ++odd;
    if (N >= 3 && !phi_degree_part(T({B3, C2, H.local(P2, gA)}), 0).is_zero()) ++odd;
    out.push_back(make("odd vanishing", odd, 0.0));
  }

  // off-shell field equation
  {
    double r = H.residual(T({Field::phi(H.b, gE), LB}), field_equation_rhs(T, gE, {LB}));
    if (N >= 3)
      r = std::max(r, H.residual(T({Field::phi(H.b, gE), LB, C3}), field_equation_rhs(T, gE, {LB, C3})));
    out.push_back(make("field equation", r, cfg.tol));
  }
  return out;
}

}  // namespace egret
