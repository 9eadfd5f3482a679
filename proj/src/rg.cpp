#include "egret/rg.hpp"

#include <Eigen/Dense>
#include <random>
#include <set>

#include "egret/errors.hpp"

namespace egret {

namespace {

const cplx I(0.0, 1.0);

bool odd(const MultiIndex& a) { return total(a) % 2 != 0; }

// hbar / i
ScalarSeries hbar_over_i() { return ScalarSeries::monomial(Degree{1, 0, 0, 0}, -I, Truncation{}); }

int field_vertex(const GraphTerm& t) {
  int v = -1;
  for (int i = 0; i < static_cast<int>(t.vertices.size()); ++i)
    if (!t.vertices[i].factors.empty()) {
      if (v >= 0) throw ConfigurationError("Z: argument term with several field-carrying vertices");
      v = i;
    }
  if (v < 0 && t.vertices.size() == 1) v = 0;
  return v;
}

std::vector<Monomial> closure(const std::vector<Monomial>& ms) {
  std::set<Monomial> s;
  for (const auto& m : ms)
    for (const auto& sm : sub_monomials(m))
      if (!sm.sub.empty()) s.insert(sm.sub);
  return {s.begin(), s.end()};
}

struct Probes {
  TestFunction g1, g2;
  explicit Probes(int dim) {
    std::vector<double> c1(dim, 0.0), r1(dim, 1.0), c2(dim, 0.0), r2(dim, 1.1);
    c2[0] = 0.3;
    if (dim > 1) c2[1] = -0.2;
    g1 = TestFunction::poly_bump(c1, r1, 6);
    g2 = TestFunction::poly_bump(c2, r2, 5);
  }
};

// Z^(2)(M1(g1) x M2(g2)) = (hbar/i) [S^ - S]_{kappa lambda} with the arguments kappa M1(g1) + lambda M2(g2).
Field probe(const TMap& T, const TMap& That, const Monomial& m1, const Monomial& m2, const Probes& p) {
  const Backend& b = T.backend();
  const Truncation tr{1, 1, 1, false};
  const Field F = Field::local(b, FieldPolynomial(m1), p.g1, ScalarSeries::monomial(Degree{0, 1, 0, 0}, 1.0, tr)) +
                  Field::local(b, FieldPolynomial(m2), p.g2, ScalarSeries::monomial(Degree{0, 0, 1, 0}, 1.0, tr));
  const Field D = smatrix(That, F, 2) - smatrix(T, F, 2);
  for (const auto& [k, t] : D.terms())
    for (const auto& [d, c] : t.coef.terms())
      if (d.coupling_total() == 1 && std::abs(c) > 1e-12)
        throw InconsistencyError("solve_Z: the S-matrices differ at first order, so Z^(1) != Id");
  return D.filter_degree([](const Degree& d) { return d.kappa == 1 && d.lambda == 1; })
      .map_coefficients([](const ScalarSeries& c) { return c.shifted(Degree{1, -1, -1, 0}).scaled(-I); });
}

}  // namespace

void ZMap::add(Monomial m1, Monomial m2, const MultiIndex& a, const ScalarSeries& c) {
  if (m1.empty() || m2.empty()) throw ConfigurationError("ZMap: kernels need at least one field per argument");
  m1 = make_monomial(m1);
  m2 = make_monomial(m2);
  ScalarSeries v = c;
  if (m2 < m1) {
    std::swap(m1, m2);
    if (odd(a)) v = -v;
  }
  if (m1 == m2 && odd(a)) return;  // symmetric part only
  auto& slot = z2_[{m1, m2}][a];
  slot = slot.is_zero() ? v : slot + v;
  if (slot.is_zero()) {
    z2_[{m1, m2}].erase(a);
    if (z2_[{m1, m2}].empty()) z2_.erase({m1, m2});
  }
}

Field z2_apply(const ZMap& z, const Field& f1, const Field& f2) {
  const Backend& b = z.backend();
  Field out(b);
  if (z.is_identity()) return out;
  for (const auto& [k1, t1] : f1.terms()) {
    const int v1 = field_vertex(t1);
    if (v1 < 0) continue;
    const auto subs1 = sub_monomials(t1.vertices[v1].factors);
    for (const auto& [k2, t2] : f2.terms()) {
      const int v2 = field_vertex(t2);
      if (v2 < 0) continue;
      const auto subs2 = sub_monomials(t2.vertices[v2].factors);
      const int off = static_cast<int>(t1.vertices.size());
      for (const auto& s1 : subs1) {
        if (s1.sub.empty()) continue;
        for (const auto& s2 : subs2) {
          if (s2.sub.empty()) continue;
          const bool swapped = s2.sub < s1.sub;
          auto it = z.kernels().find(swapped ? ZMap::Key{s2.sub, s1.sub} : ZMap::Key{s1.sub, s2.sub});
          if (it == z.kernels().end()) continue;
          for (const auto& [a, C] : it->second) {
            GraphTerm u = t1;
            for (const auto& v : t2.vertices) u.vertices.push_back(v);
            for (auto e : t2.edges) {
              e.a += off;
              e.b += off;
              u.edges.push_back(e);
            }
            u.vertices[v1].factors = s1.rest;
            u.vertices[off + v2].factors = s2.rest;
            const ScalarSeries coef = (t1.coef * t2.coef * C).scaled(cplx(s1.weight * s2.weight));
            if (s1.sub == s2.sub) {
              // even kernel: average both orientations so the result is symmetric term by term
              GraphTerm w = u;
              u.edges.push_back({v1, off + v2, Kernel::Contact, a});
              w.edges.push_back({off + v2, v1, Kernel::Contact, a});
              u.coef = coef.scaled(cplx(0.5));
              w.coef = u.coef;
              out.add_term(std::move(u));
              out.add_term(std::move(w));
              continue;
            }
            if (swapped)
              u.edges.push_back({off + v2, v1, Kernel::Contact, a});
            else
              u.edges.push_back({v1, off + v2, Kernel::Contact, a});
            u.coef = coef;
            out.add_term(std::move(u));
          }
        }
      }
    }
  }
  return out;
}

Field z_apply(const ZMap& z, const Field& f) { return f + z2_apply(z, f, f).scaled(0.5); }

ZMap z_compose(const ZMap& z1, const ZMap& z2) {
  if (!(z1.backend() == z2.backend())) throw MetadataMismatch("z_compose: backends differ");
  ZMap r = z1;
  for (const auto& [key, ker] : z2.kernels())
    for (const auto& [a, c] : ker) r.add(key.first, key.second, a, c);
  return r;
}

ZMap z_inverse(const ZMap& z) {
  ZMap r(z.backend());
  for (const auto& [key, ker] : z.kernels())
    for (const auto& [a, c] : ker) r.add(key.first, key.second, a, -c);
  return r;
}

double z_distance(const ZMap& a, const ZMap& b) {
  double m = 0.0;
  auto one_way = [&](const ZMap& x, const ZMap& y) {
    for (const auto& [key, ker] : x.kernels()) {
      auto it = y.kernels().find(key);
      for (const auto& [mi, c] : ker) {
        ScalarSeries other;
        if (it != y.kernels().end() && it->second.count(mi)) other = it->second.at(mi);
        m = std::max(m, max_abs_difference(c, other));
      }
    }
  };
  one_way(a, b);
  one_way(b, a);
  return m;
}

double field_distance(const Field& a, const Field& b) {
  double m = 0.0;
  const Field d = a - b;
  for (const auto& [k, t] : d.terms()) m = std::max(m, max_abs(t.coef));
  return m;
}

Field RenormalizedT::apply(const std::vector<Field>& args) const {
  const std::size_t n = args.size();
  Field t = base_(args);
  if (n <= 1 || z_.is_identity()) return t;
  const ScalarSeries c = hbar_over_i();
  if (n == 2) return t + z2_apply(z_, args[0], args[1]).scaled(c);
  if (n == 3) {
    const int pairs[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
    for (const auto& p : pairs) t += base_({z2_apply(z_, args[p[0]], args[p[1]]).scaled(c), args[p[2]]});
    return t;
  }
  throw OrderError("RenormalizedT: Z is kept to second order, so T_n is available for n <= 3");
}

ZMap random_admissible_z(const Backend& b, const std::vector<Monomial>& monomials, unsigned seed, int max_a) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  ZMap z(b);
  const auto ms = closure(monomials);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j) {
      const int di = static_cast<int>(ms[i].size()), dj = static_cast<int>(ms[j].size());
      if (di < 2 || dj < 2 || (di + dj) % 2) continue;
      for (const auto& a : multi_indices(b.dim, max_a)) {
        if (i == j && odd(a)) continue;
        z.add(ms[i], ms[j], a, ScalarSeries::monomial(Degree{(di + dj) / 2 - 1, 0, 0, 0}, u(rng), Truncation{}));
      }
    }
  return z;
}

ZMap solve_Z(const TMap& T, const TMap& That, const std::vector<Monomial>& monomials, int order,
             const SolveOptions& opt) {
  if (order != 2) throw OrderError("solve_Z: only the second order is implemented");
  if (!(T.backend() == That.backend())) throw MetadataMismatch("solve_Z: backends differ");
  const Backend& b = T.backend();
  const Probes p(b.dim);
  const auto ms = closure(monomials);
  ZMap z(b);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j) {
      // the fully contracted part of Z^(2)(Mi x Mj) only sees the kernel z(Mi, Mj)
      const Field target = phi_degree_part(probe(T, That, ms[i], ms[j], p), 0);
      if (target.is_zero()) continue;
      std::vector<MultiIndex> cols;
      std::vector<Field> basis;
      for (const auto& a : multi_indices(b.dim, opt.max_a)) {
        if (i == j && odd(a)) continue;
        ZMap unit(b);
        unit.add(ms[i], ms[j], a, ScalarSeries(1.0, Truncation{}));
        cols.push_back(a);
        basis.push_back(phi_degree_part(
            z2_apply(unit, Field::local(b, FieldPolynomial(ms[i]), p.g1), Field::local(b, FieldPolynomial(ms[j]), p.g2)),
            0));
      }
      std::map<std::string, int> rows;
      for (const auto& f : basis)
        for (const auto& [k, t] : f.terms()) rows.emplace(k, 0);
      for (const auto& [k, t] : target.terms()) rows.emplace(k, 0);
      int r = 0;
      for (auto& [k, idx] : rows) idx = r++;
      Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(r, static_cast<int>(cols.size()));
      for (std::size_t c = 0; c < basis.size(); ++c)
        for (const auto& [k, t] : basis[c].terms()) A(rows.at(k), static_cast<int>(c)) = t.coef.coefficient(Degree{});
      std::set<Degree> degrees;
      for (const auto& [k, t] : target.terms())
        for (const auto& [d, c] : t.coef.terms()) degrees.insert(d);
      const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
      for (const auto& d : degrees) {
        Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(r);
        for (const auto& [k, t] : target.terms()) rhs(rows.at(k)) = t.coef.coefficient(d);
        const Eigen::VectorXcd x = cod.solve(rhs);
        const double res = (A * x - rhs).norm();
        if (res > opt.tol * std::max(1.0, rhs.norm()))
          throw InconsistencyError("solve_Z: the S-matrix difference is not a local delta-type kernel (residual " +
                                   std::to_string(res) + ")");
        for (std::size_t c = 0; c < cols.size(); ++c)
          if (std::abs(x(static_cast<int>(c))) > 1e-14)
            z.add(ms[i], ms[j], cols[c], ScalarSeries::monomial(d, x(static_cast<int>(c)), Truncation{}));
      }
    }
  const double res = verify_Z(z, T, That, monomials);
  if (res > opt.tol) throw InconsistencyError("solve_Z: recovered Z does not reproduce S^ (residual " + std::to_string(res) + ")");
  return z;
}

double verify_Z(const ZMap& z, const TMap& T, const TMap& That, const std::vector<Monomial>& monomials) {
  const Backend& b = T.backend();
  const Probes p(b.dim);
  const auto ms = closure(monomials);
  double worst = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (std::size_t j = i; j < ms.size(); ++j) {
      const Field lhs = probe(T, That, ms[i], ms[j], p);
      const Field rhs =
          z2_apply(z, Field::local(b, FieldPolynomial(ms[i]), p.g1), Field::local(b, FieldPolynomial(ms[j]), p.g2));
      worst = std::max(worst, field_distance(lhs, rhs));
    }
  return worst;
}

}  // namespace egret
