#include <Eigen/Dense>
#include <algorithm>
#include <mutex>

#include "egret/errors.hpp"
#include "egret/field.hpp"

// Balanced decomposition. At fixed phi-degree n and total derivative order r
// the monomials span C(n,r); total derivatives map C(n,r-1) into C(n,r). The
// balanced complement W(n,r) is chosen greedily from the monomials in a fixed
// preference order (derivatives spread as evenly as possible first), and
// A = sum_a d^a B_a with B_a in W(n, r-|a|) is solved as one linear system.

namespace egret {

namespace {

std::vector<MultiIndex> indices_up_to(int dim, int r) {
  std::vector<MultiIndex> out;
  MultiIndex a{0, 0, 0, 0};
  auto rec = [&](auto&& self, int var, int remaining) -> void {
    if (var == dim) {
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      a[var] = v;
      self(self, var + 1, remaining - v);
    }
    a[var] = 0;
  };
  rec(rec, 0, r);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> monomials(int dim, int n, int r) {
  const auto idx = indices_up_to(dim, r);
  std::vector<Monomial> out;
  Monomial cur;
  auto rec = [&](auto&& self, std::size_t start, int left, int remaining) -> void {
    if (left == 0) {
      if (remaining == 0) out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < idx.size(); ++i) {
      if (total(idx[i]) > remaining) continue;
      cur.push_back(idx[i]);
      self(self, i, left - 1, remaining - total(idx[i]));
      cur.pop_back();
    }
  };
  rec(rec, 0, n, r);
  for (auto& m : out) m = make_monomial(m);
  return out;
}

// Preference: descending-sorted list of per-factor derivative orders, then the
// multi-indices themselves; smaller is preferred.
bool preferred(const Monomial& x, const Monomial& y) {
  auto orders = [](const Monomial& m) {
    std::vector<int> o;
    for (const auto& a : m) o.push_back(total(a));
    std::sort(o.rbegin(), o.rend());
    return o;
  };
  auto ox = orders(x), oy = orders(y);
  if (ox != oy) return ox < oy;
  return x < y;
}

struct Space {
  std::vector<Monomial> basis;
  std::map<Monomial, int> index;
};

Space space(int dim, int n, int r) {
  Space s;
  s.basis = monomials(dim, n, r);
  std::sort(s.basis.begin(), s.basis.end());
  for (int i = 0; i < static_cast<int>(s.basis.size()); ++i) s.index[s.basis[i]] = i;
  return s;
}

Eigen::VectorXd to_vector(const FieldPolynomial& p, const Space& s) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.basis.size()));
  for (const auto& [m, c] : p.terms()) v(s.index.at(m)) += c;
  return v;
}

int rank_of(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

const std::vector<Monomial>& complement(int dim, int n, int r) {
  static std::mutex mu;
  static std::map<std::array<int, 3>, std::vector<Monomial>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({dim, n, r});
  if (it != cache.end()) return it->second;
  Space target = space(dim, n, r);
  const auto rows = static_cast<Eigen::Index>(target.basis.size());
  std::vector<Eigen::VectorXd> cols;
  if (r > 0 && n > 0) {
    for (const auto& m : monomials(dim, n, r - 1))
      for (int d = 0; d < dim; ++d) cols.push_back(to_vector(FieldPolynomial(m).total_derivative(d), target));
  }
  auto build = [&](const std::vector<Eigen::VectorXd>& v) {
    Eigen::MatrixXd mat(rows, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) mat.col(static_cast<Eigen::Index>(i)) = v[i];
    return mat;
  };
  int rank = rank_of(build(cols));
  std::vector<Monomial> candidates = target.basis;
  std::sort(candidates.begin(), candidates.end(), preferred);
  std::vector<Monomial> chosen;
  for (const auto& m : candidates) {
    if (rank == rows) break;
    cols.push_back(to_vector(FieldPolynomial(m), target));
    const int nr = rank_of(build(cols));
    if (nr > rank) {
      rank = nr;
      chosen.push_back(m);
    } else {
      cols.pop_back();
    }
  }
  return cache.emplace(std::array<int, 3>{dim, n, r}, std::move(chosen)).first->second;
}

int derivative_order(const Monomial& m) {
  int r = 0;
  for (const auto& a : m) r += total(a);
  return r;
}

}  // namespace

std::map<MultiIndex, FieldPolynomial> balanced_decompose(const FieldPolynomial& a, int dim) {
  if (dim < 1 || dim > 4) throw ConfigurationError("balanced_decompose: dimension must be 1..4");
  // split into homogeneous blocks (n, r)
  std::map<std::pair<int, int>, FieldPolynomial> blocks;
  for (const auto& [m, c] : a.terms()) {
    for (const auto& f : m)
      for (int i = dim; i < 4; ++i)
        if (f[i] != 0) throw ConfigurationError("balanced_decompose: derivative index beyond dimension");
    blocks[{static_cast<int>(m.size()), derivative_order(m)}].add(m, c);
  }
  std::map<MultiIndex, FieldPolynomial> out;
  for (const auto& [nr, poly] : blocks) {
    const auto [n, r] = nr;
    Space target = space(dim, n, r);
    struct Column {
      MultiIndex a;
      Monomial w;
    };
    std::vector<Column> columns;
    std::vector<Eigen::VectorXd> vecs;
    for (const auto& alpha : indices_up_to(dim, r)) {
      if (n == 0 && total(alpha) > 0) continue;
      for (const auto& w : complement(dim, n, r - total(alpha))) {
        columns.push_back({alpha, w});
        vecs.push_back(to_vector(FieldPolynomial(w).total_derivative(alpha), target));
      }
    }
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(target.basis.size()), static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t i = 0; i < vecs.size(); ++i) mat.col(static_cast<Eigen::Index>(i)) = vecs[i];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(mat);
    lu.setThreshold(1e-10);
    if (mat.rows() != mat.cols() || lu.rank() != mat.cols())
      throw InconsistencyError("balanced_decompose: derivative basis is not square and invertible");
    const Eigen::VectorXd rhs = to_vector(poly, target);
    const Eigen::VectorXd sol = lu.solve(rhs);
    if ((mat * sol - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm()))
      throw InconsistencyError("balanced_decompose: residual too large");
    for (std::size_t i = 0; i < columns.size(); ++i) {
      const double c = sol(static_cast<Eigen::Index>(i));
      if (std::abs(c) < 1e-13) continue;
      out[columns[i].a].add(columns[i].w, c);
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

FieldPolynomial reassemble(const std::map<MultiIndex, FieldPolynomial>& parts) {
  FieldPolynomial r;
  for (const auto& [a, b] : parts) r += b.total_derivative(a);
  return r;
}

bool is_balanced(const FieldPolynomial& a, int dim) {
  auto parts = balanced_decompose(a, dim);
  return parts.empty() || (parts.size() == 1 && total(parts.begin()->first) == 0);
}

}  // namespace egret
