#include <algorithm>

#include "egret/field.hpp"

namespace egret {

Monomial make_monomial(std::vector<MultiIndex> factors) {
  std::sort(factors.begin(), factors.end());
  return factors;
}

Monomial phi_power(int n) { return Monomial(n, MultiIndex{0, 0, 0, 0}); }

std::string to_string(const Monomial& m, int dim) {
  if (m.empty()) return "1";
  std::string s;
  for (const auto& a : m) {
    if (!s.empty()) s += " ";
    if (total(a) == 0) {
      s += "phi";
      continue;
    }
    s += "d";
    for (int i = 0; i < dim; ++i) s += std::to_string(a[i]);
    s += "phi";
  }
  return s;
}

void FieldPolynomial::add(const Monomial& m, double c) {
  if (c == 0.0) return;
  Monomial key = make_monomial(m);
  auto [it, inserted] = terms_.emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (std::abs(it->second) < 1e-14) terms_.erase(it);
  }
}

int FieldPolynomial::max_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(m.size()));
  return d;
}

FieldPolynomial& FieldPolynomial::operator+=(const FieldPolynomial& o) {
  for (const auto& [m, c] : o.terms_) add(m, c);
  return *this;
}

FieldPolynomial operator*(const FieldPolynomial& a, const FieldPolynomial& b) {
  FieldPolynomial r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      r.add(m, ca * cb);
    }
  return r;
}

FieldPolynomial FieldPolynomial::scaled(double c) const {
  FieldPolynomial r;
  for (const auto& [m, v] : terms_) r.add(m, v * c);
  return r;
}

bool FieldPolynomial::operator==(const FieldPolynomial& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  for (const auto& [m, c] : terms_) {
    auto it = o.terms_.find(m);
    if (it == o.terms_.end() || std::abs(it->second - c) > 1e-12 * std::max(1.0, std::abs(c))) return false;
  }
  return true;
}

FieldPolynomial FieldPolynomial::total_derivative(int mu) const {
  FieldPolynomial r;
  for (const auto& [m, c] : terms_)
    for (std::size_t i = 0; i < m.size(); ++i) {
      Monomial n = m;
      n[i][mu] += 1;
      r.add(n, c);
    }
  return r;
}

FieldPolynomial FieldPolynomial::total_derivative(const MultiIndex& a) const {
  FieldPolynomial r = *this;
  for (int mu = 0; mu < 4; ++mu)
    for (int k = 0; k < a[mu]; ++k) r = r.total_derivative(mu);
  return r;
}

double FieldPolynomial::constant_part() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? 0.0 : it->second;
}

double mass_dimension(const Monomial& m, int dim) {
  double s = 0.0;
  for (const auto& a : m) s += (dim - 2) / 2.0 + total(a);
  return s;
}

std::map<Monomial, double> mass_dimension(const FieldPolynomial& p, int dim) {
  std::map<Monomial, double> r;
  for (const auto& [m, c] : p.terms()) r[m] = mass_dimension(m, dim);
  return r;
}

}  // namespace egret
