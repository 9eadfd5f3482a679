#pragma once

#include <map>
#include <string>
#include <vector>

#include "egret/formal_series.hpp"
#include "egret/propagators.hpp"
#include "egret/test_function.hpp"

namespace egret {

/// A product of derivative fields, d^{a_1}phi ... d^{a_n}phi, as a sorted multiset.
using Monomial = std::vector<MultiIndex>;

Monomial make_monomial(std::vector<MultiIndex> factors);
/// All ways to write c as an ordered sum of `parts` multi-indices, and their multinomial weight.
std::vector<std::vector<MultiIndex>> leibniz_splits(const MultiIndex& c, int parts);
double leibniz_weight(const MultiIndex& c, const std::vector<MultiIndex>& parts);
/// phi^n.
Monomial phi_power(int n);
std::string to_string(const Monomial& m, int dim);

/// Real-linear combination of monomials in the derivative fields.
class FieldPolynomial {
 public:
  FieldPolynomial() = default;
  FieldPolynomial(const Monomial& m, double c = 1.0) { add(m, c); }  // NOLINT(google-explicit-constructor)

  static FieldPolynomial phi(int n = 1) { return FieldPolynomial(phi_power(n)); }

  void add(const Monomial& m, double c);
  const std::map<Monomial, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_degree() const;

  FieldPolynomial& operator+=(const FieldPolynomial& o);
  friend FieldPolynomial operator+(FieldPolynomial a, const FieldPolynomial& b) { return a += b; }
  friend FieldPolynomial operator-(FieldPolynomial a, const FieldPolynomial& b) { return a += b.scaled(-1.0); }
  friend FieldPolynomial operator*(const FieldPolynomial& a, const FieldPolynomial& b);
  FieldPolynomial scaled(double c) const;
  bool operator==(const FieldPolynomial& o) const;

  /// Total derivative d_mu acting by the Leibniz rule.
  FieldPolynomial total_derivative(int mu) const;
  FieldPolynomial total_derivative(const MultiIndex& a) const;
  /// Value at phi = 0 (the constant part).
  double constant_part() const;

 private:
  std::map<Monomial, double> terms_;
};

/// Sum over factors of (d-2)/2 + |a|.
double mass_dimension(const Monomial& m, int dim);
std::map<Monomial, double> mass_dimension(const FieldPolynomial& p, int dim);

/// A = sum_a d^a B_a with each B_a in the chosen balanced complement and
/// B_a(phi = 0) = 0 for a != 0.
std::map<MultiIndex, FieldPolynomial> balanced_decompose(const FieldPolynomial& a, int dim);
FieldPolynomial reassemble(const std::map<MultiIndex, FieldPolynomial>& parts);
bool is_balanced(const FieldPolynomial& a, int dim);

/// Free leg: the vertex carries d^a_{x_v} delta(x_v - x_id).
struct Leg {
  int id = 0;
  MultiIndex a{0, 0, 0, 0};
  auto operator<=>(const Leg&) const = default;
};

struct Vertex {
  TestFunction g;
  Monomial factors;  // sorted
  std::vector<Leg> legs;
};

/// Edge value: (d^c K)(x_a - x_b).
struct Edge {
  int a = 0, b = 0;
  Kernel k = Kernel::H;
  MultiIndex c{0, 0, 0, 0};
};

struct GraphTerm {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  ScalarSeries coef;

  int phi_degree() const;
  int leg_count() const;
  /// Collapses contact edges, orients edges and sorts vertices into the
  /// canonical order; returns the canonical key (coefficient excluded).
  std::string canonicalize();
};

/// Off-shell field: finite sum of graph terms over a fixed backend.
class Field {
 public:
  Field() = default;
  explicit Field(Backend b) : backend_(std::move(b)) {}

  static Field constant(const Backend& b, const ScalarSeries& c);
  static Field constant(const Backend& b, cplx c) { return constant(b, ScalarSeries(c, Truncation{})); }
  /// A(g) for a field polynomial A.
  static Field local(const Backend& b, const FieldPolynomial& a, const TestFunction& g,
                     const ScalarSeries& coef = ScalarSeries(1.0, Truncation{}));
  /// phi(g).
  static Field phi(const Backend& b, const TestFunction& g) { return local(b, FieldPolynomial::phi(1), g); }

  const Backend& backend() const { return backend_; }
  const std::map<std::string, GraphTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(GraphTerm t);
  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  Field operator-() const { return scaled(-1.0); }
  Field scaled(cplx c) const;
  Field scaled(const ScalarSeries& s) const;
  /// Classical (pointwise) product: disjoint union of graphs.
  friend Field operator*(const Field& a, const Field& b);
  Field operator*(cplx c) const { return scaled(c); }

  /// Keeps the terms whose coefficient degrees satisfy pred; coefficients are filtered.
  template <class Pred>
  Field filter_degree(Pred&& pred) const {
    Field r(backend_);
    for (const auto& [k, t] : terms_) {
      GraphTerm u = t;
      u.coef = t.coef.filter(pred);
      if (!u.coef.is_zero()) r.terms_.emplace(k, std::move(u));
    }
    return r;
  }
  Field restricted(const Truncation& t) const;
  /// Maps every coefficient series.
  template <class Fn>
  Field map_coefficients(Fn&& fn) const {
    Field r(backend_);
    for (const auto& [k, t] : terms_) {
      GraphTerm u = t;
      u.coef = fn(t.coef);
      if (!u.coef.is_zero()) r.terms_.emplace(k, std::move(u));
    }
    return r;
  }

  int max_phi_degree() const;
  bool has_legs() const;
  std::string to_string() const;
  bool operator==(const Field& o) const;

 private:
  Backend backend_ = Backend::d1_massive(1.0);
  std::map<std::string, GraphTerm> terms_;
};

/// Local field sum_i A_i(g_i).
struct LocalField {
  std::vector<std::pair<FieldPolynomial, TestFunction>> parts;
  Field to_field(const Backend& b, const ScalarSeries& coef = ScalarSeries(1.0, Truncation{})) const;
};

void require_same_backend(const Field& a, const Field& b);

Field star_conjugate(const Field& f);
/// n-th functional derivative: legs 0..n-1 in the order of differentiation.
Field functional_derivative(const Field& f, int n);
/// Pairs each free leg id with the test function p[id].
Field smear_legs(const Field& f, const std::vector<TestFunction>& p);
Support field_support(const Field& f);
Field field_parity(const Field& f);
Field translate(const Field& f, std::span<const double> a);
/// Drops coefficient terms with hbar power above max_hbar.
Field drop_higher_hbar(const Field& f, int max_hbar);
/// Terms with the given number of remaining phi-factors.
Field phi_degree_part(const Field& f, int n);

}  // namespace egret
