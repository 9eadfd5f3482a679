#include "egret/field.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "egret/errors.hpp"

namespace egret {

namespace {

constexpr double kDropBelow = 1e-13;

std::string index_str(const MultiIndex& a) {
  return std::to_string(a[0]) + "." + std::to_string(a[1]) + "." + std::to_string(a[2]) + "." + std::to_string(a[3]);
}

std::string vertex_sig(const Vertex& v) {
  std::string s = v.g.key() + "{";
  for (const auto& a : v.factors) s += index_str(a) + ",";
  s += "}[";
  for (const auto& l : v.legs) s += std::to_string(l.id) + ":" + index_str(l.a) + ",";
  return s + "]";
}

// Edge seen from vertex `from`: label and sign after orienting it outward.
struct Oriented {
  Kernel k;
  MultiIndex c;
  int sign;
  int other;
};

Oriented orient_from(const Edge& e, int from) {
  if (e.a == from) return {e.k, e.c, 1, e.b};
  int s = 1;
  Kernel r = reflected(e.k, s);
  if (total(e.c) % 2 == 1) s = -s;
  return {r, e.c, s, e.a};
}

// Multinomial splits of c into `parts` pieces.
void splits(const MultiIndex& c, int parts, std::vector<std::vector<MultiIndex>>& out) {
  std::vector<MultiIndex> cur(parts, MultiIndex{0, 0, 0, 0});
  auto rec = [&](auto&& self, int dir, int part, int left) -> void {
    if (dir == 4) {
      out.push_back(cur);
      return;
    }
    if (part == parts - 1) {
      cur[part][dir] = left;
      const int next = dir + 1 < 4 ? c[dir + 1] : 0;
      self(self, dir + 1, 0, next);
      cur[part][dir] = 0;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[part][dir] = v;
      self(self, dir, part + 1, left - v);
    }
    cur[part][dir] = 0;
  };
  rec(rec, 0, 0, c[0]);
}

double multinomial(const MultiIndex& c, const std::vector<MultiIndex>& parts) {
  double r = multi_factorial(c);
  for (const auto& p : parts) r /= multi_factorial(p);
  return r;
}

// Integrates out vertex u against d^c delta(x_u - x_w) (edge already removed).
std::vector<GraphTerm> collapse_one(const GraphTerm& t, int u, int w, const MultiIndex& c) {
  const Vertex& vu = t.vertices[u];
  std::vector<int> edge_ids;
  for (int i = 0; i < static_cast<int>(t.edges.size()); ++i)
    if (t.edges[i].a == u || t.edges[i].b == u) {
      const int other = t.edges[i].a == u ? t.edges[i].b : t.edges[i].a;
      if (other == w) throw ConfigurationError("contact edge parallel to another edge");
      edge_ids.push_back(i);
    }
  const int nf = static_cast<int>(vu.factors.size());
  const int nl = static_cast<int>(vu.legs.size());
  const int ne = static_cast<int>(edge_ids.size());
  const int parts = 1 + nf + nl + ne;
  std::vector<std::vector<MultiIndex>> all;
  splits(c, parts, all);
  const double sgn = total(c) % 2 == 0 ? 1.0 : -1.0;
  std::vector<GraphTerm> out;
  for (const auto& sp : all) {
    GraphTerm r;
    r.coef = t.coef.scaled(cplx(sgn * multinomial(c, sp)));
    // vertices: w absorbs u
    std::vector<int> remap(t.vertices.size());
    for (int i = 0, j = 0; i < static_cast<int>(t.vertices.size()); ++i) {
      if (i == u) continue;
      remap[i] = j++;
      r.vertices.push_back(t.vertices[i]);
    }
    remap[u] = remap[w];
    Vertex& vw = r.vertices[remap[w]];
    vw.g = vw.g * vu.g.derivative(sp[0]);
    for (int f = 0; f < nf; ++f) vw.factors.push_back(vu.factors[f] + sp[1 + f]);
    vw.factors = make_monomial(vw.factors);
    for (int l = 0; l < nl; ++l) vw.legs.push_back({vu.legs[l].id, vu.legs[l].a + sp[1 + nf + l]});
    std::sort(vw.legs.begin(), vw.legs.end());
    for (int i = 0; i < static_cast<int>(t.edges.size()); ++i) {
      Edge e = t.edges[i];
      auto pos = std::find(edge_ids.begin(), edge_ids.end(), i);
      if (pos != edge_ids.end()) {
        const MultiIndex& d = sp[1 + nf + nl + (pos - edge_ids.begin())];
        e.c = e.c + d;
        if (e.b == u && total(d) % 2 == 1) r.coef = -r.coef;
      }
      e.a = remap[e.a];
      e.b = remap[e.b];
      r.edges.push_back(e);
    }
    if (vw.g.is_zero()) continue;
    out.push_back(std::move(r));
  }
  return out;
}

// In d = 1, (d^2 + m^2) K = j delta for the kernels with a kink at 0; second
// derivatives are reduced so that pointwise evaluation stays exact.
std::vector<GraphTerm> reduce_kinks(const Backend& b, GraphTerm t) {
  if (b.dim != 1) return {std::move(t)};
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    const Edge& e = t.edges[i];
    cplx j;
    switch (e.k) {
      case Kernel::HF: j = cplx(0.0, -1.0); break;
      case Kernel::HFbar: j = cplx(0.0, 1.0); break;
      case Kernel::Ret:
      case Kernel::Adv: j = -1.0; break;
      default: continue;
    }
    if (e.c[0] < 2) continue;
    GraphTerm smooth = t, contact = t;
    smooth.edges[i].c[0] -= 2;
    smooth.coef = t.coef.scaled(cplx(-b.mass * b.mass));
    contact.edges[i].c[0] -= 2;
    contact.edges[i].k = Kernel::Contact;
    contact.coef = t.coef.scaled(j);
    std::vector<GraphTerm> out;
    for (auto* p : {&smooth, &contact})
      for (auto& r : reduce_kinks(b, std::move(*p))) out.push_back(std::move(r));
    return out;
  }
  return {std::move(t)};
}

std::vector<GraphTerm> collapse_contacts(GraphTerm t) {
  for (int i = 0; i < static_cast<int>(t.edges.size()); ++i) {
    if (t.edges[i].k != Kernel::Contact) continue;
    const Edge e = t.edges[i];
    t.edges.erase(t.edges.begin() + i);
    // d^c delta(x_a - x_b): integrate out x_a
    std::vector<GraphTerm> out;
    for (auto& r : collapse_one(t, e.a, e.b, e.c))
      for (auto& s : collapse_contacts(std::move(r))) out.push_back(std::move(s));
    return out;
  }
  return {std::move(t)};
}

std::string edge_list_key(const std::vector<Edge>& edges, const std::vector<int>& pos, int& sign) {
  // pos[v] = position of vertex v in the candidate order
  std::vector<std::string> keys;
  sign = 1;
  for (const auto& e : edges) {
    int a = pos[e.a], b = pos[e.b];
    Kernel k = e.k;
    if (a > b) {
      int s = 1;
      k = reflected(k, s);
      if (total(e.c) % 2 == 1) s = -s;
      sign *= s;
      std::swap(a, b);
    }
    keys.push_back(std::to_string(a) + "-" + std::to_string(b) + ":" + kernel_name(k) + ":" + index_str(e.c));
  }
  std::sort(keys.begin(), keys.end());
  std::string s;
  for (const auto& k : keys) s += k + ";";
  return s;
}

}  // namespace

std::vector<std::vector<MultiIndex>> leibniz_splits(const MultiIndex& c, int parts) {
  std::vector<std::vector<MultiIndex>> out;
  splits(c, parts, out);
  return out;
}

double leibniz_weight(const MultiIndex& c, const std::vector<MultiIndex>& parts) { return multinomial(c, parts); }

int GraphTerm::phi_degree() const {
  int n = 0;
  for (const auto& v : vertices) n += static_cast<int>(v.factors.size());
  return n;
}

int GraphTerm::leg_count() const {
  int n = 0;
  for (const auto& v : vertices) n += static_cast<int>(v.legs.size());
  return n;
}

std::string GraphTerm::canonicalize() {
  const int n = static_cast<int>(vertices.size());
  for (auto& v : vertices) {
    v.factors = make_monomial(v.factors);
    std::sort(v.legs.begin(), v.legs.end());
  }
  std::vector<std::string> base(n), sig(n);
  for (int i = 0; i < n; ++i) base[i] = vertex_sig(vertices[i]);
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> inc;
    for (const auto& e : edges) {
      if (e.a != i && e.b != i) continue;
      // orientation-blind description, so that tie classes survive reflection
      const Oriented o = orient_from(e, i);
      const Oriented p = orient_from(e, o.other);
      std::string d1 = kernel_name(o.k) + index_str(o.c) + (o.sign < 0 ? "-" : "+");
      std::string d2 = kernel_name(p.k) + index_str(p.c) + (p.sign < 0 ? "-" : "+");
      if (d2 < d1) std::swap(d1, d2);
      inc.push_back(d1 + d2 + base[o.other]);
    }
    std::sort(inc.begin(), inc.end());
    sig[i] = base[i];
    for (const auto& s : inc) sig[i] += "|" + s;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return sig[x] < sig[y]; });
  // tie classes
  std::vector<std::pair<int, int>> classes;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && sig[order[j]] == sig[order[i]]) ++j;
    if (j - i > 1) classes.push_back({i, j});
    i = j;
  }
  double perms = 1.0;
  for (auto [b, e] : classes)
    for (int k = 2; k <= e - b; ++k) perms *= k;

  std::vector<int> best_order = order;
  std::string best_key;
  int best_sign = 1;
  bool have = false, sign_conflict = false;
  auto consider = [&](const std::vector<int>& ord) {
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[ord[i]] = i;
    int sign = 1;
    std::string k = edge_list_key(edges, pos, sign);
    if (!have || k < best_key) {
      have = true;
      best_key = std::move(k);
      best_order = ord;
      best_sign = sign;
      sign_conflict = false;
    } else if (k == best_key && sign != best_sign) {
      sign_conflict = true;
    }
  };
  if (edges.empty() || classes.empty() || perms > 5040.0) {
    consider(order);
  } else {
    std::vector<int> ord = order;
    auto rec = [&](auto&& self, std::size_t ci) -> void {
      if (ci == classes.size()) {
        consider(ord);
        return;
      }
      auto [b, e] = classes[ci];
      std::sort(ord.begin() + b, ord.begin() + e);
      do {
        self(self, ci + 1);
      } while (std::next_permutation(ord.begin() + b, ord.begin() + e));
    };
    rec(rec, 0);
  }
  // apply the best order
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[best_order[i]] = i;
  std::vector<Vertex> nv(n);
  for (int i = 0; i < n; ++i) nv[i] = std::move(vertices[best_order[i]]);
  vertices = std::move(nv);
  for (auto& e : edges) {
    int a = pos[e.a], b = pos[e.b];
    if (a > b) {
      int s = 1;
      e.k = reflected(e.k, s);
      std::swap(a, b);
    }
    e.a = a;
    e.b = b;
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.a, x.b, x.k, x.c) < std::tie(y.a, y.b, y.k, y.c);
  });
  if (best_sign < 0) coef = -coef;
  if (sign_conflict) coef = ScalarSeries(coef.truncation());
  std::string key;
  for (int i = 0; i < n; ++i) key += base[best_order[i]] + "/";
  return key + "#" + best_key;
}

// -- Field

Field Field::constant(const Backend& b, const ScalarSeries& c) {
  Field f(b);
  GraphTerm t;
  t.coef = c;
  f.add_term(std::move(t));
  return f;
}

Field Field::local(const Backend& b, const FieldPolynomial& a, const TestFunction& g, const ScalarSeries& coef) {
  if (g.dim() != b.dim) throw ConfigurationError("smearing dimension does not match the backend");
  Field f(b);
  for (const auto& [m, c] : a.terms()) {
    GraphTerm t;
    t.vertices.push_back({g, m, {}});
    t.coef = coef.scaled(cplx(c));
    f.add_term(std::move(t));
  }
  return f;
}

void Field::add_term(GraphTerm t) {
  if (t.coef.is_zero()) return;
  for (const auto& v : t.vertices)
    if (v.g.is_zero()) return;
  std::vector<GraphTerm> pieces;
  // collapsing moves derivatives onto edges, reducing a kink creates a contact
  auto normalize = [&](auto&& self, GraphTerm u) -> void {
    for (auto& c : collapse_contacts(std::move(u))) {
      auto r = reduce_kinks(backend_, c);
      if (r.size() == 1)
        pieces.push_back(std::move(r[0]));
      else
        for (auto& x : r) self(self, std::move(x));
    }
  };
  normalize(normalize, std::move(t));
  for (auto& piece : pieces) {
    std::string key = piece.canonicalize();
    if (piece.coef.is_zero()) continue;
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), std::move(piece));
      continue;
    }
    ScalarSeries sum = it->second.coef + piece.coef;
    sum = sum.filter([&](const Degree& d) { return std::abs(sum.coefficient(d)) >= kDropBelow; });
    if (sum.is_zero())
      terms_.erase(it);
    else
      it->second.coef = std::move(sum);
  }
}

void require_same_backend(const Field& a, const Field& b) {
  if (!(a.backend() == b.backend()))
    throw MetadataMismatch("fields over different backends: " + a.backend().name + " vs " + b.backend().name);
}

Field& Field::operator+=(const Field& o) {
  if (terms_.empty() && !(backend_ == o.backend_)) backend_ = o.backend_;
  if (!o.terms_.empty()) require_same_backend(*this, o);
  for (const auto& [k, t] : o.terms_) {
    auto it = terms_.find(k);
    if (it == terms_.end()) {
      terms_.emplace(k, t);
      continue;
    }
    ScalarSeries sum = it->second.coef + t.coef;
    sum = sum.filter([&](const Degree& d) { return std::abs(sum.coefficient(d)) >= kDropBelow; });
    if (sum.is_zero())
      terms_.erase(it);
    else
      it->second.coef = std::move(sum);
  }
  return *this;
}

Field& Field::operator-=(const Field& o) { return *this += -o; }

Field Field::scaled(cplx c) const {
  if (c == cplx(0.0)) return Field(backend_);
  return map_coefficients([&](const ScalarSeries& s) { return s.scaled(c); });
}

Field Field::scaled(const ScalarSeries& s) const {
  return map_coefficients([&](const ScalarSeries& c) { return c * s; });
}

Field Field::restricted(const Truncation& t) const {
  return map_coefficients([&](const ScalarSeries& c) {
    ScalarSeries r = c;
    r.restrict_to(t);
    return r;
  });
}

Field operator*(const Field& a, const Field& b) {
  require_same_backend(a, b);
  Field r(a.backend());
  for (const auto& [ka, ta] : a.terms())
    for (const auto& [kb, tb] : b.terms()) {
      GraphTerm t = ta;
      const int off = static_cast<int>(t.vertices.size());
      t.vertices.insert(t.vertices.end(), tb.vertices.begin(), tb.vertices.end());
      for (auto e : tb.edges) {
        e.a += off;
        e.b += off;
        t.edges.push_back(e);
      }
      t.coef = ta.coef * tb.coef;
      r.add_term(std::move(t));
    }
  return r;
}

int Field::max_phi_degree() const {
  int m = 0;
  for (const auto& [k, t] : terms_) m = std::max(m, t.phi_degree());
  return m;
}

bool Field::has_legs() const {
  for (const auto& [k, t] : terms_)
    if (t.leg_count() > 0) return true;
  return false;
}

std::string Field::to_string() const {
  std::ostringstream os;
  for (const auto& [k, t] : terms_) os << egret::to_string(t.coef) << " * [" << k << "]\n";
  return os.str();
}

bool Field::operator==(const Field& o) const {
  if (!(backend_ == o.backend_) || terms_.size() != o.terms_.size()) return false;
  for (const auto& [k, t] : terms_) {
    auto it = o.terms_.find(k);
    if (it == o.terms_.end() || max_abs_difference(it->second.coef, t.coef) > 1e-12) return false;
  }
  return true;
}

Field LocalField::to_field(const Backend& b, const ScalarSeries& coef) const {
  Field f(b);
  for (const auto& [a, g] : parts) f += Field::local(b, a, g, coef);
  return f;
}

Field star_conjugate(const Field& f) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms()) {
    GraphTerm u = t;
    u.coef = t.coef.map_coefficients([](const cplx& c) { return std::conj(c); });
    for (auto& v : u.vertices) v.g = v.g.conj();
    for (auto& e : u.edges) e.k = conjugated(e.k);
    r.add_term(std::move(u));
  }
  return r;
}

Field functional_derivative(const Field& f, int n) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms()) {
    // ordered selections of n factors; leg i carries the i-th removed factor
    auto rec = [&](auto&& self, GraphTerm cur, int leg) -> void {
      if (leg == n) {
        r.add_term(std::move(cur));
        return;
      }
      for (int v = 0; v < static_cast<int>(cur.vertices.size()); ++v) {
        const auto& fac = cur.vertices[v].factors;
        for (std::size_t i = 0; i < fac.size(); ++i) {
          if (i > 0 && fac[i] == fac[i - 1]) continue;
          const auto mult = std::count(fac.begin(), fac.end(), fac[i]);
          GraphTerm next = cur;
          const MultiIndex a = fac[i];
          auto& nf = next.vertices[v].factors;
          nf.erase(std::find(nf.begin(), nf.end(), a));
          next.vertices[v].legs.push_back({leg, a});
          next.coef = next.coef.scaled(cplx(static_cast<double>(mult)));
          self(self, std::move(next), leg + 1);
        }
      }
    };
    rec(rec, t, 0);
  }
  return r;
}

Field smear_legs(const Field& f, const std::vector<TestFunction>& p) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms()) {
    GraphTerm u = t;
    for (auto& v : u.vertices) {
      for (const auto& l : v.legs) {
        if (l.id < 0 || l.id >= static_cast<int>(p.size())) throw ConfigurationError("smear_legs: missing test function");
        v.g = v.g * p[l.id].derivative(l.a);
      }
      v.legs.clear();
    }
    r.add_term(std::move(u));
  }
  return r;
}

Support field_support(const Field& f) {
  Support s = Support::none(f.backend().dim);
  for (const auto& [k, t] : f.terms())
    for (const auto& v : t.vertices)
      if (!v.factors.empty()) s = s.hull(v.g.support());
  return s;
}

Field field_parity(const Field& f) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms()) {
    GraphTerm u = t;
    if (t.phi_degree() % 2 == 1) u.coef = -u.coef;
    r.add_term(std::move(u));
  }
  return r;
}

Field translate(const Field& f, std::span<const double> a) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms()) {
    GraphTerm u = t;
    for (auto& v : u.vertices) v.g = v.g.translated(a);
    r.add_term(std::move(u));
  }
  return r;
}

Field drop_higher_hbar(const Field& f, int max_hbar) {
  return f.filter_degree([&](const Degree& d) { return d.hbar <= max_hbar; });
}

Field phi_degree_part(const Field& f, int n) {
  Field r(f.backend());
  for (const auto& [k, t] : f.terms())
    if (t.phi_degree() == n) r.add_term(t);
  return r;
}

}  // namespace egret
