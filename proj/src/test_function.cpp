#include "egret/test_function.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace egret {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}
std::string num(cplx v) { return num(v.real()) + "," + num(v.imag()); }

std::string nums(const std::vector<double>& v) {
  std::string s = "[";
  for (double x : v) s += num(x) + ";";
  return s + "]";
}

using NodePtr = std::shared_ptr<const TestFunction::Node>;
using Node = TestFunction::Node;
using Kind = TestFunction::Kind;

TestFunction make(Node n) { return TestFunction(std::make_shared<const Node>(std::move(n))); }

NodePtr node_of(const TestFunction& f) {
  // nodes are shared, so rewrapping is cheap
  return std::make_shared<const Node>(f.node());
}

}  // namespace

// -- Support

Support Support::whole(int dim) {
  return {std::vector<double>(dim, -kInf), std::vector<double>(dim, kInf), 0.0, false};
}
Support Support::none(int dim) {
  Support s{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0.0, true};
  return s;
}
Support Support::box(std::vector<double> lo, std::vector<double> hi) { return {std::move(lo), std::move(hi), 0.0, false}; }

bool Support::bounded() const {
  if (empty) return true;
  for (int i = 0; i < dim(); ++i)
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i])) return false;
  return true;
}

bool Support::contains_origin_neighbourhood() const {
  if (empty || r_inner > 0.0) return false;
  for (int i = 0; i < dim(); ++i)
    if (lo[i] >= 0.0 || hi[i] <= 0.0) return false;
  return true;
}

Support Support::intersect(const Support& o) const {
  if (empty || o.empty) return none(dim());
  Support r = *this;
  for (int i = 0; i < dim(); ++i) {
    r.lo[i] = std::max(lo[i], o.lo[i]);
    r.hi[i] = std::min(hi[i], o.hi[i]);
    if (r.lo[i] >= r.hi[i]) return none(dim());
  }
  r.r_inner = std::max(r_inner, o.r_inner);
  return r;
}

Support Support::hull(const Support& o) const {
  if (empty) return o;
  if (o.empty) return *this;
  Support r = *this;
  for (int i = 0; i < dim(); ++i) {
    r.lo[i] = std::min(lo[i], o.lo[i]);
    r.hi[i] = std::max(hi[i], o.hi[i]);
  }
  r.r_inner = std::min(r_inner, o.r_inner);
  return r;
}

Support Support::shifted(std::span<const double> a) const {
  if (empty) return *this;
  Support r = *this;
  for (int i = 0; i < dim(); ++i) {
    r.lo[i] += a[i];
    r.hi[i] += a[i];
  }
  bool zero = std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; });
  if (!zero) r.r_inner = 0.0;
  return r;
}

bool Support::intersects(const Support& o) const { return !intersect(o).empty; }

// -- primitives

TestFunction TestFunction::zero(int dim) {
  Node n;
  n.kind = Kind::Zero;
  n.dim = dim;
  n.key = "0";
  n.support = Support::none(dim);
  return make(std::move(n));
}

TestFunction TestFunction::constant(int dim, cplx c) {
  if (c == cplx(0.0)) return zero(dim);
  Node n;
  n.kind = Kind::Constant;
  n.dim = dim;
  n.coef = c;
  n.key = "c(" + num(c) + ")";
  n.support = Support::whole(dim);
  return make(std::move(n));
}

static Support bump_box(const std::vector<double>& c, const std::vector<double>& r) {
  std::vector<double> lo(c.size()), hi(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    lo[i] = c[i] - r[i];
    hi[i] = c[i] + r[i];
  }
  return Support::box(lo, hi);
}

TestFunction TestFunction::poly_bump(std::vector<double> center, std::vector<double> radius, int power, cplx amp) {
  if (center.size() != radius.size() || center.empty()) throw std::invalid_argument("poly_bump: dimension mismatch");
  if (power < 1) throw std::invalid_argument("poly_bump: power must be positive");
  if (amp == cplx(0.0)) return zero(static_cast<int>(center.size()));
  Node n;
  n.kind = Kind::PolyBump;
  n.dim = static_cast<int>(center.size());
  n.support = bump_box(center, radius);
  n.key = "pb(" + nums(center) + nums(radius) + std::to_string(power) + "," + num(amp) + ")";
  n.center = std::move(center);
  n.radius = std::move(radius);
  n.power = power;
  n.coef = amp;
  return make(std::move(n));
}

TestFunction TestFunction::smooth_bump(std::vector<double> center, std::vector<double> radius, cplx amp) {
  if (center.size() != radius.size() || center.empty()) throw std::invalid_argument("smooth_bump: dimension mismatch");
  if (amp == cplx(0.0)) return zero(static_cast<int>(center.size()));
  Node n;
  n.kind = Kind::SmoothBump;
  n.dim = static_cast<int>(center.size());
  n.support = bump_box(center, radius);
  n.key = "sb(" + nums(center) + nums(radius) + num(amp) + ")";
  n.center = std::move(center);
  n.radius = std::move(radius);
  n.coef = amp;
  return make(std::move(n));
}

TestFunction TestFunction::radial_bump(std::vector<double> center, double radius, cplx amp) {
  if (amp == cplx(0.0)) return zero(static_cast<int>(center.size()));
  Node n;
  n.kind = Kind::RadialBump;
  n.dim = static_cast<int>(center.size());
  n.support = bump_box(center, std::vector<double>(center.size(), radius));
  n.key = "rb(" + nums(center) + num(radius) + "," + num(amp) + ")";
  n.center = std::move(center);
  n.radius = {radius};
  n.coef = amp;
  return make(std::move(n));
}

TestFunction TestFunction::chi(int dim, double rho, ChiProfile profile, bool complement) {
  Node n;
  n.kind = Kind::Chi;
  n.dim = dim;
  n.rho = rho;
  n.profile = profile;
  n.complement = complement;
  n.key = std::string(complement ? "chic(" : "chi(") + num(rho) + (profile == ChiProfile::Steep ? ",B)" : ",A)");
  if (complement) {
    // 1 - chi(rho y) lives in the ball |y| <= 2/rho
    const double r = 2.0 / rho;
    n.support = Support::box(std::vector<double>(dim, -r), std::vector<double>(dim, r));
  } else {
    n.support = Support::whole(dim);
    n.support.r_inner = 1.0 / rho;
  }
  return make(std::move(n));
}

TestFunction TestFunction::monomial(int dim, MultiIndex a, cplx coef) {
  if (coef == cplx(0.0)) return zero(dim);
  Node n;
  n.kind = Kind::Monomial;
  n.dim = dim;
  n.index = a;
  n.coef = coef;
  n.key = "m(" + std::to_string(a[0]) + std::to_string(a[1]) + std::to_string(a[2]) + std::to_string(a[3]) + "," +
          num(coef) + ")";
  n.support = Support::whole(dim);
  return make(std::move(n));
}

TestFunction TestFunction::plane_wave(std::vector<double> k, cplx amp, double phase) {
  if (amp == cplx(0.0)) return zero(static_cast<int>(k.size()));
  Node n;
  n.kind = Kind::PlaneWave;
  n.dim = static_cast<int>(k.size());
  n.coef = amp;
  n.rho = phase;
  n.key = "pw(" + nums(k) + num(amp) + "," + num(phase) + ")";
  n.vec = std::move(k);
  n.support = Support::whole(n.dim);
  return make(std::move(n));
}

TestFunction TestFunction::sine(std::vector<double> k, double phase) {
  // sin = (e^{i.} - e^{-i.}) / 2i
  std::vector<double> mk(k);
  for (auto& v : mk) v = -v;
  return plane_wave(k, cplx(0.0, -0.5), phase) + plane_wave(mk, cplx(0.0, 0.5), -phase);
}

TestFunction TestFunction::cosine(std::vector<double> k, double phase) {
  std::vector<double> mk(k);
  for (auto& v : mk) v = -v;
  return plane_wave(k, 0.5, phase) + plane_wave(mk, 0.5, -phase);
}

TestFunction TestFunction::jet_bump(int dim, MultiIndex a, double r0, ChiProfile profile) {
  // (1 - chi(y / r0)) = complement profile at rho = 1/r0
  return monomial(dim, a, 1.0 / multi_factorial(a)) * chi(dim, 1.0 / r0, profile, true);
}

// -- combinators

TestFunction operator+(const TestFunction& a, const TestFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.dim() != b.dim()) throw std::invalid_argument("TestFunction: dimension mismatch");
  Node n;
  n.kind = Kind::Sum;
  n.dim = a.dim();
  auto push = [&](const TestFunction& f) {
    if (f.kind() == Kind::Sum)
      for (const auto& c : f.node().children) n.children.push_back(c);
    else
      n.children.push_back(node_of(f));
  };
  push(a);
  push(b);
  std::stable_sort(n.children.begin(), n.children.end(), [](const NodePtr& x, const NodePtr& y) { return x->key < y->key; });
  n.key = "S(";
  n.support = Support::none(n.dim);
  for (const auto& c : n.children) {
    n.key += c->key + "|";
    n.support = n.support.hull(c->support);
  }
  n.key += ")";
  return make(std::move(n));
}

TestFunction operator-(const TestFunction& a, const TestFunction& b) { return a + b.scaled(-1.0); }

TestFunction operator*(const TestFunction& a, const TestFunction& b) {
  if (a.is_zero()) return a;
  if (b.is_zero()) return b;
  if (a.dim() != b.dim()) throw std::invalid_argument("TestFunction: dimension mismatch");
  if (a.kind() == Kind::Constant) return b.scaled(a.node().coef);
  if (b.kind() == Kind::Constant) return a.scaled(b.node().coef);
  Node n;
  n.kind = Kind::Product;
  n.dim = a.dim();
  auto push = [&](const TestFunction& f) {
    if (f.kind() == Kind::Product)
      for (const auto& c : f.node().children) n.children.push_back(c);
    else
      n.children.push_back(node_of(f));
  };
  push(a);
  push(b);
  std::stable_sort(n.children.begin(), n.children.end(), [](const NodePtr& x, const NodePtr& y) { return x->key < y->key; });
  n.key = "P(";
  n.support = Support::whole(n.dim);
  for (const auto& c : n.children) {
    n.key += c->key + "|";
    n.support = n.support.intersect(c->support);
  }
  n.key += ")";
  if (n.support.empty) return TestFunction::zero(n.dim);
  return make(std::move(n));
}

TestFunction TestFunction::scaled(cplx c) const {
  if (c == cplx(1.0)) return *this;
  if (c == cplx(0.0) || is_zero()) return zero(dim());
  if (kind() == Kind::Scale) return TestFunction(node_->children[0]).scaled(c * node_->coef);
  if (kind() == Kind::Constant) return constant(dim(), c * node_->coef);
  Node n;
  n.kind = Kind::Scale;
  n.dim = dim();
  n.coef = c;
  n.children = {node_};
  n.key = "k(" + num(c) + "|" + key() + ")";
  n.support = support();
  return make(std::move(n));
}

TestFunction TestFunction::translated(std::span<const double> a) const {
  if (std::all_of(a.begin(), a.end(), [](double v) { return v == 0.0; })) return *this;
  if (is_zero() || kind() == Kind::Constant) return *this;
  Node n;
  n.kind = Kind::Translate;
  n.dim = dim();
  n.vec.assign(a.begin(), a.end());
  if (kind() == Kind::Translate) {
    for (int i = 0; i < n.dim; ++i) n.vec[i] += node_->vec[i];
    n.children = node_->children;
  } else {
    n.children = {node_};
  }
  n.key = "t(" + nums(n.vec) + "|" + n.children[0]->key + ")";
  n.support = n.children[0]->support.shifted(n.vec);
  return make(std::move(n));
}

TestFunction TestFunction::dilated(double rho) const {
  if (rho == 1.0 || is_zero() || kind() == Kind::Constant) return *this;
  Node n;
  n.kind = Kind::Dilate;
  n.dim = dim();
  n.rho = rho;
  n.children = {node_};
  n.key = "d(" + num(rho) + "|" + key() + ")";
  n.support = support();
  if (!n.support.empty) {
    for (int i = 0; i < n.dim; ++i) {
      double lo = n.support.lo[i] * rho, hi = n.support.hi[i] * rho;
      n.support.lo[i] = std::min(lo, hi);
      n.support.hi[i] = std::max(lo, hi);
    }
    n.support.r_inner *= std::abs(rho);
  }
  return make(std::move(n));
}

TestFunction TestFunction::derivative(const MultiIndex& a) const {
  if (total(a) == 0 || is_zero()) return *this;
  if (kind() == Kind::Constant) return zero(dim());
  for (int i = dim(); i < 4; ++i)
    if (a[i] != 0) throw std::invalid_argument("TestFunction: derivative index beyond dimension");
  if (kind() == Kind::Scale) return TestFunction(node_->children[0]).derivative(a).scaled(node_->coef);
  if (kind() == Kind::Sum) {
    TestFunction r = zero(dim());
    for (const auto& c : node_->children) r = r + TestFunction(c).derivative(a);
    return r;
  }
  if (kind() == Kind::Translate) {
    return TestFunction(node_->children[0]).derivative(a).translated(node_->vec);
  }
  if (kind() == Kind::EulerPoly) {
    // d^a E = (E + |a|) d^a, so d^a p(E) f = p(E + |a|) d^a f
    const int s = total(a);
    const auto& c = node_->coeffs;
    std::vector<cplx> shifted(c.size(), 0.0);
    for (std::size_t j = 0; j < c.size(); ++j) {
      double binom = 1.0;
      for (std::size_t i = 0; i <= j; ++i) {
        // binomial(j, i) s^{j-i}
        shifted[i] += c[j] * binom * std::pow(double(s), double(j - i));
        binom = binom * double(j - i) / double(i + 1);
      }
    }
    return TestFunction(node_->children[0]).derivative(a).euler_poly(shifted);
  }
  if (kind() == Kind::PlaneWave) {
    cplx f = node_->coef;
    for (int i = 0; i < dim(); ++i)
      for (int k = 0; k < a[i]; ++k) f *= cplx(0.0, node_->vec[i]);
    return plane_wave(node_->vec, f, node_->rho);
  }
  MultiIndex base{0, 0, 0, 0};
  std::shared_ptr<const Node> inner = node_;
  if (kind() == Kind::Derivative) {
    base = node_->index;
    inner = node_->children[0];
  }
  Node n;
  n.kind = Kind::Derivative;
  n.dim = dim();
  n.index = base + a;
  n.children = {inner};
  n.key = "D(" + std::to_string(n.index[0]) + std::to_string(n.index[1]) + std::to_string(n.index[2]) +
          std::to_string(n.index[3]) + "|" + inner->key + ")";
  n.support = inner->support;
  if (inner->kind == Kind::Monomial) {
    // exact: d^a y^b = b!/(b-a)! y^{b-a}
    MultiIndex b = inner->index;
    double c = 1.0;
    for (int i = 0; i < 4; ++i) {
      if (n.index[i] > b[i]) return zero(dim());
      for (int k = 0; k < n.index[i]; ++k) c *= (b[i] - k);
      b[i] -= n.index[i];
    }
    return monomial(dim(), b, inner->coef * c);
  }
  return make(std::move(n));
}

TestFunction TestFunction::conj() const {
  if (is_zero()) return *this;
  switch (kind()) {
    case Kind::Constant:
      return constant(dim(), std::conj(node_->coef));
    case Kind::Conj:
      return TestFunction(node_->children[0]);
    case Kind::Scale:
      return TestFunction(node_->children[0]).conj().scaled(std::conj(node_->coef));
    case Kind::Sum: {
      TestFunction r = zero(dim());
      for (const auto& c : node_->children) r = r + TestFunction(c).conj();
      return r;
    }
    case Kind::PolyBump:
    case Kind::SmoothBump:
    case Kind::RadialBump:
    case Kind::Monomial: {
      Node n = *node_;
      if (n.coef.imag() == 0.0) return *this;
      n.coef = std::conj(n.coef);
      if (n.kind == Kind::PolyBump)
        return poly_bump(n.center, n.radius, n.power, n.coef);
      if (n.kind == Kind::SmoothBump) return smooth_bump(n.center, n.radius, n.coef);
      if (n.kind == Kind::RadialBump) return radial_bump(n.center, n.radius[0], n.coef);
      return monomial(n.dim, n.index, n.coef);
    }
    case Kind::Chi:
      return *this;
    case Kind::PlaneWave: {
      std::vector<double> k = node_->vec;
      for (auto& v : k) v = -v;
      return plane_wave(k, std::conj(node_->coef), -node_->rho);
    }
    default:
      break;
  }
  Node n;
  n.kind = Kind::Conj;
  n.dim = dim();
  n.children = {node_};
  n.key = "C(" + key() + ")";
  n.support = support();
  return make(std::move(n));
}

TestFunction TestFunction::euler_poly(std::vector<cplx> coeffs) const {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  if (coeffs.empty() || is_zero()) return zero(dim());
  if (coeffs.size() == 1) return scaled(coeffs[0]);
  if (coeffs.size() > 12) throw std::invalid_argument("euler_poly: degree too large");
  Node n;
  n.kind = Kind::EulerPoly;
  n.dim = dim();
  n.coeffs = std::move(coeffs);
  n.children = {node_};
  n.key = "E(";
  for (auto c : n.coeffs) n.key += num(c) + ";";
  n.key += "|" + key() + ")";
  n.support = support();
  return make(std::move(n));
}

// -- queries

static void collect_breakpoints(const Node& n, std::vector<std::vector<double>>& out, const std::vector<double>& shift,
                                double scale) {
  auto put = [&](int i, double v) { out[i].push_back(v * scale + shift[i]); };
  switch (n.kind) {
    case Kind::PolyBump:
    case Kind::SmoothBump:
      for (int i = 0; i < n.dim; ++i) {
        put(i, n.center[i] - n.radius[i]);
        put(i, n.center[i] + n.radius[i]);
        put(i, n.center[i]);
      }
      break;
    case Kind::RadialBump:
      for (int i = 0; i < n.dim; ++i) {
        put(i, n.center[i] - n.radius[0]);
        put(i, n.center[i] + n.radius[0]);
      }
      break;
    case Kind::Chi:
      for (int i = 0; i < n.dim; ++i)
        for (double r : {1.0, 2.0}) {
          put(i, -r / n.rho);
          put(i, r / n.rho);
        }
      if (n.dim == 1)
        for (double r : {1.25, 1.5, 1.75}) {
          put(0, -r / n.rho);
          put(0, r / n.rho);
        }
      break;
    case Kind::Translate: {
      std::vector<double> s = shift;
      for (int i = 0; i < n.dim; ++i) s[i] += scale * n.vec[i];
      collect_breakpoints(*n.children[0], out, s, scale);
      break;
    }
    case Kind::Dilate:
      collect_breakpoints(*n.children[0], out, shift, scale * n.rho);
      break;
    default:
      for (const auto& c : n.children) collect_breakpoints(*c, out, shift, scale);
  }
}

std::vector<std::vector<double>> TestFunction::breakpoints() const {
  std::vector<std::vector<double>> out(dim());
  collect_breakpoints(*node_, out, std::vector<double>(dim(), 0.0), 1.0);
  for (auto& v : out) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return out;
}

cplx TestFunction::operator()(std::span<const double> y) const {
  std::vector<cplx> z(y.begin(), y.end());
  return eval<cplx>(std::span<const cplx>(z));
}

Jet<cplx> TestFunction::jet_at(std::span<const double> y, int order) const {
  auto layout = JetLayout::get(dim(), order);
  std::vector<Jet<cplx>> z;
  for (int i = 0; i < dim(); ++i) z.push_back(Jet<cplx>::variable(layout, i, cplx(y[i])));
  Jet<cplx> r = eval<Jet<cplx>>(std::span<const Jet<cplx>>(z));
  if (r.is_constant()) {
    // promote to the full layout so coefficients are addressable
    Jet<cplx> p = Jet<cplx>::variable(layout, 0, 0.0).scaled(0.0);
    return p + r;
  }
  return r;
}

cplx TestFunction::derivative_at(const MultiIndex& a, std::span<const double> y) const {
  return jet_at(y, total(a)).derivative(a);
}

}  // namespace egret
