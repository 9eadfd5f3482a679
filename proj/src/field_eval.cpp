#include "egret/field_eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <thread>

#include "egret/errors.hpp"

namespace egret {

namespace {

// Vertex weight g(x) * prod_f d^{a_f} h(x).
struct Weight {
  TestFunction g;
  std::vector<TestFunction> hs;

  cplx operator()(std::span<const double> x) const {
    cplx v = g(x);
    if (v == cplx(0.0)) return v;
    for (const auto& h : hs) v *= h(x);
    return v;
  }
};

std::vector<Weight> weights(const GraphTerm& t, const std::optional<TestFunction>& h) {
  std::vector<Weight> w;
  for (const auto& v : t.vertices) {
    Weight x{v.g, {}};
    for (const auto& a : v.factors) x.hs.push_back(h->derivative(a));
    w.push_back(std::move(x));
  }
  return w;
}

std::vector<std::vector<int>> components(const GraphTerm& t) {
  const int n = static_cast<int>(t.vertices.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : t.edges) parent[find(e.a)] = find(e.b);
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& [r, g] : groups) out.push_back(std::move(g));
  return out;
}

void require_bounded(const Support& s) {
  if (!s.bounded()) throw UnsupportedEvaluation("smearing without compact support");
}

// Tensor Gauss-Legendre of a single weight over its support box.
cplx integrate_vertex(const Weight& w, const QuadratureSpec& q) {
  const Support& s = w.g.support();
  if (s.empty) return 0.0;
  require_bounded(s);
  const int d = s.dim();
  const auto bps = w.g.breakpoints();
  std::vector<double> x(d);
  auto rec = [&](auto&& self, int i) -> cplx {
    if (i == d) return w(x);
    return integrate_1d(
        [&](double xi) {
          x[i] = xi;
          return self(self, i + 1);
        },
        s.lo[i], s.hi[i], bps[i], q);
  };
  return rec(rec, 0);
}

// Nested Gauss-Legendre for a connected d=1 component.
cplx integrate_component_d1(const Backend& b, const GraphTerm& t, const std::vector<Weight>& w,
                            const std::vector<int>& comp, const QuadratureSpec& q) {
  // breadth-first order so every vertex after the first touches an earlier one
  std::vector<int> order{comp[0]};
  std::vector<char> seen(t.vertices.size(), 0);
  seen[comp[0]] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& e : t.edges) {
      int other = -1;
      if (e.a == order[i]) other = e.b;
      if (e.b == order[i]) other = e.a;
      if (other >= 0 && !seen[other]) {
        seen[other] = 1;
        order.push_back(other);
      }
    }
  const int n = static_cast<int>(order.size());
  std::vector<int> level(t.vertices.size(), -1);
  for (int i = 0; i < n; ++i) level[order[i]] = i;
  std::vector<std::vector<const Edge*>> at(n);
  for (const auto& e : t.edges) at[std::max(level[e.a], level[e.b])].push_back(&e);
  std::vector<std::vector<double>> bps(n);
  std::vector<Support> sup(n);
  for (int i = 0; i < n; ++i) {
    sup[i] = t.vertices[order[i]].g.support();
    if (sup[i].empty) return 0.0;
    require_bounded(sup[i]);
    bps[i] = t.vertices[order[i]].g.breakpoints()[0];
  }
  std::vector<double> x(t.vertices.size());
  auto rec = [&](auto&& self, int k) -> cplx {
    const int v = order[k];
    std::vector<double> br = bps[k];
    for (const Edge* e : at[k])
      if (kernel_kinked(e->k)) br.push_back(x[e->a == v ? e->b : e->a]);
    return integrate_1d(
        [&](double xv) -> cplx {
          x[v] = xv;
          cplx val = w[v](std::span<const double>(&x[v], 1));
          if (val == cplx(0.0)) return val;
          for (const Edge* e : at[k]) {
            const double z = x[e->a] - x[e->b];
            val *= eval_kernel(b, e->k, e->c, std::span<const double>(&z, 1));
          }
          if (k + 1 == n) return val;
          return val * self(self, k + 1);
        },
        sup[k].lo[0], sup[k].hi[0], br, q);
  };
  return rec(rec, 0);
}

// Quasi Monte Carlo over the product of the vertex boxes, with the integrand
// symmetrised over permutations of vertices carrying the same smearing. All
// terms with the same smearing multiset use the same points, so integrands
// that cancel pointwise cancel in the estimates as well.
cplx integrate_qmc(const Backend& b, const GraphTerm& t, const std::vector<Weight>& w, const EvalOptions& opt) {
  const int n = static_cast<int>(t.vertices.size());
  const int d = b.dim;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int x, int y) { return t.vertices[x].g.key() < t.vertices[y].g.key(); });
  // slot s hosts vertex idx[s]; assignments permute within equal-key runs
  std::vector<std::pair<int, int>> runs;
  for (int i = 0; i < n;) {
    int j = i;
    while (j < n && t.vertices[idx[j]].g.key() == t.vertices[idx[i]].g.key()) ++j;
    runs.push_back({i, j});
    i = j;
  }
  std::vector<std::vector<int>> assignments;
  {
    std::vector<int> cur = idx;
    auto rec = [&](auto&& self, std::size_t r) -> void {
      if (r == runs.size()) {
        assignments.push_back(cur);
        return;
      }
      auto [lo, hi] = runs[r];
      std::vector<int> part(cur.begin() + lo, cur.begin() + hi);
      std::sort(part.begin(), part.end());
      do {
        std::copy(part.begin(), part.end(), cur.begin() + lo);
        self(self, r + 1);
      } while (std::next_permutation(part.begin(), part.end()));
    };
    rec(rec, 0);
  }
  std::vector<double> lo(n * d), len(n * d);
  double volume = 1.0;
  for (int s = 0; s < n; ++s) {
    const Support& sup = t.vertices[idx[s]].g.support();
    if (sup.empty) return 0.0;
    require_bounded(sup);
    for (int i = 0; i < d; ++i) {
      lo[s * d + i] = sup.lo[i];
      len[s * d + i] = sup.hi[i] - sup.lo[i];
      volume *= len[s * d + i];
    }
  }
  Halton seq(n * d, opt.qmc_shift.size() >= static_cast<std::size_t>(n * d)
                        ? std::vector<double>(opt.qmc_shift.begin(), opt.qmc_shift.begin() + n * d)
                        : std::vector<double>{});
  cplx sum = 0.0;
  std::vector<double> pos(n * d);
  for (long p = 0; p < opt.qmc_points; ++p) {
    const auto u = seq.point(p);
    for (int i = 0; i < n * d; ++i) pos[i] = lo[i] + len[i] * u[i];
    cplx acc = 0.0;
    for (const auto& asg : assignments) {
      // vertex asg[s] sits at slot s
      std::vector<int> slot(n);
      for (int s = 0; s < n; ++s) slot[asg[s]] = s;
      cplx val = 1.0;
      for (int v = 0; v < n && val != cplx(0.0); ++v)
        val *= w[v](std::span<const double>(&pos[slot[v] * d], d));
      if (val == cplx(0.0)) continue;
      try {
        for (const auto& e : t.edges) {
          double z[4];
          for (int i = 0; i < d; ++i) z[i] = pos[slot[e.a] * d + i] - pos[slot[e.b] * d + i];
          val *= eval_kernel(b, e.k, e.c, std::span<const double>(z, d));
        }
      } catch (const UnsupportedEvaluation&) {
        val = 0.0;  // light-cone point, measure zero
      }
      acc += val;
    }
    sum += acc / static_cast<double>(assignments.size());
  }
  return sum * (volume / opt.qmc_points);
}

std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

}  // namespace

cplx Evaluator::term_integral(const Backend& b, const GraphTerm& t, const std::optional<TestFunction>& h) {
  if (t.leg_count() > 0) throw ConfigurationError("evaluate: field has free legs; smear them first");
  if (!h && t.phi_degree() > 0) return 0.0;
  std::vector<Weight> w = h ? weights(t, h) : weights(t, TestFunction::zero(b.dim));
  if (!h)
    for (auto& x : w) x.hs.clear();
  cplx result = 1.0;
  const bool has_edges = !t.edges.empty();
  if (has_edges && !b.numeric) throw UnsupportedEvaluation("backend '" + b.name + "' has no numeric kernels");
  if (has_edges && b.dim >= 2) return integrate_qmc(b, t, w, opt_);
  for (const auto& comp : components(t)) {
    cplx c;
    if (comp.size() == 1)
      c = integrate_vertex(w[comp[0]], opt_.quad);
    else
      c = integrate_component_d1(b, t, w, comp, opt_.quad);
    result *= c;
    if (result == cplx(0.0)) break;
  }
  return result;
}

ScalarSeries Evaluator::evaluate(const Field& f, const std::optional<TestFunction>& h) {
  const Backend& b = f.backend();
  std::vector<const std::pair<const std::string, GraphTerm>*> items;
  for (const auto& kv : f.terms()) items.push_back(&kv);
  std::vector<cplx> values(items.size());
  const std::string prefix = b.name + hex(b.mass) + hex(b.mu) + hex(b.eps) + "|" + (h ? h->key() : "0") + "|" +
                             std::to_string(opt_.quad.points) + "," + std::to_string(opt_.quad.subdiv) + "," +
                             std::to_string(opt_.qmc_points) + "|";
  auto work = [&](std::size_t i) {
    const auto& [key, term] = *items[i];
    if (!h && term.phi_degree() > 0) {
      values[i] = 0.0;
      return;
    }
    const std::string ck = prefix + key;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(ck);
      if (it != cache_.end()) {
        values[i] = it->second;
        return;
      }
    }
    const cplx v = term_integral(b, term, h);
    std::lock_guard<std::mutex> lock(mu_);
    cache_[ck] = v;
    values[i] = v;
  };
  const int nt = std::max(1, std::min<int>(opt_.threads, static_cast<int>(items.size())));
  if (nt == 1) {
    for (std::size_t i = 0; i < items.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < items.size(); i += nt) work(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  ScalarSeries out;
  bool first = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const ScalarSeries term = items[i]->second.coef.scaled(values[i]);
    if (first) {
      out = term;
      first = false;
    } else {
      out += term;
    }
  }
  return out;
}

ScalarSeries evaluate(const Field& f, const TestFunction& h, const EvalOptions& opt) {
  Evaluator e(opt);
  return e.evaluate(f, h);
}

ScalarSeries vacuum_state(const Field& f, const EvalOptions& opt) {
  Evaluator e(opt);
  return e.vacuum(f);
}

}  // namespace egret
