#include "egret/star.hpp"

#include <stdexcept>

namespace egret {

namespace {

struct Slot {
  int group;
  int vertex;  // index in the merged term
  MultiIndex a;
  int count;
};

}  // namespace

Field contract(const Backend& b, const std::vector<const GraphTerm*>& groups, const ContractionRule& rule) {
  Field out(b);
  // merged term and slots
  GraphTerm merged;
  std::vector<Slot> slots;
  ScalarSeries coef(1.0, Truncation{});
  for (int gi = 0; gi < static_cast<int>(groups.size()); ++gi) {
    const GraphTerm& g = *groups[gi];
    const int off = static_cast<int>(merged.vertices.size());
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
      merged.vertices.push_back(g.vertices[v]);
      const auto& f = g.vertices[v].factors;
      for (std::size_t i = 0; i < f.size();) {
        std::size_t j = i;
        while (j < f.size() && f[j] == f[i]) ++j;
        slots.push_back({gi, off + v, f[i], static_cast<int>(j - i)});
        i = j;
      }
    }
    for (auto e : g.edges) {
      e.a += off;
      e.b += off;
      merged.edges.push_back(e);
    }
    coef = coef * g.coef;
  }
  if (coef.is_zero()) return out;

  struct Pair {
    int s, t;
  };
  std::vector<Pair> pairs;
  for (int s = 0; s < static_cast<int>(slots.size()); ++s)
    for (int t = s + 1; t < static_cast<int>(slots.size()); ++t)
      if (slots[s].group != slots[t].group) pairs.push_back({s, t});

  std::vector<int> used(slots.size(), 0), cnt(pairs.size(), 0);
  auto emit = [&](int edges) {
    if (edges < rule.min_edges) return;
    double w = 1.0;
    // prod_s n_s!/(n_s - used_s)! / prod_t c_st! over both ends, times c_st!
    for (std::size_t s = 0; s < slots.size(); ++s)
      for (int k = 0; k < used[s]; ++k) w *= slots[s].count - k;
    for (std::size_t p = 0; p < pairs.size(); ++p) w /= factorial(cnt[p]);
    GraphTerm t = merged;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto& f = t.vertices[slots[s].vertex].factors;
      for (int k = 0; k < used[s]; ++k) f.erase(std::find(f.begin(), f.end(), slots[s].a));
    }
    double sign = 1.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const Slot& x = slots[pairs[p].s];
      const Slot& y = slots[pairs[p].t];
      for (int k = 0; k < cnt[p]; ++k) {
        t.edges.push_back({x.vertex, y.vertex, rule.kernel, x.a + y.a});
        if (total(y.a) % 2 == 1) sign = -sign;
      }
    }
    Degree d{};
    if (rule.hbar_per_edge) d.hbar = edges;
    t.coef = coef * ScalarSeries::monomial(d, cplx(sign * w), Truncation{});
    out.add_term(std::move(t));
  };
  auto rec = [&](auto&& self, std::size_t p, int edges) -> void {
    if (p == pairs.size()) {
      emit(edges);
      return;
    }
    const Slot& x = slots[pairs[p].s];
    const Slot& y = slots[pairs[p].t];
    const int room = std::min({x.count - used[pairs[p].s], y.count - used[pairs[p].t], rule.max_edges - edges});
    for (int c = 0; c <= room; ++c) {
      cnt[p] = c;
      used[pairs[p].s] += c;
      used[pairs[p].t] += c;
      self(self, p + 1, edges + c);
      used[pairs[p].s] -= c;
      used[pairs[p].t] -= c;
    }
    cnt[p] = 0;
  };
  rec(rec, 0, 0);
  return out;
}

Field star(const Field& f, const Field& g) {
  require_same_backend(f, g);
  Field out(f.backend());
  const ContractionRule rule{Kernel::H, true};
  for (const auto& [ka, ta] : f.terms())
    for (const auto& [kb, tb] : g.terms()) out += contract(f.backend(), {&ta, &tb}, rule);
  return out;
}

Field star(const std::vector<Field>& fs) {
  if (fs.empty()) throw std::invalid_argument("star: empty product");
  Field r = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) r = star(r, fs[i]);
  return r;
}

Field star_commutator(const Field& f, const Field& g) { return star(f, g) - star(g, f); }

Field poisson_bracket(const Field& f, const Field& g) {
  require_same_backend(f, g);
  Field out(f.backend());
  const ContractionRule rule{Kernel::Delta, false, 1, 1};
  for (const auto& [ka, ta] : f.terms())
    for (const auto& [kb, tb] : g.terms()) out += contract(f.backend(), {&ta, &tb}, rule);
  return out;
}

}  // namespace egret
