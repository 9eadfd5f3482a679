#include "egret/jet.hpp"

namespace egret {

JetLayout::JetLayout(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || nvars > 4) throw std::invalid_argument("JetLayout: 1..4 variables supported");
  for (int deg = 0; deg <= order; ++deg) {
    // lexicographic enumeration of all multi-indices of total degree deg
    MultiIndex a{0, 0, 0, 0};
    std::vector<MultiIndex> level;
    auto rec = [&](auto&& self, int var, int remaining) -> void {
      if (var == nvars - 1) {
        a[var] = remaining;
        level.push_back(a);
        a[var] = 0;
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        a[var] = v;
        self(self, var + 1, remaining - v);
      }
      a[var] = 0;
    };
    rec(rec, 0, deg);
    for (const auto& m : level) {
      lookup_.emplace(m, static_cast<int>(alphas_.size()));
      alphas_.push_back(m);
    }
  }
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      const MultiIndex s = alphas_[i] + alphas_[j];
      if (total(s) <= order) products_.push_back({i, j, lookup_.at(s)});
    }
}

int JetLayout::index(const MultiIndex& a) const {
  auto it = lookup_.find(a);
  if (it == lookup_.end()) throw std::out_of_range("JetLayout: multi-index out of range");
  return it->second;
}

std::shared_ptr<const JetLayout> JetLayout::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const JetLayout>(nvars, order);
  return slot;
}

}  // namespace egret
