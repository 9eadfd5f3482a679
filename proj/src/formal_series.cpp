#include "egret/formal_series.hpp"

#include <cstdio>

namespace egret {

std::string to_string(const Degree& d) {
  std::string s = "h^" + std::to_string(d.hbar) + " k^" + std::to_string(d.kappa);
  if (d.lambda) s += " l^" + std::to_string(d.lambda);
  if (d.lambda2) s += " m^" + std::to_string(d.lambda2);
  return s;
}

std::string to_string(const ScalarSeries& s) {
  if (s.is_zero()) return "0";
  std::string out;
  char buf[64];
  for (const auto& [d, c] : s.terms()) {
    if (!out.empty()) out += " + ";
    std::snprintf(buf, sizeof buf, "(%.12g%+.12gi)", c.real(), c.imag());
    out += buf;
    out += " " + to_string(d);
  }
  return out;
}

}  // namespace egret
