#include "egret/quadrature.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace egret {

const GaussRule& GaussRule::get(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::invalid_argument("GaussRule: need at least one node");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton on P_n from the Chebyshev-like initial guess
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n == 1) {
    r.x[0] = 0.0;
    r.w[0] = 2.0;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

std::vector<double> panel_edges(double a, double b, const std::vector<double>& breaks, int subdiv) {
  std::vector<double> knots{a};
  std::vector<double> sorted(breaks);
  std::sort(sorted.begin(), sorted.end());
  const double tiny = 1e-13 * std::max(1.0, b - a);
  for (double v : sorted)
    if (v > knots.back() + tiny && v < b - tiny) knots.push_back(v);
  knots.push_back(b);
  std::vector<double> edges;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    for (int s = 0; s < subdiv; ++s) edges.push_back(knots[i] + (knots[i + 1] - knots[i]) * s / subdiv);
  edges.push_back(b);
  return edges;
}

Halton::Halton(int dim, std::vector<double> shift) : dim_(dim), shift_(std::move(shift)) {
  for (int c = 2; static_cast<int>(primes_.size()) < dim; ++c) {
    bool prime = true;
    for (int p : primes_)
      if (c % p == 0) prime = false;
    if (prime) primes_.push_back(c);
  }
  if (shift_.empty()) shift_.assign(dim, 0.0);
}

std::vector<double> Halton::point(long index) const {
  std::vector<double> p(dim_);
  for (int d = 0; d < dim_; ++d) {
    const int b = primes_[d];
    double f = 1.0, r = 0.0;
    for (long i = index + 1; i > 0; i /= b) {
      f /= b;
      r += f * static_cast<double>(i % b);
    }
    r += shift_[d];
    p[d] = r - std::floor(r);
  }
  return p;
}

std::complex<double> extrapolate_to_zero(const std::vector<double>& h, const std::vector<std::complex<double>>& v,
                                         const std::vector<double>& powers) {
  const int n = static_cast<int>(h.size());
  const int m = static_cast<int>(powers.size()) + 1;
  if (n < m) throw std::invalid_argument("extrapolate_to_zero: too few samples");
  Eigen::MatrixXd a(n, m);
  Eigen::VectorXcd rhs(n);
  for (int i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    for (int j = 1; j < m; ++j) a(i, j) = std::pow(h[i], powers[j - 1]);
    rhs(i) = v[i];
  }
  Eigen::VectorXcd sol = a.cast<std::complex<double>>().colPivHouseholderQr().solve(rhs);
  return sol(0);
}

}  // namespace egret
