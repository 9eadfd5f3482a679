#pragma once

#include <map>
#include <mutex>
#include <optional>

#include "egret/field.hpp"
#include "egret/quadrature.hpp"

namespace egret {

struct EvalOptions {
  QuadratureSpec quad{12, 1};
  int qmc_points = 1 << 14;
  std::vector<double> qmc_shift;  // Cranley-Patterson shift, empty = none
  int threads = 1;
};

/// Numeric evaluation of fields. Term integrals are cached by term key and
/// configuration, so repeated evaluation of shared terms is cheap. Results
/// are reduced in the fixed term order, independent of the thread count.
class Evaluator {
 public:
  explicit Evaluator(EvalOptions opt = {}) : opt_(std::move(opt)) {}

  /// F[h]; h == nullopt means h = 0, i.e. the vacuum state omega_0.
  ScalarSeries evaluate(const Field& f, const std::optional<TestFunction>& h);
  ScalarSeries vacuum(const Field& f) { return evaluate(f, std::nullopt); }

  /// Integral of a single term (coefficient excluded).
  cplx term_integral(const Backend& b, const GraphTerm& t, const std::optional<TestFunction>& h);

  const EvalOptions& options() const { return opt_; }

 private:
  EvalOptions opt_;
  std::mutex mu_;
  std::map<std::string, cplx> cache_;
};

ScalarSeries evaluate(const Field& f, const TestFunction& h, const EvalOptions& opt = {});
ScalarSeries vacuum_state(const Field& f, const EvalOptions& opt = {});

}  // namespace egret
