#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egret/tproduct.hpp"

namespace egret {

/// Settings shared by the check suites; `tol` overrides every built-in
/// numeric tolerance when set.
struct SuiteContext {
  unsigned seed = 1;
  int threads = 1;
  std::optional<double> tol;
  double mass = 1.0;
  int kappa_order = 2;
  int random_configs = 10;
  int max_n = 3;  // T_n checked up to this n
  /// Injected into the mock kernel by main-theorem; random when unset.
  std::optional<CountertermPolicy> policy;
};

struct SuiteResult {
  std::string name;
  std::vector<AxiomCheck> checks;
  nlohmann::json records = nlohmann::json::array();  // e.g. recovered counterterms
  double seconds = 0.0;

  bool passed() const;
};

/// star-product, poisson, propagators, scaling-degree, extension,
/// tproduct-axioms, main-theorem, interacting-fields, d2-locality.
const std::vector<std::string>& suite_names();
/// Throws ConfigurationError for an unknown name.
SuiteResult run_suite(const std::string& name, const SuiteContext& ctx = {});

}  // namespace egret
