#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egret/suites.hpp"

namespace egret {

struct ModelInfo {
  std::string name;
  int dim = 1;
  std::string description;
  std::map<std::string, bool> capabilities;
  std::vector<std::string> suites;
  bool requires_policy = false;
};

const std::vector<ModelInfo>& model_catalog();
nlohmann::json model_catalog_json();
/// Plain-text capability matrix.
std::string model_catalog_text();

/// A parsed schema-1 scenario.
struct Scenario {
  std::string name;
  std::string model;
  double mass = 1.0;
  int kappa_order = 2;
  int hbar_order = 3;
  int max_n = 3;
  std::vector<std::string> checks;
  std::optional<double> tol;
  std::map<std::string, double> suite_tol;
  unsigned seed = 1;
  int threads = 1;
  std::optional<CountertermPolicy> policy;
  std::string report_path = "report.json";
  std::string csv_path = "checks.csv";
};

/// {"HF*HF": [{"a": [0, 2], "value": 0.5}, ...]}; values are numbers or
/// [re, im]. Throws SchemaError.
CountertermPolicy parse_counterterm_policy(const nlohmann::json& j);

/// Throws SchemaError listing every violation found.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

struct ScenarioOutcome {
  nlohmann::json report;
  std::string csv;
  bool passed = true;
};

ScenarioOutcome run_scenario(const Scenario& s);

/// Copy of a report with every "timing" member removed.
nlohmann::json strip_timing(const nlohmann::json& report);
/// One RFC-4180 row (CRLF terminated).
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace egret
