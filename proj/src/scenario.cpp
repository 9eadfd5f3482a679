#include "egret/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "egret/errors.hpp"

namespace egret {

using nlohmann::json;

const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> models{
      {"d1-massive",
       1,
       "massive scalar in d=1, closed-form kernels",
       {{"numeric_evaluation", true},
        {"star_product", true},
        {"tproduct_axioms", true},
        {"renormalization_group", true},
        {"interacting_fields", true}},
       {"star-product", "poisson", "propagators", "scaling-degree", "extension", "tproduct-axioms", "main-theorem",
        "interacting-fields"},
       false},
      {"d2-massless",
       2,
       "massless scalar in d=2, i0 regularization eps, scale mu",
       {{"numeric_evaluation", true},
        {"star_product", true},
        {"tproduct_axioms", false},
        {"renormalization_group", false},
        {"interacting_fields", true}},
       {"propagators", "scaling-degree", "extension", "d2-locality"},
       false},
      {"mock-d4-kernel",
       4,
       "symbolic d=4 kernel class (sd 2), no numeric backend",
       {{"numeric_evaluation", false},
        {"star_product", true},
        {"tproduct_axioms", false},
        {"renormalization_group", true},
        {"interacting_fields", false}},
       {"main-theorem"},
       true},
  };
  return models;
}

json model_catalog_json() {
  json out = json::array();
  for (const auto& m : model_catalog()) {
    json e{{"name", m.name}, {"dim", m.dim}, {"description", m.description}, {"capabilities", m.capabilities},
           {"suites", m.suites}, {"requires_counterterm_policy", m.requires_policy}};
    if (m.requires_policy) e["notes"] = "requires counterterm policy";
    out.push_back(std::move(e));
  }
  return out;
}

std::string model_catalog_text() {
  std::vector<std::string> caps;
  for (const auto& [k, v] : model_catalog().front().capabilities) caps.push_back(k);
  std::ostringstream os;
  os << "model            dim";
  for (const auto& c : caps) os << "  " << c;
  os << "\n";
  for (const auto& m : model_catalog()) {
    os << m.name << std::string(17 - m.name.size(), ' ') << m.dim << "  ";
    for (const auto& c : caps) {
      const std::string cell = m.capabilities.at(c) ? "yes" : "no";
      os << "  " << cell << std::string(c.size() - cell.size(), ' ');
    }
    if (m.requires_policy) os << "  (requires counterterm policy)";
    os << "\n";
  }
  os << "\nsuites:\n";
  for (const auto& m : model_catalog()) {
    os << "  " << m.name << ":";
    for (const auto& s : m.suites) os << " " << s;
    os << "\n";
  }
  return os.str();
}

namespace {

const ModelInfo* find_model(const std::string& name) {
  for (const auto& m : model_catalog())
    if (m.name == name) return &m;
  return nullptr;
}

cplx parse_value(const json& v, std::vector<std::string>& errs, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  errs.push_back(where + ": value must be a number or [re, im]");
  return 0.0;
}

CountertermPolicy parse_policy(const json& j, std::vector<std::string>& errs) {
  CountertermPolicy p;
  if (!j.is_object()) {
    errs.push_back("counterterm_policy: must be an object keyed by kernel class");
    return p;
  }
  for (const auto& [cls, list] : j.items()) {
    auto& ker = p[cls];
    if (!list.is_array()) {
      errs.push_back("counterterm_policy." + cls + ": must be an array of {a, value}");
      continue;
    }
    for (const auto& e : list) {
      const std::string where = "counterterm_policy." + cls;
      if (!e.is_object() || !e.contains("a") || !e.contains("value") || !e["a"].is_array() || e["a"].size() > 4) {
        errs.push_back(where + ": entries need \"a\" (up to 4 integers) and \"value\"");
        continue;
      }
      MultiIndex a{0, 0, 0, 0};
      bool ok = true;
      for (std::size_t i = 0; i < e["a"].size(); ++i) {
        if (!e["a"][i].is_number_integer() || e["a"][i].get<int>() < 0) ok = false;
        else a[i] = e["a"][i].get<int>();
      }
      if (!ok) {
        errs.push_back(where + ": \"a\" must hold non-negative integers");
        continue;
      }
      if (total(a) % 2) errs.push_back(where + ": odd derivative orders are orientation dependent");
      ker[a] += parse_value(e["value"], errs, where);
    }
  }
  return p;
}

template <class T>
std::optional<T> int_field(const json& j, const char* key, std::vector<std::string>& errs, T lo, T hi) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j[key];
  if (!v.is_number_integer() || v.get<long long>() < lo || v.get<long long>() > hi) {
    errs.push_back(std::string(key) + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return std::nullopt;
  }
  return static_cast<T>(v.get<long long>());
}

std::string number(double x) { return json(x).dump(); }

}  // namespace

CountertermPolicy parse_counterterm_policy(const json& j) {
  std::vector<std::string> errs;
  CountertermPolicy p = parse_policy(j, errs);
  if (!errs.empty()) {
    std::string msg = "counterterm policy:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  return p;
}

Scenario parse_scenario(const json& j) {
  std::vector<std::string> errs;
  Scenario s;
  if (!j.is_object()) throw SchemaError("scenario: top level must be an object");
  static const std::vector<std::string> known{"schema", "name",  "model",   "mass",   "orders", "checks",
                                              "tolerances", "seed", "threads", "output", "counterterm_policy"};
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) errs.push_back("unknown key \"" + k + "\"");

  if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
    errs.push_back("schema: must be 1");
  if (j.contains("name")) {
    if (j["name"].is_string()) s.name = j["name"];
    else errs.push_back("name: must be a string");
  }
  const ModelInfo* model = nullptr;
  if (!j.contains("model") || !j["model"].is_string()) {
    errs.push_back("model: required string");
  } else {
    s.model = j["model"];
    model = find_model(s.model);
    if (!model) errs.push_back("model: unknown model \"" + s.model + "\" (see `egret models`)");
  }
  if (j.contains("mass")) {
    if (!j["mass"].is_number() || j["mass"].get<double>() <= 0) errs.push_back("mass: must be a positive number");
    else s.mass = j["mass"];
  }
  if (j.contains("orders")) {
    const json& o = j["orders"];
    if (!o.is_object()) {
      errs.push_back("orders: must be an object");
    } else {
      for (const auto& [k, v] : o.items())
        if (k != "kappa" && k != "hbar" && k != "n") errs.push_back("orders: unknown key \"" + k + "\"");
      if (auto k = int_field<int>(o, "kappa", errs, 1, 2)) s.kappa_order = *k;
      if (auto h = int_field<int>(o, "hbar", errs, 0, 3)) s.hbar_order = *h;
      if (auto n = int_field<int>(o, "n", errs, 2, 3)) s.max_n = *n;
    }
  }
  if (!j.contains("checks") || !j["checks"].is_array()) {
    errs.push_back("checks: required array of suite names");
  } else {
    for (const auto& c : j["checks"]) {
      if (!c.is_string()) {
        errs.push_back("checks: entries must be strings");
        continue;
      }
      const std::string name = c;
      if (name == "all" && model) {
        for (const auto& n : model->suites) s.checks.push_back(n);
        continue;
      }
      const auto& all = suite_names();
      if (std::find(all.begin(), all.end(), name) == all.end()) {
        errs.push_back("checks: unknown suite \"" + name + "\"");
      } else if (model && std::find(model->suites.begin(), model->suites.end(), name) == model->suites.end()) {
        errs.push_back("checks: suite \"" + name + "\" is not available for model " + model->name);
      } else {
        s.checks.push_back(name);
      }
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    auto positive = [&](const json& v, const std::string& where) -> std::optional<double> {
      if (v.is_number() && v.get<double>() > 0) return v.get<double>();
      errs.push_back(where + ": must be a positive number");
      return std::nullopt;
    };
    if (t.is_number()) {
      s.tol = positive(t, "tolerances");
    } else if (t.is_object()) {
      for (const auto& [k, v] : t.items()) {
        const auto& all = suite_names();
        if (k == "default") s.tol = positive(v, "tolerances.default");
        else if (std::find(all.begin(), all.end(), k) != all.end()) {
          if (auto x = positive(v, "tolerances." + k)) s.suite_tol[k] = *x;
        } else errs.push_back("tolerances: unknown suite \"" + k + "\"");
      }
    } else {
      errs.push_back("tolerances: must be a number or an object");
    }
  }
  if (auto v = int_field<long long>(j, "seed", errs, 0, 4294967295LL)) s.seed = static_cast<unsigned>(*v);
  if (auto v = int_field<int>(j, "threads", errs, 1, 1024)) s.threads = *v;
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) {
      errs.push_back("output: must be an object");
    } else {
      for (const auto& [k, v] : o.items()) {
        if (k != "report" && k != "csv") errs.push_back("output: unknown key \"" + k + "\"");
        else if (!v.is_string() || v.get<std::string>().empty()) errs.push_back("output." + k + ": must be a path");
        else (k == "report" ? s.report_path : s.csv_path) = v;
      }
    }
  }
  if (j.contains("counterterm_policy")) s.policy = parse_policy(j["counterterm_policy"], errs);
  if (model && model->requires_policy && !s.policy)
    errs.push_back("model " + model->name + " requires counterterm policy (key \"counterterm_policy\")");
  if (s.name.empty()) s.name = s.model;

  if (!errs.empty()) {
    std::string msg = "scenario schema violation:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw SchemaError(msg);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("scenario " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(j);
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      out += f;
      continue;
    }
    out += '"';
    for (char ch : f) {
      if (ch == '"') out += '"';
      out += ch;
    }
    out += '"';
  }
  return out + "\r\n";
}

ScenarioOutcome run_scenario(const Scenario& s) {
  ScenarioOutcome out;
  const auto t0 = std::chrono::steady_clock::now();
  json suites = json::array();
  out.csv = csv_row({"suite", "check", "residual", "tolerance", "passed", "detail"});
  for (const auto& name : s.checks) {
    SuiteContext ctx;
    ctx.seed = s.seed;
    ctx.threads = s.threads;
    ctx.tol = s.suite_tol.count(name) ? std::optional<double>(s.suite_tol.at(name)) : s.tol;
    ctx.mass = s.mass;
    ctx.kappa_order = s.kappa_order;
    ctx.max_n = s.max_n;
    ctx.policy = s.policy;
    const SuiteResult r = run_suite(name, ctx);
    json checks = json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tol}, {"passed", c.passed},
                        {"detail", c.detail}});
      out.csv += csv_row({name, c.name, number(c.residual), number(c.tol), c.passed ? "true" : "false", c.detail});
    }
    out.passed = out.passed && r.passed();
    suites.push_back({{"name", name}, {"passed", r.passed()}, {"checks", checks}, {"records", r.records},
                      {"timing", {{"seconds", r.seconds}}}});
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.report = {{"schema", 1},
                {"scenario", s.name},
                {"model", s.model},
                {"seed", s.seed},
                {"orders", {{"kappa", s.kappa_order}, {"hbar", s.hbar_order}, {"n", s.max_n}}},
                {"passed", out.passed},
                {"suites", suites},
                {"timing", {{"total_seconds", total}}}};
  return out;
}

json strip_timing(const json& report) {
  if (report.is_object()) {
    json r = json::object();
    for (const auto& [k, v] : report.items())
      if (k != "timing") r[k] = strip_timing(v);
    return r;
  }
  if (report.is_array()) {
    json r = json::array();
    for (const auto& v : report) r.push_back(strip_timing(v));
    return r;
  }
  return report;
}

}  // namespace egret
