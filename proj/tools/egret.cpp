#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "egret/errors.hpp"
#include "egret/extension.hpp"
#include "egret/rg.hpp"
#include "egret/scenario.hpp"

using namespace egret;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write " + p.string());
  out << text;
}

void print_summary(const json& report) {
  for (const auto& s : report["suites"]) {
    std::cout << (s["passed"].get<bool>() ? "PASS " : "FAIL ") << s["name"].get<std::string>() << "\n";
    for (const auto& c : s["checks"])
      if (!c["passed"].get<bool>())
        std::cout << "  failed: " << c["name"].get<std::string>() << " residual " << c["residual"].dump()
                  << " tol " << c["tolerance"].dump() << "\n";
  }
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + " is not valid JSON: " + e.what());
  }
}

json cplx_json(cplx c) { return json::array({c.real(), c.imag()}); }

std::map<std::string, json> coefficient_table(const std::map<MultiIndex, cplx>& m) {
  std::map<std::string, json> out;
  for (const auto& [a, c] : m) {
    std::string key;
    for (int i = 0; i < 4; ++i) key += (i ? "," : "") + std::to_string(a[i]);
    out[key] = cplx_json(c);
  }
  return out;
}

// extension of a catalogue density on R
int run_extend(const std::string& input, const std::string& method, const std::string& report_path) {
  const json j = parse_json_file(input);
  const std::string kind = j.value("density", "");
  const double s = j.value("s", 1.0);
  Distribution t0 = kind == "log"     ? Distribution::density(1, [](std::span<const double> y) { return cplx(std::log(std::abs(y[0]))); }, "log|y|", 0.0, 1)
                    : kind == "power" ? power_density_1d(s)
                                      : throw SchemaError("input: \"density\" must be \"power\" or \"log\"");
  ExtensionResult r;
  if (method == "direct") {
    r = direct_extend(t0);
  } else if (method == "w") {
    r = w_extend(t0);
  } else if (method == "diffren") {
    // 1/y^2 = -(log|y|)'' is the only entry of the rule table exposed here
    if (kind != "power" || s != 2.0) throw SchemaError("diffren: available for power density with s = 2");
    auto log_abs = Distribution::density(1, [](std::span<const double> y) { return cplx(std::log(std::abs(y[0]))); },
                                         "log|y|", 0.0, 1);
    r = diff_renorm(log_abs, {{MultiIndex{2, 0, 0, 0}, -1.0}}, t0);
  } else {
    if (kind != "power") throw SchemaError("ms: available for power densities");
    // a simple pole in zeta exactly when s is a positive integer
    const int pole = std::floor(s) == s && s >= 1 ? 1 : 0;
    r = analytic_ms([s](cplx z) { return regularized_power_1d(s + z).t; }, 1, pole, pole ? int(s) - 1 : -1);
  }
  double worst = 0.0;
  json panel = json::array();
  for (const auto& g : off_origin_panel(1)) {
    const double d = std::abs(r.pair(g) - t0.pair(g));
    worst = std::max(worst, d);
    panel.push_back(d);
  }
  json poles = json::object();
  for (const auto& [p, c] : r.poles) poles[std::to_string(p)] = coefficient_table(c);
  const json rep{{"method", r.method},        {"omega", r.omega},
                 {"counterterms", coefficient_table(r.counterterms)},
                 {"poles", poles},            {"panel_residuals", panel}};
  if (report_path.empty()) std::cout << rep.dump(2) << "\n";
  else write_file(report_path, rep.dump(2) + "\n");
  return worst < 1e-7 ? kPass : kFail;
}

// {"model": ..., "kernel": "HF", "broken_factor": 1, "counterterm_policy": {...}}
FeynmanT t_from_json(const json& j) {
  const std::string model = j.value("model", "d1-massive");
  Backend b = model == "d1-massive"       ? Backend::d1_massive(j.value("mass", 1.0))
              : model == "mock-d4-kernel" ? Backend::mock_d4()
                                          : throw SchemaError("rg solve: model must be d1-massive or mock-d4-kernel");
  FeynmanOptions o;
  o.kernel = kernel_from_name(j.value("kernel", "HF"));
  o.broken_factor = j.value("broken_factor", 1.0);
  if (j.contains("counterterm_policy")) o.policy = parse_counterterm_policy(j["counterterm_policy"]);
  else if (model == "mock-d4-kernel") throw SchemaError("mock-d4-kernel requires counterterm policy");
  return FeynmanT(b, o);
}

int run_rg_solve(const std::string& a, const std::string& b, int order, const std::string& out) {
  const FeynmanT TA = t_from_json(parse_json_file(a)), TB = t_from_json(parse_json_file(b));
  if (!(TA.backend() == TB.backend())) throw SchemaError("rg solve: sA and sB use different models");
  json rep;
  int code = kPass;
  const Monomial phi4 = FieldPolynomial::phi(4).terms().begin()->first;
  try {
    const ZMap z = solve_Z(TA, TB, {phi4}, order);
    json ks = json::array();
    for (const auto& [key, ker] : z.kernels())
      for (const auto& [al, s] : ker)
        for (const auto& [d, v] : s.terms())
          ks.push_back({{"m1", to_string(key.first, TA.backend().dim)},
                        {"m2", to_string(key.second, TA.backend().dim)},
                        {"a", std::vector<int>(al.begin(), al.end())},
                        {"hbar", d.hbar},
                        {"value", cplx_json(v)}});
    rep = {{"status", "solved"}, {"order", order}, {"kernels", ks}, {"residual", verify_Z(z, TA, TB, {phi4})}};
  } catch (const InconsistencyError& e) {
    rep = {{"status", "inconsistent"}, {"message", e.what()}};
    code = kFail;
  }
  if (out.empty()) std::cout << rep.dump(2) << "\n";
  else write_file(out, rep.dump(2) + "\n");
  return code;
}

int run_suites(const std::vector<std::string>& names, SuiteContext ctx, const std::string& out) {
  Scenario s;
  s.name = "adhoc";
  s.model = "d1-massive";
  s.checks = names;
  s.tol = ctx.tol;
  s.seed = ctx.seed;
  s.threads = ctx.threads;
  s.kappa_order = ctx.kappa_order;
  s.max_n = ctx.max_n;
  s.mass = ctx.mass;
  const ScenarioOutcome o = run_scenario(s);
  print_summary(o.report);
  if (!out.empty()) write_file(out, o.report.dump(2) + "\n");
  return o.passed ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"egret: causal perturbation theory checks"};
  app.require_subcommand(1);

  std::optional<double> tol;
  std::optional<unsigned> seed;
  std::optional<int> threads;
  std::string out;
  auto common = [&](CLI::App* c) {
    c->add_option("--tol", tol, "override every numeric tolerance")->check(CLI::PositiveNumber);
    c->add_option("--seed", seed, "random seed");
    c->add_option("--threads", threads, "worker threads")->check(CLI::Range(1, 1024));
    c->add_option("--out", out, "output location");
  };

  auto* models = app.add_subcommand("models", "list backends and their capability matrix");
  bool as_json = false;
  models->add_flag("--json", as_json, "machine-readable catalogue");

  auto* run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "scenario JSON (schema 1)")->required();
  common(run);
  run->footer("--out DIR writes the report and CSV into DIR under their file names.");

  auto* check = app.add_subcommand("check", "run check suites on the d1-massive model");
  std::vector<std::string> suites;
  check->add_option("suite", suites, "suite names, or all")->required();
  common(check);

  auto* kernels = app.add_subcommand("kernels", "list the two-point kernels of a backend");
  int kdim = 1;
  double kmass = 1.0;
  kernels->add_option("--dim", kdim)->check(CLI::IsMember({1, 2, 4}));
  kernels->add_option("--mass", kmass);

  auto* tprod = app.add_subcommand("tproduct", "T-product axiom suite");
  std::string tmodel = "d1-phi4", tcheck = "all";
  int torder = 3;
  tprod->add_option("--model", tmodel)->check(CLI::IsMember({"d1-phi4"}));
  tprod->add_option("--order", torder)->check(CLI::Range(2, 3));
  tprod->add_option("--check", tcheck)->check(CLI::IsMember({"all", "axioms", "main-theorem"}));
  common(tprod);

  auto* interact = app.add_subcommand("interact", "interacting field checks");
  std::string imodel = "d1-phi4", ifield = "phi", ichecks = "all";
  int iorder = 2;
  interact->add_option("--model", imodel)->check(CLI::IsMember({"d1-phi4"}));
  interact->add_option("--field", ifield)->check(CLI::IsMember({"phi"}));
  interact->add_option("--order", iorder)->check(CLI::Range(1, 2));
  interact->add_option("--checks", ichecks)->check(CLI::IsMember({"all"}));
  common(interact);

  auto* extend = app.add_subcommand("extend", "extend a density on R across the origin");
  std::string einput, emethod = "w", ereport;
  extend->add_option("--input", einput, "{\"density\": \"power\"|\"log\", \"s\": ...}")->required();
  extend->add_option("--method", emethod)->check(CLI::IsMember({"direct", "w", "diffren", "ms"}));
  extend->add_option("--report", ereport);

  auto* rg = app.add_subcommand("rg", "renormalization group");
  auto* solve = rg->add_subcommand("solve", "solve S^ = S o Z");
  rg->require_subcommand(1);
  std::string sa, sb;
  int rorder = 2;
  solve->add_option("--sA", sa)->required();
  solve->add_option("--sB", sb)->required();
  solve->add_option("--order", rorder);
  solve->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  try {
    SuiteContext ctx;
    if (tol) ctx.tol = tol;
    if (seed) ctx.seed = *seed;
    if (threads) ctx.threads = *threads;

    if (*models) {
      if (as_json) std::cout << model_catalog_json().dump(2) << "\n";
      else std::cout << model_catalog_text();
      return kPass;
    }
    if (*run) {
      Scenario s = load_scenario(scenario_path);
      if (tol) s.tol = tol, s.suite_tol.clear();
      if (seed) s.seed = *seed;
      if (threads) s.threads = *threads;
      fs::path report = s.report_path, csv = s.csv_path;
      if (!out.empty()) report = fs::path(out) / report.filename(), csv = fs::path(out) / csv.filename();
      const ScenarioOutcome o = run_scenario(s);
      write_file(report, o.report.dump(2) + "\n");
      write_file(csv, o.csv);
      print_summary(o.report);
      std::cout << (o.passed ? "all checks passed" : "some checks failed") << "; report " << report.string() << "\n";
      return o.passed ? kPass : kFail;
    }
    if (*check) {
      if (suites.size() == 1 && suites[0] == "all") suites = suite_names();
      for (const auto& n : suites)
        if (std::find(suite_names().begin(), suite_names().end(), n) == suite_names().end())
          throw ConfigurationError("unknown suite " + n);
      return run_suites(suites, ctx, out);
    }
    if (*kernels) {
      const Backend b = kdim == 1 ? Backend::d1_massive(kmass) : kdim == 2 ? Backend::d2_massless() : Backend::mock_d4();
      json list = json::array();
      for (Kernel k : {Kernel::H, Kernel::Hrev, Kernel::HF, Kernel::HFbar, Kernel::Delta, Kernel::Ret, Kernel::Adv})
        list.push_back({{"kernel", kernel_name(k)},
                        {"scaling_degree", kernel_scaling_degree(b, k, MultiIndex{0, 0, 0, 0})},
                        {"kinked", kernel_kinked(k)},
                        {"numeric", b.numeric}});
      std::cout << json{{"backend", b.name}, {"dim", b.dim}, {"mass", b.mass}, {"kernels", list}}.dump(2) << "\n";
      return kPass;
    }
    if (*tprod) {
      ctx.max_n = torder;
      std::vector<std::string> names{"tproduct-axioms"};
      if (tcheck == "all") names.push_back("main-theorem");
      if (tcheck == "main-theorem") names = {"main-theorem"};
      return run_suites(names, ctx, out);
    }
    if (*interact) {
      ctx.kappa_order = iorder;
      return run_suites({"interacting-fields"}, ctx, out);
    }
    if (*extend) return run_extend(einput, emethod, ereport);
    if (*solve) return run_rg_solve(sa, sb, rorder, out);
  } catch (const ConfigurationError& e) {
    std::cerr << "egret: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "egret: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
