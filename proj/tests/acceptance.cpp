// One line per acceptance criterion; exit status 1 when any is red.
#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "egret/scenario.hpp"

using namespace egret;

namespace {

struct Line {
  int id;
  std::string what;
  bool pass;
  std::string note;
};

std::string worst(const SuiteResult& r) {
  double m = 0.0;
  std::string failed;
  for (const auto& c : r.checks) {
    if (c.tol > 0) m = std::max(m, c.residual / c.tol);
    if (!c.passed) failed += (failed.empty() ? "failed: " : ", ") + c.name;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu checks, worst residual/tol %.2e, %.1f s", r.checks.size(), m, r.seconds);
  return failed.empty() ? buf : std::string(buf) + "; " + failed;
}

Line suite_line(int id, const std::string& what, const std::string& suite, double max_seconds) {
  const SuiteResult r = run_suite(suite);
  const bool fast = r.seconds < max_seconds;
  return {id, what, r.passed() && fast, worst(r) + (fast ? "" : "; over the time budget")};
}

}  // namespace

int main() {
  std::vector<Line> lines;
  lines.push_back(suite_line(1, "star product suite", "star-product", 60.0));
  lines.push_back(suite_line(2, "Poisson structure", "poisson", 1e9));
  lines.push_back(suite_line(3, "propagator requirements", "propagators", 1e9));
  // each estimator case is timed inside the suite
  lines.push_back(suite_line(4, "scaling degree estimator", "scaling-degree", 1e9));
  lines.push_back(suite_line(5, "extension engine", "extension", 1e9));
  lines.push_back(suite_line(6, "T-product axioms", "tproduct-axioms", 600.0));
  lines.push_back(suite_line(7, "main theorem round trip", "main-theorem", 1e9));
  lines.push_back(suite_line(8, "interacting fields", "interacting-fields", 1e9));

  {
    Scenario s;
    s.name = "reproducibility";
    s.model = "d1-massive";
    s.checks = {"star-product", "tproduct-axioms", "interacting-fields"};
    s.threads = 1;
    const ScenarioOutcome one = run_scenario(s);
    s.threads = 4;
    const ScenarioOutcome four = run_scenario(s);
    const bool same = strip_timing(one.report).dump(2) == strip_timing(four.report).dump(2) && one.csv == four.csv;
    lines.push_back({9, "byte-identical reports at 1 and 4 threads", same && one.passed,
                     same ? "reports and CSV identical" : "reports differ"});
  }

  bool all = true;
  for (const auto& l : lines) {
    std::printf("criterion %d %s: %s (%s)\n", l.id, l.what.c_str(), l.pass ? "PASS" : "FAIL", l.note.c_str());
    all = all && l.pass;
  }
  return all ? 0 : 1;
}
