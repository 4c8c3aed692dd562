// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Each criterion re-runs the relevant suite at its contractual scale, so a
// full pass here is slower than the unit tests but self-contained.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "report.hpp"
#include "sigma2lab/calculus.hpp"
#include "sigma2lab/solver.hpp"
#include "suites.hpp"

using namespace s2l;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& what, bool ok,
               const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", num,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

const CaseResult* find_case(const std::vector<CaseResult>& cs,
                            const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

// All named cases exist and pass; on failure, appends the witnesses to why.
bool cases_pass(const std::vector<CaseResult>& cs,
                const std::vector<std::string>& names, std::string& why) {
  bool ok = true;
  for (const auto& n : names) {
    const CaseResult* c = find_case(cs, n);
    if (!c) {
      ok = false;
      why += " missing:" + n;
    } else if (c->status != CaseStatus::Pass) {
      ok = false;
      why += " not-pass:" + n +
             (c->detail.empty() ? "" : " [" + c->detail + "]");
    }
  }
  return ok;
}

double runtime_sum(const std::vector<CaseResult>& cs,
                   const std::string& prefix) {
  double t = 0;
  for (const auto& c : cs)
    if (c.name.rfind(prefix, 0) == 0) t += c.runtime_s;
  return t;
}

std::string fmt_s(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

ManufacturedSolution entry(const std::string& name) {
  for (auto& s : standard_catalog())
    if (s.name == name) return s;
  throw std::logic_error("missing catalog entry " + name);
}

}  // namespace

int main() {
  RunConfig defaults;

  // 1: product and Gram identities on 1e5 cone samples, under 10 s
  {
    RunConfig cfg = defaults;
    cfg.budget = 100000;
    Timer t;
    auto cs = run_suite("identities", cfg);
    double wall = t.s();
    std::string why;
    bool ok = cases_pass(cs, {"identities.product", "identities.gram"}, why) &&
              wall < 10.0;
    if (wall >= 10.0) why += " over-time";
    criterion(1, "matrix identities on 1e5 cone samples", ok,
              fmt_s(wall) + why);
  }

  // 2 + 3 share one pointwise run at budget 1e6
  {
    RunConfig cfg = defaults;
    cfg.budget = 1000000;
    auto cs = run_suite("pointwise", cfg);

    std::string why2;
    double claims_t = runtime_sum(cs, "pointwise.claim");
    bool ok2 = cases_pass(cs,
                          {"pointwise.claim1.exact", "pointwise.claim1.inf",
                           "pointwise.claim2.inf", "pointwise.claim1.probe"},
                          why2) &&
               claims_t < 60.0;
    if (claims_t >= 60.0) why2 += " over-time";
    criterion(2, "pointwise inequalities at 1e6 samples with loose-eps probe",
              ok2, fmt_s(claims_t) + why2);

    std::string why3;
    bool ok3 = cases_pass(cs,
                          {"pointwise.cone.c1", "pointwise.cone.c2",
                           "pointwise.cone.family"},
                          why3);
    const CaseResult* c2 = find_case(cs, "pointwise.cone.c2");
    std::string det = c2 ? "c2=" + std::to_string(c2->value) : "";
    criterion(3, "cone constants seed-stable, family limit below 1/3 + 1e-3",
              ok3, det + why3);
  }

  // 4, 5, 6 come from one mms run at defaults
  {
    auto cs = run_suite("mms", defaults);

    std::string why4;
    bool ok4 =
        cases_pass(cs, {"mms.lemma1.analytic", "mms.fd.order"}, why4);
    const CaseResult* fd = find_case(cs, "mms.fd.order");
    criterion(4, "analytic first-identity residuals and FD order 2 +- 0.3",
              ok4, (fd ? "order=" + std::to_string(fd->value) : "") + why4);

    std::string why5;
    bool ok5 = cases_pass(cs, {"mms.vdecomp.mismatch"}, why5);
    const CaseResult* vd = find_case(cs, "mms.vdecomp.mismatch");
    criterion(5, "V-decomposition resummation matches the direct quotient",
              ok5, (vd ? "mismatch=" + std::to_string(vd->value) : "") + why5);

    std::string why6;
    bool ok6 = cases_pass(
        cs, {"mms.crequired.stability", "mms.concavity"}, why6);
    const CaseResult* st = find_case(cs, "mms.crequired.stability");
    criterion(6, "required-constant fields refinement-stable, concavity clean",
              ok6, (st ? "drift=" + std::to_string(st->value) : "") + why6);
  }

  // 7: solver contract at its own scales
  {
    Timer t;
    std::string why;
    bool ok = true;

    for (const char* name : {"quad-iso", "quad-aniso"}) {
      ManufacturedSolution s = entry(name);
      auto g = [&s](const Vec3& x) { return s.jet(x).u; };
      SolveParams p;
      Jet3 j0 = s.jet({0, 0, 0});
      p.init_a = std::sqrt(eval_rhs(s.rhs, j0).value / 3.0);
      try {
        auto [u, stats] = solve_dirichlet(s.rhs, g, -1, 1, 17, p);
        GridField truth = sample_field(g, -1, 1, 17);
        double err = 0;
        for (size_t i = 0; i < u.v.size(); ++i)
          err = std::max(err, std::fabs(u.v[i] - truth.v[i]));
        if (stats.iterations > 3)
          why += std::string(" ") + name + ":iters=" +
                 std::to_string(stats.iterations), ok = false;
        if (err > 1e-10)
          why += std::string(" ") + name + ":err=" + std::to_string(err),
              ok = false;
        if (!(cone_margin(u, p.tau) > 0))
          why += std::string(" ") + name + ":margin", ok = false;
      } catch (const std::exception& e) {
        ok = false;
        why += std::string(" ") + name + ":threw[" + e.what() + "]";
      }
    }

    try {
      auto rows = convergence_study(entry("trig-pert"), {17, 33, 65}, -1, 1);
      for (size_t i = 1; i < rows.size(); ++i)
        if (rows[i].exact || std::fabs(rows[i].order - 2.0) > 0.3) {
          ok = false;
          why += " order(n=" + std::to_string(rows[i].n) +
                 ")=" + std::to_string(rows[i].order);
        }
      if (rows.size() != 3) ok = false, why += " rows!=3";
    } catch (const std::exception& e) {
      ok = false;
      why += std::string(" study-threw[") + e.what() + "]";
    }

    double wall = t.s();
    if (wall >= 300.0) ok = false, why += " over-time";
    criterion(7, "Newton solver: 3-step quadratics, order-2 refinement", ok,
              fmt_s(wall) + why);
  }

  // 8: graph geometry at the default grid
  {
    auto cs = run_suite("graph", defaults);
    std::string why;
    bool ok = cases_pass(cs,
                         {"graph.quad.ratio", "graph.quad.cemp",
                          "graph.quad.meanvalue", "graph.cla.quad"},
                         why);
    const CaseResult* r = find_case(cs, "graph.quad.ratio");
    criterion(8, "gauge-ball monotonicity, mean value, gradient saturation",
              ok, (r ? "ratio_dev=" + std::to_string(r->value) : "") + why);
  }

  // 9: estimate harness pieces plus the full CLI run
  {
    std::string why;
    bool ok = true;

    auto ce = run_suite("estimates", defaults);
    ok &= cases_pass(ce, {"estimates.doubling.quad", "estimates.floor.bits"},
                     why);
    auto ca = run_suite("audit", defaults);
    ok &= cases_pass(
        ca, {"audit.quad.trivial_chain", "audit.cubic_pert.trivial"}, why);

    Timer t;
    std::string out = "/tmp/s2l_acceptance_out";
    std::string cmd = std::string(S2L_CLI_PATH) + " all --out " + out +
                      " --baselines " + S2L_REPO_DIR +
                      "/baselines/baselines.json > " + out + ".log 2>&1";
    int rc = std::system(cmd.c_str());
    double wall = t.s();
    if (rc != 0) ok = false, why += " cli-exit=" + std::to_string(rc);
    if (wall >= 900.0) ok = false, why += " over-time";
    criterion(9, "estimate harness end-to-end plus full default CLI run", ok,
              fmt_s(wall) + why);
  }

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  return 0;
}
