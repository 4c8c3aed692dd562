#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "report.hpp"
#include "suites.hpp"

namespace {

const char* status_tag(s2l::CaseStatus s) {
  switch (s) {
    case s2l::CaseStatus::Pass: return "pass";
    case s2l::CaseStatus::Fail: return "FAIL";
    case s2l::CaseStatus::Skip: return "skip";
  }
  return "?";
}

std::vector<std::string> select_suites(const std::string& verb,
                                       const std::string& filter) {
  std::vector<std::string> picked;
  if (verb == "all") {
    for (const auto& s : s2l::suite_names())
      if (filter.empty() || s.find(filter) != std::string::npos)
        picked.push_back(s);
  } else if (verb == "verify-pointwise") {
    picked.push_back("pointwise");
  } else {
    picked.push_back(verb);
  }
  return picked;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sigma2lab: numerical verification suites for the sigma2 Hessian "
      "equation in three variables"};
  app.get_formatter()->column_width(28);

  std::string verb;
  app.add_option("verb", verb, "suite to run")
      ->required()
      ->check(CLI::IsMember({"verify-pointwise", "identities", "mms", "solve",
                             "graph", "estimates", "audit", "all"}));

  std::string config_path, out_dir, filter, baselines_path;
  uint64_t seed = 0, budget = 0;
  int grid = 0, workers = -1;
  bool bless = false;
  auto* oc = app.add_option("--config", config_path,
                            "config file ([run]/[solver] sections)");
  auto* os = app.add_option("--seed", seed, "sampling seed");
  auto* ob = app.add_option("--budget", budget, "sample budget per search");
  auto* og = app.add_option("--grid,--n", grid, "grid nodes per axis (odd)");
  auto* oo = app.add_option("--out", out_dir,
                            "output directory (default $SIGMA2LAB_OUT)");
  auto* ow = app.add_option("--workers", workers, "worker threads (0 = auto)");
  auto* oj = app.add_flag("--json,!--no-json", "write report.json");
  auto* ov = app.add_flag("--csv", "write report.csv and data tables");
  app.add_option("--filter", filter, "substring filter on suite names (all)");
  app.add_option("--baselines", baselines_path,
                 "baselines file (default baselines/baselines.json)");
  app.add_flag("--bless", bless, "write the baselines file from this run");

  CLI11_PARSE(app, argc, argv);

  s2l::RunConfig cfg;
  if (const char* env = std::getenv("SIGMA2LAB_OUT")) cfg.out_dir = env;

  try {
    // precedence: built-in defaults, then config file, then flags
    if (oc->count()) s2l::load_config(config_path, cfg);
    if (os->count()) cfg.seed = seed;
    if (ob->count()) cfg.budget = budget;
    if (og->count()) cfg.grid = grid;
    if (oo->count()) cfg.out_dir = out_dir;
    if (ow->count()) cfg.workers = workers;
    if (oj->count()) cfg.write_json = oj->as<bool>();
    if (ov->count()) cfg.write_csv = true;
    cfg.suite = verb;
    cfg.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sigma2lab: %s\n", e.what());
    return 2;
  }

  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) {
      std::fprintf(stderr, "sigma2lab: cannot create %s: %s\n",
                   cfg.out_dir.c_str(), ec.message().c_str());
      return 2;
    }
  }

  s2l::Report report;
  report.suite = verb;
  report.config = cfg.echo();
  report.env = s2l::environment_stamp();

  for (const auto& name : select_suites(verb, filter)) {
    std::printf("== %s ==\n", name.c_str());
    std::vector<s2l::CaseResult> cases;
    try {
      cases = s2l::run_suite(name, cfg);
    } catch (const std::exception& e) {
      s2l::CaseResult c;
      c.name = name + ".suite";
      c.status = s2l::CaseStatus::Fail;
      c.detail = std::string("suite aborted: ") + e.what();
      cases.push_back(c);
    }
    for (auto& c : cases) {
      std::printf("[%s] %-32s value=%-22.15g (%.3fs)%s%s\n",
                  status_tag(c.status), c.name.c_str(), c.value, c.runtime_s,
                  c.detail.empty() ? "" : "  ", c.detail.c_str());
      report.cases.push_back(std::move(c));
    }
  }

  if (bless) {
    s2l::BaselineFile bf;
    auto echo = cfg.echo();
    bf.config = {{"seed", echo["seed"]},
                 {"budget", echo["budget"]},
                 {"grid", echo["grid"]}};
    for (const auto& c : report.cases) {
      auto it = s2l::baseline_tolerances().find(c.name);
      if (it != s2l::baseline_tolerances().end())
        bf.cases[c.name] = {c.value, it->second};
    }
    std::string path = baselines_path.empty() ? "baselines/baselines.json"
                                              : baselines_path;
    try {
      s2l::write_file(path, s2l::baselines_json(bf));
      std::printf("blessed %zu baselines -> %s\n", bf.cases.size(),
                  path.c_str());
    } catch (const std::exception& e) {
      std::fprintf(stderr, "sigma2lab: %s\n", e.what());
      return 2;
    }
  } else {
    std::string path = baselines_path;
    if (path.empty() &&
        std::filesystem::exists("baselines/baselines.json"))
      path = "baselines/baselines.json";
    if (!path.empty()) {
      try {
        s2l::BaselineFile bf = s2l::load_baselines(path);
        if (s2l::baseline_config_matches(bf, cfg)) {
          for (auto& c : report.cases) s2l::apply_baseline(c, bf);
        } else {
          std::printf("baselines: config differs from the blessed run, "
                      "comparison skipped\n");
        }
      } catch (const std::exception& e) {
        std::fprintf(stderr, "sigma2lab: %s\n", e.what());
        return 2;
      }
    }
  }

  int failed = report.failures();
  int skipped = 0;
  for (const auto& c : report.cases)
    if (c.status == s2l::CaseStatus::Skip) ++skipped;
  std::printf("%s: %zu cases, %d failed, %d skipped\n", verb.c_str(),
              report.cases.size(), failed, skipped);

  try {
    if (!cfg.out_dir.empty() && cfg.write_json)
      s2l::write_file((std::filesystem::path(cfg.out_dir) / "report.json")
                          .string(),
                      s2l::report_json(report));
    if (!cfg.out_dir.empty() && cfg.write_csv)
      s2l::write_file(
          (std::filesystem::path(cfg.out_dir) / "report.csv").string(),
          s2l::report_csv(report));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sigma2lab: %s\n", e.what());
    return 2;
  }

  return failed ? 1 : 0;
}
