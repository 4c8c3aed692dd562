#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace s2l {

enum class CaseStatus { Pass, Fail, Skip };

struct CaseResult {
  std::string name;
  CaseStatus status = CaseStatus::Pass;
  double value = 0;
  double tolerance = 0;
  std::optional<double> baseline;
  double runtime_s = 0;
  std::string detail;  // witness data for failures, notes otherwise
};

struct Report {
  std::string suite;
  std::vector<CaseResult> cases;
  std::map<std::string, std::string> config;  // echo of the effective config
  std::map<std::string, std::string> env;     // environment stamp
  int failures() const;
};

struct RunConfig {
  std::string suite = "all";
  std::uint64_t seed = 12345;
  std::uint64_t budget = 200000;
  int grid = 33;
  int workers = 0;  // 0 = hardware concurrency
  std::string out_dir;
  bool write_json = true;
  bool write_csv = false;
  // solver knobs
  double tol = 1e-10;
  double tau = 1e-8;
  int homotopy = 1;
  int max_iter = 40;

  void validate() const;  // throws std::invalid_argument with diagnostics
  std::map<std::string, std::string> echo() const;
};

// Structured plain-text config: [section] lines and key = value pairs,
// '#' or ';' comments. Recognized keys:
//   [run]    suite, seed, budget, workers, out, json, csv
//   [solver] grid, tol, tau, homotopy, max_iter
// Unknown sections/keys and malformed lines raise std::invalid_argument
// with file:line diagnostics.
void load_config(const std::string& path, RunConfig& cfg);

std::map<std::string, std::string> environment_stamp();

// Deterministic JSON / CSV renderings. JSON field order is fixed; values
// use shortest round-trip formatting.
std::string report_json(const Report& r);
std::string report_csv(const Report& r);

void write_file(const std::string& path, const std::string& text);

// Versioned baselines with the config they were blessed under. Baselines
// are only compared when the current run matches every recorded config key,
// so off-default runs (other grids, budgets, seeds) skip the comparison
// instead of reporting spurious drift.
struct Baseline {
  double value = 0;
  double tol = 0;  // relative to max(1, |value|)
};
struct BaselineFile {
  int version = 1;
  std::map<std::string, std::string> config;
  std::map<std::string, Baseline> cases;
};
BaselineFile load_baselines(const std::string& path);
std::string baselines_json(const BaselineFile& bf);

bool baseline_config_matches(const BaselineFile& bf, const RunConfig& cfg);

// Compare against a baseline when one exists; flips status to Fail on drift.
void apply_baseline(CaseResult& c, const BaselineFile& bf);

}  // namespace s2l
