#pragma once

#include "report.hpp"

namespace s2l {

// Canonical suite order for the `all` verb.
const std::vector<std::string>& suite_names();

// Runs one named suite and returns its cases. Per-case exceptions are
// captured as failed cases; the suite keeps going. Unknown names throw
// std::invalid_argument. When cfg.out_dir is nonempty and cfg.write_csv is
// set, the graph and solve suites also drop their profile/convergence
// tables there as CSV.
std::vector<CaseResult> run_suite(const std::string& name,
                                  const RunConfig& cfg);

// Names of cases whose values are frozen in the baselines file, with the
// drift tolerance each gets when blessing.
const std::map<std::string, double>& baseline_tolerances();

}  // namespace s2l
