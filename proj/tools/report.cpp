#include "report.hpp"

#include <json.hpp>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace s2l {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string status_str(CaseStatus s) {
  switch (s) {
    case CaseStatus::Pass: return "pass";
    case CaseStatus::Fail: return "fail";
    case CaseStatus::Skip: return "skip";
  }
  return "?";
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void config_error(const std::string& path, int line,
                               const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw std::invalid_argument(os.str());
}

std::uint64_t parse_u64(const std::string& path, int line,
                        const std::string& v) {
  try {
    size_t pos = 0;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_error(path, line, "expected a non-negative integer, got '" + v + "'");
  }
}

double parse_f64(const std::string& path, int line, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_error(path, line, "expected a number, got '" + v + "'");
  }
}

bool parse_bool(const std::string& path, int line, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  config_error(path, line, "expected true/false, got '" + v + "'");
}

}  // namespace

int Report::failures() const {
  int n = 0;
  for (const auto& c : cases)
    if (c.status == CaseStatus::Fail) ++n;
  return n;
}

void RunConfig::validate() const {
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (grid < 9) throw std::invalid_argument("grid must be >= 9");
  if (grid % 2 == 0) throw std::invalid_argument("grid must be odd");
  if (workers < 0) throw std::invalid_argument("workers must be >= 0");
  if (!(tol > 0) || !(tau > 0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

std::map<std::string, std::string> RunConfig::echo() const {
  auto f = [](double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  return {
      {"suite", suite},
      {"seed", std::to_string(seed)},
      {"budget", std::to_string(budget)},
      {"grid", std::to_string(grid)},
      {"workers", std::to_string(workers)},
      {"out", out_dir},
      {"json", write_json ? "true" : "false"},
      {"csv", write_csv ? "true" : "false"},
      {"tol", f(tol)},
      {"tau", f(tau)},
      {"homotopy", std::to_string(homotopy)},
      {"max_iter", std::to_string(max_iter)},
  };
}

void load_config(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::string raw, section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        config_error(path, lineno, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "solver")
        config_error(path, lineno, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      config_error(path, lineno, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (section.empty())
      config_error(path, lineno, "key '" + key + "' outside any section");
    if (section == "run") {
      if (key == "suite") cfg.suite = val;
      else if (key == "seed") cfg.seed = parse_u64(path, lineno, val);
      else if (key == "budget") cfg.budget = parse_u64(path, lineno, val);
      else if (key == "workers") cfg.workers = (int)parse_u64(path, lineno, val);
      else if (key == "out") cfg.out_dir = val;
      else if (key == "json") cfg.write_json = parse_bool(path, lineno, val);
      else if (key == "csv") cfg.write_csv = parse_bool(path, lineno, val);
      else config_error(path, lineno, "unknown key 'run." + key + "'");
    } else {
      if (key == "grid") cfg.grid = (int)parse_u64(path, lineno, val);
      else if (key == "tol") cfg.tol = parse_f64(path, lineno, val);
      else if (key == "tau") cfg.tau = parse_f64(path, lineno, val);
      else if (key == "homotopy") cfg.homotopy = (int)parse_u64(path, lineno, val);
      else if (key == "max_iter") cfg.max_iter = (int)parse_u64(path, lineno, val);
      else config_error(path, lineno, "unknown key 'solver." + key + "'");
    }
  }
}

std::map<std::string, std::string> environment_stamp() {
  std::map<std::string, std::string> env;
#if defined(__clang__)
  env["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = "gcc " __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cxx_standard"] = std::to_string(__cplusplus);
#if defined(NDEBUG)
  env["assertions"] = "off";
#else
  env["assertions"] = "on";
#endif
  env["hardware_threads"] = std::to_string(std::thread::hardware_concurrency());
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  env["timestamp"] = buf;
  return env;
}

std::string report_json(const Report& r) {
  ordered_json j;
  j["suite"] = r.suite;
  j["cases"] = ordered_json::array();
  for (const auto& c : r.cases) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["status"] = status_str(c.status);
    jc["value"] = c.value;
    jc["tolerance"] = c.tolerance;
    if (c.baseline)
      jc["baseline"] = *c.baseline;
    else
      jc["baseline"] = nullptr;
    jc["runtime"] = c.runtime_s;
    if (!c.detail.empty()) jc["detail"] = c.detail;
    j["cases"].push_back(jc);
  }
  j["config"] = r.config;
  j["env"] = r.env;
  return j.dump(2) + "\n";
}

std::string report_csv(const Report& r) {
  std::ostringstream os;
  os << "name,status,value,tolerance,baseline,runtime\n";
  char buf[40];
  auto f = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  for (const auto& c : r.cases) {
    os << c.name << "," << status_str(c.status) << "," << f(c.value) << ","
       << f(c.tolerance) << "," << (c.baseline ? f(*c.baseline) : "") << ","
       << f(c.runtime_s) << "\n";
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("short write to " + path);
}

BaselineFile load_baselines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open baselines: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("version") || !j.contains("cases"))
    throw std::invalid_argument(path + ": missing version/cases");
  BaselineFile bf;
  bf.version = j["version"].get<int>();
  if (j.contains("config"))
    for (auto it = j["config"].begin(); it != j["config"].end(); ++it)
      bf.config[it.key()] = it.value().get<std::string>();
  for (auto it = j["cases"].begin(); it != j["cases"].end(); ++it) {
    Baseline b;
    b.value = it.value().at("value").get<double>();
    b.tol = it.value().at("tol").get<double>();
    bf.cases[it.key()] = b;
  }
  return bf;
}

std::string baselines_json(const BaselineFile& bf) {
  ordered_json j;
  j["version"] = bf.version;
  j["config"] = bf.config;
  j["cases"] = ordered_json::object();
  for (const auto& [name, b] : bf.cases) {
    j["cases"][name] = {{"value", b.value}, {"tol", b.tol}};
  }
  return j.dump(2) + "\n";
}

bool baseline_config_matches(const BaselineFile& bf, const RunConfig& cfg) {
  auto echo = cfg.echo();
  for (const auto& [k, v] : bf.config) {
    auto it = echo.find(k);
    if (it == echo.end() || it->second != v) return false;
  }
  return true;
}

void apply_baseline(CaseResult& c, const BaselineFile& bf) {
  auto it = bf.cases.find(c.name);
  if (it == bf.cases.end()) return;
  c.baseline = it->second.value;
  double scale = std::max(1.0, std::abs(it->second.value));
  if (std::abs(c.value - it->second.value) > it->second.tol * scale) {
    c.status = CaseStatus::Fail;
    if (!c.detail.empty()) c.detail += "; ";
    c.detail += "baseline drift";
  }
}

}  // namespace s2l
