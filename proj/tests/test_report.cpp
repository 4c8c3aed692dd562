#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "report.hpp"
#include "suites.hpp"

using namespace s2l;
using nlohmann::json;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/s2l_test_") + stem + "_" +
         std::to_string(::getpid());
}

struct TempFile {
  std::string path;
  TempFile(const char* stem, const std::string& text) : path(temp_path(stem)) {
    std::ofstream(path) << text;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Structural validator for the subset of json-schema the report schema uses:
// type (single or list), required, properties, items, enum,
// additionalProperties-as-schema.
bool type_ok(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

void validate(const json& schema, const json& v, const std::string& where,
              std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) ok = type_ok(v, t.get<std::string>());
    else
      for (const auto& alt : t) ok = ok || type_ok(v, alt.get<std::string>());
    if (!ok) {
      errors.push_back(where + ": type mismatch");
      return;
    }
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema["enum"]) ok = ok || (e == v);
    if (!ok) errors.push_back(where + ": not in enum");
  }
  if (schema.contains("required"))
    for (const auto& k : schema["required"])
      if (!v.contains(k.get<std::string>()))
        errors.push_back(where + ": missing required key " +
                         k.get<std::string>());
  if (schema.contains("properties"))
    for (auto it = schema["properties"].begin();
         it != schema["properties"].end(); ++it)
      if (v.contains(it.key()))
        validate(it.value(), v[it.key()], where + "." + it.key(), errors);
  if (schema.contains("additionalProperties") &&
      schema["additionalProperties"].is_object()) {
    const json& props = schema.value("properties", json::object());
    for (auto it = v.begin(); it != v.end(); ++it)
      if (!props.contains(it.key()))
        validate(schema["additionalProperties"], it.value(),
                 where + "." + it.key(), errors);
  }
  if (schema.contains("items") && v.is_array()) {
    int i = 0;
    for (const auto& item : v)
      validate(schema["items"], item, where + "[" + std::to_string(i++) + "]",
               errors);
  }
}

Report make_report(const std::string& suite, const RunConfig& cfg) {
  Report r;
  r.suite = suite;
  r.cases = run_suite(suite, cfg);
  r.config = cfg.echo();
  r.env = environment_stamp();
  return r;
}

void scrub(Report& r) {
  r.env.clear();
  for (auto& c : r.cases) c.runtime_s = 0;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("config file round trip") {
  TempFile f("cfg",
             "# comment\n"
             "[run]\n"
             "suite = mms\n"
             "seed = 99\n"
             "budget = 5000   ; trailing comment\n"
             "workers = 2\n"
             "out = /tmp/s2l_out\n"
             "json = false\n"
             "csv = true\n"
             "\n"
             "[solver]\n"
             "grid = 17\n"
             "tol = 1e-8\n"
             "tau = 1e-6\n"
             "homotopy = 3\n"
             "max_iter = 25\n");
  RunConfig cfg;
  load_config(f.path, cfg);
  CHECK(cfg.suite == "mms");
  CHECK(cfg.seed == 99);
  CHECK(cfg.budget == 5000);
  CHECK(cfg.workers == 2);
  CHECK(cfg.out_dir == "/tmp/s2l_out");
  CHECK_FALSE(cfg.write_json);
  CHECK(cfg.write_csv);
  CHECK(cfg.grid == 17);
  CHECK(cfg.tol == doctest::Approx(1e-8));
  CHECK(cfg.tau == doctest::Approx(1e-6));
  CHECK(cfg.homotopy == 3);
  CHECK(cfg.max_iter == 25);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config errors carry file and line") {
  auto expect_error = [](const char* stem, const std::string& text,
                         const std::string& needle) {
    TempFile f(stem, text);
    RunConfig cfg;
    try {
      load_config(f.path, cfg);
      FAIL_CHECK("expected invalid_argument for: " << text);
    } catch (const std::invalid_argument& e) {
      std::string msg = e.what();
      CHECK(msg.find(needle) != std::string::npos);
      CHECK(msg.find(f.path) != std::string::npos);
    }
  };
  expect_error("badkey", "[run]\nbogus = 1\n", ":2");
  expect_error("nosection", "seed = 1\n", "outside any section");
  expect_error("badsection", "[nope]\nseed = 1\n", "unknown section");
  expect_error("noequals", "[run]\nsuite mms\n", "expected key = value");
  expect_error("badnum", "[run]\nseed = twelve\n", ":2");
  CHECK_THROWS_AS(
      [] {
        RunConfig cfg;
        load_config("/nonexistent/config/file", cfg);
      }(),
      std::invalid_argument);
}

TEST_CASE("run config validation") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [](auto&& tweak) {
    RunConfig c;
    tweak(c);
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  };
  bad([](RunConfig& c) { c.budget = 0; });
  bad([](RunConfig& c) { c.grid = 7; });
  bad([](RunConfig& c) { c.grid = 16; });
  bad([](RunConfig& c) { c.workers = -1; });
  bad([](RunConfig& c) { c.tol = 0; });
  bad([](RunConfig& c) { c.max_iter = 0; });
}

TEST_CASE("report json conforms to the published schema") {
  std::ifstream in(std::string(S2L_REPO_DIR) + "/docs/report.schema.json");
  REQUIRE(in.good());
  json schema = json::parse(in);

  RunConfig cfg;
  cfg.budget = 2000;
  cfg.workers = 2;
  Report r = make_report("identities", cfg);
  json doc = json::parse(report_json(r));

  std::vector<std::string> errors;
  validate(schema, doc, "$", errors);
  for (const auto& e : errors) FAIL_CHECK(e);
  CHECK(errors.empty());
  CHECK(doc["suite"] == "identities");
  CHECK(doc["cases"].size() == r.cases.size());
}

TEST_CASE("reports are deterministic modulo environment and timing") {
  RunConfig cfg;
  cfg.budget = 2000;
  cfg.workers = 3;
  Report a = make_report("identities", cfg);
  Report b = make_report("identities", cfg);
  scrub(a);
  scrub(b);
  CHECK(report_json(a) == report_json(b));

  RunConfig est;
  est.grid = 17;
  Report c = make_report("estimates", est);
  Report d = make_report("estimates", est);
  scrub(c);
  scrub(d);
  CHECK(report_json(c) == report_json(d));
  CHECK(c.failures() == 0);
}

TEST_CASE("csv rendering has one row per case plus a header") {
  RunConfig cfg;
  cfg.budget = 2000;
  Report r = make_report("identities", cfg);
  std::istringstream csv(report_csv(r));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "name,status,value,tolerance,baseline,runtime");
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == (int)r.cases.size());
}

TEST_CASE("baselines round trip and flag drift") {
  BaselineFile bf;
  bf.config = {{"seed", "12345"}, {"grid", "33"}};
  bf.cases["suite.case"] = Baseline{1.5, 1e-9};
  bf.cases["suite.other"] = Baseline{-2.0, 1e-6};

  TempFile f("baselines", baselines_json(bf));
  BaselineFile back = load_baselines(f.path);
  CHECK(back.version == 1);
  CHECK(back.config == bf.config);
  REQUIRE(back.cases.size() == 2);
  CHECK(back.cases["suite.case"].value == 1.5);
  CHECK(back.cases["suite.case"].tol == 1e-9);

  CaseResult ok;
  ok.name = "suite.case";
  ok.value = 1.5 + 1e-10;
  apply_baseline(ok, back);
  CHECK(ok.status == CaseStatus::Pass);
  REQUIRE(ok.baseline.has_value());
  CHECK(*ok.baseline == 1.5);

  CaseResult drifted;
  drifted.name = "suite.case";
  drifted.value = 1.501;
  apply_baseline(drifted, back);
  CHECK(drifted.status == CaseStatus::Fail);
  CHECK(drifted.detail.find("baseline drift") != std::string::npos);

  CaseResult unknown;
  unknown.name = "suite.unlisted";
  unknown.value = 7.0;
  apply_baseline(unknown, back);
  CHECK(unknown.status == CaseStatus::Pass);
  CHECK_FALSE(unknown.baseline.has_value());
}

TEST_CASE("baseline comparison is gated on the blessed config") {
  BaselineFile bf;
  bf.config = {{"seed", "12345"}, {"budget", "200000"}, {"grid", "33"}};
  RunConfig cfg;  // defaults match the blessed keys
  CHECK(baseline_config_matches(bf, cfg));
  cfg.grid = 17;
  CHECK_FALSE(baseline_config_matches(bf, cfg));
  cfg.grid = 33;
  cfg.seed = 1;
  CHECK_FALSE(baseline_config_matches(bf, cfg));
  bf.config["no_such_key"] = "1";
  cfg.seed = 12345;
  CHECK_FALSE(baseline_config_matches(bf, cfg));
}

TEST_CASE("every blessed tolerance refers to a real case name") {
  // guard against stale baseline registry entries after suite renames
  RunConfig cfg;
  cfg.budget = 2000;
  cfg.grid = 17;
  std::vector<std::string> names;
  for (const auto& s : suite_names())
    for (const auto& c : run_suite(s, cfg)) names.push_back(c.name);
  for (const auto& [name, tol] : baseline_tolerances()) {
    bool found = false;
    for (const auto& n : names) found = found || n == name;
    if (!found) FAIL_CHECK("no case named " << name);
    CHECK(tol > 0);
  }
}

}  // TEST_SUITE
