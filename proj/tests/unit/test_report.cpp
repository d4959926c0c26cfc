#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "coplan/report.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace coplan;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("coplan_report_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("report");

TEST_CASE("scheme presets") {
  RunConfig c;
  apply_scheme(c, "I");
  CHECK(c.new_lines);
  CHECK(c.wind);
  CHECK_FALSE(c.bundling);
  CHECK_FALSE(c.storage);
  CHECK_FALSE(c.n1);
  apply_scheme(c, "III");
  CHECK(c.bundling);
  CHECK(c.storage);
  CHECK_FALSE(c.n1);
  apply_scheme(c, "V");
  CHECK(c.n1);
  CHECK(c.screening);
  CHECK_FALSE(c.gamma.has_value());
  apply_scheme(c, "VI");
  CHECK(*c.gamma == doctest::Approx(0.2));
  CHECK(*c.phi == doctest::Approx(0.15));
  CHECK(c.bdd_options().security == BddOptions::Security::screened);
  apply_scheme(c, "IV");
  CHECK(c.bdd_options().security == BddOptions::Security::full);
  CHECK_THROWS_AS(apply_scheme(c, "VII"), std::invalid_argument);

  // Scheme I reproduces the shape of a model with bundling and storage off.
  const SystemData sys = load_system(oracle::toy_path("toy4_storage"));
  const auto reps = oracle::toy_hours(2);
  RunConfig one;
  apply_scheme(one, "I");
  ModelOptions manual;
  manual.bundling = false;
  manual.storage = false;
  const auto a = build_model(sys, reps, one.model_options());
  const auto b = build_model(sys, reps, manual);
  CHECK(a.problem.num_cols() == b.problem.num_cols());
  CHECK(a.problem.num_rows() == b.problem.num_rows());
  CHECK(a.vars.count(Family::S) == 0);
  CHECK(a.vars.count(Family::Yb) == 0);
}

TEST_CASE("FNV-1a digests") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("output directory override") {
  ::unsetenv("COPLAN_OUTPUT_DIR");
  CHECK(resolve_output_dir("here") == std::filesystem::path("here"));
  ::setenv("COPLAN_OUTPUT_DIR", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir("here") == std::filesystem::path("/tmp/elsewhere"));
  ::unsetenv("COPLAN_OUTPUT_DIR");
}

TEST_CASE("plan files round trip by column name") {
  const SystemData sys = load_system(oracle::toy_path("toy4_bundling"));
  const auto reps = oracle::toy_hours(2);
  const MilpModel m = build_model(sys, reps);
  PlanDecision d;
  int k = 0;
  for (int j : m.vars.binary_columns()) d.binaries[j] = (k++ % 3 == 0) ? 1.0 : 0.0;
  const PlanDecision back = plan_from_json(m, plan_to_json(m, d));
  CHECK(back.binaries == d.binaries);
  CHECK_THROWS_AS(plan_from_json(m, R"({"Y[t9,l9,c9]": 1})"), InputError);
  CHECK_THROWS_AS(plan_from_json(m, "not json"), InputError);
}

TEST_CASE("report tables follow the plan") {
  const SystemData sys = load_system(oracle::toy_path("toy4_storage"));
  const auto reps = oracle::toy_hours(3);
  const MilpModel m = build_model(sys, reps);
  const PlanSolution s = solve_monolithic(m, sys, reps);
  REQUIRE(s.feasible);
  const PlanReport r = make_report(m, sys, reps, s);
  CHECK(r.objective == doctest::Approx(s.objective));
  CHECK(r.costs.total() == doctest::Approx(s.objective).epsilon(1e-9));
  REQUIRE(r.energy.size() == 2);
  for (const auto& e : r.energy) {
    const double grow = load_growth_factor(sys.policy, e.stage);
    double load = 0.0;
    for (const auto& h : reps.hours) load += h.weight * h.load_factor * sys.total_peak_load() * grow;
    CHECK(e.load_mwh == doctest::Approx(load));
    CHECK(e.thermal_mwh + e.wind_mwh + e.storage_mwh + e.shed_mwh == doctest::Approx(load).epsilon(1e-6));
  }
  for (std::size_t i = 1; i < r.wind.size(); ++i)
    if (r.wind[i].bus == r.wind[i - 1].bus) CHECK(r.wind[i].power_mw >= r.wind[i - 1].power_mw - 1e-6);

  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["Z"].get<double>() == doctest::Approx(s.objective));
  CHECK(j["TIC"]["total"].get<double>() + j["TOC"]["total"].get<double>() == doctest::Approx(s.objective));
  const auto dir = scratch("tables");
  r.write(dir);
  for (const char* f : {"report.json", "lines.csv", "bundling.csv", "wind.csv", "storage.csv", "energy.csv", "costs.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(slurp(dir / "lines.csv").rfind("stage,line,circuit,from_bus,to_bus\n", 0) == 0);
}

TEST_CASE("planning runs write artifacts and map failures to exit codes") {
  RunConfig c;
  c.system_path = oracle::toy_path("toy3_radial");
  c.hours = 3;
  c.output_dir = scratch("run").string();
  const RunOutcome ok = run_plan(c);
  CHECK(ok.exit_code == kExitOk);
  REQUIRE(ok.bdd.has_value());
  for (const char* f : {"trace.csv", "plan.json", "manifest.json", "report.json"}) CHECK(std::filesystem::exists(ok.output_dir / f));
  const auto man = nlohmann::json::parse(slurp(ok.output_dir / "manifest.json"));
  CHECK(man["config_hash"].get<std::string>() == fnv1a_hex(c.to_json()));
  CHECK(man["seed"].get<unsigned>() == 7u);

  RunConfig mono = c;
  mono.mode = "monolithic";
  mono.output_dir = scratch("mono").string();
  const RunOutcome m = run_plan(mono);
  CHECK(m.exit_code == kExitOk);
  CHECK(m.report.objective == doctest::Approx(ok.report.objective).epsilon(1e-4));

  RunConfig missing = c;
  missing.system_path = "/nonexistent/system.json";
  CHECK(run_plan(missing).exit_code == kExitInput);

  RunConfig capped;
  capped.system_path = oracle::toy_path("toy3_commit");
  capped.hours = 4;
  capped.max_iterations = 1;
  capped.use_poc = false;
  capped.pool_size = 1;
  capped.output_dir = scratch("capped").string();
  const RunOutcome cap = run_plan(capped);
  CHECK((cap.exit_code == kExitNonconvergence || cap.exit_code == kExitOk));
  if (cap.bdd && !cap.bdd->converged) CHECK(cap.exit_code == kExitNonconvergence);
}

TEST_CASE("reruns reproduce the artifacts") {
  RunConfig c;
  c.system_path = oracle::toy_path("toy5_wind");
  c.hours = 3;
  c.output_dir = scratch("rerun_a").string();
  const auto a = run_plan(c);
  c.output_dir = scratch("rerun_b").string();
  const auto b = run_plan(c);
  REQUIRE(a.exit_code == kExitOk);
  for (const char* f : {"report.json", "plan.json", "lines.csv", "wind.csv", "costs.csv"})
    CHECK(slurp(a.output_dir / f) == slurp(b.output_dir / f));
}

TEST_SUITE_END();
