#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "coplan/report.hpp"
#include "json.hpp"

using namespace coplan;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(InputError::Kind::io, "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <class F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

void add_model_flags(CLI::App* app, RunConfig& c, std::string& scheme) {
  app->add_option("--system", c.system_path, "System JSON file")->required();
  app->add_option("--series", c.series_path, "Hourly series CSV (default: synthetic year)");
  app->add_option("--reps", c.reps_path, "Representative hours CSV (skips clustering)");
  app->add_option("--hours", c.hours, "Representative hours to cluster to");
  app->add_option("--seed", c.seed, "Seed of the synthetic series");
  app->add_option("--scheme", scheme, "Scheme preset I..VI");
  app->add_flag("!--no-lines", c.new_lines, "Disable new lines");
  app->add_flag("!--no-bundling", c.bundling, "Disable bundling");
  app->add_flag("!--no-storage", c.storage, "Disable storage");
  app->add_flag("!--no-wind", c.wind, "Disable wind");
  app->add_option("--gamma", c.gamma, "Hourly shed limit share");
  app->add_option("--phi", c.phi, "Annual shed limit share");
  app->add_flag("--literal-hours", c.literal_hours, "8760-normalized hour weights");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coplan: transmission, wind and storage co-planning"};
  app.require_subcommand(1);

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Chronological clustering of an hourly series");
  std::string c_series, c_out = "out";
  std::size_t c_hours = 96;
  unsigned c_seed = 7;
  bool c_normalize = false;
  cluster->add_option("--series", c_series, "Hourly series CSV (default: synthetic year)");
  cluster->add_option("--hours", c_hours, "Representative hours");
  cluster->add_option("--seed", c_seed, "Seed of the synthetic series");
  cluster->add_option("--out", c_out, "Output directory");
  cluster->add_flag("--normalize", c_normalize, "Min-max scale features");

  // plan
  auto* plan = app.add_subcommand("plan", "Plan expansion (decomposition or monolithic)");
  RunConfig cfg;
  std::string scheme;
  add_model_flags(plan, cfg, scheme);
  plan->add_option("--out", cfg.output_dir, "Output directory (COPLAN_OUTPUT_DIR overrides)");
  plan->add_option("--mode", cfg.mode, "bdd | monolithic")->check(CLI::IsMember({"bdd", "monolithic"}));
  plan->add_flag("--n1", cfg.n1, "Require N-1 security");
  plan->add_flag("--screening", cfg.screening, "Select outages by screening");
  plan->add_option("--tau", cfg.tau, "Relative gap tolerance");
  plan->add_option("--pool", cfg.pool_size, "Master solution pool size");
  plan->add_flag("!--no-poc", cfg.use_poc, "Disable Pareto-optimal cuts");
  plan->add_option("--max-iter", cfg.max_iterations, "Iteration cap");
  plan->add_option("--threshold", cfg.screening_threshold, "Screening threshold fraction");
  plan->add_flag("--screen-once", cfg.screen_once, "Screen at the first iteration only");

  // screen
  auto* scr = app.add_subcommand("screen", "Rank outages of a plan");
  RunConfig s_cfg;
  std::string s_scheme, s_plan, s_out = "out";
  double s_threshold = 0.2;
  add_model_flags(scr, s_cfg, s_scheme);
  scr->add_option("--plan", s_plan, "Plan JSON written by 'plan'")->required();
  scr->add_option("--threshold", s_threshold, "Threshold fraction of the largest CS");
  scr->add_option("--out", s_out, "Output directory (COPLAN_OUTPUT_DIR overrides)");

  // report
  auto* rep = app.add_subcommand("report", "Print a plan report");
  std::string r_dir = "out";
  rep->add_option("dir", r_dir, "Directory holding report.json");

  // synth-series
  auto* syn = app.add_subcommand("synth-series", "Write a synthetic hourly series");
  std::size_t y_hours = 8760;
  unsigned y_seed = 7;
  std::string y_out;
  syn->add_option("--hours", y_hours, "Series length");
  syn->add_option("--seed", y_seed, "Seed");
  syn->add_option("--out", y_out, "CSV path")->required();

  // lp-solve
  auto* lps = app.add_subcommand("lp-solve", "Solve an LP file and write a solution file");
  std::string l_in, l_out;
  lps->add_option("lp", l_in, "LP file")->required();
  lps->add_option("sol", l_out, "Solution file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*cluster) {
    return guarded([&] {
      const HourlySeries series = c_series.empty() ? synthetic_series(8760, c_seed) : load_series_csv(c_series);
      if (c_hours == 0 || c_hours > series.size())
        throw InputError(InputError::Kind::domain, "--hours must lie in [1, series length]");
      CtpcOptions opt;
      opt.normalize = c_normalize;
      const auto reps = run_ctpc(series, c_hours, opt);
      const auto err = representation_error(series, reps);
      const auto dir = resolve_output_dir(c_out);
      std::filesystem::create_directories(dir);
      save_representatives_csv(reps, dir / "reps.csv");
      nlohmann::ordered_json m;
      m["hours"] = reps.size();
      m["total_weight"] = reps.total_weight();
      m["load_rmse"] = err.load_rmse;
      m["wind_rmse"] = err.wind_rmse;
      m["correlation_error"] = err.correlation_error;
      spit(dir / "metrics.json", m.dump(2) + "\n");
      RunConfig mc;
      mc.series_path = c_series;
      mc.hours = c_hours;
      mc.seed = c_seed;
      write_manifest(dir, "cluster", mc);
      std::cout << "wrote " << reps.size() << " representative hours to " << (dir / "reps.csv").string() << '\n';
      return kExitOk;
    });
  }
  if (*plan) {
    return guarded([&] {
      if (!scheme.empty()) {
        const bool lit = cfg.literal_hours;
        apply_scheme(cfg, scheme);
        cfg.literal_hours = lit;
      }
      const RunOutcome r = run_plan(cfg);
      if (r.exit_code == kExitOk || r.exit_code == kExitNonconvergence) {
        std::cout << "status " << r.report.status << "  Z = " << r.report.objective << " M$\n";
        if (r.bdd) std::cout << "iterations " << r.bdd->iterations << "  LB " << r.bdd->lower_bound << "  UB " << r.bdd->upper_bound << '\n';
        std::cout << "artifacts in " << r.output_dir.string() << '\n';
      }
      if (!r.message.empty()) std::cerr << r.message << '\n';
      return r.exit_code;
    });
  }
  if (*scr) {
    return guarded([&] {
      if (!s_scheme.empty()) apply_scheme(s_cfg, s_scheme);
      const SystemData sys = load_system(s_cfg.system_path);
      const auto reps = representatives_for(s_cfg);
      const MilpModel m = build_model(sys, reps, s_cfg.model_options());
      const PlanDecision d = plan_from_json(m, slurp(s_plan));
      const auto res = screen(sys, reps, s_cfg.model_options(), d, s_threshold);
      const auto dir = resolve_output_dir(s_out);
      spit(dir / "screening.csv", res.to_csv());
      write_manifest(dir, "screen", s_cfg);
      std::cout << res.to_csv();
      return kExitOk;
    });
  }
  if (*rep) {
    return guarded([&] {
      const auto j = nlohmann::json::parse(slurp((std::filesystem::path(r_dir) / "report.json").string()));
      std::cout << "system  " << j.value("name", "") << "  (" << j.value("mode", "") << ", " << j.value("status", "") << ")\n";
      std::cout << "Z       " << j["Z"].get<double>() << " M$\n";
      std::cout << "TIC     " << j["TIC"]["total"].get<double>() << "   TOC " << j["TOC"]["total"].get<double>() << '\n';
      std::cout << "\nstage  built lines\n";
      for (const auto& l : j["lines"])
        std::cout << "  " << l["stage"] << "    line " << l["line"] << " circuit " << l["circuit"] << " (" << l["from"] << "-" << l["to"] << ")\n";
      if (!j["bundling"].empty()) std::cout << "\nstage  bundling\n";
      for (const auto& b : j["bundling"]) std::cout << "  " << b["stage"] << "    line " << b["target_line"] << " " << b["option"].get<std::string>() << '\n';
      if (!j["wind"].empty()) std::cout << "\nstage  wind (bus: MW)\n";
      for (const auto& w : j["wind"]) std::cout << "  " << w["stage"] << "    " << w["bus"] << ": " << w["mw"].get<double>() << '\n';
      if (!j["storage"].empty()) std::cout << "\nstage  storage (bus: MW / MWh)\n";
      for (const auto& s : j["storage"])
        std::cout << "  " << s["stage"] << "    " << s["bus"] << ": " << s["mw"].get<double>() << " / " << s["mwh"].get<double>() << '\n';
      std::cout << "\nshed " << j["shed_mwh"].get<double>() << " MWh   curtailed " << j["curtailed_mwh"].get<double>() << " MWh\n";
      return kExitOk;
    });
  }
  if (*syn) {
    return guarded([&] {
      save_series_csv(synthetic_series(y_hours, y_seed), y_out);
      return kExitOk;
    });
  }
  if (*lps) {
    return guarded([&] {
      const lp::LpProblem p = lp::parse_lp_format(slurp(l_in));
      lp::LpSolution sol;
      if (p.has_integers()) {
        const auto m = lp::solve_milp(p);
        sol.status = m.status;
        if (!m.pool.empty()) {
          sol.status = lp::Status::optimal;
          sol.x = m.best();
          sol.objective = m.objective();
        }
      } else {
        sol = lp::solve_lp(p);
      }
      spit(l_out, lp::to_solution_text(p, sol));
      return sol.status == lp::Status::optimal ? kExitOk : kExitFailure;
    });
  }
  return kExitOk;
}
