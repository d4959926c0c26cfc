#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "coplan/report.hpp"
#include "json.hpp"

namespace coplan {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(InputError::Kind::io, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

ModelOptions RunConfig::model_options() const {
  ModelOptions o;
  o.new_lines = new_lines;
  o.bundling = bundling;
  o.storage = storage;
  o.wind = wind;
  o.max_hourly_shed = gamma;
  o.max_annual_shed = phi;
  o.literal_hours = literal_hours;
  return o;
}

BddOptions RunConfig::bdd_options() const {
  BddOptions o;
  o.tolerance = tau;
  o.pool_size = pool_size;
  o.use_poc = use_poc;
  o.max_iterations = max_iterations;
  o.security = !n1 ? BddOptions::Security::none : screening ? BddOptions::Security::screened : BddOptions::Security::full;
  o.screening_threshold = screening_threshold;
  o.screen_once = screen_once;
  return o;
}

std::string RunConfig::to_json() const {
  json j;
  j["system"] = system_path;
  j["series"] = series_path;
  j["reps"] = reps_path;
  j["mode"] = mode;
  j["new_lines"] = new_lines;
  j["bundling"] = bundling;
  j["storage"] = storage;
  j["wind"] = wind;
  j["n1"] = n1;
  j["screening"] = screening;
  j["gamma"] = gamma ? json(*gamma) : json(nullptr);
  j["phi"] = phi ? json(*phi) : json(nullptr);
  j["literal_hours"] = literal_hours;
  j["tau"] = tau;
  j["pool_size"] = pool_size;
  j["use_poc"] = use_poc;
  j["max_iterations"] = max_iterations;
  j["screening_threshold"] = screening_threshold;
  j["screen_once"] = screen_once;
  j["hours"] = hours;
  j["seed"] = seed;
  return j.dump(2);
}

void apply_scheme(RunConfig& c, const std::string& scheme) {
  static const char* names[] = {"I", "II", "III", "IV", "V", "VI"};
  int k = -1;
  for (int i = 0; i < 6; ++i)
    if (scheme == names[i]) k = i;
  if (k < 0) throw std::invalid_argument("unknown scheme '" + scheme + "' (expected I..VI)");
  c.new_lines = true;
  c.wind = true;
  c.bundling = k >= 1;
  c.storage = k >= 2;
  c.n1 = k >= 3;
  c.screening = k >= 4;
  c.gamma.reset();
  c.phi.reset();
  if (k == 5) {
    c.gamma = 0.2;
    c.phi = 0.15;
  }
}

PlanReport make_report(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps, const PlanSolution& plan) {
  PlanReport r;
  r.name = sys.name;
  r.status = plan.feasible ? "optimal" : lp::to_string(plan.status);
  r.objective = plan.objective;
  r.costs = plan.costs;
  if (!plan.feasible) return r;
  const auto& v = model.vars;
  const auto& b0 = v.blocks.front();
  const auto& x = plan.x;
  const auto val = [&](int j) { return j < 0 ? 0.0 : x[static_cast<std::size_t>(j)]; };
  for (int t = 0; t < v.T; ++t) {
    for (std::size_t k = 0; k < v.cand_slots.size(); ++k)
      if (val(v.y(t, k)) > 0.5) {
        const auto& c = sys.candidate_lines[v.cand_slots[k].line];
        r.lines.push_back({t + 1, c.id, v.cand_slots[k].circuit + 1, c.from_bus, c.to_bus});
      }
    for (std::size_t k = 0; k < v.bundle_slots.size(); ++k)
      if (val(v.yb(t, k)) > 0.5) {
        const auto& bc = sys.bundling[v.bundle_slots[k].bundle];
        const auto& o = bc.options[v.bundle_slots[k].option];
        r.bundles.push_back({t + 1, bc.id, bc.target_line, o.name, o.uprate});
      }
    if (!b0.PW.empty())
      for (std::size_t w = 0; w < v.n_wind; ++w) r.wind.push_back({t + 1, sys.wind[w].bus, val(b0.PW[v.tk(t, w, v.n_wind)]), 0.0});
    if (!b0.S.empty())
      for (std::size_t s = 0; s < v.n_storage; ++s)
        r.storage.push_back({t + 1, sys.storage[s].bus, val(b0.C[v.tk(t, s, v.n_storage)]), val(b0.S[v.tk(t, s, v.n_storage)])});
    EnergyRow e;
    e.stage = t + 1;
    const double grow = load_growth_factor(sys.policy, t + 1);
    for (int h = 0; h < v.H; ++h) {
      const auto& rep = reps.hours[static_cast<std::size_t>(h)];
      const double rho = rep.weight;
      e.load_mwh += rho * grow * rep.load_factor * sys.total_peak_load();
      for (std::size_t g = 0; g < v.n_units; ++g) e.thermal_mwh += rho * val(b0.P[v.th(t, g, h, v.n_units)]);
      if (!b0.PW.empty())
        for (std::size_t w = 0; w < v.n_wind; ++w) {
          const double curtailed = val(b0.PC[v.th(t, w, h, v.n_wind)]);
          e.wind_mwh += rho * (rep.wind_factor * val(b0.PW[v.tk(t, w, v.n_wind)]) - curtailed);
          e.curtailed_mwh += rho * curtailed;
        }
      if (!b0.Pd.empty())
        for (std::size_t s = 0; s < v.n_storage; ++s)
          e.storage_mwh += rho * (val(b0.Pd[v.th(t, s, h, v.n_storage)]) - val(b0.Pc[v.th(t, s, h, v.n_storage)]));
      for (std::size_t i = 0; i < v.n_buses; ++i) e.shed_mwh += rho * val(b0.LS[v.th(t, i, h, v.n_buses)]);
    }
    r.curtailed_mwh += e.curtailed_mwh;
    r.shed_mwh += e.shed_mwh;
    r.energy.push_back(e);
  }
  return r;
}

std::string PlanReport::to_json() const {
  json j;
  j["name"] = name;
  j["mode"] = mode;
  j["status"] = status;
  j["Z"] = objective;
  j["TIC"] = {{"lines", costs.lines},     {"substations", costs.substations}, {"bundling", costs.bundling},
              {"storage", costs.storage}, {"wind", costs.wind},               {"total", costs.tic()}};
  j["TOC"] = {{"generation", costs.generation}, {"reserve", costs.reserve},         {"degradation", costs.degradation},
              {"shedding", costs.shedding},     {"curtailment", costs.curtailment}, {"total", costs.toc()}};
  j["lines"] = json::array();
  for (const auto& l : lines)
    j["lines"].push_back({{"stage", l.stage}, {"line", l.line_id}, {"circuit", l.circuit}, {"from", l.from_bus}, {"to", l.to_bus}});
  j["bundling"] = json::array();
  for (const auto& b : bundles)
    j["bundling"].push_back(
        {{"stage", b.stage}, {"bundle", b.bundle_id}, {"target_line", b.target_line}, {"option", b.option}, {"uprate", b.uprate}});
  j["wind"] = json::array();
  for (const auto& w : wind) j["wind"].push_back({{"stage", w.stage}, {"bus", w.bus}, {"mw", w.power_mw}});
  j["storage"] = json::array();
  for (const auto& s : storage) j["storage"].push_back({{"stage", s.stage}, {"bus", s.bus}, {"mw", s.power_mw}, {"mwh", s.energy_mwh}});
  j["energy"] = json::array();
  for (const auto& e : energy) {
    const double share = e.load_mwh > 0 ? 1.0 / e.load_mwh : 0.0;
    j["energy"].push_back({{"stage", e.stage},
                           {"load_mwh", e.load_mwh},
                           {"thermal_share", e.thermal_mwh * share},
                           {"wind_share", e.wind_mwh * share},
                           {"storage_share", e.storage_mwh * share},
                           {"shed_share", e.shed_mwh * share},
                           {"curtailed_mwh", e.curtailed_mwh}});
  }
  j["curtailed_mwh"] = curtailed_mwh;
  j["shed_mwh"] = shed_mwh;
  if (mode == "bdd") j["bdd"] = {{"iterations", iterations}, {"LB", lower_bound}, {"UB", upper_bound}};
  return j.dump(2) + "\n";
}

void PlanReport::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.json", to_json());
  std::ostringstream l, b, w, s, e, c;
  l << "stage,line,circuit,from_bus,to_bus\n";
  for (const auto& r : lines) l << r.stage << ',' << r.line_id << ',' << r.circuit << ',' << r.from_bus << ',' << r.to_bus << '\n';
  b << "stage,bundle,target_line,option,uprate\n";
  for (const auto& r : bundles) b << r.stage << ',' << r.bundle_id << ',' << r.target_line << ',' << r.option << ',' << fmt(r.uprate) << '\n';
  w << "stage,bus,mw\n";
  for (const auto& r : wind) w << r.stage << ',' << r.bus << ',' << fmt(r.power_mw) << '\n';
  s << "stage,bus,mw,mwh\n";
  for (const auto& r : storage) s << r.stage << ',' << r.bus << ',' << fmt(r.power_mw) << ',' << fmt(r.energy_mwh) << '\n';
  e << "stage,load_mwh,thermal_mwh,wind_mwh,storage_mwh,shed_mwh,curtailed_mwh\n";
  for (const auto& r : energy)
    e << r.stage << ',' << fmt(r.load_mwh) << ',' << fmt(r.thermal_mwh) << ',' << fmt(r.wind_mwh) << ',' << fmt(r.storage_mwh) << ','
      << fmt(r.shed_mwh) << ',' << fmt(r.curtailed_mwh) << '\n';
  c << "term,musd\n"
    << "lines," << fmt(costs.lines) << "\nsubstations," << fmt(costs.substations) << "\nbundling," << fmt(costs.bundling)
    << "\nstorage," << fmt(costs.storage) << "\nwind," << fmt(costs.wind) << "\ngeneration," << fmt(costs.generation)
    << "\nreserve," << fmt(costs.reserve) << "\ndegradation," << fmt(costs.degradation) << "\nshedding," << fmt(costs.shedding)
    << "\ncurtailment," << fmt(costs.curtailment) << "\nTIC," << fmt(costs.tic()) << "\nTOC," << fmt(costs.toc()) << "\nZ,"
    << fmt(objective) << '\n';
  write_file(dir / "lines.csv", l.str());
  write_file(dir / "bundling.csv", b.str());
  write_file(dir / "wind.csv", w.str());
  write_file(dir / "storage.csv", s.str());
  write_file(dir / "energy.csv", e.str());
  write_file(dir / "costs.csv", c.str());
}

std::string plan_to_json(const MilpModel& model, const PlanDecision& plan) {
  json j = json::object();
  for (const auto& [col, v] : plan.binaries) j[model.problem.col_name(col)] = static_cast<int>(std::lround(v));
  return j.dump(2) + "\n";
}

PlanDecision plan_from_json(const MilpModel& model, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(InputError::Kind::parse, std::string("plan file: ") + e.what());
  }
  if (!j.is_object()) throw InputError(InputError::Kind::parse, "plan file: expected an object");
  std::map<std::string, int> by_name;
  for (int c : model.vars.binary_columns()) by_name[model.problem.col_name(c)] = c;
  PlanDecision d;
  for (const auto& [name, c] : by_name) d.binaries[c] = 0.0;
  for (const auto& [name, v] : j.items()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw InputError(InputError::Kind::reference, "plan file: unknown variable " + name);
    if (!v.is_number()) throw InputError(InputError::Kind::parse, "plan file: non-numeric value for " + name);
    d.binaries[it->second] = v.get<double>() > 0.5 ? 1.0 : 0.0;
  }
  return d;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path resolve_output_dir(const std::string& configured) {
  if (const char* env = std::getenv("COPLAN_OUTPUT_DIR"); env && *env) return env;
  return configured;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command, const RunConfig& config) {
  const std::string cfg = config.to_json();
  json j;
  j["tool"] = "coplan";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = json::parse(cfg);
  j["config_hash"] = fnv1a_hex(cfg);
  j["seed"] = config.seed;
  json inputs = json::object();
  for (const auto& p : {config.system_path, config.series_path, config.reps_path})
    if (!p.empty() && std::filesystem::exists(p)) inputs[p] = fnv1a_hex(read_file(p));
  j["inputs"] = inputs;
  std::filesystem::create_directories(dir);
  write_file(dir / "manifest.json", j.dump(2) + "\n");
}

RepresentativeSet representatives_for(const RunConfig& config) {
  if (!config.reps_path.empty()) return load_representatives_csv(config.reps_path);
  const HourlySeries series = config.series_path.empty() ? synthetic_series(8760, config.seed) : load_series_csv(config.series_path);
  if (config.hours == 0 || config.hours > series.size())
    throw InputError(InputError::Kind::domain, "representative hour count must lie in [1, series length]");
  return run_ctpc(series, config.hours);
}

RunOutcome run_plan(const RunConfig& config) {
  RunOutcome out;
  out.output_dir = resolve_output_dir(config.output_dir);
  try {
    if (config.mode != "bdd" && config.mode != "monolithic")
      throw InputError(InputError::Kind::domain, "mode must be 'bdd' or 'monolithic'");
    const SystemData sys = load_system(config.system_path);
    const RepresentativeSet reps = representatives_for(config);
    const ModelOptions mo = config.model_options();
    const MilpModel intact = build_model(sys, reps, mo);
    PlanSolution plan;
    PlanDecision decision;
    bool converged = true;
    if (config.mode == "monolithic") {
      const MilpModel full = config.n1 ? build_model(sys, reps, mo, secure_scenarios(sys, true)) : intact;
      plan = solve_monolithic(full, sys, reps);
      if (plan.feasible) {
        decision = PlanDecision::from_solution(full, plan.x);
        plan = evaluate_plan(intact, sys, reps, decision);
      }
      converged = plan.feasible;
      out.report = make_report(intact, sys, reps, plan);
    } else {
      BddResult r = run_bdd(sys, reps, mo, config.bdd_options());
      decision = r.decision;
      plan = r.plan;
      converged = r.converged;
      out.report = make_report(intact, sys, reps, plan);
      out.report.iterations = r.iterations;
      out.report.lower_bound = r.lower_bound;
      out.report.upper_bound = r.upper_bound;
      if (!r.converged) out.report.status = r.status;
      std::filesystem::create_directories(out.output_dir);
      write_file(out.output_dir / "trace.csv", r.trace_csv());
      if (!r.screenings.empty()) write_file(out.output_dir / "screening.csv", r.screenings.back().to_csv());
      out.bdd = std::move(r);
    }
    out.report.mode = config.mode;
    out.report.write(out.output_dir);
    if (plan.feasible) write_file(out.output_dir / "plan.json", plan_to_json(intact, decision));
    write_manifest(out.output_dir, "plan", config);
    if (!converged) {
      out.exit_code = kExitNonconvergence;
      out.message = "no converged plan (" + out.report.status + ")";
    }
  } catch (const InputError& e) {
    out.exit_code = kExitInput;
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kExitFailure;
    out.message = e.what();
  }
  return out;
}

}  // namespace coplan
