#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "coplan/report.hpp"

namespace py = pybind11;
using namespace coplan;

namespace {

ModelOptions model_options(bool new_lines, bool wind, bool bundling, bool storage, std::optional<double> gamma,
                           std::optional<double> phi, bool literal_hours) {
  ModelOptions o;
  o.new_lines = new_lines;
  o.wind = wind;
  o.bundling = bundling;
  o.storage = storage;
  o.max_hourly_shed = gamma;
  o.max_annual_shed = phi;
  o.literal_hours = literal_hours;
  return o;
}

py::dict costs_dict(const CostBreakdown& c) {
  py::dict d;
  d["lines"] = c.lines;
  d["substations"] = c.substations;
  d["bundling"] = c.bundling;
  d["storage"] = c.storage;
  d["wind"] = c.wind;
  d["generation"] = c.generation;
  d["reserve"] = c.reserve;
  d["degradation"] = c.degradation;
  d["shedding"] = c.shedding;
  d["curtailment"] = c.curtailment;
  d["TIC"] = c.tic();
  d["TOC"] = c.toc();
  return d;
}

std::map<std::string, double> plan_by_name(const MilpModel& m, const PlanDecision& d) {
  std::map<std::string, double> out;
  for (const auto& [j, v] : d.binaries) out[m.problem.col_name(j)] = v;
  return out;
}

PlanDecision plan_from_names(const MilpModel& m, const std::map<std::string, double>& names) {
  std::map<std::string, int> index;
  for (int j : m.vars.binary_columns()) index[m.problem.col_name(j)] = j;
  PlanDecision d;
  for (int j : m.vars.binary_columns()) d.binaries[j] = 0.0;
  for (const auto& [n, v] : names) {
    auto it = index.find(n);
    if (it == index.end()) throw InputError(InputError::Kind::reference, "unknown binary " + n);
    d.binaries[it->second] = v;
  }
  return d;
}

#define MODEL_ARGS                                                                                                     \
  py::arg("new_lines") = true, py::arg("wind") = true, py::arg("bundling") = true, py::arg("storage") = true,        \
      py::arg("gamma") = py::none(), py::arg("phi") = py::none(), py::arg("literal_hours") = false

}  // namespace

PYBIND11_MODULE(_coplan, m) {
  m.doc() = "Transmission, wind and storage co-planning";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

  py::class_<SystemData>(m, "System")
      .def_readonly("name", &SystemData::name)
      .def_property_readonly("n_buses", [](const SystemData& s) { return s.buses.size(); })
      .def_property_readonly("n_existing_lines", [](const SystemData& s) { return s.existing_lines.size(); })
      .def_property_readonly("n_candidate_lines", [](const SystemData& s) { return s.candidate_lines.size(); })
      .def_property_readonly("stages", [](const SystemData& s) { return s.policy.stages; })
      .def_property_readonly("total_peak_load", &SystemData::total_peak_load)
      .def("to_json", &serialize_system);
  m.def("load_system", [](const std::string& path) { return load_system(path); }, py::arg("path"));
  m.def("parse_system", &parse_system, py::arg("text"));

  py::class_<RepresentativeSet>(m, "Representatives")
      .def("__len__", &RepresentativeSet::size)
      .def_property_readonly("total_weight", &RepresentativeSet::total_weight)
      .def_property_readonly("load_factor", [](const RepresentativeSet& r) {
        std::vector<double> v;
        for (const auto& h : r.hours) v.push_back(h.load_factor);
        return v;
      })
      .def_property_readonly("wind_factor", [](const RepresentativeSet& r) {
        std::vector<double> v;
        for (const auto& h : r.hours) v.push_back(h.wind_factor);
        return v;
      })
      .def_property_readonly("weight", [](const RepresentativeSet& r) {
        std::vector<double> v;
        for (const auto& h : r.hours) v.push_back(h.weight);
        return v;
      })
      .def_property_readonly("spans", [](const RepresentativeSet& r) {
        std::vector<std::pair<std::size_t, std::size_t>> v;
        for (const auto& h : r.hours) v.push_back({h.start_hour, h.end_hour});
        return v;
      });

  m.def(
      "synthetic_series",
      [](std::size_t hours, unsigned seed) {
        const auto s = synthetic_series(hours, seed);
        return std::make_pair(s.load_factor, s.wind_factor);
      },
      py::arg("hours") = 8760, py::arg("seed") = 7);
  m.def(
      "run_ctpc",
      [](std::vector<double> load, std::vector<double> wind, std::size_t hours, bool normalize) {
        HourlySeries s{std::move(load), std::move(wind)};
        return run_ctpc(s, hours, CtpcOptions{normalize});
      },
      py::arg("load"), py::arg("wind"), py::arg("hours"), py::arg("normalize") = false);
  m.def("load_representatives", [](const std::string& path) { return load_representatives_csv(path); }, py::arg("path"));

  m.def("crf", &crf, py::arg("rate"), py::arg("lifetime_years"));
  m.def(
      "stage_discount",
      [](int stage, double rate, const std::string& kind, int stage_years) {
        if (kind != "investment" && kind != "operation") throw py::value_error("kind must be 'investment' or 'operation'");
        return stage_discount(stage, rate, kind == "investment" ? DiscountKind::investment : DiscountKind::operation, stage_years);
      },
      py::arg("stage"), py::arg("rate"), py::arg("kind"), py::arg("stage_years") = 2);

  m.def(
      "model_shape",
      [](const SystemData& sys, const RepresentativeSet& reps, bool nl, bool w, bool b, bool s, std::optional<double> g,
         std::optional<double> p, bool lit) {
        const MilpModel mm = build_model(sys, reps, model_options(nl, w, b, s, g, p, lit));
        py::dict cols, rows;
        std::map<std::string, std::size_t> c;
        for (const auto& info : mm.vars.columns) ++c[to_string(info.family)];
        for (const auto& [k, v] : c) cols[py::str(k)] = v;
        std::map<std::string, std::size_t> r;
        for (const auto& t : mm.row_tag) ++r[t];
        for (const auto& [k, v] : r) rows[py::str(k)] = v;
        py::dict d;
        d["columns"] = cols;
        d["rows"] = rows;
        d["binaries"] = mm.vars.binary_columns().size();
        return d;
      },
      py::arg("system"), py::arg("reps"), MODEL_ARGS);

  m.def(
      "solve_monolithic",
      [](const SystemData& sys, const RepresentativeSet& reps, bool nl, bool w, bool b, bool s, std::optional<double> g,
         std::optional<double> p, bool lit) {
        const MilpModel mm = build_model(sys, reps, model_options(nl, w, b, s, g, p, lit));
        PlanSolution sol;
        {
          py::gil_scoped_release release;
          sol = solve_monolithic(mm, sys, reps);
        }
        py::dict d;
        d["feasible"] = sol.feasible;
        d["objective"] = sol.objective;
        d["costs"] = costs_dict(sol.costs);
        d["plan"] = sol.feasible ? plan_by_name(mm, PlanDecision::from_solution(mm, sol.x)) : std::map<std::string, double>{};
        return d;
      },
      py::arg("system"), py::arg("reps"), MODEL_ARGS);

  m.def(
      "run_bdd",
      [](const SystemData& sys, const RepresentativeSet& reps, double tau, std::size_t pool_size, bool use_poc, int max_iterations,
         const std::string& security, double threshold, bool nl, bool w, bool b, bool s, std::optional<double> g,
         std::optional<double> p, bool lit) {
        BddOptions o;
        o.tolerance = tau;
        o.pool_size = pool_size;
        o.use_poc = use_poc;
        o.max_iterations = max_iterations;
        o.screening_threshold = threshold;
        if (security == "none") o.security = BddOptions::Security::none;
        else if (security == "full") o.security = BddOptions::Security::full;
        else if (security == "screened") o.security = BddOptions::Security::screened;
        else throw py::value_error("security must be 'none', 'full' or 'screened'");
        const ModelOptions mo = model_options(nl, w, b, s, g, p, lit);
        BddResult r;
        {
          py::gil_scoped_release release;
          r = run_bdd(sys, reps, mo, o);
        }
        const MilpModel mm = build_model(sys, reps, mo);
        py::dict d;
        d["status"] = r.status;
        d["converged"] = r.converged;
        d["lower_bound"] = r.lower_bound;
        d["upper_bound"] = r.upper_bound;
        d["iterations"] = r.iterations;
        d["objective"] = r.plan.objective;
        d["costs"] = costs_dict(r.plan.costs);
        d["plan"] = plan_by_name(mm, r.decision);
        py::list trace;
        for (const auto& t : r.trace) {
          py::dict row;
          row["iter"] = t.iter;
          row["LB"] = t.lb;
          row["UB"] = t.ub;
          row["gap"] = t.gap;
          row["cuts_opt"] = t.cuts_opt;
          row["cuts_feas"] = t.cuts_feas;
          trace.append(row);
        }
        d["trace"] = trace;
        std::vector<std::string> labels;
        for (const auto& sc : r.scenarios) labels.push_back(sc.label(sys));
        d["scenarios"] = labels;
        return d;
      },
      py::arg("system"), py::arg("reps"), py::arg("tau") = 1e-4, py::arg("pool_size") = 5, py::arg("use_poc") = true,
      py::arg("max_iterations") = 200, py::arg("security") = "none", py::arg("threshold") = 0.2, MODEL_ARGS);

  m.def(
      "screen",
      [](const SystemData& sys, const RepresentativeSet& reps, const std::map<std::string, double>& plan, double threshold, bool nl,
         bool w, bool b, bool s, std::optional<double> g, std::optional<double> p, bool lit) {
        const ModelOptions mo = model_options(nl, w, b, s, g, p, lit);
        const MilpModel mm = build_model(sys, reps, mo);
        const ScreeningResult r = screen(sys, reps, mo, plan_from_names(mm, plan), threshold);
        py::list out;
        for (const auto& o : r.outages) {
          py::dict d;
          d["outage"] = o.label;
          d["LI"] = o.li;
          d["LSI"] = o.lsi;
          d["LSI_norm"] = o.lsi_norm;
          d["CS"] = o.cs;
          d["selected"] = o.selected;
          d["screened"] = o.screened;
          out.append(d);
        }
        return out;
      },
      py::arg("system"), py::arg("reps"), py::arg("plan"), py::arg("threshold") = 0.2, MODEL_ARGS);

  m.def(
      "run_plan",
      [](const std::string& system_path, const std::string& output_dir, const std::string& mode, const std::string& scheme,
         std::size_t hours, unsigned seed, bool n1, bool screening, double tau) {
        RunConfig c;
        if (!scheme.empty()) apply_scheme(c, scheme);
        c.system_path = system_path;
        c.output_dir = output_dir;
        c.mode = mode;
        c.hours = hours;
        c.seed = seed;
        c.n1 = c.n1 || n1;
        c.screening = c.screening || screening;
        c.tau = tau;
        RunOutcome r;
        {
          py::gil_scoped_release release;
          r = run_plan(c);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["message"] = r.message;
        d["output_dir"] = r.output_dir.string();
        d["objective"] = r.report.objective;
        d["status"] = r.report.status;
        return d;
      },
      py::arg("system"), py::arg("output_dir") = "out", py::arg("mode") = "bdd", py::arg("scheme") = "", py::arg("hours") = 4,
      py::arg("seed") = 7, py::arg("n1") = false, py::arg("screening") = false, py::arg("tau") = 1e-4);
}
