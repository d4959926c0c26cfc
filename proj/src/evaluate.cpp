#include <cmath>
#include <set>

#include "coplan/model.hpp"

namespace coplan {

PlanDecision PlanDecision::from_solution(const MilpModel& model, const std::vector<double>& x) {
  PlanDecision d;
  for (int j : model.vars.binary_columns()) d.binaries[j] = std::round(x[static_cast<std::size_t>(j)]);
  return d;
}

CostBreakdown cost_breakdown(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                             const std::vector<double>& x) {
  const auto& v = model.vars;
  const auto& p = sys.policy;
  const auto& b0 = v.blocks.front();
  const auto val = [&](int j) { return j < 0 ? 0.0 : x[static_cast<std::size_t>(j)]; };
  const double rho_sum = reps.total_weight();
  CostBreakdown c;
  for (int t = 0; t < v.T; ++t) {
    const double dI = stage_discount(t + 1, p.interest_rate, DiscountKind::investment, p.stage_years);
    const double dO = stage_discount(t + 1, p.interest_rate, DiscountKind::operation, p.stage_years);
    for (std::size_t k = 0; k < v.cand_slots.size(); ++k) {
      const auto& cl = sys.candidate_lines[v.cand_slots[k].line];
      const double a = dI * crf(p.interest_rate, *p.lifetime_line_years) * val(v.y(t, k));
      c.lines += a * (cl.invest_cost_musd_per_km + cl.row_cost_musd_per_km) * cl.length_km;
      if (cl.is_new_corridor && v.cand_slots[k].circuit == 0) c.substations += a * cl.substation_cost_musd.value_or(0.0);
    }
    for (std::size_t k = 0; k < v.bundle_slots.size(); ++k) {
      const auto& bc = sys.bundling[v.bundle_slots[k].bundle];
      c.bundling += dI * crf(p.interest_rate, *p.lifetime_line_years) * val(v.yb(t, k)) * bc.length_km *
                    bc.options[v.bundle_slots[k].option].cost_musd_per_km;
    }
    for (std::size_t s = 0; s < v.n_storage && !b0.S.empty(); ++s) {
      const auto& st = sys.storage[s];
      c.storage += dI * crf(p.interest_rate, *p.lifetime_storage_years) *
                   (st.energy_cost_usd_per_mwh * val(b0.S[v.tk(t, s, v.n_storage)]) +
                    st.power_cost_usd_per_mw * val(b0.C[v.tk(t, s, v.n_storage)])) /
                   1e6;
    }
    for (std::size_t w = 0; w < v.n_wind && !b0.PW.empty(); ++w)
      c.wind += dI * crf(p.interest_rate, *p.lifetime_wind_years) * sys.wind[w].invest_cost_musd_per_mw *
                val(b0.PW[v.tk(t, w, v.n_wind)]);

    for (int h = 0; h < v.H; ++h) {
      const double rho = reps.hours[static_cast<std::size_t>(h)].weight;
      const double hours = model.options.literal_hours ? 8760.0 * rho / rho_sum : rho;
      const double f = dO * hours / 1e6;
      for (std::size_t g = 0; g < v.n_units; ++g) {
        const auto& u = sys.units[g];
        const std::size_t ix = v.th(t, g, h, v.n_units);
        const double on = u.must_run ? 1.0 : val(v.i(t, g, h));
        double gen = u.segment_costs_usd_per_mwh.front() * u.pmin_mw * on;
        for (std::size_t q = 0; q < u.segments(); ++q)
          gen += u.segment_costs_usd_per_mwh[q] * val(b0.Ps[ix * static_cast<std::size_t>(v.P) + q]);
        c.generation += f * gen;
        c.reserve += f * p.reserve_cost_factor * u.segment_costs_usd_per_mwh.front() * val(b0.R[ix]);
      }
      for (std::size_t s = 0; s < v.n_storage && !b0.Pd.empty(); ++s)
        c.degradation += f * sys.storage[s].degradation_cost_usd_per_mwh * val(b0.Pd[v.th(t, s, h, v.n_storage)]);
      for (std::size_t i = 0; i < v.n_buses; ++i) c.shedding += f * sys.shed_cost(i) * val(b0.LS[v.th(t, i, h, v.n_buses)]);
      for (std::size_t w = 0; w < v.n_wind && !b0.PC.empty(); ++w)
        c.curtailment += f * sys.wind[w].curtail_cost_usd_per_mwh * val(b0.PC[v.th(t, w, h, v.n_wind)]);
    }
  }
  return c;
}

namespace {

lp::LpProblem fixed_problem(const MilpModel& model, const PlanDecision& plan) {
  lp::LpProblem prob = model.problem;
  for (int j : model.vars.binary_columns()) {
    auto it = plan.binaries.find(j);
    if (it == plan.binaries.end()) throw std::invalid_argument("evaluate_plan: plan misses column " + prob.col_name(j));
    prob.set_bounds(j, it->second, it->second);
    prob.set_integer(j, false);
  }
  return prob;
}

std::vector<std::string> cited_tags(const MilpModel& model, const std::vector<double>& farkas) {
  std::set<std::string> tags;
  double ymax = 0.0;
  for (double y : farkas) ymax = std::max(ymax, std::abs(y));
  for (std::size_t i = 0; i < farkas.size(); ++i)
    if (std::abs(farkas[i]) > 1e-9 * std::max(1.0, ymax)) tags.insert(model.row_tag[i]);
  return {tags.begin(), tags.end()};
}

}  // namespace

PlanSolution evaluate_plan(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                           const PlanDecision& plan, const lp::LpOptions& options) {
  const lp::LpProblem prob = fixed_problem(model, plan);
  auto sol = lp::solve_lp(prob, options);
  PlanSolution out;
  out.status = sol.status;
  if (sol.status == lp::Status::optimal) {
    out.feasible = true;
    out.x = std::move(sol.x);
    out.objective = sol.objective;
    out.costs = cost_breakdown(model, sys, reps, out.x);
  } else if (sol.status == lp::Status::infeasible) {
    out.infeasible_tags = cited_tags(model, sol.farkas);
  }
  return out;
}

PlanSolution solve_monolithic(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                              const lp::MilpOptions& options) {
  auto sol = lp::solve_milp(model.problem, options);
  PlanSolution out;
  out.status = sol.status;
  if (sol.status == lp::Status::optimal && !sol.pool.empty()) {
    out.feasible = true;
    out.x = sol.best();
    out.objective = sol.objective();
    out.costs = cost_breakdown(model, sys, reps, out.x);
  }
  return out;
}

}  // namespace coplan
