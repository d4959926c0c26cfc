#include <algorithm>
#include <cmath>
#include <sstream>

#include "coplan/screening.hpp"

namespace coplan {

double loading_index(const LoadingInput& in) {
  const bool ex_out = in.outage == ContingencyScenario::Kind::existing;
  const bool new_out = in.outage == ContingencyScenario::Kind::candidate;
  auto term = [](const std::vector<double>& flow, const std::vector<double>& cap, const std::vector<double>* psi, bool skip,
                 std::size_t skip_index) {
    if (flow.size() <= (skip ? 1u : 0u)) return 0.0;
    double acc = 0.0;
    for (std::size_t l = 0; l < flow.size(); ++l) {
      if (skip && l == skip_index) continue;
      const double rating = cap[l] * (psi && !psi->empty() ? (*psi)[l] : 1.0);
      if (rating <= 0.0) continue;
      const double r = flow[l] / rating;
      acc += r * r;
    }
    return acc / static_cast<double>(flow.size() - (skip ? 1 : 0));
  };
  return term(in.existing_flow, in.existing_capacity, &in.existing_psi, ex_out, in.outage_index) +
         term(in.new_flow, in.new_capacity, nullptr, new_out, in.outage_index);
}

std::vector<double> cs_index(const std::vector<double>& li, const std::vector<double>& lsi, std::vector<double>* lsi_norm) {
  const double top = lsi.empty() ? 0.0 : *std::max_element(lsi.begin(), lsi.end());
  std::vector<double> cs(li.size()), norm(li.size(), 0.0);
  for (std::size_t k = 0; k < li.size(); ++k) {
    if (top > 0.0) norm[k] = lsi[k] / top;
    cs[k] = 0.2 * li[k] + 0.8 * norm[k];
  }
  if (lsi_norm) *lsi_norm = std::move(norm);
  return cs;
}

std::vector<std::size_t> select_by_threshold(const std::vector<double>& cs, double threshold_frac) {
  std::vector<std::size_t> out;
  if (cs.empty()) return out;
  const double cut = threshold_frac * *std::max_element(cs.begin(), cs.end());
  for (std::size_t k = 0; k < cs.size(); ++k)
    if (cs[k] >= cut) out.push_back(k);
  return out;
}

std::string ScreeningResult::to_csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "outage,LI,LSI,LSI_norm,CS,selected\n";
  for (const auto& o : outages)
    os << o.label << ',' << o.li << ',' << o.lsi << ',' << o.lsi_norm << ',' << o.cs << ',' << (o.selected ? 1 : 0) << '\n';
  return os.str();
}

namespace {

double plan_value(const PlanDecision& plan, int col) {
  if (col < 0) return 0.0;
  auto it = plan.binaries.find(col);
  return it == plan.binaries.end() ? 0.0 : it->second;
}

bool same_corridor(const ExistingLine& e, const CandidateLine& c) {
  return (e.from_bus == c.from_bus && e.to_bus == c.to_bus) || (e.from_bus == c.to_bus && e.to_bus == c.from_bus);
}

double psi_of(const SystemData& sys, const VariableIndex& v, const PlanDecision& plan, std::size_t line) {
  double psi = 1.0;
  for (std::size_t k = 0; k < v.bundle_slots.size(); ++k) {
    const auto& bc = sys.bundling[v.bundle_slots[k].bundle];
    if (sys.existing_line_index(bc.target_line) == line)
      psi += bc.options[v.bundle_slots[k].option].uprate * plan_value(plan, v.yb(v.T - 1, k));
  }
  return psi;
}

bool built(const VariableIndex& v, const PlanDecision& plan, std::size_t slot) { return plan_value(plan, v.y(v.T - 1, slot)) > 0.5; }

}  // namespace

std::vector<ContingencyScenario> eligible_outages(const SystemData& sys, const VariableIndex& v, const PlanDecision& plan) {
  std::vector<ContingencyScenario> out;
  for (std::size_t l = 0; l < sys.existing_lines.size(); ++l) {
    if (psi_of(sys, v, plan, l) > 1.0) continue;
    bool parallel = false;
    for (std::size_t k = 0; k < v.cand_slots.size(); ++k)
      if (built(v, plan, k) && same_corridor(sys.existing_lines[l], sys.candidate_lines[v.cand_slots[k].line])) parallel = true;
    if (!parallel) out.push_back(ContingencyScenario::existing_outage(l));
  }
  for (std::size_t k = 0; k < v.cand_slots.size(); ++k)
    if (built(v, plan, k)) out.push_back(ContingencyScenario::candidate_outage(v.cand_slots[k].line, v.cand_slots[k].circuit));
  return out;
}

Screener::Screener(const SystemData& sys, const RepresentativeSet& reps, ModelOptions options, lp::LpOptions lp)
    : sys_(sys), reps_(reps), options_(std::move(options)), lp_(lp) {
  options_.max_hourly_shed = 1.0;
  options_.max_annual_shed = 1.0;
}

const MilpModel& Screener::outage_model(const ContingencyScenario& sc) {
  auto it = models_.find(sc);
  if (it == models_.end()) it = models_.emplace(sc, build_model(sys_, reps_, options_, {sc})).first;
  return it->second;
}

ScreeningResult Screener::screen(const PlanDecision& plan, double threshold_frac) {
  ScreeningResult res;
  res.threshold = threshold_frac;
  const VariableIndex& v0 = outage_model(ContingencyScenario::intact()).vars;
  const auto outages = eligible_outages(sys_, v0, plan);
  std::vector<double> li, lsi;
  for (const auto& sc : outages) {
    const MilpModel& m = outage_model(sc);
    const auto& v = m.vars;
    const auto& bv = v.blocks.front();
    OutageScore row{sc, sc.label(sys_)};
    const PlanSolution sol = evaluate_plan(m, sys_, reps_, plan, lp_);
    if (!sol.feasible) {
      row.screened = false;
    } else {
      const auto val = [&](int j) { return j < 0 ? 0.0 : sol.x[static_cast<std::size_t>(j)]; };
      LoadingInput in;
      in.outage = sc.kind;
      for (std::size_t l = 0; l < v.n_existing; ++l) {
        double f = 0.0;
        for (int t = 0; t < v.T; ++t)
          for (int h = 0; h < v.H; ++h) f = std::max(f, std::abs(val(bv.Pe[v.th(t, l, h, v.n_existing)])));
        in.existing_flow.push_back(f);
        in.existing_capacity.push_back(sys_.existing_lines[l].capacity_mw);
        in.existing_psi.push_back(psi_of(sys_, v, plan, l));
      }
      if (sc.kind == ContingencyScenario::Kind::existing) in.outage_index = sc.line;
      for (std::size_t k = 0; k < v.cand_slots.size(); ++k) {
        if (!built(v, plan, k)) continue;
        if (sc.kind == ContingencyScenario::Kind::candidate && v.cand_slots[k].line == sc.line && v.cand_slots[k].circuit == sc.circuit)
          in.outage_index = in.new_flow.size();
        double f = 0.0;
        for (int t = 0; t < v.T; ++t)
          for (int h = 0; h < v.H; ++h) f = std::max(f, std::abs(val(bv.Pl[v.th(t, k, h, v.cand_slots.size())])));
        in.new_flow.push_back(f);
        in.new_capacity.push_back(sys_.candidate_lines[v.cand_slots[k].line].capacity_mw);
      }
      row.li = loading_index(in);
      for (int j : bv.LS) row.lsi += val(j);
    }
    li.push_back(row.li);
    lsi.push_back(row.lsi);
    res.outages.push_back(std::move(row));
  }
  std::vector<double> norm;
  const auto cs = cs_index(li, lsi, &norm);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    res.outages[k].cs = cs[k];
    res.outages[k].lsi_norm = norm[k];
  }
  for (std::size_t k : select_by_threshold(cs, threshold_frac)) res.outages[k].selected = true;
  res.selected.push_back(ContingencyScenario::intact());
  for (auto& o : res.outages) {
    if (!o.screened) o.selected = true;
    if (o.selected) res.selected.push_back(o.scenario);
  }
  return res;
}

ScreeningResult screen(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& options,
                       const PlanDecision& plan, double threshold_frac) {
  return Screener(sys, reps, options).screen(plan, threshold_frac);
}

}  // namespace coplan
