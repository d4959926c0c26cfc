#pragma once

#include <map>
#include <string>
#include <vector>

#include "coplan/model.hpp"

namespace coplan {

/// Line flows seen under one outage. Flows are max |flow| over all (t,h).
struct LoadingInput {
  std::vector<double> existing_flow, existing_capacity;
  std::vector<double> existing_psi;  // 1 + sum of uprates of chosen bundling options; empty means all 1
  std::vector<double> new_flow, new_capacity;  // built candidate circuits only
  ContingencyScenario::Kind outage = ContingencyScenario::Kind::existing;
  std::size_t outage_index = 0;  // into the existing or the new list
};

/// Mean squared loading of the surviving existing lines plus that of the
/// surviving built circuits. A term whose line count is zero contributes 0.
double loading_index(const LoadingInput& in);

/// 0.2*LI + 0.8*LSI/max(LSI); the normalized shed is 0 when every LSI is 0.
std::vector<double> cs_index(const std::vector<double>& li, const std::vector<double>& lsi,
                             std::vector<double>* lsi_norm = nullptr);

/// Indices with cs >= threshold_frac * max(cs).
std::vector<std::size_t> select_by_threshold(const std::vector<double>& cs, double threshold_frac);

struct OutageScore {
  ContingencyScenario scenario;
  std::string label;
  double li = 0, lsi = 0, lsi_norm = 0, cs = 0;
  bool selected = false;
  bool screened = true;  // false when the screening LP failed
};

struct ScreeningResult {
  std::vector<OutageScore> outages;
  std::vector<ContingencyScenario> selected;  // starts with the intact case
  double threshold = 0.2;

  /// Columns outage,LI,LSI,LSI_norm,CS,selected.
  std::string to_csv() const;
};

/// Outages worth ranking under a plan: existing lines that are neither
/// bundled nor paralleled by a built circuit, and built candidate circuits.
std::vector<ContingencyScenario> eligible_outages(const SystemData& sys, const VariableIndex& vars, const PlanDecision& plan);

/// Ranks outages of a plan by solving each outage case with load shedding
/// bounded only by the load itself.
class Screener {
 public:
  Screener(const SystemData& sys, const RepresentativeSet& reps, ModelOptions options, lp::LpOptions lp = {});
  ScreeningResult screen(const PlanDecision& plan, double threshold_frac = 0.2);

 private:
  const MilpModel& outage_model(const ContingencyScenario& sc);

  const SystemData& sys_;
  const RepresentativeSet& reps_;
  ModelOptions options_;
  lp::LpOptions lp_;
  std::map<ContingencyScenario, MilpModel> models_;
};

ScreeningResult screen(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& options,
                       const PlanDecision& plan, double threshold_frac = 0.2);

}  // namespace coplan
