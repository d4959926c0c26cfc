// Independent reference computations shared by the unit and acceptance suites.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "coplan/benders.hpp"

namespace oracle {

inline std::string toy_path(const std::string& name) { return std::string(COPLAN_DATA_DIR) + "/toys/" + name + ".json"; }

inline const std::vector<std::string>& toy_suite() {
  static const std::vector<std::string> names{"toy3_radial", "toy4_bundling", "toy4_storage", "toy5_wind", "toy6_mesh", "toy3_commit", "toy3_short"};
  return names;
}

inline coplan::RepresentativeSet toy_hours(std::size_t n = 4, unsigned seed = 7) {
  return coplan::run_ctpc(coplan::synthetic_series(8760, seed), n);
}

// ---- chronological clustering ----------------------------------------------

using Bounds = std::vector<std::pair<std::size_t, std::size_t>>;

/// Plain agglomeration: every step rescans all adjacent pairs and recomputes
/// each Ward distance from the raw points. Returns the partition at every
/// cluster count, indexed by count.
inline std::vector<Bounds> exhaustive_adjacent_merge(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  const std::size_t dim = pts.empty() ? 0 : pts[0].size();
  Bounds cur;
  for (std::size_t h = 0; h < n; ++h) cur.push_back({h, h});
  std::vector<Bounds> by_count(n + 1);
  by_count[n] = cur;
  auto mean = [&](std::pair<std::size_t, std::size_t> c) {
    std::vector<double> m(dim, 0.0);
    for (std::size_t h = c.first; h <= c.second; ++h)
      for (std::size_t d = 0; d < dim; ++d) m[d] += pts[h][d];
    for (auto& v : m) v /= static_cast<double>(c.second - c.first + 1);
    return m;
  };
  while (cur.size() > 1) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t k = 0; k + 1 < cur.size(); ++k) {
      const auto a = mean(cur[k]), b = mean(cur[k + 1]);
      const double na = static_cast<double>(cur[k].second - cur[k].first + 1);
      const double nb = static_cast<double>(cur[k + 1].second - cur[k + 1].first + 1);
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) sq += (a[d] - b[d]) * (a[d] - b[d]);
      const double dist = 2.0 * na * nb / (na + nb) * sq;
      if (dist < best_d) {
        best_d = dist;
        best = k;
      }
    }
    cur[best].second = cur[best + 1].second;
    cur.erase(cur.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    by_count[cur.size()] = cur;
  }
  return by_count;
}

// ---- plans ---------------------------------------------------------------------

/// Every assignment of the binary columns of a model that satisfies the
/// binary-only precedence rows, as a PlanDecision.
inline std::vector<coplan::PlanDecision> precedence_feasible_plans(const coplan::MilpModel& m) {
  const auto bins = m.vars.binary_columns();
  std::vector<coplan::PlanDecision> out;
  const std::size_t n = bins.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<double> x(static_cast<std::size_t>(m.problem.num_cols()), 0.0);
    for (std::size_t k = 0; k < n; ++k) x[static_cast<std::size_t>(bins[k])] = (mask >> k) & 1 ? 1.0 : 0.0;
    bool ok = true;
    for (int i = 0; i < m.problem.num_rows() && ok; ++i) {
      if (m.row_block[static_cast<std::size_t>(i)] != -1) continue;
      if (m.problem.row_activity(i, x) < m.problem.rhs(i) - 1e-9) ok = false;
    }
    if (!ok) continue;
    coplan::PlanDecision d;
    for (int j : bins) d.binaries[j] = x[static_cast<std::size_t>(j)];
    out.push_back(std::move(d));
  }
  return out;
}

/// Full-problem value of a fixed plan (+inf when inoperable), by solving
/// the operation LP of the whole model.
inline double plan_value(const coplan::MilpModel& m, const coplan::SystemData& sys, const coplan::RepresentativeSet& reps,
                         const coplan::PlanDecision& d) {
  const auto s = coplan::evaluate_plan(m, sys, reps, d);
  return s.feasible ? s.objective : INFINITY;
}

/// Structural identities of an operation point of the intact block: monotone
/// build states, storage energy telescoping, and the system-wide balance.
/// Returns an empty string when they hold, else the first failure.
inline std::string operation_identities(const coplan::MilpModel& m, const coplan::SystemData& sys, const coplan::RepresentativeSet& reps,
                                        const std::vector<double>& x, double tol = 1e-6) {
  const auto& v = m.vars;
  const auto& b = v.blocks[0];
  auto X = [&](int j) { return j < 0 ? 0.0 : x[static_cast<std::size_t>(j)]; };
  auto near = [&](double a, double e) { return std::abs(a - e) <= tol * std::max(1.0, std::abs(e)); };
  const std::size_t NW = sys.wind.size(), NS = sys.storage.size();
  for (int t = 1; t < v.T; ++t) {
    for (std::size_t k = 0; k < v.cand_slots.size(); ++k)
      if (X(v.y(t, k)) < X(v.y(t - 1, k)) - tol) return "line build state decreases";
    for (std::size_t k = 0; k < v.bundle_slots.size(); ++k)
      if (X(v.yb(t, k)) < X(v.yb(t - 1, k)) - tol) return "bundling state decreases";
    for (std::size_t w = 0; w < NW && !b.PW.empty(); ++w)
      if (X(b.PW[v.tk(t, w, NW)]) < X(b.PW[v.tk(t - 1, w, NW)]) - tol) return "wind capacity decreases";
    for (std::size_t s = 0; s < NS && !b.S.empty(); ++s)
      if (X(b.S[v.tk(t, s, NS)]) < X(b.S[v.tk(t - 1, s, NS)]) - tol || X(b.C[v.tk(t, s, NS)]) < X(b.C[v.tk(t - 1, s, NS)]) - tol)
        return "storage capacity decreases";
  }
  for (int t = 0; t < v.T; ++t) {
    for (std::size_t s = 0; s < NS && !b.E.empty(); ++s) {
      const auto& st = sys.storage[s];
      double net = 0.0;
      for (int h = 0; h < v.H; ++h) {
        const auto ix = v.th(t, s, h, NS);
        net += reps.hours[static_cast<std::size_t>(h)].weight * (st.eta_charge * X(b.Pc[ix]) - X(b.Pd[ix]) / st.eta_discharge);
        if (!near(X(b.E[ix]), net)) return "storage energy does not telescope";
      }
    }
    const double grow = coplan::load_growth_factor(sys.policy, t + 1);
    for (int h = 0; h < v.H; ++h) {
      const auto& rep = reps.hours[static_cast<std::size_t>(h)];
      double supply = 0.0;
      for (std::size_t g = 0; g < sys.units.size(); ++g) supply += X(b.P[v.th(t, g, h, sys.units.size())]);
      for (std::size_t w = 0; w < NW && !b.PW.empty(); ++w) supply += rep.wind_factor * X(b.PW[v.tk(t, w, NW)]) - X(b.PC[v.th(t, w, h, NW)]);
      for (std::size_t s = 0; s < NS && !b.Pd.empty(); ++s) supply += X(b.Pd[v.th(t, s, h, NS)]) - X(b.Pc[v.th(t, s, h, NS)]);
      for (std::size_t i = 0; i < sys.buses.size(); ++i) supply += X(b.LS[v.th(t, i, h, sys.buses.size())]);
      if (!near(supply, grow * rep.load_factor * sys.total_peak_load())) return "system balance does not hold";
    }
  }
  return {};
}

inline bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

}  // namespace oracle
