#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coplan/model.hpp"

namespace coplan {

using lp::kInf;
using lp::Sense;
using lp::Term;

const char* to_string(Family f) {
  switch (f) {
    case Family::Y: return "Y";
    case Family::Yb: return "Yb";
    case Family::I: return "I";
    case Family::U: return "U";
    case Family::S: return "S";
    case Family::C: return "C";
    case Family::PW: return "PW";
    case Family::P: return "P";
    case Family::Ps: return "Ps";
    case Family::R: return "R";
    case Family::Pd: return "Pd";
    case Family::Pc: return "Pc";
    case Family::E: return "E";
    case Family::PC: return "PC";
    case Family::LS: return "LS";
    case Family::theta: return "theta";
    case Family::Pl: return "Pl";
    case Family::Pe: return "Pe";
  }
  return "?";
}

bool is_binary(Family f) { return f == Family::Y || f == Family::Yb || f == Family::I || f == Family::U; }

char compact_class(Family f) {
  switch (f) {
    case Family::Y:
    case Family::Yb:
    case Family::I:
    case Family::U: return 'Y';
    case Family::S:
    case Family::C: return 'S';
    case Family::PW: return 'W';
    case Family::theta:
    case Family::Pl:
    case Family::Pe: return 'Q';
    default: return 'P';
  }
}

std::string ContingencyScenario::label(const SystemData& sys) const {
  switch (kind) {
    case Kind::none: return "N-0";
    case Kind::existing: return "E" + std::to_string(sys.existing_lines[line].id);
    case Kind::candidate: return "C" + std::to_string(sys.candidate_lines[line].id) + "." + std::to_string(circuit + 1);
  }
  return "?";
}

std::vector<ContingencyScenario> all_outages(const SystemData& sys) {
  std::vector<ContingencyScenario> out;
  for (std::size_t l = 0; l < sys.existing_lines.size(); ++l) out.push_back(ContingencyScenario::existing_outage(l));
  for (std::size_t l = 0; l < sys.candidate_lines.size(); ++l)
    for (int c = 0; c < sys.candidate_lines[l].max_parallel; ++c) out.push_back(ContingencyScenario::candidate_outage(l, c));
  return out;
}

int VariableIndex::cand_slot(std::size_t line, int circuit) const {
  for (std::size_t k = 0; k < cand_slots.size(); ++k)
    if (cand_slots[k].line == line && cand_slots[k].circuit == circuit) return static_cast<int>(k);
  return -1;
}

std::vector<int> VariableIndex::binary_columns() const {
  std::vector<int> out;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (is_binary(columns[j].family)) out.push_back(static_cast<int>(j));
  return out;
}

std::size_t VariableIndex::count(Family f) const {
  return static_cast<std::size_t>(std::count_if(columns.begin(), columns.end(), [f](const ColumnInfo& c) { return c.family == f; }));
}

std::size_t MilpModel::count_rows(const std::string& tag) const {
  return static_cast<std::size_t>(std::count(row_tag.begin(), row_tag.end(), tag));
}

namespace {

constexpr double kUsdToMusd = 1e-6;

std::string key(int t, char a, std::size_t k, int h = -1) {
  std::string s = "[t" + std::to_string(t + 1) + "," + a + std::to_string(k + 1);
  if (h >= 0) s += ",h" + std::to_string(h + 1);
  return s + "]";
}

std::string block_suffix(int block) { return block > 0 ? "@s" + std::to_string(block) : ""; }

class Builder {
 public:
  Builder(MilpModel& m, const SystemData& sys, const RepresentativeSet& reps)
      : m_(m), sys_(sys), reps_(reps), v_(m.vars), T_(v_.T), H_(v_.H) {}

  int add_col(Family f, int block, int t, int h, std::size_t idx, const std::string& name) {
    double lo = 0.0, hi = kInf;
    const bool bin = is_binary(f);
    if (bin) hi = 1.0;
    if (compact_class(f) == 'Q') lo = -kInf;
    const int j = m_.problem.add_column(std::string(to_string(f)) + name + block_suffix(block), lo, hi, 0.0, bin);
    v_.columns.push_back({f, bin ? -1 : block, t, h, static_cast<int>(idx)});
    return j;
  }

  void row(const std::string& tag, const std::string& name, int block, std::vector<Term> terms, Sense s, double rhs) {
    std::erase_if(terms, [](const Term& t) { return t.col < 0; });
    m_.problem.add_row(tag + name + block_suffix(block), terms, s, rhs);
    m_.row_tag.push_back(tag);
    m_.row_block.push_back(block);
  }

  void declare_binaries() {
    const auto& o = m_.options;
    if (o.new_lines)
      for (std::size_t l = 0; l < sys_.candidate_lines.size(); ++l)
        for (int c = 0; c < sys_.candidate_lines[l].max_parallel; ++c) v_.cand_slots.push_back({l, c});
    if (o.bundling)
      for (std::size_t b = 0; b < sys_.bundling.size(); ++b)
        for (std::size_t n = 0; n < sys_.bundling[b].options.size(); ++n) v_.bundle_slots.push_back({b, n});
    for (int t = 0; t < T_; ++t)
      for (std::size_t k = 0; k < v_.cand_slots.size(); ++k)
        v_.Y.push_back(add_col(Family::Y, -1, t, -1, k,
                               "[t" + std::to_string(t + 1) + ",l" + std::to_string(sys_.candidate_lines[v_.cand_slots[k].line].id) +
                                   ",c" + std::to_string(v_.cand_slots[k].circuit + 1) + "]"));
    for (int t = 0; t < T_; ++t)
      for (std::size_t k = 0; k < v_.bundle_slots.size(); ++k) {
        const auto& bs = v_.bundle_slots[k];
        v_.Yb.push_back(add_col(Family::Yb, -1, t, -1, k,
                                "[t" + std::to_string(t + 1) + ",b" + std::to_string(sys_.bundling[bs.bundle].id) + "," +
                                    sys_.bundling[bs.bundle].options[bs.option].name + "]"));
      }
    for (int t = 0; t < T_; ++t)
      for (std::size_t g = 0; g < sys_.units.size(); ++g)
        for (int h = 0; h < H_; ++h)
          v_.I.push_back(sys_.units[g].must_run ? -1 : add_col(Family::I, -1, t, h, g, key(t, 'g', g, h)));
    if (storage())
      for (int t = 0; t < T_; ++t)
        for (std::size_t s = 0; s < sys_.storage.size(); ++s)
          for (int h = 0; h < H_; ++h) v_.U.push_back(add_col(Family::U, -1, t, h, s, key(t, 's', s, h)));
  }

  void declare_block(int b) {
    BlockVars& bv = v_.blocks[static_cast<std::size_t>(b)];
    const auto& sc = bv.scenario;
    auto stage_cols = [&](Family f, std::size_t n, char a, std::vector<int>& out) {
      for (int t = 0; t < T_; ++t)
        for (std::size_t k = 0; k < n; ++k) out.push_back(add_col(f, b, t, -1, k, key(t, a, k)));
    };
    auto hour_cols = [&](Family f, std::size_t n, char a, std::vector<int>& out, auto&& exists) {
      for (int t = 0; t < T_; ++t)
        for (std::size_t k = 0; k < n; ++k)
          for (int h = 0; h < H_; ++h) out.push_back(exists(k) ? add_col(f, b, t, h, k, key(t, a, k, h)) : -1);
    };
    const auto all = [](std::size_t) { return true; };
    if (storage()) {
      stage_cols(Family::S, sys_.storage.size(), 's', bv.S);
      stage_cols(Family::C, sys_.storage.size(), 's', bv.C);
    }
    if (wind()) stage_cols(Family::PW, sys_.wind.size(), 'w', bv.PW);

    const std::size_t G = sys_.units.size();
    hour_cols(Family::P, G, 'g', bv.P, all);
    for (int t = 0; t < T_; ++t)
      for (std::size_t g = 0; g < G; ++g)
        for (int h = 0; h < H_; ++h)
          for (int p = 0; p < v_.P; ++p)
            bv.Ps.push_back(static_cast<std::size_t>(p) < sys_.units[g].segments()
                                ? add_col(Family::Ps, b, t, h, g,
                                          "[t" + std::to_string(t + 1) + ",g" + std::to_string(g + 1) + ",h" +
                                              std::to_string(h + 1) + ",p" + std::to_string(p + 1) + "]")
                                : -1);
    hour_cols(Family::R, G, 'g', bv.R, all);
    if (storage()) {
      hour_cols(Family::Pd, sys_.storage.size(), 's', bv.Pd, all);
      hour_cols(Family::Pc, sys_.storage.size(), 's', bv.Pc, all);
      hour_cols(Family::E, sys_.storage.size(), 's', bv.E, all);
    }
    if (wind()) hour_cols(Family::PC, sys_.wind.size(), 'w', bv.PC, all);
    hour_cols(Family::LS, sys_.buses.size(), 'b', bv.LS, all);
    hour_cols(Family::theta, sys_.buses.size(), 'b', bv.theta, all);
    hour_cols(Family::Pe, sys_.existing_lines.size(), 'l', bv.Pe, [&](std::size_t l) {
      return !(sc.kind == ContingencyScenario::Kind::existing && sc.line == l);
    });
    hour_cols(Family::Pl, v_.cand_slots.size(), 'k', bv.Pl, [&](std::size_t k) {
      const auto& slot = v_.cand_slots[k];
      return !(sc.kind == ContingencyScenario::Kind::candidate && sc.line == slot.line && sc.circuit == slot.circuit);
    });
  }

  bool storage() const { return m_.options.storage && !sys_.storage.empty(); }
  bool wind() const { return m_.options.wind && !sys_.wind.empty(); }

  double op_weight(int h) const {
    const double rho = reps_.hours[static_cast<std::size_t>(h)].weight;
    if (!m_.options.literal_hours) return rho;
    return 8760.0 * rho / reps_.total_weight();
  }

  double line_crf() const {
    const auto& p = sys_.policy;
    if (!p.lifetime_line_years) throw InputError(InputError::Kind::domain, "policy.lifetime_line_years is required for line and bundling candidates");
    return crf(p.interest_rate, *p.lifetime_line_years);
  }

  void objective() {
    auto& prob = m_.problem;
    const auto& p = sys_.policy;
    const auto& b0 = v_.blocks.front();
    const bool lines = !v_.cand_slots.empty() || !v_.bundle_slots.empty();
    const double a_line = lines ? line_crf() : 0.0;
    double a_es = 0.0, a_w = 0.0;
    if (storage()) {
      if (!p.lifetime_storage_years) throw InputError(InputError::Kind::domain, "policy.lifetime_storage_years is required for storage candidates");
      a_es = crf(p.interest_rate, *p.lifetime_storage_years);
    }
    if (wind()) {
      if (!p.lifetime_wind_years) throw InputError(InputError::Kind::domain, "policy.lifetime_wind_years is required for wind candidates");
      a_w = crf(p.interest_rate, *p.lifetime_wind_years);
    }
    prob.objective_offset = 0.0;
    for (int t = 0; t < T_; ++t) {
      const double dI = stage_discount(t + 1, p.interest_rate, DiscountKind::investment, p.stage_years);
      const double dO = stage_discount(t + 1, p.interest_rate, DiscountKind::operation, p.stage_years);
      for (std::size_t k = 0; k < v_.cand_slots.size(); ++k) {
        const auto& c = sys_.candidate_lines[v_.cand_slots[k].line];
        double cost = (c.invest_cost_musd_per_km + c.row_cost_musd_per_km) * c.length_km;
        if (c.is_new_corridor && v_.cand_slots[k].circuit == 0) cost += c.substation_cost_musd.value_or(0.0);
        prob.set_cost(v_.y(t, k), dI * a_line * cost);
      }
      for (std::size_t k = 0; k < v_.bundle_slots.size(); ++k) {
        const auto& bs = v_.bundle_slots[k];
        const auto& bc = sys_.bundling[bs.bundle];
        prob.set_cost(v_.yb(t, k), dI * a_line * bc.length_km * bc.options[bs.option].cost_musd_per_km);
      }
      if (storage())
        for (std::size_t s = 0; s < sys_.storage.size(); ++s) {
          prob.set_cost(b0.S[v_.tk(t, s, sys_.storage.size())], dI * a_es * sys_.storage[s].energy_cost_usd_per_mwh * kUsdToMusd);
          prob.set_cost(b0.C[v_.tk(t, s, sys_.storage.size())], dI * a_es * sys_.storage[s].power_cost_usd_per_mw * kUsdToMusd);
        }
      if (wind())
        for (std::size_t w = 0; w < sys_.wind.size(); ++w)
          prob.set_cost(b0.PW[v_.tk(t, w, sys_.wind.size())], dI * a_w * sys_.wind[w].invest_cost_musd_per_mw);

      for (int h = 0; h < H_; ++h) {
        const double f = dO * op_weight(h) * kUsdToMusd;
        for (std::size_t g = 0; g < sys_.units.size(); ++g) {
          const auto& u = sys_.units[g];
          const double cg1 = u.segment_costs_usd_per_mwh.front();
          const std::size_t G = sys_.units.size();
          if (u.must_run) prob.objective_offset += f * cg1 * u.pmin_mw;
          else prob.set_cost(v_.i(t, g, h), f * cg1 * u.pmin_mw);
          prob.set_cost(b0.R[v_.th(t, g, h, G)], f * cg1 * p.reserve_cost_factor);
          for (std::size_t q = 0; q < u.segments(); ++q)
            prob.set_cost(b0.Ps[v_.th(t, g, h, G) * static_cast<std::size_t>(v_.P) + q], f * u.segment_costs_usd_per_mwh[q]);
        }
        if (storage())
          for (std::size_t s = 0; s < sys_.storage.size(); ++s)
            prob.set_cost(b0.Pd[v_.th(t, s, h, sys_.storage.size())], f * sys_.storage[s].degradation_cost_usd_per_mwh);
        for (std::size_t i = 0; i < sys_.buses.size(); ++i)
          prob.set_cost(b0.LS[v_.th(t, i, h, sys_.buses.size())], f * sys_.shed_cost(i));
        if (wind())
          for (std::size_t w = 0; w < sys_.wind.size(); ++w)
            prob.set_cost(b0.PC[v_.th(t, w, h, sys_.wind.size())], f * sys_.wind[w].curtail_cost_usd_per_mwh);
      }
    }
  }

  void binary_rows() {
    // (33) build-state monotonicity and parallel-circuit ordering.
    for (int t = 0; t < T_; ++t)
      for (std::size_t k = 0; k < v_.cand_slots.size(); ++k) {
        const auto& slot = v_.cand_slots[k];
        const std::string nm = "[t" + std::to_string(t + 1) + ",k" + std::to_string(k + 1) + "]";
        if (t > 0) row("eq33", "mono" + nm, -1, {{v_.y(t, k), 1}, {v_.y(t - 1, k), -1}}, Sense::ge, 0);
        const int next = v_.cand_slot(slot.line, slot.circuit + 1);
        if (next >= 0) row("eq33", "order" + nm, -1, {{v_.y(t, k), 1}, {v_.y(t, static_cast<std::size_t>(next)), -1}}, Sense::ge, 0);
      }
    // (30) bundling persistence; one option per bundling candidate.
    for (int t = 0; t < T_; ++t) {
      for (std::size_t k = 0; k < v_.bundle_slots.size(); ++k)
        if (t > 0)
          row("eq30", "mono[t" + std::to_string(t + 1) + ",n" + std::to_string(k + 1) + "]", -1,
              {{v_.yb(t, k), 1}, {v_.yb(t - 1, k), -1}}, Sense::ge, 0);
      if (!v_.bundle_slots.empty())
        for (std::size_t b = 0; b < sys_.bundling.size(); ++b) {
          std::vector<Term> terms;
          for (std::size_t k = 0; k < v_.bundle_slots.size(); ++k)
            if (v_.bundle_slots[k].bundle == b) terms.push_back({v_.yb(t, k), -1});
          row("eq30", "one" + key(t, 'b', b), -1, terms, Sense::ge, -1);
        }
    }
  }

  void block_rows(int b) {
    const BlockVars& bv = v_.blocks[static_cast<std::size_t>(b)];
    const auto& p = sys_.policy;
    const std::size_t G = sys_.units.size(), NB = sys_.buses.size(), NS = sys_.storage.size(), NW = sys_.wind.size();
    const std::size_t NE = sys_.existing_lines.size(), NK = v_.cand_slots.size();
    const double gamma = m_.options.gamma(p), phi = m_.options.phi(p);
    const double peak = sys_.total_peak_load();
    const double theta_max = p.theta_max_rad;

    for (int t = 0; t < T_; ++t) {
      const double grow = load_growth_factor(p, t + 1);
      // Stage-level rows.
      if (wind()) {
        std::vector<Term> total;
        for (std::size_t w = 0; w < NW; ++w) {
          const int pw = bv.PW[v_.tk(t, w, NW)];
          row("eq6", key(t, 'w', w), b, {{pw, -1}}, Sense::ge, -sys_.wind[w].max_capacity_mw);
          if (t > 0) row("eq8", key(t, 'w', w), b, {{pw, 1}, {bv.PW[v_.tk(t - 1, w, NW)], -1}}, Sense::ge, 0);
          total.push_back({pw, 1});
        }
        row("eq7", "[t" + std::to_string(t + 1) + "]", b, total, Sense::ge, p.rps_share * (t + 1) / T_ * grow * peak);
      }
      if (storage())
        for (std::size_t s = 0; s < NS; ++s) {
          const auto& st = sys_.storage[s];
          const int S = bv.S[v_.tk(t, s, NS)], C = bv.C[v_.tk(t, s, NS)];
          row("eq21", key(t, 's', s), b, {{S, 1}, {C, -st.energy_to_power_h}}, Sense::ge, 0);
          row("eq23", key(t, 's', s), b, {{C, -1}}, Sense::ge, -st.max_power_mw);
          row("eq24", key(t, 's', s), b, {{S, -1}}, Sense::ge, -st.max_energy_mwh);
          if (t > 0) {
            row("eq25", key(t, 's', s), b, {{S, 1}, {bv.S[v_.tk(t - 1, s, NS)], -1}}, Sense::ge, 0);
            row("eq26", key(t, 's', s), b, {{C, 1}, {bv.C[v_.tk(t - 1, s, NS)], -1}}, Sense::ge, 0);
          }
        }

      std::vector<Term> curtail_sum, shed_sum;
      double annual_load = 0.0;
      for (int h = 0; h < H_; ++h) {
        const auto& rep = reps_.hours[static_cast<std::size_t>(h)];
        const double lf = rep.load_factor, wf = rep.wind_factor, rho = rep.weight;
        annual_load += rho * lf * peak;

        for (std::size_t g = 0; g < G; ++g) {
          const auto& u = sys_.units[g];
          const std::size_t ix = v_.th(t, g, h, G);
          const int P = bv.P[ix], R = bv.R[ix];
          const int I = v_.i(t, g, h);
          const std::string nm = key(t, 'g', g, h);
          // A must-run unit has I == 1 folded into the right-hand sides.
          const double one = u.must_run ? 1.0 : 0.0;
          row("eq2", "lo" + nm, b, {{P, 1}, {I, -u.pmin_mw}}, Sense::ge, one * u.pmin_mw);
          row("eq2", "hi" + nm, b, {{P, -1}, {I, u.pmax_mw}}, Sense::ge, -one * u.pmax_mw);
          std::vector<Term> def{{P, 1}, {I, -u.pmin_mw}};
          const double seg = (u.pmax_mw - u.pmin_mw) / static_cast<double>(u.segments());
          for (std::size_t q = 0; q < u.segments(); ++q) {
            const int ps = bv.Ps[ix * static_cast<std::size_t>(v_.P) + q];
            def.push_back({ps, -1});
            row("eq4", "[t" + std::to_string(t + 1) + ",g" + std::to_string(g + 1) + ",h" + std::to_string(h + 1) + ",p" +
                           std::to_string(q + 1) + "]",
                b, {{ps, -1}, {I, seg}}, Sense::ge, -one * seg);
          }
          row("eq3", nm, b, def, Sense::eq, one * u.pmin_mw);
          if (h > 0) {
            const int prev = bv.P[v_.th(t, g, h - 1, G)];
            row("eq5", "up" + nm, b, {{P, -1}, {prev, 1}}, Sense::ge, -u.ramp_up_mw);
            row("eq5", "dn" + nm, b, {{P, 1}, {prev, -1}}, Sense::ge, -u.ramp_down_mw);
          }
          row("eq13", nm, b, {{P, 1}, {R, -1}}, Sense::ge, 0);
          row("eq14", nm, b, {{P, -1}, {R, -1}}, Sense::ge, -u.pmax_mw);
        }

        std::vector<Term> reserve;
        for (std::size_t g = 0; g < G; ++g) reserve.push_back({bv.R[v_.th(t, g, h, G)], 1});
        if (wind()) {
          for (std::size_t w = 0; w < NW; ++w) {
            const int pw = bv.PW[v_.tk(t, w, NW)], pc = bv.PC[v_.th(t, w, h, NW)];
            row("eq9", key(t, 'w', w, h), b, {{pw, wf}, {pc, -1}}, Sense::ge, 0);
            curtail_sum.push_back({pc, -rho});
            curtail_sum.push_back({pw, p.max_curtailment * rho * wf});
            reserve.push_back({pw, -p.reserve_wind_share * wf});
          }
        }
        row("eq15", "[t" + std::to_string(t + 1) + ",h" + std::to_string(h + 1) + "]", b, reserve, Sense::ge,
            p.reserve_load_share * grow * lf * peak);

        for (std::size_t i = 0; i < NB; ++i) {
          const int ls = bv.LS[v_.th(t, i, h, NB)];
          row("eq11", key(t, 'b', i, h), b, {{ls, -1}}, Sense::ge, -gamma * grow * lf * sys_.buses[i].peak_load_mw);
          shed_sum.push_back({ls, -rho});
        }

        if (storage())
          for (std::size_t s = 0; s < NS; ++s) {
            const auto& st = sys_.storage[s];
            const std::size_t ix = v_.th(t, s, h, NS);
            const int pd = bv.Pd[ix], pc = bv.Pc[ix], E = bv.E[ix], U = v_.u(t, s, h);
            const int S = bv.S[v_.tk(t, s, NS)], C = bv.C[v_.tk(t, s, NS)];
            const std::string nm = key(t, 's', s, h);
            row("eq16", nm, b, {{C, 1}, {pc, -st.eta_charge}}, Sense::ge, 0);
            row("eq17", nm, b, {{C, 1}, {pd, -1.0 / st.eta_discharge}}, Sense::ge, 0);
            row("eq18", nm, b, {{U, st.max_power_mw}, {pc, -st.eta_charge}}, Sense::ge, 0);
            row("eq19", nm, b, {{U, -st.max_power_mw}, {pd, -1.0 / st.eta_discharge}}, Sense::ge, -st.max_power_mw);
            std::vector<Term> bal{{E, 1}, {pc, -rho * st.eta_charge}, {pd, rho / st.eta_discharge}};
            if (h > 0) bal.push_back({bv.E[v_.th(t, s, h - 1, NS)], -1});
            row("eq20", nm, b, bal, Sense::eq, 0);
            row("eq22", nm, b, {{S, 1}, {E, -1}}, Sense::ge, 0);
          }

        // Network.
        for (std::size_t i = 0; i < NB; ++i) {
          const int th = bv.theta[v_.th(t, i, h, NB)];
          row("eq31", "lo" + key(t, 'b', i, h), b, {{th, 1}}, Sense::ge, -theta_max);
          row("eq31", "hi" + key(t, 'b', i, h), b, {{th, -1}}, Sense::ge, -theta_max);
        }
        for (std::size_t l = 0; l < NE; ++l) {
          const int pe = bv.Pe[v_.th(t, l, h, NE)];
          if (pe < 0) continue;
          const auto& line = sys_.existing_lines[l];
          const int f = bv.theta[v_.th(t, sys_.bus_index(line.from_bus), h, NB)];
          const int to = bv.theta[v_.th(t, sys_.bus_index(line.to_bus), h, NB)];
          const double bmw = p.base_mva * line.susceptance_pu;
          const double big_m = bmw * 2.0 * theta_max;
          std::vector<std::pair<int, double>> opts;  // Yb column, uprate
          for (std::size_t k = 0; k < v_.bundle_slots.size(); ++k) {
            const auto& bs = v_.bundle_slots[k];
            if (sys_.existing_line_index(sys_.bundling[bs.bundle].target_line) == l)
              opts.push_back({v_.yb(t, k), sys_.bundling[bs.bundle].options[bs.option].uprate});
          }
          const std::string nm = key(t, 'l', l, h);
          std::vector<Term> lo{{pe, 1}, {f, -bmw}, {to, bmw}}, hi{{pe, -1}, {f, bmw}, {to, -bmw}};
          for (auto [yb, ac] : opts) lo.push_back({yb, big_m}), hi.push_back({yb, big_m});
          row("eq27", "lo" + nm, b, lo, Sense::ge, 0);
          row("eq27", "hi" + nm, b, hi, Sense::ge, 0);
          for (auto [yb, ac] : opts) {
            const double k = (1.0 + ac) * bmw;
            row("eq28", "lo" + nm, b, {{pe, 1}, {f, -k}, {to, k}, {yb, -big_m}}, Sense::ge, -big_m);
            row("eq28", "hi" + nm, b, {{pe, -1}, {f, k}, {to, -k}, {yb, -big_m}}, Sense::ge, -big_m);
          }
          std::vector<Term> cap_lo{{pe, 1}}, cap_hi{{pe, -1}};
          for (auto [yb, ac] : opts) cap_lo.push_back({yb, line.capacity_mw * ac}), cap_hi.push_back({yb, line.capacity_mw * ac});
          row("eq29", "lo" + nm, b, cap_lo, Sense::ge, -line.capacity_mw);
          row("eq29", "hi" + nm, b, cap_hi, Sense::ge, -line.capacity_mw);
        }
        for (std::size_t k = 0; k < NK; ++k) {
          const int pl = bv.Pl[v_.th(t, k, h, NK)];
          if (pl < 0) continue;
          const auto& c = sys_.candidate_lines[v_.cand_slots[k].line];
          const int f = bv.theta[v_.th(t, sys_.bus_index(c.from_bus), h, NB)];
          const int to = bv.theta[v_.th(t, sys_.bus_index(c.to_bus), h, NB)];
          const int y = v_.y(t, k);
          const double bmw = p.base_mva * c.susceptance_pu;
          const double big_m = bmw * 2.0 * theta_max;
          const std::string nm = key(t, 'k', k, h);
          row("eq31", "lo" + nm, b, {{pl, 1}, {f, -bmw}, {to, bmw}, {y, -big_m}}, Sense::ge, -big_m);
          row("eq31", "hi" + nm, b, {{pl, -1}, {f, bmw}, {to, -bmw}, {y, -big_m}}, Sense::ge, -big_m);
          row("eq32", "lo" + nm, b, {{pl, 1}, {y, c.capacity_mw}}, Sense::ge, 0);
          row("eq32", "hi" + nm, b, {{pl, -1}, {y, c.capacity_mw}}, Sense::ge, 0);
        }

        // (34) nodal balance.
        std::vector<std::vector<Term>> bal(NB);
        for (std::size_t g = 0; g < G; ++g) bal[sys_.bus_index(sys_.units[g].bus)].push_back({bv.P[v_.th(t, g, h, G)], 1});
        if (wind())
          for (std::size_t w = 0; w < NW; ++w) {
            auto& r = bal[sys_.bus_index(sys_.wind[w].bus)];
            r.push_back({bv.PW[v_.tk(t, w, NW)], wf});
            r.push_back({bv.PC[v_.th(t, w, h, NW)], -1});
          }
        if (storage())
          for (std::size_t s = 0; s < NS; ++s) {
            auto& r = bal[sys_.bus_index(sys_.storage[s].bus)];
            r.push_back({bv.Pd[v_.th(t, s, h, NS)], 1});
            r.push_back({bv.Pc[v_.th(t, s, h, NS)], -1});
          }
        for (std::size_t l = 0; l < NE; ++l) {
          const int pe = bv.Pe[v_.th(t, l, h, NE)];
          if (pe < 0) continue;
          bal[sys_.bus_index(sys_.existing_lines[l].from_bus)].push_back({pe, -1});
          bal[sys_.bus_index(sys_.existing_lines[l].to_bus)].push_back({pe, 1});
        }
        for (std::size_t k = 0; k < NK; ++k) {
          const int pl = bv.Pl[v_.th(t, k, h, NK)];
          if (pl < 0) continue;
          const auto& c = sys_.candidate_lines[v_.cand_slots[k].line];
          bal[sys_.bus_index(c.from_bus)].push_back({pl, -1});
          bal[sys_.bus_index(c.to_bus)].push_back({pl, 1});
        }
        for (std::size_t i = 0; i < NB; ++i) {
          bal[i].push_back({bv.LS[v_.th(t, i, h, NB)], 1});
          row("eq34", key(t, 'b', i, h), b, bal[i], Sense::eq, grow * lf * sys_.buses[i].peak_load_mw);
        }
      }
      if (wind()) row("eq10", "[t" + std::to_string(t + 1) + "]", b, curtail_sum, Sense::ge, 0);
      row("eq12", "[t" + std::to_string(t + 1) + "]", b, shed_sum, Sense::ge, -phi * grow * annual_load);
    }
  }

 private:
  MilpModel& m_;
  const SystemData& sys_;
  const RepresentativeSet& reps_;
  VariableIndex& v_;
  int T_, H_;
};

}  // namespace

void build_objective(MilpModel& model, const SystemData& sys, const RepresentativeSet& reps) {
  Builder(model, sys, reps).objective();
}

void build_constraints(MilpModel& model, const SystemData& sys, const RepresentativeSet& reps, std::size_t block) {
  Builder bld(model, sys, reps);
  if (block == 0) bld.binary_rows();
  bld.block_rows(static_cast<int>(block));
}

MilpModel build_model(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& options,
                      std::vector<ContingencyScenario> scenarios) {
  if (reps.hours.empty()) throw InputError(InputError::Kind::domain, "representative set is empty");
  if (scenarios.empty()) scenarios.push_back(ContingencyScenario::intact());
  for (const auto& sc : scenarios) {
    if (sc.kind == ContingencyScenario::Kind::existing && sc.line >= sys.existing_lines.size())
      throw InputError(InputError::Kind::reference, "scenario references an unknown existing line");
    if (sc.kind == ContingencyScenario::Kind::candidate &&
        (sc.line >= sys.candidate_lines.size() || sc.circuit < 0 || sc.circuit >= sys.candidate_lines[sc.line].max_parallel))
      throw InputError(InputError::Kind::reference, "scenario references an unknown candidate circuit");
  }
  MilpModel m;
  m.options = options;
  m.scenarios = scenarios;
  auto& v = m.vars;
  v.T = sys.policy.stages;
  v.H = static_cast<int>(reps.hours.size());
  v.P = 0;
  for (const auto& u : sys.units) v.P = std::max(v.P, static_cast<int>(u.segments()));
  v.n_units = sys.units.size();
  v.n_buses = sys.buses.size();
  v.n_existing = sys.existing_lines.size();
  v.n_wind = sys.wind.size();
  v.n_storage = sys.storage.size();

  Builder bld(m, sys, reps);
  bld.declare_binaries();
  v.blocks.resize(scenarios.size());
  for (std::size_t b = 0; b < scenarios.size(); ++b) {
    v.blocks[b].scenario = scenarios[b];
    bld.declare_block(static_cast<int>(b));
  }
  build_objective(m, sys, reps);
  for (std::size_t b = 0; b < scenarios.size(); ++b) build_constraints(m, sys, reps, b);
  return m;
}

}  // namespace coplan
