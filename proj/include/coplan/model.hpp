#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "coplan/ctpc.hpp"
#include "coplan/lp.hpp"
#include "coplan/system_data.hpp"

namespace coplan {

// ---- economics --------------------------------------------------------------

/// Capital recovery factor r(1+r)^LT / ((1+r)^LT - 1). Throws InputError(domain)
/// for r <= 0 or LT < 1.
double crf(double rate, double lifetime_years);

enum class DiscountKind { investment, operation };

/// Present-value factor of a stage: investment costs are booked at the start
/// of stage t, operation costs at its end, each counted for stage_years years.
double stage_discount(int stage, double rate, DiscountKind kind, int stage_years = 2);

/// Load multiplier (1+Lg)^(stage_years*t) of stage t.
double load_growth_factor(const PolicyEconomics& p, int stage);

// ---- scenarios and options ----------------------------------------------------

struct ContingencyScenario {
  enum class Kind { none, existing, candidate };
  Kind kind = Kind::none;
  std::size_t line = 0;  // index into existing_lines or candidate_lines
  int circuit = 0;       // candidate outages: parallel circuit (0-based)

  static ContingencyScenario intact() { return {}; }
  static ContingencyScenario existing_outage(std::size_t l) { return {Kind::existing, l, 0}; }
  static ContingencyScenario candidate_outage(std::size_t l, int c) { return {Kind::candidate, l, c}; }
  std::string label(const SystemData& sys) const;
  bool operator==(const ContingencyScenario&) const = default;
  auto operator<=>(const ContingencyScenario&) const = default;
};

/// Every single-line outage of the secured problem: all existing lines, then
/// every parallel circuit of every candidate.
std::vector<ContingencyScenario> all_outages(const SystemData& sys);

struct ModelOptions {
  bool new_lines = true;
  bool wind = true;
  bool bundling = true;
  bool storage = true;
  // Overrides of gamma / Phi; both zero means load shedding is not allowed.
  std::optional<double> max_hourly_shed;
  std::optional<double> max_annual_shed;
  // Literal operation-cost form: 8760 * rho_h / sum(rho) instead of rho_h.
  bool literal_hours = false;

  double gamma(const PolicyEconomics& p) const { return max_hourly_shed.value_or(p.max_hourly_shed); }
  double phi(const PolicyEconomics& p) const { return max_annual_shed.value_or(p.max_annual_shed); }
};

// ---- variables ------------------------------------------------------------------

enum class Family {
  Y, Yb, I, U,                                  // binaries
  S, C, PW,                                     // capacities
  P, Ps, R, Pd, Pc, E, PC, LS,                  // nonnegative operation
  theta, Pl, Pe                                 // free
};
const char* to_string(Family f);
bool is_binary(Family f);

/// Compact-form class of a family: 'Y', 'S', 'W', 'P' or 'Q'.
char compact_class(Family f);

struct CandidateSlot {
  std::size_t line;  // candidate index
  int circuit;       // 0-based parallel circuit
};
struct BundleSlot {
  std::size_t bundle;  // bundling candidate index
  std::size_t option;  // option index
};

/// Continuous columns of one scenario block; -1 where a column does not exist.
struct BlockVars {
  ContingencyScenario scenario;
  std::vector<int> S, C, PW;                     // [t][k]
  std::vector<int> P, R, Pd, Pc, E, PC, LS;      // [t][k][h]
  std::vector<int> theta, Pe;                    // [t][k][h]
  std::vector<int> Ps;                           // [t][g][h][p]
  std::vector<int> Pl;                           // [t][slot][h]
};

struct ColumnInfo {
  Family family;
  int block = -1;  // -1 for binaries shared by all blocks
  int stage = 0;   // 0-based
  int hour = -1;   // 0-based, -1 for stage-level columns
  int index = 0;   // element index in its family (bus, unit, slot, ...)
};

struct VariableIndex {
  int T = 0, H = 0, P = 0;  // stages, hours, cost segments (max over units)
  std::vector<CandidateSlot> cand_slots;
  std::vector<BundleSlot> bundle_slots;
  std::vector<int> Y;   // [t][cand slot]
  std::vector<int> Yb;  // [t][bundle slot]
  std::vector<int> I;   // [t][g][h], -1 for must-run units
  std::vector<int> U;   // [t][s][h]
  std::vector<BlockVars> blocks;
  std::vector<ColumnInfo> columns;

  std::size_t n_units = 0, n_buses = 0, n_existing = 0, n_wind = 0, n_storage = 0;

  std::size_t th(int t, std::size_t k, int h, std::size_t n) const {
    return (static_cast<std::size_t>(t) * n + k) * static_cast<std::size_t>(H) + static_cast<std::size_t>(h);
  }
  std::size_t tk(int t, std::size_t k, std::size_t n) const { return static_cast<std::size_t>(t) * n + k; }

  int y(int t, std::size_t slot) const { return Y.empty() ? -1 : Y[tk(t, slot, cand_slots.size())]; }
  int yb(int t, std::size_t slot) const { return Yb.empty() ? -1 : Yb[tk(t, slot, bundle_slots.size())]; }
  int i(int t, std::size_t g, int h) const { return I[th(t, g, h, n_units)]; }
  int u(int t, std::size_t s, int h) const { return U.empty() ? -1 : U[th(t, s, h, n_storage)]; }
  int cand_slot(std::size_t line, int circuit) const;

  std::vector<int> binary_columns() const;
  std::size_t count(Family f) const;
};

// ---- model ------------------------------------------------------------------------

/// Full MILP. All inequalities are stored as >= rows; every bound other than
/// a sign restriction is an explicit row. Row tags name the source family
/// ("eq2" .. "eq34").
struct MilpModel {
  lp::LpProblem problem;
  VariableIndex vars;
  std::vector<std::string> row_tag;
  std::vector<int> row_block;
  std::vector<ContingencyScenario> scenarios;  // scenarios[0] carries the costs
  ModelOptions options;

  std::size_t count_rows(const std::string& tag) const;
};

/// Adds the stage-discounted investment and operation cost coefficients of
/// block 0 to the model's columns. Contingency blocks carry no cost.
void build_objective(MilpModel& model, const SystemData& sys, const RepresentativeSet& reps);

/// Adds every constraint row of one scenario block.
void build_constraints(MilpModel& model, const SystemData& sys, const RepresentativeSet& reps, std::size_t block);

/// Declares variables for all scenarios then emits objective and constraints.
/// The first scenario carries the costs; an empty list means intact only.
MilpModel build_model(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& options = {},
                      std::vector<ContingencyScenario> scenarios = {});

// ---- compact form --------------------------------------------------------------------

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Partition of the model into
///   min I_L'Y + I_S'S + I_W'W + O_C'P + constant
///   A Y >= B;  C W + D P + E Q = F (sigma);
///   G1 Y + H1 S + J1 W + K1 P + L1 Q = M (lambda);
///   G2 Y + H2 S + J2 W + K2 P + L2 Q >= N (mu).
struct CompactForm {
  std::vector<int> y_cols, s_cols, w_cols, p_cols, q_cols;  // model columns
  Eigen::VectorXd I_L, I_S, I_W, O_C;
  double constant = 0.0;
  SparseMatrix A;
  Eigen::VectorXd B;
  SparseMatrix C, D, E;
  Eigen::VectorXd F;
  SparseMatrix G1, H1, J1, K1, L1;
  Eigen::VectorXd M;
  SparseMatrix G2, H2, J2, K2, L2;
  Eigen::VectorXd N;
  // Model row of each compact row, and its scenario block.
  std::vector<int> rows36, rows37, rows38, rows39;
  std::vector<int> block37, block38, block39;
  // Scenario block of each S/W/P/Q column.
  std::vector<int> s_block, w_block, p_block, q_block;
  std::size_t n_blocks = 1;
};

/// Throws std::logic_error on an untagged row or a row outside its block.
CompactForm compact_form(const MilpModel& model);

/// Rebuilds the row set of the model from the compact blocks (rows as
/// (tag-less) sorted term lists with sense and rhs) for structural comparison.
struct CanonicalRow {
  std::vector<std::pair<int, double>> terms;  // model column, coefficient
  lp::Sense sense;
  double rhs;
  bool operator<(const CanonicalRow& o) const;
  bool operator==(const CanonicalRow&) const = default;
};
std::vector<CanonicalRow> canonical_rows(const lp::LpProblem& problem);
std::vector<CanonicalRow> canonical_rows(const CompactForm& cf);

// ---- plans -----------------------------------------------------------------------

/// Fixed values of all binary columns, keyed by model column id.
struct PlanDecision {
  std::map<int, double> binaries;
  static PlanDecision from_solution(const MilpModel& model, const std::vector<double>& x);
};

struct CostBreakdown {
  double lines = 0, substations = 0, bundling = 0, storage = 0, wind = 0;
  double generation = 0, reserve = 0, degradation = 0, shedding = 0, curtailment = 0;
  double tic() const { return lines + substations + bundling + storage + wind; }
  double toc() const { return generation + reserve + degradation + shedding + curtailment; }
  double total() const { return tic() + toc(); }
};

/// Independent evaluation of the cost terms of a full column vector from the
/// system data (not from the assembled objective).
CostBreakdown cost_breakdown(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                             const std::vector<double>& x);

struct PlanSolution {
  bool feasible = false;
  lp::Status status = lp::Status::numerical_error;
  std::vector<double> x;
  double objective = 0.0;
  CostBreakdown costs;
  std::vector<std::string> infeasible_tags;  // rows cited by the certificate
};

/// Solves the operation LP with every binary fixed to the plan.
PlanSolution evaluate_plan(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                           const PlanDecision& plan, const lp::LpOptions& options = {});

/// Monolithic solve of the full MILP.
PlanSolution solve_monolithic(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps,
                              const lp::MilpOptions& options = {});

}  // namespace coplan
