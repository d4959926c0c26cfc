#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "coplan/model.hpp"
#include "coplan/screening.hpp"

namespace coplan {

/// Affine function of the binaries, constant + coef'Y.
///   optimality:  Z >= constant + coef'Y
///   feasibility: constant + coef'Y <= 0
struct Cut {
  enum class Kind { optimality, feasibility };
  Kind kind = Kind::optimality;
  Eigen::VectorXd coef;
  double constant = 0.0;
  std::size_t block = 0;
  int iteration = 0;
  int pool_member = 0;
  std::vector<double> generator;  // the binaries that produced the cut
  double generator_value = 0.0;   // sub-problem value (optimality) or ray value (feasibility)

  double eval(const std::vector<double>& y) const;
  /// Amount by which y violates the cut given master value z (optimality cuts).
  double violation(const std::vector<double>& y, double z = 0.0) const;
};

/// Binaries y (ordered as CompactForm::y_cols) plus the value Z, minimized.
class MasterProblem {
 public:
  MasterProblem(Eigen::VectorXd investment_cost, const SparseMatrix& A, const Eigen::VectorXd& B, double constant = 0.0,
                std::vector<std::string> names = {});
  explicit MasterProblem(const CompactForm& cf, const lp::LpProblem* names_from = nullptr);

  void add_cut(const Cut& cut);
  std::size_t num_cuts() const { return cuts_; }
  std::size_t num_binaries() const { return n_; }

  struct Result {
    lp::Status status = lp::Status::numerical_error;
    double lower_bound = 0.0;
    std::vector<std::vector<double>> pool;  // pool[0] optimal
    std::vector<double> values;            // Z of each pool member
  };
  Result solve(std::size_t pool_size = 1, const lp::MilpOptions& options = {}) const;
  const lp::LpProblem& problem() const { return prob_; }

 private:
  lp::LpProblem prob_;
  std::size_t n_ = 0;
  std::size_t cuts_ = 0;
};

/// Dual multipliers of one scenario block: sigma on the balance rows, lambda
/// on the other equalities, mu >= 0 on the inequalities, pi on the copies of
/// the binaries. Vectors are in the block's local row order.
struct DualSolution {
  lp::Status status = lp::Status::numerical_error;
  double objective = 0.0;
  Eigen::VectorXd sigma, lambda, mu, pi;
  int iterations = 0;
};

struct AuditRecord {
  int iteration = 0;
  std::size_t block = 0;
  double dual = 0.0;
  double primal = 0.0;
  bool ok = false;
};

/// Per-block sub-problems of a compact form.
class Decomposition {
 public:
  explicit Decomposition(const MilpModel& model, lp::LpOptions lp = {});

  const MilpModel& model() const { return model_; }
  const CompactForm& compact() const { return cf_; }
  std::size_t num_binaries() const { return cf_.y_cols.size(); }
  std::size_t num_blocks() const { return blocks_.size(); }

  /// Binaries of a plan in y_cols order, and back.
  std::vector<double> binaries_of(const PlanDecision& plan) const;
  PlanDecision plan_of(const std::vector<double>& y) const;

  /// Operation LP of one block with the binaries fixed.
  lp::LpProblem primal(std::size_t block, const std::vector<double>& y) const;
  lp::LpSolution solve_primal(std::size_t block, const std::vector<double>& y) const;

  DualSolution solve_dsp(std::size_t block, const std::vector<double>& y);
  /// Homogeneous dual with the box |sigma|,|lambda|,|pi| <= 1, 0 <= mu <= 1.
  DualSolution solve_mdsp(std::size_t block, const std::vector<double>& y);
  /// Among dual optima of value z at y, the one best at the core point.
  DualSolution solve_ndsp(std::size_t block, const std::vector<double>& core, const std::vector<double>& y, double z);

  /// F'sigma + M'lambda + N'mu of the block.
  double dual_constant(std::size_t block, const DualSolution& d) const;
  /// Largest pi compatible with (lambda, mu): -(G1'lambda + G2'mu).
  Eigen::VectorXd lifted_pi(std::size_t block, const DualSolution& d) const;

  Cut optimality_cut(std::size_t block, const DualSolution& d) const;
  Cut feasibility_cut(std::size_t block, const DualSolution& d) const;

  /// The dual LP itself (maximization) for inspection.
  const lp::LpProblem& dsp_problem(std::size_t block);

 private:
  struct Block {
    std::vector<int> s, w, p, q;     // local indices into the compact column lists
    std::vector<int> r37, r38, r39;  // local compact row indices
    std::optional<lp::LpProblem> dsp, mdsp;
    lp::Basis dsp_basis, mdsp_basis;
  };
  lp::LpProblem build_dual(std::size_t block, bool homogeneous) const;
  DualSolution unpack(std::size_t block, const lp::LpSolution& sol) const;
  void set_pi_costs(lp::LpProblem& prob, std::size_t block, const std::vector<double>& y) const;

  const MilpModel& model_;
  CompactForm cf_;
  lp::LpOptions lp_;
  std::vector<Block> blocks_;
};

struct BddOptions {
  enum class Security { none, full, screened };
  double tolerance = 1e-4;
  std::size_t pool_size = 5;
  bool use_poc = true;
  double core_init = 0.5;
  int max_iterations = 200;
  Security security = Security::none;
  double screening_threshold = 0.2;
  bool screen_once = false;
  bool audit = true;
  lp::LpOptions lp;
  int master_node_limit = 200000;
};

struct TraceRow {
  int iter = 0;
  double lb = 0.0, ub = 0.0, gap = 0.0;
  std::size_t cuts_opt = 0, cuts_feas = 0;
  double seconds = 0.0;
};

struct BddResult {
  bool converged = false;
  std::string status;  // "converged" | "iteration_limit" | "infeasible" | "failed"
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  int iterations = 0;
  PlanDecision decision;
  PlanSolution plan;  // intact-case operation under the best decision
  std::vector<TraceRow> trace;
  std::vector<Cut> cuts;
  std::vector<AuditRecord> audit;
  std::vector<ContingencyScenario> scenarios;  // scenarios active at the end
  std::vector<ScreeningResult> screenings;

  /// Columns iter,LB,UB,gap,cuts_opt,cuts_feas,seconds.
  std::string trace_csv() const;
};

/// Benders dual decomposition. With security != none the plan is required
/// to stay operable under every single-line outage; outages enter the
/// sub-problem set either all at once (full) or as screening and
/// verification select them (screened).
BddResult run_bdd(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& model_options = {},
                  const BddOptions& options = {});

/// The scenario list of the secure problem used by run_bdd and the
/// monolithic oracle.
std::vector<ContingencyScenario> secure_scenarios(const SystemData& sys, bool secure);

}  // namespace coplan
