#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace coplan::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };
enum class ObjectiveSense { minimize, maximize };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_error };

const char* to_string(Status s);

struct Term {
  int col;
  double coef;
};

/// Sparse linear program: rows are stored in compressed form, columns carry
/// bounds, objective coefficients and an integrality flag.
class LpProblem {
 public:
  ObjectiveSense objective_sense = ObjectiveSense::minimize;
  double objective_offset = 0.0;

  int add_column(std::string name, double lo, double hi, double cost, bool integer = false);
  int add_row(std::string name, const std::vector<Term>& terms, Sense sense, double rhs);

  int num_cols() const { return static_cast<int>(cost_.size()); }
  int num_rows() const { return static_cast<int>(rhs_.size()); }

  double cost(int j) const { return cost_[static_cast<std::size_t>(j)]; }
  double col_lo(int j) const { return lo_[static_cast<std::size_t>(j)]; }
  double col_hi(int j) const { return hi_[static_cast<std::size_t>(j)]; }
  bool is_integer(int j) const { return integer_[static_cast<std::size_t>(j)]; }
  const std::string& col_name(int j) const { return col_names_[static_cast<std::size_t>(j)]; }

  Sense sense(int i) const { return sense_[static_cast<std::size_t>(i)]; }
  double rhs(int i) const { return rhs_[static_cast<std::size_t>(i)]; }
  const std::string& row_name(int i) const { return row_names_[static_cast<std::size_t>(i)]; }
  /// Terms of row i as a half-open range into terms().
  std::pair<std::size_t, std::size_t> row_range(int i) const {
    return {row_start_[static_cast<std::size_t>(i)], row_start_[static_cast<std::size_t>(i) + 1]};
  }
  const std::vector<Term>& terms() const { return terms_; }

  void set_cost(int j, double c) { cost_[static_cast<std::size_t>(j)] = c; }
  void set_bounds(int j, double lo, double hi);
  void set_rhs(int i, double rhs) { rhs_[static_cast<std::size_t>(i)] = rhs; }
  void set_integer(int j, bool integer) { integer_[static_cast<std::size_t>(j)] = integer; }

  double row_activity(int i, const std::vector<double>& x) const;
  double objective_value(const std::vector<double>& x) const;
  /// Largest bound or row violation of x (integrality not included).
  double max_violation(const std::vector<double>& x) const;
  bool has_integers() const;

 private:
  std::vector<double> cost_, lo_, hi_;
  std::vector<bool> integer_;
  std::vector<std::string> col_names_;
  std::vector<Sense> sense_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
  std::vector<std::size_t> row_start_{0};
  std::vector<Term> terms_;
};

/// Basis snapshot used to warm-start a later solve on a problem with the same
/// shape (columns first, then one logical per row).
struct Basis {
  enum class VarStatus : unsigned char { basic, at_lower, at_upper, free_zero };
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  int iteration_limit = 200000;
  int refactor_interval = 64;
  bool scale = true;
};

struct LpSolution {
  Status status = Status::numerical_error;
  double objective = 0.0;
  std::vector<double> x;
  /// Row duals: for a minimization, >= rows carry nonnegative and <= rows
  /// nonpositive duals; equality duals are sign-free. Signs flip for a
  /// maximization so that duals always measure d(objective)/d(rhs).
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  /// status == unbounded: a direction d with A d respecting every row sense,
  /// d within the column recession cone, and cost.d improving.
  std::vector<double> ray;
  /// status == infeasible: y with sup over the box of y^T(Ax) < inf of y^T b
  /// over the row ranges (see verify_farkas).
  std::vector<double> farkas;
  Basis basis;
  int iterations = 0;
  std::string diagnostic;
};

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {}, const Basis* warm_start = nullptr);

/// Checks an infeasibility certificate: returns the margin by which it proves
/// infeasibility (positive means valid).
double farkas_margin(const LpProblem& problem, const std::vector<double>& y);

struct MilpOptions {
  LpOptions lp;
  double relative_gap = 1e-6;
  double integrality_tol = 1e-6;
  int node_limit = 200000;
  std::size_t pool_size = 1;
};

struct MilpSolution {
  Status status = Status::numerical_error;
  /// Distinct incumbents ordered by objective; pool[0] is the best found.
  std::vector<std::vector<double>> pool;
  std::vector<double> pool_objectives;
  double best_bound = 0.0;
  int nodes = 0;
  bool limit_reached = false;

  const std::vector<double>& best() const { return pool.front(); }
  double objective() const { return pool_objectives.front(); }
};

/// Best-bound branch and bound on most-fractional variables. With pool_size
/// > 1, further solutions are obtained by excluding earlier ones with no-good
/// cuts over the binary columns, so the pool holds the k best distinct binary
/// assignments.
MilpSolution solve_milp(const LpProblem& problem, const MilpOptions& options = {});

/// Writes the problem in CPLEX LP text format. Names are sanitized.
std::string to_lp_format(const LpProblem& problem);
LpProblem parse_lp_format(const std::string& text);

struct LpNames {
  std::vector<std::string> cols, rows;
};
/// The sanitized, de-duplicated names used by to_lp_format.
LpNames lp_format_names(const LpProblem& problem);

/// Solution file of the file-handoff contract, one record per line:
///   status <optimal|infeasible|unbounded|...>
///   objective <value>
///   x <column name> <value>
///   dual <row name> <value>
/// Names are those of lp_format_names; unknown names are an error.
std::string to_solution_text(const LpProblem& problem, const LpSolution& solution);
LpSolution parse_solution_text(const LpProblem& problem, const std::string& text);

/// Hands the problem to an external engine: writes <work_dir>/model.lp, runs
/// `command` with "{lp}" and "{sol}" replaced by the file paths, then reads
/// the solution file. Throws std::runtime_error when the command fails or
/// leaves no readable solution.
struct ExternalSolver {
  std::string command;
  std::string work_dir;  // empty: system temp directory
};
LpSolution solve_lp_external(const LpProblem& problem, const ExternalSolver& solver);

}  // namespace coplan::lp
