#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

#include "coplan/lp.hpp"

namespace coplan::lp {

namespace {

struct Node {
  double bound;
  long id;
  std::vector<double> lo, hi;  // integer columns only, in int_cols order
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

struct SingleResult {
  Status status = Status::infeasible;
  std::vector<double> x;
  double objective = kInf;  // in minimization sense
  double bound = -kInf;
  int nodes = 0;
  bool limit = false;
};

// Branch and bound in minimization sense (sign flips objectives of maximize problems).
SingleResult branch_and_bound(const LpProblem& problem, const MilpOptions& opt, int node_budget) {
  const double sign = problem.objective_sense == ObjectiveSense::maximize ? -1.0 : 1.0;
  std::vector<int> int_cols;
  for (int j = 0; j < problem.num_cols(); ++j)
    if (problem.is_integer(j)) int_cols.push_back(j);

  LpProblem work = problem;
  SingleResult res;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  Node root{-kInf, 0, {}, {}, nullptr};
  for (int j : int_cols) {
    root.lo.push_back(std::ceil(problem.col_lo(j) - opt.integrality_tol));
    root.hi.push_back(std::floor(problem.col_hi(j) + opt.integrality_tol));
  }
  open.push(std::move(root));
  long next_id = 1;

  auto prune_level = [&]() {
    if (!std::isfinite(res.objective)) return kInf;
    return res.objective - std::max(1e-9, opt.relative_gap * std::abs(res.objective));
  };

  while (!open.empty()) {
    if (res.nodes >= node_budget) {
      res.limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= prune_level()) continue;
    ++res.nodes;

    bool empty_box = false;
    for (std::size_t k = 0; k < int_cols.size(); ++k) {
      if (node.lo[k] > node.hi[k]) empty_box = true;
    }
    if (empty_box) continue;
    for (std::size_t k = 0; k < int_cols.size(); ++k) work.set_bounds(int_cols[k], node.lo[k], node.hi[k]);

    LpSolution lp = solve_lp(work, opt.lp, node.basis.get());
    if (lp.status == Status::numerical_error || lp.status == Status::iteration_limit) {
      LpOptions strict = opt.lp;
      strict.scale = !strict.scale;
      lp = solve_lp(work, strict, nullptr);
    }
    if (lp.status == Status::infeasible) continue;
    if (lp.status == Status::unbounded) {
      if (int_cols.empty() || res.nodes == 1) {
        res.status = Status::unbounded;
        return res;
      }
      continue;
    }
    if (lp.status != Status::optimal) {
      res.status = lp.status;
      return res;
    }
    const double value = sign * lp.objective;
    if (value >= prune_level()) continue;

    int branch = -1;
    double most = opt.integrality_tol;
    for (std::size_t k = 0; k < int_cols.size(); ++k) {
      const double v = lp.x[static_cast<std::size_t>(int_cols[k])];
      const double frac = std::abs(v - std::round(v));
      if (frac > most + 1e-12) {
        most = frac;
        branch = static_cast<int>(k);
      }
    }
    if (branch < 0) {
      for (int j : int_cols) lp.x[static_cast<std::size_t>(j)] = std::round(lp.x[static_cast<std::size_t>(j)]);
      res.x = std::move(lp.x);
      res.objective = sign * problem.objective_value(res.x);
      res.status = Status::optimal;
      continue;
    }

    auto basis = std::make_shared<const Basis>(std::move(lp.basis));
    const double v = lp.x[static_cast<std::size_t>(int_cols[static_cast<std::size_t>(branch)])];
    Node down{value, next_id++, node.lo, node.hi, basis};
    down.hi[static_cast<std::size_t>(branch)] = std::floor(v);
    Node up{value, next_id++, std::move(node.lo), std::move(node.hi), basis};
    up.lo[static_cast<std::size_t>(branch)] = std::ceil(v);
    open.push(std::move(down));
    open.push(std::move(up));
  }

  double bound = res.objective;
  if (res.limit) {
    while (!open.empty()) {
      bound = std::min(bound, open.top().bound);
      open.pop();
    }
  }
  res.bound = bound;
  if (res.status != Status::optimal && res.limit) res.status = Status::iteration_limit;
  return res;
}

}  // namespace

MilpSolution solve_milp(const LpProblem& problem, const MilpOptions& options) {
  const double sign = problem.objective_sense == ObjectiveSense::maximize ? -1.0 : 1.0;
  MilpSolution out;
  std::vector<int> binaries;
  for (int j = 0; j < problem.num_cols(); ++j)
    if (problem.is_integer(j) && problem.col_lo(j) >= 0.0 && problem.col_hi(j) <= 1.0) binaries.push_back(j);

  LpProblem work = problem;
  int budget = options.node_limit;
  for (std::size_t k = 0; k < std::max<std::size_t>(1, options.pool_size); ++k) {
    SingleResult r = branch_and_bound(work, options, budget);
    out.nodes += r.nodes;
    budget -= r.nodes;
    if (k == 0) {
      out.status = r.status;
      out.best_bound = sign * r.bound;
      out.limit_reached = r.limit;
    }
    if (r.status != Status::optimal) break;
    out.pool.push_back(r.x);
    out.pool_objectives.push_back(problem.objective_value(r.x));
    if (binaries.empty() || budget <= 0) break;
    // Exclude this binary assignment and look for the next best one.
    std::vector<Term> terms;
    double rhs = 1.0;
    for (int j : binaries) {
      if (r.x[static_cast<std::size_t>(j)] > 0.5) {
        terms.push_back({j, -1.0});
        rhs -= 1.0;
      } else {
        terms.push_back({j, 1.0});
      }
    }
    work.add_row("nogood" + std::to_string(k), terms, Sense::ge, rhs);
  }
  return out;
}

}  // namespace coplan::lp
