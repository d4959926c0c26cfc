#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coplan/benders.hpp"

namespace coplan {

using lp::kInf;
using lp::Sense;
using lp::Status;
using lp::Term;

double Cut::eval(const std::vector<double>& y) const {
  double v = constant;
  for (Eigen::Index j = 0; j < coef.size(); ++j) v += coef[j] * y[static_cast<std::size_t>(j)];
  return v;
}

double Cut::violation(const std::vector<double>& y, double z) const {
  return kind == Kind::optimality ? eval(y) - z : eval(y);
}

// ---- master -------------------------------------------------------------------

MasterProblem::MasterProblem(Eigen::VectorXd investment_cost, const SparseMatrix& A, const Eigen::VectorXd& B, double constant,
                             std::vector<std::string> names)
    : n_(static_cast<std::size_t>(investment_cost.size())) {
  for (std::size_t j = 0; j < n_; ++j)
    prob_.add_column(j < names.size() ? names[j] : "y" + std::to_string(j + 1), 0.0, 1.0, 0.0, true);
  const int z = prob_.add_column("Z", -kInf, kInf, 1.0);
  for (Eigen::Index r = 0; r < A.outerSize(); ++r) {
    std::vector<Term> terms;
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) terms.push_back({static_cast<int>(it.col()), it.value()});
    prob_.add_row("prec" + std::to_string(r + 1), terms, Sense::ge, B[r]);
  }
  std::vector<Term> lb{{z, 1.0}};
  for (std::size_t j = 0; j < n_; ++j) lb.push_back({static_cast<int>(j), -investment_cost[static_cast<Eigen::Index>(j)]});
  prob_.add_row("invest", lb, Sense::ge, constant);
}

namespace {
std::vector<std::string> y_names(const CompactForm& cf, const lp::LpProblem* p) {
  std::vector<std::string> out;
  if (p)
    for (int j : cf.y_cols) out.push_back(p->col_name(j));
  return out;
}
}  // namespace

MasterProblem::MasterProblem(const CompactForm& cf, const lp::LpProblem* names_from)
    : MasterProblem(cf.I_L, cf.A, cf.B, cf.constant, y_names(cf, names_from)) {}

void MasterProblem::add_cut(const Cut& cut) {
  std::vector<Term> terms;
  for (std::size_t j = 0; j < n_; ++j) {
    const double c = cut.coef[static_cast<Eigen::Index>(j)];
    if (c != 0.0) terms.push_back({static_cast<int>(j), -c});
  }
  ++cuts_;
  if (cut.kind == Cut::Kind::optimality) {
    terms.push_back({static_cast<int>(n_), 1.0});
    prob_.add_row("opt" + std::to_string(cuts_), terms, Sense::ge, cut.constant);
  } else {
    prob_.add_row("feas" + std::to_string(cuts_), terms, Sense::ge, cut.constant);
  }
}

MasterProblem::Result MasterProblem::solve(std::size_t pool_size, const lp::MilpOptions& options) const {
  lp::MilpOptions opt = options;
  opt.pool_size = std::max<std::size_t>(1, pool_size);
  const auto sol = lp::solve_milp(prob_, opt);
  Result r;
  r.status = sol.status;
  if (sol.pool.empty()) return r;
  r.status = Status::optimal;
  r.lower_bound = sol.pool_objectives.front();
  for (std::size_t k = 0; k < sol.pool.size(); ++k) {
    r.pool.emplace_back(sol.pool[k].begin(), sol.pool[k].begin() + static_cast<std::ptrdiff_t>(n_));
    r.values.push_back(sol.pool_objectives[k]);
  }
  return r;
}

// ---- sub-problems ---------------------------------------------------------------

Decomposition::Decomposition(const MilpModel& model, lp::LpOptions lp) : model_(model), cf_(compact_form(model)), lp_(lp) {
  blocks_.resize(cf_.n_blocks);
  auto fill_cols = [&](const std::vector<int>& owner, std::vector<int> Block::*field) {
    for (std::size_t j = 0; j < owner.size(); ++j) (blocks_[static_cast<std::size_t>(owner[j])].*field).push_back(static_cast<int>(j));
  };
  fill_cols(cf_.s_block, &Block::s);
  fill_cols(cf_.w_block, &Block::w);
  fill_cols(cf_.p_block, &Block::p);
  fill_cols(cf_.q_block, &Block::q);
  fill_cols(cf_.block37, &Block::r37);
  fill_cols(cf_.block38, &Block::r38);
  fill_cols(cf_.block39, &Block::r39);
}

std::vector<double> Decomposition::binaries_of(const PlanDecision& plan) const {
  std::vector<double> y(cf_.y_cols.size(), 0.0);
  for (std::size_t j = 0; j < y.size(); ++j) {
    auto it = plan.binaries.find(cf_.y_cols[j]);
    if (it != plan.binaries.end()) y[j] = it->second;
  }
  return y;
}

PlanDecision Decomposition::plan_of(const std::vector<double>& y) const {
  PlanDecision d;
  for (std::size_t j = 0; j < y.size(); ++j) d.binaries[cf_.y_cols[j]] = std::round(y[j]);
  return d;
}

namespace {

void row_terms(const SparseMatrix& m, int r, const std::vector<int>& col_map, std::vector<Term>& out) {
  for (SparseMatrix::InnerIterator it(m, r); it; ++it) out.push_back({col_map[static_cast<std::size_t>(it.col())], it.value()});
}

double row_dot(const SparseMatrix& m, int r, const std::vector<double>& y) {
  double v = 0.0;
  for (SparseMatrix::InnerIterator it(m, r); it; ++it) v += it.value() * y[static_cast<std::size_t>(it.col())];
  return v;
}

}  // namespace

lp::LpProblem Decomposition::primal(std::size_t block, const std::vector<double>& y) const {
  const Block& bk = blocks_.at(block);
  const auto& names = model_.problem;
  lp::LpProblem p;
  std::vector<int> smap(cf_.s_cols.size(), -1), wmap(cf_.w_cols.size(), -1), pmap(cf_.p_cols.size(), -1),
      qmap(cf_.q_cols.size(), -1);
  for (int j : bk.s) smap[static_cast<std::size_t>(j)] = p.add_column(names.col_name(cf_.s_cols[static_cast<std::size_t>(j)]), 0, kInf, cf_.I_S[j]);
  for (int j : bk.w) wmap[static_cast<std::size_t>(j)] = p.add_column(names.col_name(cf_.w_cols[static_cast<std::size_t>(j)]), 0, kInf, cf_.I_W[j]);
  for (int j : bk.p) pmap[static_cast<std::size_t>(j)] = p.add_column(names.col_name(cf_.p_cols[static_cast<std::size_t>(j)]), 0, kInf, cf_.O_C[j]);
  for (int j : bk.q) qmap[static_cast<std::size_t>(j)] = p.add_column(names.col_name(cf_.q_cols[static_cast<std::size_t>(j)]), -kInf, kInf, 0.0);
  std::vector<Term> t;
  for (int r : bk.r37) {
    t.clear();
    row_terms(cf_.C, r, wmap, t);
    row_terms(cf_.D, r, pmap, t);
    row_terms(cf_.E, r, qmap, t);
    p.add_row(names.row_name(cf_.rows37[static_cast<std::size_t>(r)]), t, Sense::eq, cf_.F[r]);
  }
  for (int r : bk.r38) {
    t.clear();
    row_terms(cf_.H1, r, smap, t);
    row_terms(cf_.J1, r, wmap, t);
    row_terms(cf_.K1, r, pmap, t);
    row_terms(cf_.L1, r, qmap, t);
    p.add_row(names.row_name(cf_.rows38[static_cast<std::size_t>(r)]), t, Sense::eq, cf_.M[r] - row_dot(cf_.G1, r, y));
  }
  for (int r : bk.r39) {
    t.clear();
    row_terms(cf_.H2, r, smap, t);
    row_terms(cf_.J2, r, wmap, t);
    row_terms(cf_.K2, r, pmap, t);
    row_terms(cf_.L2, r, qmap, t);
    p.add_row(names.row_name(cf_.rows39[static_cast<std::size_t>(r)]), t, Sense::ge, cf_.N[r] - row_dot(cf_.G2, r, y));
  }
  return p;
}

lp::LpSolution Decomposition::solve_primal(std::size_t block, const std::vector<double>& y) const {
  const auto p = primal(block, y);
  auto sol = lp::solve_lp(p, lp_);
  if (sol.status == Status::numerical_error || sol.status == Status::iteration_limit) {
    lp::LpOptions alt = lp_;
    alt.scale = !alt.scale;
    sol = lp::solve_lp(p, alt);
  }
  return sol;
}

lp::LpProblem Decomposition::build_dual(std::size_t block, bool homogeneous) const {
  const Block& bk = blocks_.at(block);
  const std::size_t nY = cf_.y_cols.size();
  lp::LpProblem d;
  d.objective_sense = lp::ObjectiveSense::maximize;
  const double box = homogeneous ? 1.0 : kInf;
  // Dual rows in the order S, W, P, Y, Q.
  std::vector<int> srow(cf_.s_cols.size(), -1), wrow(cf_.w_cols.size(), -1), prow(cf_.p_cols.size(), -1),
      qrow(cf_.q_cols.size(), -1), yrow(nY);
  int n = 0;
  for (int j : bk.s) srow[static_cast<std::size_t>(j)] = n++;
  for (int j : bk.w) wrow[static_cast<std::size_t>(j)] = n++;
  for (int j : bk.p) prow[static_cast<std::size_t>(j)] = n++;
  for (std::size_t j = 0; j < nY; ++j) yrow[j] = n++;
  for (int j : bk.q) qrow[static_cast<std::size_t>(j)] = n++;
  std::vector<std::vector<Term>> rows(static_cast<std::size_t>(n));
  auto scatter = [&](const SparseMatrix& m, int r, const std::vector<int>& map, int col) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) rows[static_cast<std::size_t>(map[static_cast<std::size_t>(it.col())])].push_back({col, it.value()});
  };
  for (int r : bk.r37) {
    const int c = d.add_column("sigma" + std::to_string(r), -box, box, cf_.F[r]);
    scatter(cf_.C, r, wrow, c);
    scatter(cf_.D, r, prow, c);
    scatter(cf_.E, r, qrow, c);
  }
  for (int r : bk.r38) {
    const int c = d.add_column("lambda" + std::to_string(r), -box, box, cf_.M[r]);
    scatter(cf_.G1, r, yrow, c);
    scatter(cf_.H1, r, srow, c);
    scatter(cf_.J1, r, wrow, c);
    scatter(cf_.K1, r, prow, c);
    scatter(cf_.L1, r, qrow, c);
  }
  for (int r : bk.r39) {
    const int c = d.add_column("mu" + std::to_string(r), 0.0, box, cf_.N[r]);
    scatter(cf_.G2, r, yrow, c);
    scatter(cf_.H2, r, srow, c);
    scatter(cf_.J2, r, wrow, c);
    scatter(cf_.K2, r, prow, c);
    scatter(cf_.L2, r, qrow, c);
  }
  for (std::size_t j = 0; j < nY; ++j) {
    const int c = d.add_column("pi" + std::to_string(j), -box, box, 0.0);
    rows[static_cast<std::size_t>(yrow[j])].push_back({c, 1.0});
  }
  const double h = homogeneous ? 0.0 : 1.0;
  for (int j : bk.s) d.add_row("S" + std::to_string(j), rows[static_cast<std::size_t>(srow[static_cast<std::size_t>(j)])], Sense::le, h * cf_.I_S[j]);
  for (int j : bk.w) d.add_row("W" + std::to_string(j), rows[static_cast<std::size_t>(wrow[static_cast<std::size_t>(j)])], Sense::le, h * cf_.I_W[j]);
  for (int j : bk.p) d.add_row("P" + std::to_string(j), rows[static_cast<std::size_t>(prow[static_cast<std::size_t>(j)])], Sense::le, h * cf_.O_C[j]);
  for (std::size_t j = 0; j < nY; ++j) d.add_row("Y" + std::to_string(j), rows[static_cast<std::size_t>(yrow[j])], Sense::le, 0.0);
  for (int j : bk.q) d.add_row("Q" + std::to_string(j), rows[static_cast<std::size_t>(qrow[static_cast<std::size_t>(j)])], Sense::eq, 0.0);
  return d;
}

void Decomposition::set_pi_costs(lp::LpProblem& prob, std::size_t block, const std::vector<double>& y) const {
  const Block& bk = blocks_[block];
  const int first = static_cast<int>(bk.r37.size() + bk.r38.size() + bk.r39.size());
  for (std::size_t j = 0; j < y.size(); ++j) prob.set_cost(first + static_cast<int>(j), y[j]);
}

DualSolution Decomposition::unpack(std::size_t block, const lp::LpSolution& sol) const {
  const Block& bk = blocks_[block];
  DualSolution d;
  d.status = sol.status;
  d.objective = sol.objective;
  d.iterations = sol.iterations;
  if (sol.x.empty()) return d;
  auto take = [&](std::size_t off, std::size_t n) {
    return Eigen::Map<const Eigen::VectorXd>(sol.x.data() + off, static_cast<Eigen::Index>(n)).eval();
  };
  std::size_t off = 0;
  d.sigma = take(off, bk.r37.size());
  off += bk.r37.size();
  d.lambda = take(off, bk.r38.size());
  off += bk.r38.size();
  d.mu = take(off, bk.r39.size());
  off += bk.r39.size();
  d.pi = take(off, cf_.y_cols.size());
  return d;
}

namespace {

lp::LpSolution solve_with_retry(const lp::LpProblem& p, const lp::LpOptions& opt, lp::Basis* basis) {
  auto sol = lp::solve_lp(p, opt, basis && !basis->empty() ? basis : nullptr);
  if (sol.status == Status::numerical_error || sol.status == Status::iteration_limit) {
    lp::LpOptions alt = opt;
    alt.scale = !alt.scale;
    sol = lp::solve_lp(p, alt);
  }
  if (basis && (sol.status == Status::optimal || sol.status == Status::unbounded)) *basis = sol.basis;
  return sol;
}

}  // namespace

const lp::LpProblem& Decomposition::dsp_problem(std::size_t block) {
  Block& bk = blocks_.at(block);
  if (!bk.dsp) bk.dsp = build_dual(block, false);
  return *bk.dsp;
}

DualSolution Decomposition::solve_dsp(std::size_t block, const std::vector<double>& y) {
  Block& bk = blocks_.at(block);
  if (!bk.dsp) bk.dsp = build_dual(block, false);
  set_pi_costs(*bk.dsp, block, y);
  return unpack(block, solve_with_retry(*bk.dsp, lp_, &bk.dsp_basis));
}

DualSolution Decomposition::solve_mdsp(std::size_t block, const std::vector<double>& y) {
  Block& bk = blocks_.at(block);
  if (!bk.mdsp) bk.mdsp = build_dual(block, true);
  set_pi_costs(*bk.mdsp, block, y);
  return unpack(block, solve_with_retry(*bk.mdsp, lp_, &bk.mdsp_basis));
}

DualSolution Decomposition::solve_ndsp(std::size_t block, const std::vector<double>& core, const std::vector<double>& y, double z) {
  Block& bk = blocks_.at(block);
  if (!bk.dsp) bk.dsp = build_dual(block, false);
  lp::LpProblem p = *bk.dsp;
  set_pi_costs(p, block, core);
  std::vector<Term> face;
  for (int c = 0; c < p.num_cols(); ++c) {
    const double v = bk.dsp->cost(c);
    const std::size_t first_pi = bk.r37.size() + bk.r38.size() + bk.r39.size();
    const double coef = static_cast<std::size_t>(c) >= first_pi ? y[static_cast<std::size_t>(c) - first_pi] : v;
    if (coef != 0.0) face.push_back({c, coef});
  }
  p.add_row("face", face, Sense::ge, z - 1e-9 * std::max(1.0, std::abs(z)));
  lp::Basis warm = bk.dsp_basis;
  if (!warm.empty()) warm.status.push_back(lp::Basis::VarStatus::basic);
  return unpack(block, solve_with_retry(p, lp_, warm.empty() ? nullptr : &warm));
}

double Decomposition::dual_constant(std::size_t block, const DualSolution& d) const {
  const Block& bk = blocks_[block];
  double v = 0.0;
  for (std::size_t k = 0; k < bk.r37.size(); ++k) v += cf_.F[bk.r37[k]] * d.sigma[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < bk.r38.size(); ++k) v += cf_.M[bk.r38[k]] * d.lambda[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < bk.r39.size(); ++k) v += cf_.N[bk.r39[k]] * d.mu[static_cast<Eigen::Index>(k)];
  return v;
}

Eigen::VectorXd Decomposition::lifted_pi(std::size_t block, const DualSolution& d) const {
  const Block& bk = blocks_[block];
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cf_.y_cols.size()));
  for (std::size_t k = 0; k < bk.r38.size(); ++k)
    for (SparseMatrix::InnerIterator it(cf_.G1, bk.r38[k]); it; ++it) pi[it.col()] -= it.value() * d.lambda[static_cast<Eigen::Index>(k)];
  for (std::size_t k = 0; k < bk.r39.size(); ++k)
    for (SparseMatrix::InnerIterator it(cf_.G2, bk.r39[k]); it; ++it) pi[it.col()] -= it.value() * d.mu[static_cast<Eigen::Index>(k)];
  return pi;
}

Cut Decomposition::optimality_cut(std::size_t block, const DualSolution& d) const {
  Cut c;
  c.kind = Cut::Kind::optimality;
  c.block = block;
  c.coef = cf_.I_L + lifted_pi(block, d);
  c.constant = cf_.constant + dual_constant(block, d);
  return c;
}

Cut Decomposition::feasibility_cut(std::size_t block, const DualSolution& d) const {
  Cut c;
  c.kind = Cut::Kind::feasibility;
  c.block = block;
  c.coef = lifted_pi(block, d);
  c.constant = dual_constant(block, d);
  return c;
}

// ---- driver -------------------------------------------------------------------------

std::vector<ContingencyScenario> secure_scenarios(const SystemData& sys, bool secure) {
  std::vector<ContingencyScenario> out{ContingencyScenario::intact()};
  if (secure)
    for (const auto& sc : all_outages(sys)) out.push_back(sc);
  return out;
}

std::string BddResult::trace_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "iter,LB,UB,gap,cuts_opt,cuts_feas,seconds\n";
  for (const auto& r : trace)
    os << r.iter << ',' << r.lb << ',' << r.ub << ',' << r.gap << ',' << r.cuts_opt << ',' << r.cuts_feas << ',' << r.seconds << '\n';
  return os.str();
}

namespace {

constexpr double kRayTol = 1e-7;

double dot(const Eigen::VectorXd& a, const std::vector<double>& y) {
  double v = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) v += a[j] * y[static_cast<std::size_t>(j)];
  return v;
}

}  // namespace

BddResult run_bdd(const SystemData& sys, const RepresentativeSet& reps, const ModelOptions& model_options, const BddOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const bool secure = options.security != BddOptions::Security::none;
  const auto scenarios = secure_scenarios(sys, secure);
  const MilpModel model = build_model(sys, reps, model_options, scenarios);
  Decomposition dec(model, options.lp);
  const CompactForm& cf = dec.compact();
  MasterProblem mp(cf, &model.problem);
  const std::size_t nY = dec.num_binaries();

  std::vector<bool> active(scenarios.size(), options.security == BddOptions::Security::full);
  active[0] = true;
  std::optional<Screener> screener;
  if (options.security == BddOptions::Security::screened) screener.emplace(sys, reps, model_options, options.lp);

  lp::MilpOptions mopt;
  mopt.lp = options.lp;
  mopt.relative_gap = 1e-9;
  mopt.node_limit = options.master_node_limit;

  BddResult res;
  std::vector<double> core(nY, options.core_init), best_y;
  bool found = false;
  double lb = -kInf, ub = kInf;
  std::size_t n_opt = 0, n_feas = 0;
  res.status = "iteration_limit";

  auto add = [&](Cut cut, int iter, int member, const std::vector<double>& y, double value) {
    cut.iteration = iter;
    cut.pool_member = member;
    cut.generator = y;
    cut.generator_value = value;
    (cut.kind == Cut::Kind::optimality ? n_opt : n_feas)++;
    mp.add_cut(cut);
    res.cuts.push_back(std::move(cut));
  };
  auto feasibility = [&](std::size_t b, const std::vector<double>& y, int iter, int member) {
    const DualSolution md = dec.solve_mdsp(b, y);
    if (md.status != Status::optimal || md.objective <= kRayTol)
      throw std::runtime_error("run_bdd: no violated ray for an infeasible sub-problem (block " + std::to_string(b) + ")");
    add(dec.feasibility_cut(b, md), iter, member, y, md.objective);
  };

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const auto master = mp.solve(options.pool_size, mopt);
    if (master.status != Status::optimal) {
      res.status = master.status == Status::infeasible ? "infeasible" : "failed";
      break;
    }
    lb = std::max(lb, master.lower_bound);
    res.iterations = iter;

    if (screener && (!options.screen_once || iter == 1)) {
      auto sr = screener->screen(dec.plan_of(master.pool.front()), options.screening_threshold);
      for (const auto& sc : sr.selected) {
        auto it = std::find(scenarios.begin(), scenarios.end(), sc);
        if (it != scenarios.end()) active[static_cast<std::size_t>(it - scenarios.begin())] = true;
      }
      res.screenings.push_back(std::move(sr));
    }

    for (std::size_t m = 0; m < master.pool.size(); ++m) {
      const auto& y = master.pool[m];
      const int member = static_cast<int>(m);
      bool operable = true;
      double z0 = 0.0;
      for (std::size_t b = 0; b < scenarios.size(); ++b) {
        if (!active[b]) continue;
        const DualSolution d = dec.solve_dsp(b, y);
        if (d.status == Status::unbounded) {
          feasibility(b, y, iter, member);
          operable = false;
          continue;
        }
        if (d.status != Status::optimal)
          throw std::runtime_error(std::string("run_bdd: dual sub-problem failed: ") + lp::to_string(d.status));
        if (options.audit) {
          const auto primal = dec.solve_primal(b, y);
          AuditRecord a{iter, b, d.objective, primal.objective, false};
          a.ok = primal.status == Status::optimal && std::abs(a.dual - a.primal) <= 1e-6 * (1.0 + std::abs(a.primal));
          res.audit.push_back(a);
        }
        if (b != 0) continue;
        z0 = d.objective;
        DualSolution cut_duals = d;
        if (options.use_poc) {
          const DualSolution nd = dec.solve_ndsp(b, core, y, d.objective);
          if (nd.status == Status::optimal) cut_duals = nd;
        }
        add(dec.optimality_cut(b, cut_duals), iter, member, y, d.objective);
      }
      if (!operable) continue;
      if (secure)
        for (std::size_t b = 1; b < scenarios.size(); ++b) {
          if (active[b]) continue;
          const auto check = dec.solve_primal(b, y);
          if (check.status == Status::optimal) continue;
          active[b] = true;
          feasibility(b, y, iter, member);
          operable = false;
        }
      if (!operable) continue;
      const double value = z0 + dot(cf.I_L, y) + cf.constant;
      if (value < ub) {
        ub = value;
        best_y = y;
        found = true;
      }
    }
    if (options.use_poc)
      for (std::size_t j = 0; j < nY; ++j) core[j] = 0.5 * core[j] + 0.5 * master.pool.front()[j];

    TraceRow row;
    row.iter = iter;
    row.lb = lb;
    row.ub = ub;
    row.gap = std::isfinite(ub) ? (ub - lb) / std::max(std::abs(ub), 1e-12) : kInf;
    row.cuts_opt = n_opt;
    row.cuts_feas = n_feas;
    row.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    res.trace.push_back(row);
    if (row.gap <= options.tolerance) {
      res.converged = true;
      res.status = "converged";
      break;
    }
  }

  res.lower_bound = lb;
  res.upper_bound = ub;
  for (std::size_t b = 0; b < scenarios.size(); ++b)
    if (active[b]) res.scenarios.push_back(scenarios[b]);
  if (found) {
    res.decision = dec.plan_of(best_y);
    if (secure) {
      const MilpModel intact = build_model(sys, reps, model_options);
      res.plan = evaluate_plan(intact, sys, reps, res.decision, options.lp);
    } else {
      res.plan = evaluate_plan(model, sys, reps, res.decision, options.lp);
    }
  }
  return res;
}

}  // namespace coplan
