// Bounded-variable revised simplex over [A  -I] z = 0 with box bounds on
// every structural column and row activity. Phase one minimizes the sum of
// bound violations of basic variables from an arbitrary starting basis, so
// warm starts need not be primal feasible.

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "coplan/lp.hpp"

namespace coplan::lp {

namespace {

using VarStatus = Basis::VarStatus;

class Simplex {
 public:
  Simplex(const LpProblem& p, const LpOptions& opt) : p_(p), opt_(opt) {
    m_ = p.num_rows();
    n_ = p.num_cols();
    N_ = n_ + m_;
    build_scaled();
  }

  LpSolution run(const Basis* warm) {
    LpSolution sol;
    if (!warm || !install_basis(*warm)) slack_basis();
    int restarts = 0;
    Status status;
    while (true) {
      status = iterate(sol);
      if (status != Status::optimal) break;
      // Polish: refactor and confirm primal feasibility before accepting.
      if (!refactor()) {
        status = Status::numerical_error;
        sol.diagnostic = "singular basis after optimization";
        break;
      }
      recompute_basics();
      if (max_basic_infeasibility() <= opt_.feasibility_tol && max_dual_infeasibility() <= opt_.optimality_tol) break;
      if (++restarts > 5) {
        status = Status::numerical_error;
        sol.diagnostic = "could not restore feasibility after refactorization";
        break;
      }
    }
    finish(sol, status);
    return sol;
  }

 private:
  // ---- setup --------------------------------------------------------------

  void build_scaled() {
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(n_));
    for (int i = 0; i < m_; ++i) {
      const auto [b, e] = p_.row_range(i);
      for (auto k = b; k < e; ++k) cols[static_cast<std::size_t>(p_.terms()[k].col)].emplace_back(i, p_.terms()[k].coef);
    }
    if (opt_.scale) {
      // Two passes of geometric-mean equilibration on rows then columns.
      for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> rmin(static_cast<std::size_t>(m_), kInf), rmax(static_cast<std::size_t>(m_), 0.0);
        for (int j = 0; j < n_; ++j)
          for (auto [i, v] : cols[static_cast<std::size_t>(j)]) {
            const double a = std::abs(v) * col_scale_[static_cast<std::size_t>(j)];
            rmin[static_cast<std::size_t>(i)] = std::min(rmin[static_cast<std::size_t>(i)], a);
            rmax[static_cast<std::size_t>(i)] = std::max(rmax[static_cast<std::size_t>(i)], a);
          }
        for (int i = 0; i < m_; ++i)
          if (rmax[static_cast<std::size_t>(i)] > 0)
            row_scale_[static_cast<std::size_t>(i)] =
                1.0 / std::sqrt(rmin[static_cast<std::size_t>(i)] * rmax[static_cast<std::size_t>(i)]);
        for (int j = 0; j < n_; ++j) {
          double lo = kInf, hi = 0.0;
          for (auto [i, v] : cols[static_cast<std::size_t>(j)]) {
            const double a = std::abs(v) * row_scale_[static_cast<std::size_t>(i)];
            lo = std::min(lo, a);
            hi = std::max(hi, a);
          }
          if (hi > 0) col_scale_[static_cast<std::size_t>(j)] = 1.0 / std::sqrt(lo * hi);
        }
      }
      // Powers of two keep scaling exact.
      for (auto& s : row_scale_) s = std::exp2(std::round(std::log2(s)));
      for (auto& s : col_scale_) s = std::exp2(std::round(std::log2(s)));
    }

    cstart_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int j = 0; j < n_; ++j) {
      cstart_[static_cast<std::size_t>(j) + 1] = cstart_[static_cast<std::size_t>(j)] + cols[static_cast<std::size_t>(j)].size();
      for (auto [i, v] : cols[static_cast<std::size_t>(j)]) {
        cidx_.push_back(i);
        cval_.push_back(v * row_scale_[static_cast<std::size_t>(i)] * col_scale_[static_cast<std::size_t>(j)]);
      }
    }

    const double sign = p_.objective_sense == ObjectiveSense::maximize ? -1.0 : 1.0;
    obj_scale_ = 0.0;
    for (int j = 0; j < n_; ++j) obj_scale_ = std::max(obj_scale_, std::abs(p_.cost(j) * col_scale_[static_cast<std::size_t>(j)]));
    if (!opt_.scale || obj_scale_ == 0.0) obj_scale_ = 1.0;
    obj_scale_ = std::exp2(std::round(std::log2(obj_scale_)));

    lo_.resize(static_cast<std::size_t>(N_));
    hi_.resize(static_cast<std::size_t>(N_));
    cost_.assign(static_cast<std::size_t>(N_), 0.0);
    for (int j = 0; j < n_; ++j) {
      const double s = col_scale_[static_cast<std::size_t>(j)];
      lo_[static_cast<std::size_t>(j)] = p_.col_lo(j) / s;
      hi_[static_cast<std::size_t>(j)] = p_.col_hi(j) / s;
      cost_[static_cast<std::size_t>(j)] = sign * p_.cost(j) * s / obj_scale_;
    }
    for (int i = 0; i < m_; ++i) {
      const double s = row_scale_[static_cast<std::size_t>(i)];
      const double b = p_.rhs(i) * s;
      const auto k = static_cast<std::size_t>(n_ + i);
      lo_[k] = p_.sense(i) == Sense::le ? -kInf : b;
      hi_[k] = p_.sense(i) == Sense::ge ? kInf : b;
    }
  }

  void slack_basis() {
    stat_.assign(static_cast<std::size_t>(N_), VarStatus::at_lower);
    x_.assign(static_cast<std::size_t>(N_), 0.0);
    basic_.resize(static_cast<std::size_t>(m_));
    pos_.assign(static_cast<std::size_t>(N_), -1);
    for (int j = 0; j < n_; ++j) place_nonbasic(j, default_status(j));
    for (int i = 0; i < m_; ++i) {
      basic_[static_cast<std::size_t>(i)] = n_ + i;
      pos_[static_cast<std::size_t>(n_ + i)] = i;
      stat_[static_cast<std::size_t>(n_ + i)] = VarStatus::basic;
    }
    binv_ = -Eigen::MatrixXd::Identity(m_, m_);
    updates_ = 0;
    recompute_basics();
  }

  VarStatus default_status(int j) const {
    const double lo = lo_[static_cast<std::size_t>(j)], hi = hi_[static_cast<std::size_t>(j)];
    if (std::isfinite(lo) && std::isfinite(hi)) return std::abs(lo) <= std::abs(hi) ? VarStatus::at_lower : VarStatus::at_upper;
    if (std::isfinite(lo)) return VarStatus::at_lower;
    if (std::isfinite(hi)) return VarStatus::at_upper;
    return VarStatus::free_zero;
  }

  void place_nonbasic(int j, VarStatus s) {
    const auto k = static_cast<std::size_t>(j);
    if (s == VarStatus::at_lower && !std::isfinite(lo_[k])) s = default_status(j);
    if (s == VarStatus::at_upper && !std::isfinite(hi_[k])) s = default_status(j);
    if (s == VarStatus::free_zero && (std::isfinite(lo_[k]) || std::isfinite(hi_[k]))) s = default_status(j);
    stat_[k] = s;
    pos_[k] = -1;
    x_[k] = s == VarStatus::at_lower ? lo_[k] : s == VarStatus::at_upper ? hi_[k] : 0.0;
  }

  bool install_basis(const Basis& b) {
    if (b.status.size() != static_cast<std::size_t>(N_)) return false;
    if (std::count(b.status.begin(), b.status.end(), VarStatus::basic) != m_) return false;
    stat_.assign(static_cast<std::size_t>(N_), VarStatus::at_lower);
    x_.assign(static_cast<std::size_t>(N_), 0.0);
    pos_.assign(static_cast<std::size_t>(N_), -1);
    basic_.clear();
    for (int j = 0; j < N_; ++j) {
      if (b.status[static_cast<std::size_t>(j)] == VarStatus::basic) {
        pos_[static_cast<std::size_t>(j)] = static_cast<int>(basic_.size());
        basic_.push_back(j);
        stat_[static_cast<std::size_t>(j)] = VarStatus::basic;
      } else {
        place_nonbasic(j, b.status[static_cast<std::size_t>(j)]);
      }
    }
    if (!refactor()) return false;
    recompute_basics();
    return true;
  }

  // ---- linear algebra -----------------------------------------------------

  void column_into(int j, Eigen::VectorXd& out) const {
    out.setZero(m_);
    if (j < n_) {
      for (auto k = cstart_[static_cast<std::size_t>(j)]; k < cstart_[static_cast<std::size_t>(j) + 1]; ++k) out(cidx_[k]) = cval_[k];
    } else {
      out(j - n_) = -1.0;
    }
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return -y(j - n_);
    double acc = 0.0;
    for (auto k = cstart_[static_cast<std::size_t>(j)]; k < cstart_[static_cast<std::size_t>(j) + 1]; ++k) acc += cval_[k] * y(cidx_[k]);
    return acc;
  }

  Eigen::VectorXd ftran(int j) const {
    if (j >= n_) return -binv_.col(j - n_);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
    for (auto k = cstart_[static_cast<std::size_t>(j)]; k < cstart_[static_cast<std::size_t>(j) + 1]; ++k)
      out.noalias() += cval_[k] * binv_.col(cidx_[k]);
    return out;
  }

  bool refactor() {
    updates_ = 0;
    if (m_ == 0) {
      binv_.resize(0, 0);
      return true;
    }
    Eigen::MatrixXd B(m_, m_);
    Eigen::VectorXd col;
    for (int k = 0; k < m_; ++k) {
      column_into(basic_[static_cast<std::size_t>(k)], col);
      B.col(k) = col;
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    binv_ = lu.inverse();
    if (!binv_.allFinite()) return false;
    const double residual = (B * binv_ - Eigen::MatrixXd::Identity(m_, m_)).cwiseAbs().maxCoeff();
    return residual < 1e-6;
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < N_; ++j) {
      if (stat_[static_cast<std::size_t>(j)] == VarStatus::basic) continue;
      const double v = x_[static_cast<std::size_t>(j)];
      if (v == 0.0) continue;
      if (j < n_) {
        for (auto k = cstart_[static_cast<std::size_t>(j)]; k < cstart_[static_cast<std::size_t>(j) + 1]; ++k) rhs(cidx_[k]) -= cval_[k] * v;
      } else {
        rhs(j - n_) += v;
      }
    }
    const Eigen::VectorXd xb = binv_ * rhs;
    for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] = xb(k);
  }

  double infeasibility(int j) const {
    const auto k = static_cast<std::size_t>(j);
    if (x_[k] < lo_[k] - opt_.feasibility_tol) return lo_[k] - x_[k];
    if (x_[k] > hi_[k] + opt_.feasibility_tol) return x_[k] - hi_[k];
    return 0.0;
  }

  double max_basic_infeasibility() const {
    double worst = 0.0;
    for (int v : basic_) worst = std::max(worst, infeasibility(v));
    return worst;
  }

  Eigen::VectorXd duals(const std::vector<double>& c) const {
    Eigen::VectorXd cb(m_);
    for (int k = 0; k < m_; ++k) cb(k) = c[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])];
    return binv_.transpose() * cb;
  }

  double max_dual_infeasibility() const {
    const Eigen::VectorXd y = duals(cost_);
    double worst = 0.0;
    for (int j = 0; j < N_; ++j) {
      const auto s = stat_[static_cast<std::size_t>(j)];
      if (s == VarStatus::basic || lo_[static_cast<std::size_t>(j)] == hi_[static_cast<std::size_t>(j)]) continue;
      const double d = cost_[static_cast<std::size_t>(j)] - column_dot(j, y);
      if (s == VarStatus::at_lower) worst = std::max(worst, -d);
      else if (s == VarStatus::at_upper) worst = std::max(worst, d);
      else worst = std::max(worst, std::abs(d));
    }
    return worst;
  }

  // ---- main loop ----------------------------------------------------------

  Status iterate(LpSolution& sol) {
    std::vector<double> phase_cost(static_cast<std::size_t>(N_), 0.0);
    int degenerate_run = 0;
    bool bland = false;
    while (true) {
      if (sol.iterations >= opt_.iteration_limit) return Status::iteration_limit;

      bool phase_one = false;
      std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
      for (int v : basic_) {
        const auto k = static_cast<std::size_t>(v);
        if (x_[k] < lo_[k] - opt_.feasibility_tol) phase_cost[k] = -1.0, phase_one = true;
        else if (x_[k] > hi_[k] + opt_.feasibility_tol) phase_cost[k] = 1.0, phase_one = true;
      }
      const std::vector<double>& c = phase_one ? phase_cost : cost_;
      const Eigen::VectorXd y = duals(c);

      // Pricing: Dantzig, or smallest eligible index while anti-cycling.
      int enter = -1;
      double enter_dir = 0.0;
      double best = 0.0;
      for (int j = 0; j < N_; ++j) {
        const auto k = static_cast<std::size_t>(j);
        const auto s = stat_[k];
        if (s == VarStatus::basic || lo_[k] == hi_[k]) continue;
        const double d = c[k] - column_dot(j, y);
        double dir = 0.0;
        if (d < -opt_.optimality_tol && s != VarStatus::at_upper) dir = 1.0;
        else if (d > opt_.optimality_tol && s != VarStatus::at_lower) dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          enter = j;
          enter_dir = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          enter = j;
          enter_dir = dir;
        }
      }

      if (enter < 0) {
        if (!phase_one) return Status::optimal;
        farkas_ = y;
        return Status::infeasible;
      }

      const Eigen::VectorXd alpha = ftran(enter);
      const double ftol = opt_.feasibility_tol;
      constexpr double kPivotTol = 1e-9;

      // Harris two-pass ratio test with phase-one breakpoints.
      auto limit_of = [&](int k, double slack) -> double {
        const double a = alpha(k);
        if (std::abs(a) <= kPivotTol) return kInf;
        const int v = basic_[static_cast<std::size_t>(k)];
        const auto vk = static_cast<std::size_t>(v);
        const double rate = -enter_dir * a;
        const double xv = x_[vk];
        if (rate < 0) {
          double bound;
          if (xv > hi_[vk] + ftol) bound = hi_[vk];
          else if (std::isfinite(lo_[vk]) && xv >= lo_[vk] - ftol) bound = lo_[vk];
          else return kInf;
          return (xv - bound + slack) / -rate;
        }
        double bound;
        if (xv < lo_[vk] - ftol) bound = lo_[vk];
        else if (std::isfinite(hi_[vk]) && xv <= hi_[vk] + ftol) bound = hi_[vk];
        else return kInf;
        return (bound - xv + slack) / rate;
      };

      double t_relaxed = kInf;
      for (int k = 0; k < m_; ++k) t_relaxed = std::min(t_relaxed, limit_of(k, ftol));
      int leave_pos = -1;
      double step = kInf;
      if (std::isfinite(t_relaxed)) {
        double best_pivot = 0.0;
        for (int k = 0; k < m_; ++k) {
          const double t = limit_of(k, 0.0);
          if (t > t_relaxed) continue;
          const double piv = std::abs(alpha(k));
          const bool better = bland ? (leave_pos < 0 || basic_[static_cast<std::size_t>(k)] < basic_[static_cast<std::size_t>(leave_pos)])
                                    : piv > best_pivot;
          if (better) {
            best_pivot = piv;
            leave_pos = k;
            step = std::max(t, 0.0);
          }
        }
      }
      const auto ek = static_cast<std::size_t>(enter);
      const double flip = hi_[ek] - lo_[ek];
      bool bound_flip = std::isfinite(flip) && flip <= step;
      if (bound_flip) step = flip;

      if (!std::isfinite(step)) {
        if (phase_one) {
          sol.diagnostic = "unbounded phase-one direction";
          return Status::numerical_error;
        }
        ray_.assign(static_cast<std::size_t>(N_), 0.0);
        ray_[ek] = enter_dir;
        for (int k = 0; k < m_; ++k) ray_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] = -enter_dir * alpha(k);
        return Status::unbounded;
      }

      ++sol.iterations;
      degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;
      if (degenerate_run > 50) bland = true;
      else if (degenerate_run == 0) bland = false;

      // Leaving variable settles on the bound it was heading for (decided before the move).
      double target = 0.0;
      if (!bound_flip) {
        const auto lk = static_cast<std::size_t>(basic_[static_cast<std::size_t>(leave_pos)]);
        const double rate = -enter_dir * alpha(leave_pos);
        if (rate < 0) target = x_[lk] > hi_[lk] + ftol ? hi_[lk] : lo_[lk];
        else target = x_[lk] < lo_[lk] - ftol ? lo_[lk] : hi_[lk];
        if (!std::isfinite(target)) target = std::isfinite(lo_[lk]) ? lo_[lk] : hi_[lk];
      }

      x_[ek] += enter_dir * step;
      for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(basic_[static_cast<std::size_t>(k)])] -= enter_dir * step * alpha(k);

      if (bound_flip) {
        stat_[ek] = enter_dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
        x_[ek] = enter_dir > 0 ? hi_[ek] : lo_[ek];
        continue;
      }

      const int leave = basic_[static_cast<std::size_t>(leave_pos)];
      const auto lk = static_cast<std::size_t>(leave);
      x_[lk] = target;
      stat_[lk] = lo_[lk] == hi_[lk] ? VarStatus::at_lower
                  : target == lo_[lk] ? VarStatus::at_lower
                                      : VarStatus::at_upper;
      pos_[lk] = -1;

      basic_[static_cast<std::size_t>(leave_pos)] = enter;
      pos_[ek] = leave_pos;
      stat_[ek] = VarStatus::basic;

      const double piv = alpha(leave_pos);
      if (++updates_ >= opt_.refactor_interval) {
        if (!refactor()) {
          sol.diagnostic = "singular basis during refactorization";
          return Status::numerical_error;
        }
        recompute_basics();
      } else {
        const Eigen::RowVectorXd pivot_row = binv_.row(leave_pos) / piv;
        binv_.noalias() -= alpha * pivot_row;
        binv_.row(leave_pos) = pivot_row;
      }
    }
  }

  // ---- results ------------------------------------------------------------

  void finish(LpSolution& sol, Status status) {
    sol.status = status;
    const double sign = p_.objective_sense == ObjectiveSense::maximize ? -1.0 : 1.0;
    sol.x.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) sol.x[static_cast<std::size_t>(j)] = x_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
    sol.objective = p_.objective_value(sol.x);
    sol.basis.status = stat_;

    if (status == Status::optimal) {
      const Eigen::VectorXd y = duals(cost_);
      sol.row_duals.resize(static_cast<std::size_t>(m_));
      for (int i = 0; i < m_; ++i)
        sol.row_duals[static_cast<std::size_t>(i)] = sign * obj_scale_ * row_scale_[static_cast<std::size_t>(i)] * y(i);
      sol.reduced_costs.resize(static_cast<std::size_t>(n_));
      for (int j = 0; j < n_; ++j) {
        const double d = cost_[static_cast<std::size_t>(j)] - column_dot(j, y);
        sol.reduced_costs[static_cast<std::size_t>(j)] = sign * obj_scale_ * d / col_scale_[static_cast<std::size_t>(j)];
      }
    } else if (status == Status::unbounded) {
      sol.ray.resize(static_cast<std::size_t>(n_));
      for (int j = 0; j < n_; ++j) sol.ray[static_cast<std::size_t>(j)] = ray_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)];
    } else if (status == Status::infeasible) {
      sol.farkas.resize(static_cast<std::size_t>(m_));
      for (int i = 0; i < m_; ++i) sol.farkas[static_cast<std::size_t>(i)] = row_scale_[static_cast<std::size_t>(i)] * farkas_(i);
    }
  }

  const LpProblem& p_;
  LpOptions opt_;
  int m_ = 0, n_ = 0, N_ = 0;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;
  std::vector<std::size_t> cstart_;
  std::vector<int> cidx_;
  std::vector<double> cval_;
  std::vector<double> lo_, hi_, cost_, x_;
  std::vector<VarStatus> stat_;
  std::vector<int> basic_, pos_;
  Eigen::MatrixXd binv_;
  int updates_ = 0;
  Eigen::VectorXd farkas_;
  std::vector<double> ray_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options, const Basis* warm_start) {
  Simplex simplex(problem, options);
  return simplex.run(warm_start);
}

}  // namespace coplan::lp
