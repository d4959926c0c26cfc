#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coplan/lp.hpp"

namespace coplan::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical_error: return "numerical_error";
  }
  return "unknown";
}

int LpProblem::add_column(std::string name, double lo, double hi, double cost, bool integer) {
  if (!(lo <= hi) || std::isnan(cost) || std::isinf(cost) || lo == kInf || hi == -kInf)
    throw std::invalid_argument("add_column: invalid bounds or cost for " + name);
  cost_.push_back(cost);
  lo_.push_back(lo);
  hi_.push_back(hi);
  integer_.push_back(integer);
  col_names_.push_back(std::move(name));
  return num_cols() - 1;
}

int LpProblem::add_row(std::string name, const std::vector<Term>& terms, Sense sense, double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("add_row: non-finite rhs for " + name);
  for (const auto& t : terms) {
    if (t.col < 0 || t.col >= num_cols()) throw std::out_of_range("add_row: column index out of range in " + name);
    if (!std::isfinite(t.coef)) throw std::invalid_argument("add_row: non-finite coefficient in " + name);
  }
  // Merge duplicate columns so every row holds each column at most once.
  std::vector<Term> merged = terms;
  std::sort(merged.begin(), merged.end(), [](const Term& a, const Term& b) { return a.col < b.col; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < merged.size(); ++r) {
    if (w > 0 && merged[w - 1].col == merged[r].col) {
      merged[w - 1].coef += merged[r].coef;
    } else {
      merged[w++] = merged[r];
    }
  }
  merged.resize(w);
  for (const auto& t : merged) {
    if (t.coef != 0.0) terms_.push_back(t);
  }
  row_start_.push_back(terms_.size());
  sense_.push_back(sense);
  rhs_.push_back(rhs);
  row_names_.push_back(std::move(name));
  return num_rows() - 1;
}

void LpProblem::set_bounds(int j, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("set_bounds: lo > hi for " + col_name(j));
  lo_[static_cast<std::size_t>(j)] = lo;
  hi_[static_cast<std::size_t>(j)] = hi;
}

double LpProblem::row_activity(int i, const std::vector<double>& x) const {
  const auto [b, e] = row_range(i);
  double acc = 0.0;
  for (auto k = b; k < e; ++k) acc += terms_[k].coef * x[static_cast<std::size_t>(terms_[k].col)];
  return acc;
}

double LpProblem::objective_value(const std::vector<double>& x) const {
  double acc = objective_offset;
  for (int j = 0; j < num_cols(); ++j) acc += cost(j) * x[static_cast<std::size_t>(j)];
  return acc;
}

double LpProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_cols(); ++j) {
    const double v = x[static_cast<std::size_t>(j)];
    worst = std::max({worst, col_lo(j) - v, v - col_hi(j)});
  }
  for (int i = 0; i < num_rows(); ++i) {
    const double a = row_activity(i, x);
    switch (sense(i)) {
      case Sense::le: worst = std::max(worst, a - rhs(i)); break;
      case Sense::ge: worst = std::max(worst, rhs(i) - a); break;
      case Sense::eq: worst = std::max(worst, std::abs(a - rhs(i))); break;
    }
  }
  return worst;
}

bool LpProblem::has_integers() const { return std::find(integer_.begin(), integer_.end(), true) != integer_.end(); }

double farkas_margin(const LpProblem& p, const std::vector<double>& y) {
  std::vector<double> g(static_cast<std::size_t>(p.num_cols()), 0.0);
  double inf_rows = 0.0;
  for (int i = 0; i < p.num_rows(); ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    if (yi == 0.0) continue;
    const auto [b, e] = p.row_range(i);
    for (auto k = b; k < e; ++k) g[static_cast<std::size_t>(p.terms()[k].col)] += yi * p.terms()[k].coef;
    const double lo = p.sense(i) == Sense::le ? -kInf : p.rhs(i);
    const double hi = p.sense(i) == Sense::ge ? kInf : p.rhs(i);
    inf_rows += yi > 0 ? yi * lo : yi * hi;
  }
  double sup_cols = 0.0;
  for (int j = 0; j < p.num_cols(); ++j) {
    const double gj = g[static_cast<std::size_t>(j)];
    if (std::abs(gj) < 1e-12) continue;
    sup_cols += gj > 0 ? gj * p.col_hi(j) : gj * p.col_lo(j);
  }
  if (std::isnan(inf_rows - sup_cols)) return -kInf;
  return inf_rows - sup_cols;
}

}  // namespace coplan::lp
