#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "coplan/model.hpp"

namespace coplan {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct RowGroup {
  std::vector<int>* rows;
  std::vector<int>* blocks;
  // One triplet list per column class: Y, S, W, P, Q.
  Triplets t[5];
  std::vector<double> rhs;
};

int class_slot(char c) {
  switch (c) {
    case 'Y': return 0;
    case 'S': return 1;
    case 'W': return 2;
    case 'P': return 3;
    default: return 4;
  }
}

SparseMatrix make(const Triplets& t, std::size_t rows, std::size_t cols) {
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::VectorXd vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

CompactForm compact_form(const MilpModel& model) {
  const auto& prob = model.problem;
  const auto& cols = model.vars.columns;
  CompactForm cf;
  cf.n_blocks = model.vars.blocks.size();
  cf.constant = prob.objective_offset;

  std::vector<int> local(cols.size());
  std::vector<int>* lists[5] = {&cf.y_cols, &cf.s_cols, &cf.w_cols, &cf.p_cols, &cf.q_cols};
  std::vector<int>* blocks[5] = {nullptr, &cf.s_block, &cf.w_block, &cf.p_block, &cf.q_block};
  std::vector<double> costs[5];
  for (std::size_t j = 0; j < cols.size(); ++j) {
    const int k = class_slot(compact_class(cols[j].family));
    local[j] = static_cast<int>(lists[k]->size());
    lists[k]->push_back(static_cast<int>(j));
    if (blocks[k]) blocks[k]->push_back(cols[j].block);
    costs[k].push_back(prob.cost(static_cast<int>(j)));
  }
  if (std::any_of(costs[4].begin(), costs[4].end(), [](double c) { return c != 0.0; }))
    throw std::logic_error("compact_form: network variables must carry no cost");
  cf.I_L = vec(costs[0]);
  cf.I_S = vec(costs[1]);
  cf.I_W = vec(costs[2]);
  cf.O_C = vec(costs[3]);

  RowGroup g36{&cf.rows36, nullptr, {}, {}}, g37{&cf.rows37, &cf.block37, {}, {}}, g38{&cf.rows38, &cf.block38, {}, {}},
      g39{&cf.rows39, &cf.block39, {}, {}};
  for (int i = 0; i < prob.num_rows(); ++i) {
    const std::string& tag = model.row_tag[static_cast<std::size_t>(i)];
    const int block = model.row_block[static_cast<std::size_t>(i)];
    if (tag.empty()) throw std::logic_error("compact_form: untagged row " + prob.row_name(i));
    RowGroup* g = nullptr;
    lp::Sense want = lp::Sense::ge;
    if (tag == "eq30" || tag == "eq33") g = &g36;
    else if (tag == "eq34") g = &g37, want = lp::Sense::eq;
    else if (tag == "eq3" || tag == "eq20") g = &g38, want = lp::Sense::eq;
    else g = &g39;
    if (prob.sense(i) != want) throw std::logic_error("compact_form: unexpected sense in row " + prob.row_name(i));
    const int r = static_cast<int>(g->rows->size());
    g->rows->push_back(i);
    if (g->blocks) g->blocks->push_back(block);
    g->rhs.push_back(prob.rhs(i));
    auto [b, e] = prob.row_range(i);
    for (std::size_t p = b; p < e; ++p) {
      const auto& term = prob.terms()[p];
      const auto& info = cols[static_cast<std::size_t>(term.col)];
      const int k = class_slot(compact_class(info.family));
      if (g == &g36 && k != 0) throw std::logic_error("compact_form: non-binary term in row " + prob.row_name(i));
      if (g == &g37 && (k == 0 || k == 1)) throw std::logic_error("compact_form: investment term in balance row " + prob.row_name(i));
      if (k != 0 && info.block != block) throw std::logic_error("compact_form: row " + prob.row_name(i) + " crosses blocks");
      g->t[k].emplace_back(r, local[static_cast<std::size_t>(term.col)], term.coef);
    }
  }
  const std::size_t nY = cf.y_cols.size(), nS = cf.s_cols.size(), nW = cf.w_cols.size(), nP = cf.p_cols.size(),
                    nQ = cf.q_cols.size();
  cf.A = make(g36.t[0], g36.rows->size(), nY);
  cf.B = vec(g36.rhs);
  const std::size_t n37 = g37.rows->size(), n38 = g38.rows->size(), n39 = g39.rows->size();
  cf.C = make(g37.t[2], n37, nW);
  cf.D = make(g37.t[3], n37, nP);
  cf.E = make(g37.t[4], n37, nQ);
  cf.F = vec(g37.rhs);
  cf.G1 = make(g38.t[0], n38, nY);
  cf.H1 = make(g38.t[1], n38, nS);
  cf.J1 = make(g38.t[2], n38, nW);
  cf.K1 = make(g38.t[3], n38, nP);
  cf.L1 = make(g38.t[4], n38, nQ);
  cf.M = vec(g38.rhs);
  cf.G2 = make(g39.t[0], n39, nY);
  cf.H2 = make(g39.t[1], n39, nS);
  cf.J2 = make(g39.t[2], n39, nW);
  cf.K2 = make(g39.t[3], n39, nP);
  cf.L2 = make(g39.t[4], n39, nQ);
  cf.N = vec(g39.rhs);
  return cf;
}

bool CanonicalRow::operator<(const CanonicalRow& o) const {
  return std::tie(terms, sense, rhs) < std::tie(o.terms, o.sense, o.rhs);
}

std::vector<CanonicalRow> canonical_rows(const lp::LpProblem& problem) {
  std::vector<CanonicalRow> out;
  for (int i = 0; i < problem.num_rows(); ++i) {
    CanonicalRow row{{}, problem.sense(i), problem.rhs(i)};
    auto [b, e] = problem.row_range(i);
    for (std::size_t p = b; p < e; ++p)
      if (problem.terms()[p].coef != 0.0) row.terms.emplace_back(problem.terms()[p].col, problem.terms()[p].coef);
    std::sort(row.terms.begin(), row.terms.end());
    out.push_back(std::move(row));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<CanonicalRow> canonical_rows(const CompactForm& cf) {
  std::vector<CanonicalRow> out;
  auto emit = [&](std::initializer_list<std::pair<const SparseMatrix*, const std::vector<int>*>> parts, const Eigen::VectorXd& rhs,
                  lp::Sense sense) {
    std::vector<CanonicalRow> rows(static_cast<std::size_t>(rhs.size()));
    for (Eigen::Index i = 0; i < rhs.size(); ++i) rows[static_cast<std::size_t>(i)] = {{}, sense, rhs[i]};
    for (auto [m, cols] : parts)
      for (Eigen::Index i = 0; i < m->outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(*m, i); it; ++it)
          if (it.value() != 0.0)
            rows[static_cast<std::size_t>(i)].terms.emplace_back((*cols)[static_cast<std::size_t>(it.col())], it.value());
    for (auto& r : rows) {
      std::sort(r.terms.begin(), r.terms.end());
      out.push_back(std::move(r));
    }
  };
  emit({{&cf.A, &cf.y_cols}}, cf.B, lp::Sense::ge);
  emit({{&cf.C, &cf.w_cols}, {&cf.D, &cf.p_cols}, {&cf.E, &cf.q_cols}}, cf.F, lp::Sense::eq);
  emit({{&cf.G1, &cf.y_cols}, {&cf.H1, &cf.s_cols}, {&cf.J1, &cf.w_cols}, {&cf.K1, &cf.p_cols}, {&cf.L1, &cf.q_cols}}, cf.M,
       lp::Sense::eq);
  emit({{&cf.G2, &cf.y_cols}, {&cf.H2, &cf.s_cols}, {&cf.J2, &cf.w_cols}, {&cf.K2, &cf.p_cols}, {&cf.L2, &cf.q_cols}}, cf.N,
       lp::Sense::ge);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace coplan
