#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "coplan/lp.hpp"

using namespace coplan::lp;

namespace {

// Dual objective b'y + sum_j (reduced cost at the active bound), computed from
// the returned duals only; equals the primal objective at an optimal pair.
double dual_objective(const LpProblem& p, const LpSolution& s, double& worst_dual_infeas) {
  const double sign = p.objective_sense == ObjectiveSense::maximize ? -1.0 : 1.0;
  std::vector<double> d(static_cast<std::size_t>(p.num_cols()));
  for (int j = 0; j < p.num_cols(); ++j) d[static_cast<std::size_t>(j)] = p.cost(j);
  double obj = p.objective_offset;
  worst_dual_infeas = 0.0;
  for (int i = 0; i < p.num_rows(); ++i) {
    const double y = s.row_duals[static_cast<std::size_t>(i)];
    if (p.sense(i) == Sense::ge) worst_dual_infeas = std::max(worst_dual_infeas, -sign * y);
    if (p.sense(i) == Sense::le) worst_dual_infeas = std::max(worst_dual_infeas, sign * y);
    obj += y * p.rhs(i);
    const auto [b, e] = p.row_range(i);
    for (auto k = b; k < e; ++k) d[static_cast<std::size_t>(p.terms()[k].col)] -= y * p.terms()[k].coef;
  }
  for (int j = 0; j < p.num_cols(); ++j) {
    const double dj = sign * d[static_cast<std::size_t>(j)];
    // Positive (minimization) reduced cost needs a finite lower bound, negative a finite upper bound.
    if (dj > 1e-9) {
      if (!std::isfinite(p.col_lo(j))) worst_dual_infeas = std::max(worst_dual_infeas, dj);
      else obj += d[static_cast<std::size_t>(j)] * p.col_lo(j);
    } else if (dj < -1e-9) {
      if (!std::isfinite(p.col_hi(j))) worst_dual_infeas = std::max(worst_dual_infeas, -dj);
      else obj += d[static_cast<std::size_t>(j)] * p.col_hi(j);
    }
  }
  return obj;
}

LpProblem random_feasible(std::mt19937& rng, int m, int n, bool maximize) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> pick(0, 5);
  LpProblem p;
  p.objective_sense = maximize ? ObjectiveSense::maximize : ObjectiveSense::minimize;
  std::vector<double> x0(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    const int kind = pick(rng);
    double lo = -kInf, hi = kInf;
    if (kind <= 2) lo = -2 + u(rng);
    if (kind >= 2) hi = 2 + u(rng);
    if (kind == 5) lo = hi - 1.0;
    p.add_column("x" + std::to_string(j), lo, hi, 5 * u(rng));
    x0[static_cast<std::size_t>(j)] = std::isfinite(lo) ? (std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 0.3) : (std::isfinite(hi) ? hi - 0.3 : u(rng));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j)
      if (pick(rng) < 3) {
        const double a = std::round(10 * u(rng)) / 2;
        terms.push_back({j, a});
        act += a * x0[static_cast<std::size_t>(j)];
      }
    const int s = pick(rng) % 3;
    p.add_row("r" + std::to_string(i), terms, s == 0 ? Sense::le : s == 1 ? Sense::ge : Sense::eq,
              s == 0 ? act + 1 : s == 1 ? act - 1 : act);
  }
  // Bound the free directions so the optimum is finite.
  for (int j = 0; j < n; ++j) {
    p.add_row("box_hi" + std::to_string(j), {{j, 1.0}}, Sense::le, 10.0);
    p.add_row("box_lo" + std::to_string(j), {{j, 1.0}}, Sense::ge, -10.0);
  }
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("lp");

TEST_CASE("maximize x with x <= 3 gives unit dual") {
  LpProblem p;
  p.objective_sense = ObjectiveSense::maximize;
  const int x = p.add_column("x", 0, kInf, 1);
  p.add_row("cap", {{x, 1}}, Sense::le, 3);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.x[0] == doctest::Approx(3));
  CHECK(s.objective == doctest::Approx(3));
  CHECK(s.row_duals[0] == doctest::Approx(1));
}

TEST_CASE("unbounded problem returns an improving ray") {
  LpProblem p;
  p.objective_sense = ObjectiveSense::maximize;
  p.add_column("x", 0, kInf, 1);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::unbounded);
  REQUIRE(s.ray.size() == 1);
  CHECK(s.ray[0] > 0);
}

TEST_CASE("ray of an unbounded problem respects every row") {
  LpProblem p;
  const int x = p.add_column("x", 0, kInf, -1);
  const int y = p.add_column("y", 0, kInf, 0);
  p.add_row("r1", {{x, 1}, {y, -1}}, Sense::le, 1);
  p.add_row("r2", {{x, 1}, {y, -2}}, Sense::le, 4);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::unbounded);
  CHECK(s.ray[0] - s.ray[1] <= 1e-9);
  CHECK(s.ray[0] - 2 * s.ray[1] <= 1e-9);
  CHECK(-s.ray[0] < 0);
}

TEST_CASE("infeasible problem returns a Farkas certificate") {
  LpProblem p;
  const int x = p.add_column("x", 0, 10, 1);
  const int y = p.add_column("y", 0, 10, 1);
  p.add_row("a", {{x, 1}, {y, 1}}, Sense::ge, 5);
  p.add_row("b", {{x, 1}, {y, 1}}, Sense::le, 3);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::infeasible);
  CHECK(farkas_margin(p, s.farkas) > 1e-6);
}

TEST_CASE("bounds alone can make a problem infeasible") {
  LpProblem p;
  const int x = p.add_column("x", 0, 1, 1);
  p.add_row("need", {{x, 2}}, Sense::ge, 3);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::infeasible);
  CHECK(farkas_margin(p, s.farkas) > 1e-6);
}

TEST_CASE("random feasible LPs satisfy strong duality") {
  std::mt19937 rng(7);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto p = random_feasible(rng, 20, 30, trial % 2 == 1);
    const auto s = solve_lp(p);
    REQUIRE(s.status == Status::optimal);
    ++solved;
    CHECK(p.max_violation(s.x) <= 1e-6);
    double infeas = 0.0;
    const double dual = dual_objective(p, s, infeas);
    CHECK(infeas <= 1e-6);
    CHECK(std::abs(dual - s.objective) <= 1e-7 * (1 + std::abs(s.objective)));
  }
  CHECK(solved == 60);
}

TEST_CASE("warm start from the optimal basis needs no pivots") {
  std::mt19937 rng(11);
  const auto p = random_feasible(rng, 15, 20, false);
  const auto cold = solve_lp(p);
  REQUIRE(cold.status == Status::optimal);
  const auto warm = solve_lp(p, {}, &cold.basis);
  REQUIRE(warm.status == Status::optimal);
  CHECK(warm.iterations == 0);
  CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
}

TEST_CASE("warm start after a bound change reaches the cold optimum") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = random_feasible(rng, 12, 16, false);
    const auto first = solve_lp(p);
    REQUIRE(first.status == Status::optimal);
    p.set_bounds(trial % 16, p.col_lo(trial % 16), std::max(p.col_lo(trial % 16), first.x[static_cast<std::size_t>(trial % 16)] - 0.5));
    const auto cold = solve_lp(p);
    const auto warm = solve_lp(p, {}, &first.basis);
    REQUIRE(cold.status == warm.status);
    if (cold.status == Status::optimal) CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-8));
  }
}

TEST_CASE("degenerate problem terminates") {
  // Klee-Minty style cube plus redundant degenerate rows.
  LpProblem p;
  p.objective_sense = ObjectiveSense::maximize;
  const int n = 6;
  for (int j = 0; j < n; ++j) p.add_column("x" + std::to_string(j), 0, kInf, std::pow(2.0, n - 1 - j));
  for (int i = 0; i < n; ++i) {
    std::vector<Term> t;
    for (int j = 0; j < i; ++j) t.push_back({j, std::pow(2.0, i - j + 1)});
    t.push_back({i, 1});
    p.add_row("km" + std::to_string(i), t, Sense::le, std::pow(5.0, i + 1));
    p.add_row("deg" + std::to_string(i), {{i, 1}}, Sense::ge, 0);
  }
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(std::pow(5.0, n)));
}

TEST_CASE("equality duals are sign free and >= duals nonnegative when minimizing") {
  LpProblem p;
  const int x = p.add_column("x", 0, kInf, 1);
  const int y = p.add_column("y", 0, kInf, 2);
  p.add_row("demand", {{x, 1}, {y, 1}}, Sense::ge, 4);
  p.add_row("link", {{x, 1}, {y, -1}}, Sense::eq, 2);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(5));
  CHECK(s.row_duals[0] == doctest::Approx(1.5));
  CHECK(s.row_duals[1] == doctest::Approx(-0.5));
}

TEST_CASE("solves are deterministic") {
  std::mt19937 rng(3);
  const auto p = random_feasible(rng, 20, 30, false);
  const auto a = solve_lp(p);
  const auto b = solve_lp(p);
  CHECK(a.x == b.x);
  CHECK(a.row_duals == b.row_duals);
}

TEST_CASE("knapsack picks the larger item") {
  LpProblem p;
  p.objective_sense = ObjectiveSense::maximize;
  const int x = p.add_column("x", 0, 1, 3, true);
  const int y = p.add_column("y", 0, 1, 2, true);
  p.add_row("cap", {{x, 1}, {y, 1}}, Sense::le, 1);
  const auto s = solve_milp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.best()[0] == 1);
  CHECK(s.best()[1] == 0);
  CHECK(s.objective() == doctest::Approx(3));
}

TEST_CASE("integral relaxation needs a single node") {
  LpProblem p;
  const int x = p.add_column("x", 0, 1, 1, true);
  p.add_row("r", {{x, 1}}, Sense::ge, 1);
  const auto s = solve_milp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.nodes == 1);
}

TEST_CASE("random 8-binary problems match enumeration") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    LpProblem p;
    const int n = 8;
    for (int j = 0; j < n; ++j) p.add_column("b" + std::to_string(j), 0, 1, 10 * u(rng), true);
    const int z = p.add_column("z", 0, kInf, 1);
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (int i = 0; i < 5; ++i) {
      std::vector<Term> t;
      std::vector<double> a(n + 1, 0.0);
      for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j)] = std::round(6 * u(rng));
      a[n] = i < 2 ? 1.0 : 0.0;
      for (int j = 0; j <= n; ++j)
        if (a[static_cast<std::size_t>(j)] != 0) t.push_back({j, a[static_cast<std::size_t>(j)]});
      const double r = std::round(4 * u(rng));
      p.add_row("c" + std::to_string(i), t, Sense::ge, r);
      rows.push_back(a);
      rhs.push_back(r);
    }
    // Oracle: enumerate binaries, z is then the smallest value satisfying the z rows.
    double best = kInf;
    for (int mask = 0; mask < (1 << n); ++mask) {
      double zmin = 0.0;
      bool ok = true;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        double act = 0;
        for (int j = 0; j < n; ++j) act += rows[i][static_cast<std::size_t>(j)] * ((mask >> j) & 1);
        if (rows[i][n] > 0) zmin = std::max(zmin, rhs[i] - act);
        else if (act < rhs[i] - 1e-9) ok = false;
      }
      if (!ok) continue;
      double obj = zmin;
      for (int j = 0; j < n; ++j) obj += p.cost(j) * ((mask >> j) & 1);
      best = std::min(best, obj);
    }
    const auto s = solve_milp(p);
    if (!std::isfinite(best)) {
      CHECK(s.status == Status::infeasible);
      continue;
    }
    REQUIRE(s.status == Status::optimal);
    CHECK(s.objective() == doctest::Approx(best).epsilon(1e-7));
    (void)z;
  }
}

TEST_CASE("solution pool holds distinct ordered assignments") {
  LpProblem p;
  const int a = p.add_column("a", 0, 1, 1, true);
  const int b = p.add_column("b", 0, 1, 2, true);
  p.add_row("one", {{a, 1}, {b, 1}}, Sense::ge, 1);
  MilpOptions opt;
  opt.pool_size = 3;
  const auto s = solve_milp(p, opt);
  REQUIRE(s.status == Status::optimal);
  REQUIRE(s.pool.size() == 3);
  CHECK(s.pool_objectives[0] == doctest::Approx(1));
  CHECK(s.pool_objectives[1] == doctest::Approx(2));
  CHECK(s.pool_objectives[2] == doctest::Approx(3));
  for (std::size_t k = 0; k < s.pool.size(); ++k) CHECK(p.max_violation(s.pool[k]) <= 1e-9);
}

TEST_CASE("LP text format round trip") {
  std::mt19937 rng(9);
  auto p = random_feasible(rng, 6, 5, true);
  p.set_integer(1, true);
  p.objective_offset = -2.5;
  const auto text = to_lp_format(p);
  const auto q = parse_lp_format(text);
  REQUIRE(q.num_cols() == p.num_cols());
  REQUIRE(q.num_rows() == p.num_rows());
  CHECK(to_lp_format(q) == text);
  const auto a = solve_lp(p);
  const auto b = solve_lp(q);
  REQUIRE(a.status == Status::optimal);
  CHECK(b.objective == doctest::Approx(a.objective));
}

TEST_CASE("LP format parser accepts common spellings") {
  const auto p = parse_lp_format(
      "\\ comment\nmaximize\n obj: 3 x + 2 y\nsubject to\n c1: x + y <= 4\n c2: x + 3 y <= 6\n"
      "bounds\n x <= 3\n y >= -1e+0\nend\n");
  CHECK(p.objective_sense == ObjectiveSense::maximize);
  const auto s = solve_lp(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(11));
}

TEST_CASE("external engine contract: LP file in, solution file out") {
  LpProblem p;
  p.objective_sense = ObjectiveSense::maximize;
  const int x = p.add_column("x", 0, 10, 1.0);
  p.add_row("cap", {{x, 1.0}}, Sense::le, 3.0);
  ExternalSolver engine;
  engine.work_dir = (std::filesystem::temp_directory_path() / "coplan_ext_test").string();
  engine.command = "grep -q 'cap' {lp} && printf 'status optimal\\nobjective 3\\nx x 3\\ndual cap 1\\n' > {sol}";
  const auto s = solve_lp_external(p, engine);
  CHECK(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(3.0));
  CHECK(s.x[0] == doctest::Approx(3.0));
  REQUIRE(s.row_duals.size() == 1);
  CHECK(s.row_duals[0] == doctest::Approx(1.0));

  const auto native = solve_lp(p);
  const auto back = parse_solution_text(p, to_solution_text(p, native));
  CHECK(back.status == native.status);
  CHECK(back.objective == doctest::Approx(native.objective));
  CHECK(back.x == native.x);

  engine.command = "true";
  CHECK_THROWS(solve_lp_external(p, engine));
}

TEST_SUITE_END();
