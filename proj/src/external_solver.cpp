#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coplan/lp.hpp"

namespace coplan::lp {

std::string to_solution_text(const LpProblem& problem, const LpSolution& s) {
  const auto names = lp_format_names(problem);
  std::ostringstream os;
  os.precision(17);
  os << "status " << to_string(s.status) << '\n';
  os << "objective " << s.objective << '\n';
  for (std::size_t j = 0; j < s.x.size(); ++j) os << "x " << names.cols[j] << ' ' << s.x[j] << '\n';
  for (std::size_t i = 0; i < s.row_duals.size(); ++i) os << "dual " << names.rows[i] << ' ' << s.row_duals[i] << '\n';
  return os.str();
}

LpSolution parse_solution_text(const LpProblem& problem, const std::string& text) {
  const auto names = lp_format_names(problem);
  std::map<std::string, std::size_t> col_of, row_of;
  for (std::size_t j = 0; j < names.cols.size(); ++j) col_of[names.cols[j]] = j;
  for (std::size_t i = 0; i < names.rows.size(); ++i) row_of[names.rows[i]] = i;

  LpSolution s;
  s.x.assign(names.cols.size(), 0.0);
  bool have_status = false, have_duals = false;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "status") {
      std::string v;
      ls >> v;
      have_status = true;
      if (v == "optimal") s.status = Status::optimal;
      else if (v == "infeasible") s.status = Status::infeasible;
      else if (v == "unbounded") s.status = Status::unbounded;
      else if (v == "iteration_limit") s.status = Status::iteration_limit;
      else s.status = Status::numerical_error;
    } else if (key == "objective") {
      ls >> s.objective;
    } else if (key == "x" || key == "dual") {
      std::string name;
      double v;
      if (!(ls >> name >> v)) throw std::runtime_error("solution file: malformed line '" + line + "'");
      if (key == "x") {
        auto it = col_of.find(name);
        if (it == col_of.end()) throw std::runtime_error("solution file: unknown column " + name);
        s.x[it->second] = v;
      } else {
        auto it = row_of.find(name);
        if (it == row_of.end()) throw std::runtime_error("solution file: unknown row " + name);
        if (!have_duals) s.row_duals.assign(names.rows.size(), 0.0), have_duals = true;
        s.row_duals[it->second] = v;
      }
    } else {
      throw std::runtime_error("solution file: unknown record '" + key + "'");
    }
  }
  if (!have_status) throw std::runtime_error("solution file: missing status line");
  return s;
}

LpSolution solve_lp_external(const LpProblem& problem, const ExternalSolver& solver) {
  namespace fs = std::filesystem;
  const fs::path dir = solver.work_dir.empty() ? fs::temp_directory_path() : fs::path(solver.work_dir);
  fs::create_directories(dir);
  const fs::path lp_path = dir / "model.lp";
  const fs::path sol_path = dir / "model.sol";
  fs::remove(sol_path);
  {
    std::ofstream out(lp_path);
    if (!out) throw std::runtime_error("cannot write " + lp_path.string());
    out << to_lp_format(problem);
  }
  std::string cmd = solver.command;
  auto substitute = [&](const std::string& key, const std::string& value) {
    for (auto p = cmd.find(key); p != std::string::npos; p = cmd.find(key, p + value.size())) cmd.replace(p, key.size(), value);
  };
  substitute("{lp}", "'" + lp_path.string() + "'");
  substitute("{sol}", "'" + sol_path.string() + "'");
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("external solver command failed: " + cmd);
  std::ifstream in(sol_path);
  if (!in) throw std::runtime_error("external solver wrote no solution file " + sol_path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution_text(problem, buf.str());
}

}  // namespace coplan::lp
