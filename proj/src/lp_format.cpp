#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "coplan/lp.hpp"

namespace coplan::lp {

namespace {

std::string sanitize(const std::string& name, char fallback) {
  std::string out;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    out += std::isalnum(c) || ch == '_' || ch == '.' || ch == '[' || ch == ']' || ch == '(' || ch == ')' ? ch : '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') out.insert(out.begin(), fallback);
  // 'e' followed by digits would read as a number exponent in some parsers.
  if (out[0] == 'e' || out[0] == 'E') out.insert(out.begin(), '_');
  return out;
}

std::vector<std::string> unique_names(std::size_t n, const auto& get, char fallback) {
  std::vector<std::string> names;
  std::set<std::string> used;
  for (std::size_t k = 0; k < n; ++k) {
    std::string base = sanitize(get(k), fallback);
    std::string name = base;
    for (int s = 1; used.count(name); ++s) name = base + "_" + std::to_string(s);
    used.insert(name);
    names.push_back(std::move(name));
  }
  return names;
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_terms(std::ostringstream& os, const std::vector<std::pair<double, std::string>>& terms) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const double c = terms[k].first;
    os << (c < 0 ? " - " : k == 0 ? " " : " + ") << num(std::abs(c)) << ' ' << terms[k].second;
    if (k % 8 == 7) os << "\n  ";
  }
}

}  // namespace

LpNames lp_format_names(const LpProblem& p) {
  return {unique_names(static_cast<std::size_t>(p.num_cols()), [&](std::size_t j) { return p.col_name(static_cast<int>(j)); }, 'x'),
          unique_names(static_cast<std::size_t>(p.num_rows()), [&](std::size_t i) { return p.row_name(static_cast<int>(i)); }, 'r')};
}

std::string to_lp_format(const LpProblem& p) {
  const auto names = lp_format_names(p);
  const auto& cols = names.cols;
  const auto& rows = names.rows;
  std::ostringstream os;
  os << (p.objective_sense == ObjectiveSense::maximize ? "Maximize\n" : "Minimize\n") << " obj:";
  std::vector<std::pair<double, std::string>> obj;
  for (int j = 0; j < p.num_cols(); ++j)
    if (p.cost(j) != 0.0) obj.emplace_back(p.cost(j), cols[static_cast<std::size_t>(j)]);
  write_terms(os, obj);
  if (p.objective_offset != 0.0) os << (p.objective_offset < 0 ? " - " : " + ") << num(std::abs(p.objective_offset));
  os << "\nSubject To\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    os << ' ' << rows[static_cast<std::size_t>(i)] << ':';
    std::vector<std::pair<double, std::string>> terms;
    const auto [b, e] = p.row_range(i);
    for (auto k = b; k < e; ++k) terms.emplace_back(p.terms()[k].coef, cols[static_cast<std::size_t>(p.terms()[k].col)]);
    write_terms(os, terms);
    os << (p.sense(i) == Sense::le ? " <= " : p.sense(i) == Sense::ge ? " >= " : " = ") << num(p.rhs(i)) << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < p.num_cols(); ++j) {
    const double lo = p.col_lo(j), hi = p.col_hi(j);
    const auto& n = cols[static_cast<std::size_t>(j)];
    if (lo == -kInf && hi == kInf) os << ' ' << n << " free\n";
    else if (lo == hi) os << ' ' << n << " = " << num(lo) << '\n';
    else os << ' ' << (lo == -kInf ? "-inf" : num(lo)) << " <= " << n << " <= " << (hi == kInf ? "+inf" : num(hi)) << '\n';
  }
  if (p.has_integers()) {
    os << "Generals\n";
    for (int j = 0; j < p.num_cols(); ++j)
      if (p.is_integer(j)) os << ' ' << cols[static_cast<std::size_t>(j)] << '\n';
  }
  os << "End\n";
  return os.str();
}

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
      std::size_t k = 0;
      while (k < line.size()) {
        const char ch = line[k];
        if (std::isspace(static_cast<unsigned char>(ch))) {
          ++k;
        } else if (ch == '<' || ch == '>' || ch == '=') {
          std::string op(1, ch);
          ++k;
          if (k < line.size() && line[k] == '=') op += '=', ++k;
          if (op == "=<") op = "<=";
          if (op == "=>") op = ">=";
          if (op == "<") op = "<=";
          if (op == ">") op = ">=";
          tokens_.push_back(op);
        } else if (ch == '+' || ch == '-' || ch == ':') {
          tokens_.emplace_back(1, ch);
          ++k;
        } else {
          std::size_t e = k;
          while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e])) && line[e] != ':' && line[e] != '<' &&
                 line[e] != '>' && line[e] != '=' && !((line[e] == '+' || line[e] == '-') && e > k && !is_exp(line, k, e)))
            ++e;
          tokens_.push_back(line.substr(k, e - k));
          k = e;
        }
      }
    }
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const std::string& peek(std::size_t ahead = 0) const {
    static const std::string empty;
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : empty;
  }
  std::string next() {
    if (done()) throw std::invalid_argument("LP format: unexpected end of input");
    return tokens_[pos_++];
  }

 private:
  static bool is_exp(const std::string& line, std::size_t start, std::size_t e) {
    // A sign right after 'e'/'E' inside a numeric token belongs to the exponent.
    if (line[e - 1] != 'e' && line[e - 1] != 'E') return false;
    for (std::size_t k = start; k + 1 < e; ++k)
      if (!std::isdigit(static_cast<unsigned char>(line[k])) && line[k] != '.') return false;
    return true;
  }
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_number(const std::string& s, double& v) {
  const std::string l = lower(s);
  if (l == "inf" || l == "infinity") {
    v = kInf;
    return true;
  }
  if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.')) return false;
  std::size_t used = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

bool is_section(const std::string& tok, const Tokenizer& t) {
  const std::string l = lower(tok);
  if (l == "subject" && lower(t.peek(1)) == "to") return true;
  return l == "st" || l == "s.t." || l == "bounds" || l == "bound" || l == "generals" || l == "general" || l == "gen" ||
         l == "binaries" || l == "binary" || l == "bin" || l == "end";
}

}  // namespace

LpProblem parse_lp_format(const std::string& text) {
  Tokenizer t(text);
  LpProblem p;
  std::map<std::string, int> col_of;
  struct PendingCol {
    std::string name;
    double cost = 0, lo = 0, hi = kInf;
    bool integer = false;
  };
  std::vector<PendingCol> cols;
  auto col = [&](const std::string& name) {
    auto [it, inserted] = col_of.emplace(name, static_cast<int>(cols.size()));
    if (inserted) cols.push_back({name});
    return it->second;
  };
  struct PendingRow {
    std::string name;
    std::vector<Term> terms;
    Sense sense;
    double rhs;
  };
  std::vector<PendingRow> rows;

  // Reads "[+|-] [coef] name" or a bare constant until a stop token.
  auto read_expr = [&](std::vector<Term>& terms, double& constant) {
    while (!t.done()) {
      const std::string& tk = t.peek();
      if (tk == "<=" || tk == ">=" || tk == "=" || is_section(tk, t)) break;
      if (t.peek(1) == ":") break;
      double s = 1.0;
      while (t.peek() == "+" || t.peek() == "-") s *= t.next() == "-" ? -1.0 : 1.0;
      double c = 1.0;
      std::string tok = t.next();
      if (double v; is_number(tok, v)) {
        const std::string& nx = t.peek();
        double dummy;
        if (nx.empty() || nx == "+" || nx == "-" || nx == "<=" || nx == ">=" || nx == "=" || is_section(nx, t) ||
            t.peek(1) == ":" || is_number(nx, dummy)) {
          constant += s * v;
          continue;
        }
        c = v;
        tok = t.next();
      }
      terms.push_back({col(tok), s * c});
    }
  };

  const std::string head = lower(t.next());
  if (head == "maximize" || head == "maximum" || head == "max") p.objective_sense = ObjectiveSense::maximize;
  else if (head != "minimize" && head != "minimum" && head != "min") throw std::invalid_argument("LP format: expected objective section");
  if (t.peek(1) == ":") t.next(), t.next();
  {
    std::vector<Term> terms;
    double constant = 0.0;
    read_expr(terms, constant);
    for (const auto& term : terms) cols[static_cast<std::size_t>(term.col)].cost += term.coef;
    p.objective_offset = constant;
  }

  std::string section;
  while (!t.done()) {
    std::string tk = t.next();
    const std::string l = lower(tk);
    if (l == "subject") {
      t.next();
      section = "st";
      continue;
    }
    if (l == "st" || l == "s.t.") { section = "st"; continue; }
    if (l == "bounds" || l == "bound") { section = "bounds"; continue; }
    if (l == "generals" || l == "general" || l == "gen") { section = "gen"; continue; }
    if (l == "binaries" || l == "binary" || l == "bin") { section = "bin"; continue; }
    if (l == "end") break;

    if (section == "st") {
      if (t.peek() != ":") throw std::invalid_argument("LP format: constraint rows must be named ('name: ...')");
      const std::string name = tk;
      t.next();
      std::vector<Term> terms;
      double constant = 0.0;
      read_expr(terms, constant);
      const std::string op = t.next();
      Sense sense = op == "<=" ? Sense::le : op == ">=" ? Sense::ge : Sense::eq;
      double rs = 1.0;
      while (t.peek() == "+" || t.peek() == "-") rs *= t.next() == "-" ? -1.0 : 1.0;
      double rhs;
      if (!is_number(t.next(), rhs)) throw std::invalid_argument("LP format: expected numeric right-hand side in " + name);
      rows.push_back({name, std::move(terms), sense, rs * rhs - constant});
    } else if (section == "bounds") {
      // Forms: "x free", "x = v", "lo <= x <= hi", "x <= hi", "x >= lo", "lo <= x".
      double s = 1.0;
      std::string first = tk;
      while (first == "+" || first == "-") s *= first == "-" ? -1.0 : 1.0, first = t.next();
      double v;
      if (is_number(first, v)) {
        const std::string op = t.next();
        const int j = col(t.next());
        auto& c = cols[static_cast<std::size_t>(j)];
        if (op == "<=") c.lo = s * v;
        else if (op == ">=") c.hi = s * v;
        else c.lo = c.hi = s * v;
        if (t.peek() == "<=" || t.peek() == ">=") {
          const std::string op2 = t.next();
          double s2 = 1.0;
          while (t.peek() == "+" || t.peek() == "-") s2 *= t.next() == "-" ? -1.0 : 1.0;
          double w;
          if (!is_number(t.next(), w)) throw std::invalid_argument("LP format: bad bound");
          if (op2 == "<=") c.hi = s2 * w;
          else c.lo = s2 * w;
        }
      } else {
        const int j = col(first);
        auto& c = cols[static_cast<std::size_t>(j)];
        if (lower(t.peek()) == "free") {
          t.next();
          c.lo = -kInf;
          c.hi = kInf;
          continue;
        }
        const std::string op = t.next();
        double s2 = 1.0;
        while (t.peek() == "+" || t.peek() == "-") s2 *= t.next() == "-" ? -1.0 : 1.0;
        double w;
        if (!is_number(t.next(), w)) throw std::invalid_argument("LP format: bad bound for " + first);
        if (op == "<=") c.hi = s2 * w;
        else if (op == ">=") c.lo = s2 * w;
        else c.lo = c.hi = s2 * w;
      }
    } else if (section == "gen" || section == "bin") {
      auto& c = cols[static_cast<std::size_t>(col(tk))];
      c.integer = true;
      if (section == "bin") c.lo = 0.0, c.hi = 1.0;
    } else {
      throw std::invalid_argument("LP format: unexpected token '" + tk + "'");
    }
  }

  for (const auto& c : cols) p.add_column(c.name, c.lo, c.hi, c.cost, c.integer);
  for (const auto& r : rows) p.add_row(r.name, r.terms, r.sense, r.rhs);
  return p;
}

}  // namespace coplan::lp
