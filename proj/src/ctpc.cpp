#include "coplan/ctpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

namespace coplan {

namespace {

Eigen::VectorXd mean_of_rows(const Eigen::MatrixXd& points, std::size_t first, std::size_t last) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(points.cols());
  for (std::size_t r = first; r <= last; ++r) sum += points.row(static_cast<Eigen::Index>(r)).transpose();
  return sum / static_cast<double>(last - first + 1);
}

double ward(std::size_t na, const Eigen::VectorXd& ca, std::size_t nb, const Eigen::VectorXd& cb) {
  const double a = static_cast<double>(na);
  const double b = static_cast<double>(nb);
  return 2.0 * a * b / (a + b) * (ca - cb).squaredNorm();
}

}  // namespace

double ward_dissimilarity(const HourlyCluster& a, const HourlyCluster& b) {
  const bool adjacent = a.end_hour + 1 == b.start_hour || b.end_hour + 1 == a.start_hour;
  if (!adjacent) throw std::invalid_argument("ward_dissimilarity: clusters are not chronologically adjacent");
  if (a.centroid.size() != b.centroid.size()) throw std::invalid_argument("ward_dissimilarity: dimension mismatch");
  return ward(a.size(), a.centroid, b.size(), b.centroid);
}

std::vector<HourlyCluster> cluster_chronological(const Eigen::MatrixXd& points, std::size_t target) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (target < 1 || target > n) throw std::invalid_argument("cluster_chronological: target count out of range");

  struct Node {
    std::size_t start, end;
    Eigen::VectorXd centroid;
    std::size_t prev, next;  // n means none
    unsigned version = 0;
    bool alive = true;
  };
  std::vector<Node> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = {i, i, points.row(static_cast<Eigen::Index>(i)).transpose(), i == 0 ? n : i - 1, i + 1 == n ? n : i + 1};
  }

  // (dissimilarity, left start hour, left version, right version); min-heap
  // ordered by dissimilarity, then by start hour.
  using Entry = std::tuple<double, std::size_t, unsigned, unsigned>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  auto push_pair = [&](std::size_t left) {
    const auto right = nodes[left].next;
    if (right == n) return;
    const auto& l = nodes[left];
    const auto& r = nodes[right];
    heap.emplace(ward(l.end - l.start + 1, l.centroid, r.end - r.start + 1, r.centroid), left, l.version, r.version);
  };
  for (std::size_t i = 0; i + 1 < n; ++i) push_pair(i);

  std::size_t count = n;
  while (count > target) {
    const auto [d, left, lv, rv] = heap.top();
    heap.pop();
    auto& l = nodes[left];
    if (!l.alive || l.version != lv || l.next == n) continue;
    auto& r = nodes[l.next];
    if (r.version != rv) continue;

    l.end = r.end;
    l.centroid = mean_of_rows(points, l.start, l.end);
    ++l.version;
    r.alive = false;
    l.next = r.next;
    if (l.next != n) nodes[l.next].prev = left;
    --count;
    push_pair(left);
    if (l.prev != n) push_pair(l.prev);
  }

  std::vector<HourlyCluster> out;
  out.reserve(count);
  for (std::size_t i = 0; i != n; i = nodes[i].next) out.push_back({nodes[i].start, nodes[i].end, nodes[i].centroid});
  return out;
}

double RepresentativeSet::total_weight() const {
  return std::accumulate(hours.begin(), hours.end(), 0.0, [](double a, const Representative& r) { return a + r.weight; });
}

RepresentativeSet run_ctpc(const HourlySeries& series, std::size_t target, const CtpcOptions& options) {
  const auto n = series.size();
  if (series.wind_factor.size() != n) throw std::invalid_argument("run_ctpc: load and wind lengths differ");
  if (target < 1 || target > n) throw std::invalid_argument("run_ctpc: target count must lie in [1, series length]");
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(n), 2);
  for (std::size_t h = 0; h < n; ++h) {
    const double l = series.load_factor[h];
    const double w = series.wind_factor[h];
    if (!std::isfinite(l) || !std::isfinite(w) || l < 0.0 || l > 1.0 || w < 0.0 || w > 1.0)
      throw std::invalid_argument("run_ctpc: factors must be finite and lie in [0,1]");
    raw(static_cast<Eigen::Index>(h), 0) = l;
    raw(static_cast<Eigen::Index>(h), 1) = w;
  }
  Eigen::MatrixXd features = raw;
  if (options.normalize) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
      const double lo = features.col(c).minCoeff();
      const double span = features.col(c).maxCoeff() - lo;
      if (span > 0.0) features.col(c) = ((features.col(c).array() - lo) / span).matrix();
      else features.col(c).setZero();
    }
  }
  RepresentativeSet reps;
  reps.source_hours = n;
  for (const auto& c : cluster_chronological(features, target)) {
    const Eigen::VectorXd centroid = options.normalize ? mean_of_rows(raw, c.start_hour, c.end_hour) : c.centroid;
    reps.hours.push_back({centroid(0), centroid(1), static_cast<double>(c.size()), c.start_hour, c.end_hour});
  }
  return reps;
}

double duration_curve_rmse(const std::vector<double>& original, const std::vector<double>& values,
                           const std::vector<double>& weights) {
  std::vector<double> recon;
  recon.reserve(original.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto copies = static_cast<std::size_t>(std::llround(weights[k]));
    recon.insert(recon.end(), copies, values[k]);
  }
  if (recon.size() != original.size())
    throw std::invalid_argument("duration_curve_rmse: weights do not sum to the series length");
  std::vector<double> sorted = original;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::sort(recon.begin(), recon.end(), std::greater<>());
  double acc = 0.0;
  for (std::size_t h = 0; h < sorted.size(); ++h) acc += (sorted[h] - recon[h]) * (sorted[h] - recon[h]);
  return sorted.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(sorted.size()));
}

namespace {

double weighted_correlation(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0, mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sw += w[i], mx += w[i] * x[i], my += w[i] * y[i];
  mx /= sw;
  my /= sw;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
    syy += w[i] * (y[i] - my) * (y[i] - my);
  }
  // A constant feature has no defined correlation; treat it as uncorrelated.
  if (sxx <= 1e-300 || syy <= 1e-300) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

RepresentationError representation_error(const HourlySeries& series, const RepresentativeSet& reps) {
  std::vector<double> lf, wf, w;
  for (const auto& r : reps.hours) lf.push_back(r.load_factor), wf.push_back(r.wind_factor), w.push_back(r.weight);
  RepresentationError e;
  e.load_rmse = duration_curve_rmse(series.load_factor, lf, w);
  e.wind_rmse = duration_curve_rmse(series.wind_factor, wf, w);
  const std::vector<double> ones(series.size(), 1.0);
  e.correlation_error = std::abs(weighted_correlation(series.load_factor, series.wind_factor, ones) -
                                 weighted_correlation(lf, wf, w));
  return e;
}

RepresentativeSet load_representatives_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(InputError::Kind::io, "cannot open representatives file " + path.string());
  std::string line;
  std::getline(in, line);
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
  if (line != "index,load_factor,wind_factor,weight")
    throw InputError(InputError::Kind::parse,
                     path.string() + ": expected header 'index,load_factor,wind_factor,weight'");
  RepresentativeSet reps;
  std::size_t hour = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string idx, lf, wf, wt;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, lf, ',') || !std::getline(ss, wf, ',') ||
        !std::getline(ss, wt, ','))
      throw InputError(InputError::Kind::parse, path.string() + ": expected 4 columns");
    Representative r;
    try {
      r.load_factor = std::stod(lf);
      r.wind_factor = std::stod(wf);
      r.weight = std::stod(wt);
    } catch (const std::exception&) {
      throw InputError(InputError::Kind::parse, path.string() + ": non-numeric value");
    }
    if (r.load_factor < 0 || r.load_factor > 1 || r.wind_factor < 0 || r.wind_factor > 1 || !(r.weight > 0))
      throw InputError(InputError::Kind::domain, path.string() + ": factors must lie in [0,1] and weights be > 0");
    r.start_hour = hour;
    hour += static_cast<std::size_t>(std::llround(r.weight));
    r.end_hour = hour == 0 ? 0 : hour - 1;
    reps.hours.push_back(r);
  }
  if (reps.hours.empty()) throw InputError(InputError::Kind::parse, path.string() + ": no representatives");
  reps.source_hours = hour;
  return reps;
}

void save_representatives_csv(const RepresentativeSet& reps, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError(InputError::Kind::io, "cannot write " + path.string());
  out << "index,load_factor,wind_factor,weight\n";
  out.precision(17);
  for (std::size_t k = 0; k < reps.hours.size(); ++k) {
    const auto& r = reps.hours[k];
    out << k + 1 << ',' << r.load_factor << ',' << r.wind_factor << ',' << r.weight << '\n';
  }
}

}  // namespace coplan
