#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "coplan/system_data.hpp"

namespace coplan {

/// A contiguous run of hours [start_hour, end_hour] and its mean feature vector.
struct HourlyCluster {
  std::size_t start_hour = 0;
  std::size_t end_hour = 0;
  Eigen::VectorXd centroid;

  std::size_t size() const { return end_hour - start_hour + 1; }
};

/// Ward linkage between two chronologically adjacent clusters:
/// 2|h||h'|/(|h|+|h'|) times the squared Euclidean distance of the centroids.
/// Throws std::invalid_argument when the clusters do not touch.
double ward_dissimilarity(const HourlyCluster& a, const HourlyCluster& b);

/// Greedy agglomeration of adjacent clusters until `target` remain. Rows of
/// `points` are hours, columns are features. Ties go to the earliest pair.
std::vector<HourlyCluster> cluster_chronological(const Eigen::MatrixXd& points, std::size_t target);

struct Representative {
  double load_factor = 0.0;
  double wind_factor = 0.0;
  double weight = 0.0;  // hours represented
  std::size_t start_hour = 0;
  std::size_t end_hour = 0;
};

struct RepresentativeSet {
  std::vector<Representative> hours;  // chronological
  std::size_t source_hours = 0;

  std::size_t size() const { return hours.size(); }
  double total_weight() const;
};

struct CtpcOptions {
  // Min-max scale each feature before measuring distances; centroids stay in
  // the original units.
  bool normalize = false;
};

RepresentativeSet run_ctpc(const HourlySeries& series, std::size_t target, const CtpcOptions& options = {});

struct RepresentationError {
  double load_rmse = 0.0;  // duration-curve RMSE
  double wind_rmse = 0.0;
  double correlation_error = 0.0;  // |corr(original) - weighted corr(representatives)|
};

RepresentationError representation_error(const HourlySeries& series, const RepresentativeSet& reps);

/// Duration-curve RMSE for a single feature, reconstructed by repeating each
/// representative value `weight` times.
double duration_curve_rmse(const std::vector<double>& original, const std::vector<double>& values,
                           const std::vector<double>& weights);

RepresentativeSet load_representatives_csv(const std::filesystem::path& path);
void save_representatives_csv(const RepresentativeSet& reps, const std::filesystem::path& path);

}  // namespace coplan
