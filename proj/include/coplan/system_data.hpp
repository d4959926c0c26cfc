#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace coplan {

/// Raised by the loaders. `kind` separates malformed files from bad references
/// and out-of-range values so callers can map them to exit codes.
class InputError : public std::runtime_error {
 public:
  enum class Kind { parse, reference, domain, io };
  InputError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct Bus {
  int id = 0;
  double peak_load_mw = 0.0;
  bool is_new = false;
  // Falls back to PolicyEconomics::shed_cost_usd_per_mwh when absent.
  std::optional<double> shed_cost_usd_per_mwh;
};

struct ExistingLine {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double susceptance_pu = 0.0;
  double capacity_mw = 0.0;
  int circuits = 1;
};

struct CandidateLine {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double length_km = 0.0;
  double invest_cost_musd_per_km = 0.0;
  double row_cost_musd_per_km = 0.0;
  std::optional<double> substation_cost_musd;  // new corridors only
  double susceptance_pu = 0.0;
  double capacity_mw = 0.0;
  int circuits = 1;
  int max_parallel = 1;
  bool is_new_corridor = false;
};

struct BundlingOption {
  std::string name;  // "two_per_phase" | "four_per_phase"
  double cost_musd_per_km = 0.0;
  double uprate = 0.0;
};

struct BundlingCandidate {
  int id = 0;
  int target_line = 0;  // ExistingLine id
  double length_km = 0.0;
  std::vector<BundlingOption> options;
};

struct ThermalUnit {
  int id = 0;
  int bus = 0;
  double pmin_mw = 0.0;
  double pmax_mw = 0.0;
  std::vector<double> segment_costs_usd_per_mwh;
  double ramp_up_mw = 0.0;
  double ramp_down_mw = 0.0;
  // Committed in every hour; no commitment binary is created.
  bool must_run = false;

  std::size_t segments() const { return segment_costs_usd_per_mwh.size(); }
};

struct WindCandidate {
  int bus = 0;
  double max_capacity_mw = 0.0;
  double invest_cost_musd_per_mw = 0.0;
  double curtail_cost_usd_per_mwh = 0.0;
};

struct StorageCandidate {
  int bus = 0;
  double max_power_mw = 0.0;
  double max_energy_mwh = 0.0;
  double power_cost_usd_per_mw = 0.0;
  double energy_cost_usd_per_mwh = 0.0;
  double degradation_cost_usd_per_mwh = 0.0;
  double eta_charge = 0.9;
  double eta_discharge = 0.9;
  double energy_to_power_h = 3.0;
};

struct PolicyEconomics {
  int stages = 3;
  int stage_years = 2;
  double interest_rate = 0.05;
  // Required by the objective for every asset class that has candidates.
  std::optional<double> lifetime_line_years;
  std::optional<double> lifetime_storage_years;
  std::optional<double> lifetime_wind_years;
  double rps_share = 0.15;           // alpha
  double max_curtailment = 0.5;      // beta
  double max_hourly_shed = 0.0;      // gamma
  double max_annual_shed = 0.0;      // Phi
  double reserve_cost_factor = 0.1;  // chi
  double load_growth = 0.05;
  double base_mva = 100.0;
  double shed_cost_usd_per_mwh = 1000.0;
  double theta_max_rad = 0.6;
  double reserve_wind_share = 0.05;
  double reserve_load_share = 0.03;
};

struct SystemData {
  std::string name;
  std::vector<Bus> buses;
  std::vector<ExistingLine> existing_lines;
  std::vector<CandidateLine> candidate_lines;
  std::vector<BundlingCandidate> bundling;
  std::vector<ThermalUnit> units;
  std::vector<WindCandidate> wind;
  std::vector<StorageCandidate> storage;
  PolicyEconomics policy;

  /// Dense 0-based index of a bus id; throws InputError(reference) if unknown.
  std::size_t bus_index(int id) const;
  std::size_t existing_line_index(int id) const;
  /// Bundling candidate targeting the given existing line, if any.
  std::optional<std::size_t> bundling_for_line(std::size_t line_index) const;

  double total_peak_load() const;
  double shed_cost(std::size_t bus) const;

  /// Sorts every collection by id and rebuilds the lookup tables.
  void reindex();

 private:
  std::map<int, std::size_t> bus_lookup_;
  std::map<int, std::size_t> line_lookup_;
};

bool operator==(const SystemData& a, const SystemData& b);

struct ValidationIssue {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string kind;  // "domain", "reference", "connectivity", ...
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const;  // no errors (warnings allowed)
  bool empty() const { return issues.empty(); }
};

SystemData load_system(const std::filesystem::path& path);
SystemData parse_system(const std::string& json_text);
std::string serialize_system(const SystemData& sys);
void save_system(const SystemData& sys, const std::filesystem::path& path);

ValidationReport validate(const SystemData& sys);

struct IncidenceMatrices {
  Eigen::MatrixXd A;   // existing line x bus
  Eigen::MatrixXd K;   // candidate line x bus
  Eigen::MatrixXd Ab;  // bundling candidate x existing line
};

IncidenceMatrices incidence_matrices(const SystemData& sys);

/// Hourly load and wind availability factors, both in [0,1].
struct HourlySeries {
  std::vector<double> load_factor;
  std::vector<double> wind_factor;
  std::size_t size() const { return load_factor.size(); }
};

HourlySeries load_series_csv(const std::filesystem::path& path);
void save_series_csv(const HourlySeries& series, const std::filesystem::path& path);

/// Deterministic synthetic year (daily and seasonal load shape, autocorrelated wind).
HourlySeries synthetic_series(std::size_t hours, unsigned seed);

}  // namespace coplan
