#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "coplan/benders.hpp"

namespace coplan {

/// Everything a planning run depends on. Scheme presets I..VI set the toggles.
struct RunConfig {
  std::string system_path;
  std::string series_path;  // hourly series CSV; empty: synthetic year from seed
  std::string reps_path;    // representative hours CSV; overrides the series
  std::string output_dir = "out";
  std::string mode = "bdd";  // "bdd" | "monolithic"
  bool new_lines = true;
  bool bundling = true;
  bool storage = true;
  bool wind = true;
  bool n1 = false;
  bool screening = false;
  std::optional<double> gamma, phi;
  bool literal_hours = false;
  double tau = 1e-4;
  std::size_t pool_size = 5;
  bool use_poc = true;
  int max_iterations = 200;
  double screening_threshold = 0.2;
  bool screen_once = false;
  std::size_t hours = 4;  // representative hours when clustering
  unsigned seed = 7;

  ModelOptions model_options() const;
  BddOptions bdd_options() const;
  std::string to_json() const;
};

/// Applies one of the schemes "I".."VI"; throws std::invalid_argument otherwise.
void apply_scheme(RunConfig& config, const std::string& scheme);

struct LineBuild {
  int stage;  // 1-based
  int line_id;
  int circuit;  // 1-based
  int from_bus, to_bus;
};
struct BundleBuild {
  int stage;
  int bundle_id;
  int target_line;
  std::string option;
  double uprate;
};
struct CapacityRow {
  int stage;
  int bus;
  double power_mw;
  double energy_mwh;  // storage only
};
struct EnergyRow {
  int stage;
  double load_mwh = 0, thermal_mwh = 0, wind_mwh = 0, storage_mwh = 0, shed_mwh = 0, curtailed_mwh = 0;
};

/// Installed tables are cumulative: a row per stage for everything in
/// service in that stage.
struct PlanReport {
  std::string name;
  std::string mode;
  std::string status;
  double objective = 0.0;
  CostBreakdown costs;
  std::vector<LineBuild> lines;
  std::vector<BundleBuild> bundles;
  std::vector<CapacityRow> wind, storage;
  std::vector<EnergyRow> energy;
  double curtailed_mwh = 0.0, shed_mwh = 0.0;
  // Decomposition runs only.
  int iterations = 0;
  double lower_bound = 0.0, upper_bound = 0.0;

  std::string to_json() const;
  /// Writes report.json plus lines.csv, bundling.csv, wind.csv, storage.csv,
  /// energy.csv and costs.csv.
  void write(const std::filesystem::path& dir) const;
};

PlanReport make_report(const MilpModel& model, const SystemData& sys, const RepresentativeSet& reps, const PlanSolution& plan);

/// Plan decision file: JSON of the binaries by column name.
std::string plan_to_json(const MilpModel& model, const PlanDecision& plan);
PlanDecision plan_from_json(const MilpModel& model, const std::string& text);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& data);

/// Output directory after the COPLAN_OUTPUT_DIR override.
std::filesystem::path resolve_output_dir(const std::string& configured);

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitInput = 2, kExitNonconvergence = 3 };

struct RunOutcome {
  int exit_code = kExitOk;
  std::string message;
  PlanReport report;
  std::optional<BddResult> bdd;
  std::filesystem::path output_dir;
};

/// Representative hours for a config: from reps_path, else clustered from
/// series_path or a synthetic year.
RepresentativeSet representatives_for(const RunConfig& config);

/// Loads, plans and writes report, trace, plan and manifest files.
RunOutcome run_plan(const RunConfig& config);

/// Writes manifest.json (config, its hash, input hashes, seed, version).
void write_manifest(const std::filesystem::path& dir, const std::string& command, const RunConfig& config);

}  // namespace coplan
