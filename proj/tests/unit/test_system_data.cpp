#include <doctest.h>

#include <filesystem>

#include "coplan/system_data.hpp"

using namespace coplan;

namespace {

std::string toy(const char* name) { return std::string(COPLAN_DATA_DIR) + "/toys/" + name + ".json"; }

const char* kMinimal = R"({
  "format_version": 1, "name": "tiny",
  "policy": {"stages": 2, "lifetime_line_years": 50},
  "buses": [{"id": 1, "peak_load_mw": 0}, {"id": 2, "peak_load_mw": 50}],
  "existing_lines": [{"id": 1, "from_bus": 1, "to_bus": 2, "susceptance_pu": 10, "capacity_mw": 80}],
  "bundling_candidates": [{"id": 1, "target_line": 1, "length_km": 10}],
  "thermal_units": [{"id": 1, "bus": 1, "pmax_mw": 100, "segment_costs_usd_per_mwh": [10, 20]}]
})";

int error_kind(const std::string& text) {
  try {
    parse_system(text);
  } catch (const InputError& e) {
    return static_cast<int>(e.kind());
  }
  return -1;
}

std::string replaced(std::string s, const std::string& from, const std::string& to) {
  const auto p = s.find(from);
  REQUIRE(p != std::string::npos);
  return s.replace(p, from.size(), to);
}

}  // namespace

TEST_SUITE_BEGIN("system_data");

TEST_CASE("minimal system parses with defaults filled in") {
  const SystemData s = parse_system(kMinimal);
  CHECK(s.buses.size() == 2);
  CHECK(s.policy.stages == 2);
  CHECK(s.policy.interest_rate == doctest::Approx(0.05));
  REQUIRE(s.bundling.size() == 1);
  REQUIRE(s.bundling[0].options.size() == 2);
  CHECK(s.bundling[0].options[0].uprate == doctest::Approx(0.43));
  CHECK(s.bundling[0].options[1].uprate == doctest::Approx(0.85));
  CHECK(s.units[0].ramp_up_mw == doctest::Approx(100));
  CHECK(s.shed_cost(1) == doctest::Approx(1000));
  CHECK(s.total_peak_load() == doctest::Approx(50));
}

TEST_CASE("serialization round trips every toy") {
  for (const char* name : {"toy3_radial", "toy4_bundling", "toy4_storage", "toy5_wind", "toy6_mesh", "toy3_commit", "toy3_short", "one_bus"}) {
    CAPTURE(name);
    const SystemData a = load_system(toy(name));
    const SystemData b = parse_system(serialize_system(a));
    CHECK(a == b);
    CHECK(validate(a).ok());
  }
}

TEST_CASE("malformed, dangling and out-of-range inputs map to error kinds") {
  CHECK(error_kind("{not json") == static_cast<int>(InputError::Kind::parse));
  CHECK(error_kind(replaced(kMinimal, "\"format_version\": 1", "\"format_version\": 9")) == static_cast<int>(InputError::Kind::parse));
  CHECK(error_kind(replaced(kMinimal, "\"to_bus\": 2", "\"to_bus\": 7")) == static_cast<int>(InputError::Kind::reference));
  CHECK(error_kind(replaced(kMinimal, "\"target_line\": 1", "\"target_line\": 4")) == static_cast<int>(InputError::Kind::reference));
  CHECK(error_kind(replaced(kMinimal, "\"capacity_mw\": 80", "\"capacity_mw\": -1")) == static_cast<int>(InputError::Kind::domain));
  CHECK(error_kind(replaced(kMinimal, "\"length_km\": 10}", "\"length_km\": 10, \"options\": [{\"name\": \"two_per_phase\", \"uprate\": 1.5}]}")) ==
        static_cast<int>(InputError::Kind::domain));
  CHECK(error_kind(replaced(kMinimal, "[10, 20]", "[20, 10]")) == static_cast<int>(InputError::Kind::domain));
  CHECK_THROWS_AS(load_system("/nonexistent/system.json"), InputError);
}

TEST_CASE("incidence matrices follow from/to orientation") {
  const SystemData s = load_system(toy("toy4_bundling"));
  const auto m = incidence_matrices(s);
  CHECK(m.A.rows() == 5);
  CHECK(m.A.cols() == 4);
  for (Eigen::Index l = 0; l < m.A.rows(); ++l) {
    CHECK(m.A.row(l).sum() == doctest::Approx(0.0));
    CHECK(m.A.row(l).cwiseAbs().sum() == doctest::Approx(2.0));
  }
  CHECK(m.A(0, 0) == 1.0);
  CHECK(m.A(0, 1) == -1.0);
  CHECK(m.Ab(0, 1) == 1.0);
  CHECK(m.Ab.sum() == doctest::Approx(1.0));
}

TEST_CASE("series CSV round trip and synthetic series range") {
  const HourlySeries a = synthetic_series(500, 3);
  CHECK(a.size() == 500);
  for (std::size_t h = 0; h < a.size(); ++h) {
    CHECK(a.load_factor[h] >= 0.0);
    CHECK(a.load_factor[h] <= 1.0);
    CHECK(a.wind_factor[h] >= 0.0);
    CHECK(a.wind_factor[h] <= 1.0);
  }
  const HourlySeries again = synthetic_series(500, 3);
  CHECK(a.load_factor == again.load_factor);
  const auto path = std::filesystem::temp_directory_path() / "coplan_series_test.csv";
  save_series_csv(a, path);
  const HourlySeries b = load_series_csv(path);
  REQUIRE(b.size() == a.size());
  for (std::size_t h = 0; h < a.size(); ++h) {
    CHECK(b.load_factor[h] == doctest::Approx(a.load_factor[h]).epsilon(1e-12));
    CHECK(b.wind_factor[h] == doctest::Approx(a.wind_factor[h]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(load_series_csv("/nonexistent/series.csv"), InputError);
}

TEST_SUITE_END();
