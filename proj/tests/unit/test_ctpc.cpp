#include <doctest.h>

#include <filesystem>
#include <random>

#include "coplan/ctpc.hpp"
#include "oracles.hpp"

using namespace coplan;

namespace {

HourlySeries random_series(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  HourlySeries s;
  for (std::size_t h = 0; h < n; ++h) {
    s.load_factor.push_back(u(rng));
    s.wind_factor.push_back(u(rng));
  }
  return s;
}

HourlyCluster cluster(std::size_t a, std::size_t b, std::initializer_list<double> c) {
  HourlyCluster k;
  k.start_hour = a;
  k.end_hour = b;
  k.centroid = Eigen::VectorXd(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) k.centroid[i++] = v;
  return k;
}

}  // namespace

TEST_SUITE_BEGIN("ctpc");

TEST_CASE("Ward distance of adjacent clusters") {
  // 2*1*1/2 * (0.5^2 + 0^2)
  CHECK(ward_dissimilarity(cluster(0, 0, {0.2, 0.1}), cluster(1, 1, {0.7, 0.1})) == doctest::Approx(0.25));
  // sizes 2 and 3: 2*6/5 * 0.1^2
  CHECK(ward_dissimilarity(cluster(0, 1, {0.5}), cluster(2, 4, {0.6})) == doctest::Approx(0.024));
  CHECK_THROWS_AS(ward_dissimilarity(cluster(0, 0, {0.1}), cluster(2, 2, {0.1})), std::invalid_argument);
}

TEST_CASE("greedy merging equals the exhaustive adjacent-merge oracle at every count") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    const std::size_t n = 20 + 9 * seed;
    const HourlySeries s = random_series(n, seed);
    std::vector<std::vector<double>> pts;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 2);
    for (std::size_t h = 0; h < n; ++h) {
      pts.push_back({s.load_factor[h], s.wind_factor[h]});
      m(static_cast<Eigen::Index>(h), 0) = s.load_factor[h];
      m(static_cast<Eigen::Index>(h), 1) = s.wind_factor[h];
    }
    const auto expect = oracle::exhaustive_adjacent_merge(pts);
    for (std::size_t k = 1; k <= n; ++k) {
      const auto got = cluster_chronological(m, k);
      REQUIRE(got.size() == k);
      for (std::size_t c = 0; c < k; ++c) {
        CHECK(got[c].start_hour == expect[k][c].first);
        CHECK(got[c].end_hour == expect[k][c].second);
      }
    }
  }
}

TEST_CASE("weights sum to the series length and centroids are cluster means") {
  const HourlySeries s = random_series(150, 99);
  for (std::size_t k : {1u, 7u, 50u, 150u}) {
    const auto reps = run_ctpc(s, k);
    CHECK(reps.size() == k);
    CHECK(reps.total_weight() == doctest::Approx(150.0));
    CHECK(reps.hours.front().start_hour == 0);
    CHECK(reps.hours.back().end_hour == 149);
    for (const auto& r : reps.hours) {
      double l = 0, w = 0;
      for (std::size_t h = r.start_hour; h <= r.end_hour; ++h) l += s.load_factor[h], w += s.wind_factor[h];
      CHECK(r.load_factor == doctest::Approx(l / r.weight));
      CHECK(r.wind_factor == doctest::Approx(w / r.weight));
      CHECK(r.weight == doctest::Approx(static_cast<double>(r.end_hour - r.start_hour + 1)));
    }
  }
}

TEST_CASE("full resolution is the identity and has zero representation error") {
  const HourlySeries s = random_series(60, 5);
  const auto reps = run_ctpc(s, 60);
  for (std::size_t h = 0; h < 60; ++h) {
    CHECK(reps.hours[h].load_factor == s.load_factor[h]);
    CHECK(reps.hours[h].weight == 1.0);
  }
  const auto err = representation_error(s, reps);
  CHECK(err.load_rmse == doctest::Approx(0.0));
  CHECK(err.wind_rmse == doctest::Approx(0.0));
  CHECK(err.correlation_error == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("representation error shrinks as hours are added") {
  const HourlySeries s = synthetic_series(2000, 11);
  double prev = INFINITY;
  for (std::size_t k : {4u, 24u, 96u, 500u}) {
    const double e = representation_error(s, run_ctpc(s, k)).load_rmse;
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
}

TEST_CASE("normalized clustering keeps centroids in original units") {
  HourlySeries s = random_series(80, 17);
  for (auto& w : s.wind_factor) w *= 0.1;
  const auto reps = run_ctpc(s, 10, CtpcOptions{true});
  CHECK(reps.total_weight() == doctest::Approx(80.0));
  for (const auto& r : reps.hours) {
    double w = 0;
    for (std::size_t h = r.start_hour; h <= r.end_hour; ++h) w += s.wind_factor[h];
    CHECK(r.wind_factor == doctest::Approx(w / r.weight));
  }
}

TEST_CASE("representatives CSV round trip and invalid inputs") {
  const auto reps = run_ctpc(random_series(40, 3), 6);
  const auto path = std::filesystem::temp_directory_path() / "coplan_reps_test.csv";
  save_representatives_csv(reps, path);
  const auto back = load_representatives_csv(path);
  REQUIRE(back.size() == reps.size());
  for (std::size_t k = 0; k < reps.size(); ++k) {
    CHECK(back.hours[k].load_factor == doctest::Approx(reps.hours[k].load_factor));
    CHECK(back.hours[k].weight == doctest::Approx(reps.hours[k].weight));
  }
  CHECK_THROWS(run_ctpc(random_series(10, 1), 0));
  CHECK_THROWS(run_ctpc(random_series(10, 1), 11));
  HourlySeries bad = random_series(10, 1);
  bad.load_factor[3] = 1.5;
  CHECK_THROWS(run_ctpc(bad, 3));
}

TEST_SUITE_END();
