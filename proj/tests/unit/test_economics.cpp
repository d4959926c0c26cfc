#include <doctest.h>

#include <cmath>

#include "coplan/model.hpp"

using namespace coplan;

TEST_SUITE_BEGIN("economics");

TEST_CASE("capital recovery factor") {
  CHECK(crf(0.05, 50) == doctest::Approx(0.054777).epsilon(1e-6 / 0.054777));
  CHECK(crf(0.05, 10) == doctest::Approx(0.129505).epsilon(1e-6 / 0.129505));
  CHECK(crf(1e-9, 10) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_THROWS_AS(crf(0.0, 10), InputError);
  CHECK_THROWS_AS(crf(-0.01, 10), InputError);
  CHECK_THROWS_AS(crf(0.05, 0.5), InputError);
}

TEST_CASE("stage discount factors") {
  CHECK(std::abs(stage_discount(1, 0.05, DiscountKind::investment) - 2.0 / 1.05) < 1e-12);
  CHECK(stage_discount(1, 0.05, DiscountKind::investment) == doctest::Approx(1.904762).epsilon(1e-6 / 1.9));
  CHECK(stage_discount(1, 0.0, DiscountKind::operation) == doctest::Approx(2.0));
  CHECK(stage_discount(2, 0.05, DiscountKind::operation) == doctest::Approx(2.0 / std::pow(1.05, 4)));
  CHECK(stage_discount(2, 0.05, DiscountKind::investment, 3) == doctest::Approx(3.0 / std::pow(1.05, 5)));
  for (int t = 1; t <= 5; ++t)
    for (double r : {0.01, 0.05, 0.1}) CHECK(stage_discount(t, r, DiscountKind::investment) > stage_discount(t, r, DiscountKind::operation));
}

TEST_CASE("load growth compounds per stage") {
  PolicyEconomics p;
  p.load_growth = 0.05;
  CHECK(load_growth_factor(p, 1) == doctest::Approx(1.1025));
  CHECK(load_growth_factor(p, 3) == doctest::Approx(std::pow(1.05, 6)));
}

TEST_SUITE_END();
