#include <cmath>

#include "coplan/model.hpp"

namespace coplan {

double crf(double rate, double lifetime_years) {
  if (!(rate > 0.0)) throw InputError(InputError::Kind::domain, "crf: interest rate must be > 0");
  if (!(lifetime_years >= 1.0)) throw InputError(InputError::Kind::domain, "crf: lifetime must be >= 1 year");
  const double g = std::pow(1.0 + rate, lifetime_years);
  return rate * g / (g - 1.0);
}

double stage_discount(int stage, double rate, DiscountKind kind, int stage_years) {
  const double years = static_cast<double>(stage_years);
  const double exponent = years * stage - (kind == DiscountKind::investment ? 1.0 : 0.0);
  return years / std::pow(1.0 + rate, exponent);
}

double load_growth_factor(const PolicyEconomics& p, int stage) {
  return std::pow(1.0 + p.load_growth, static_cast<double>(p.stage_years) * stage);
}

}  // namespace coplan
