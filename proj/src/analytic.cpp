#include "tricoin/analytic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tricoin
{

namespace
{

void check_ratio(double ratio)
{
  if (!std::isfinite(ratio) || ratio < 0.0)
  {
    throw std::invalid_argument("aspect ratio must be finite and non-negative, got: " + std::to_string(ratio));
  }
}

}  // namespace

double flat_probability(double ratio)
{
  check_ratio(ratio);
  return 2.0 * std::atan(0.5 * ratio) / std::numbers::pi;
}

double volumetric_probability(double ratio)
{
  check_ratio(ratio);
  return ratio / std::sqrt(ratio * ratio + 4.0);
}

double probability(AnalyticModel model, double ratio)
{
  return model == AnalyticModel::Flat ? flat_probability(ratio) : volumetric_probability(ratio);
}

double fair_ratio(AnalyticModel model)
{
  if (model == AnalyticModel::Flat)
  {
    return 2.0 * std::tan(std::numbers::pi / 6.0);
  }
  return 1.0 / std::numbers::sqrt2;
}

}  // namespace tricoin
