#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tricoin/analytic.hpp"
#include "tricoin/core.hpp"
#include "tricoin/sim2d.hpp"

using namespace tricoin;

TEST(Flat, Examples)
{
  EXPECT_DOUBLE_EQ(flat_probability(0.0), 0.0);
  EXPECT_NEAR(flat_probability(2.0), 0.5, 1e-12);
  EXPECT_NEAR(flat_probability(1.1547005), 1.0 / 3.0, 1e-6);
}

TEST(Volumetric, Examples)
{
  EXPECT_DOUBLE_EQ(volumetric_probability(0.0), 0.0);
  EXPECT_NEAR(volumetric_probability(0.70710678), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(volumetric_probability(2.0), 0.70710678, 1e-6);
}

TEST(FairRatio, ClosedForms)
{
  EXPECT_NEAR(fair_ratio(AnalyticModel::Flat), 2.0 * std::tan(std::numbers::pi / 6.0), 1e-12);
  EXPECT_NEAR(fair_ratio(AnalyticModel::Volumetric), 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(probability(AnalyticModel::Flat, fair_ratio(AnalyticModel::Flat)), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(probability(AnalyticModel::Volumetric, fair_ratio(AnalyticModel::Volumetric)), 1.0 / 3.0, 1e-12);
}

TEST(Analytic, RejectsBadRatio)
{
  EXPECT_THROW(flat_probability(-1.0), std::invalid_argument);
  EXPECT_THROW(volumetric_probability(-0.5), std::invalid_argument);
  EXPECT_THROW(flat_probability(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  EXPECT_THROW(volumetric_probability(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Analytic, MonotoneAndBounded)
{
  double previous_flat = -1.0;
  double previous_vol = -1.0;
  for (double r = 0.0; r < 50.0; r += 0.01)
  {
    const double f = flat_probability(r);
    const double v = volumetric_probability(r);
    EXPECT_GT(f, previous_flat);
    EXPECT_GT(v, previous_vol);
    EXPECT_LT(f, 1.0);
    EXPECT_LT(v, 1.0);
    previous_flat = f;
    previous_vol = v;
  }
}

// Oracle: measure of the uniform-angle set classified as Side by the rest rule.
TEST(Flat, MatchesAngleMeasureOfRestRule)
{
  for (const double ratio : {0.5, 1.0, 1.5, 2.0, 3.0})
  {
    const CoinSpec spec{ratio, 1.0, 1.0};
    const int n = 200000;
    int side = 0;
    for (int i = 0; i < n; ++i)
    {
      const double phi = std::numbers::pi * (i + 0.5) / n;
      side += classify_rest_2d(phi, spec) == Outcome::Side ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(side) / n, flat_probability(ratio), 1e-4) << "ratio " << ratio;
  }
}

// Oracle: fraction of the sphere area within the side band of the inscribed sphere.
TEST(Volumetric, MatchesBandArea)
{
  for (const double ratio : {0.4, 0.8, 2.0})
  {
    // Band |z| < h/2 on a sphere of radius sqrt(R^2 + h^2/4), R = 1.
    const double h = ratio;
    const double sphere_radius = std::sqrt(1.0 + h * h / 4.0);
    const double band = h / (2.0 * sphere_radius);
    EXPECT_NEAR(band, volumetric_probability(ratio), 1e-12);
  }
}
