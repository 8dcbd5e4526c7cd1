#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "tricoin/core.hpp"

using namespace tricoin;

TEST(Inertia, SolidCylinderClosedForm)
{
  const Inertia inertia = inertia_of(CoinSpec{2.0, 1.0, 12.0});
  EXPECT_DOUBLE_EQ(inertia.transverse, 7.0);
  EXPECT_DOUBLE_EQ(inertia.axial, 6.0);
}

TEST(Inertia, ThinDiskLimit)
{
  const Inertia inertia = inertia_of(CoinSpec{0.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(inertia.transverse, 0.25);
  EXPECT_DOUBLE_EQ(inertia.axial, 0.5);
}

TEST(Inertia, RejectsZeroMass)
{
  EXPECT_THROW(inertia_of(CoinSpec{1.0, 1.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(inertia_of(CoinSpec{1.0, -1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(inertia_of(CoinSpec{-0.1, 1.0, 1.0}), std::invalid_argument);
}

// Independent oracle: Monte Carlo integral of rho (x^2 + z^2) over the cylinder.
TEST(Inertia, MatchesVolumeIntegral)
{
  const CoinSpec spec{0.8, 0.5, 3.0};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double sum_transverse = 0.0;
  double sum_axial = 0.0;
  int inside = 0;
  for (int i = 0; i < 400000; ++i)
  {
    const double x = spec.radius * u(rng);
    const double y = spec.radius * u(rng);
    const double z = 0.5 * spec.height * u(rng);
    if (x * x + y * y > spec.radius * spec.radius)
    {
      continue;
    }
    ++inside;
    sum_transverse += x * x + z * z;
    sum_axial += x * x + y * y;
  }
  const Inertia inertia = inertia_of(spec);
  EXPECT_NEAR(spec.mass * sum_transverse / inside, inertia.transverse, 0.01 * inertia.transverse);
  EXPECT_NEAR(spec.mass * sum_axial / inside, inertia.axial, 0.01 * inertia.axial);
}

TEST(Inertia, LinearInMass)
{
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int i = 0; i < 100; ++i)
  {
    const CoinSpec base{u(rng), u(rng), u(rng)};
    const double c = u(rng);
    CoinSpec scaled = base;
    scaled.mass *= c;
    EXPECT_NEAR(inertia_of(scaled).transverse, c * inertia_of(base).transverse, 1e-12 * c * inertia_of(base).transverse);
    EXPECT_NEAR(inertia_of(scaled).axial, c * inertia_of(base).axial, 1e-12 * c * inertia_of(base).axial);
  }
}

TEST(AspectRatio, Examples)
{
  EXPECT_DOUBLE_EQ(aspect_ratio(CoinSpec{3.0, 2.0, 1.0}), 1.5);
  EXPECT_DOUBLE_EQ(aspect_ratio(CoinSpec{0.8, 1.0, 1.0}), 0.8);
  EXPECT_DOUBLE_EQ(CoinSpec({1.0, 1.0, 1.0}).aspect_ratio(), 1.0);
}

TEST(CoinSpec, ValidateNamesField)
{
  try
  {
    CoinSpec{0.0, 1.0, 1.0}.validate();
    FAIL() << "expected a throw";
  }
  catch (const std::invalid_argument& error)
  {
    EXPECT_NE(std::string(error.what()).find("coin.height"), std::string::npos);
  }
}

TEST(Material, Validate)
{
  Material m;
  EXPECT_NO_THROW(m.validate());
  m.restitution = 1.2;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = Material{};
  m.friction = -0.1;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = Material{};
  m.impact_tau = 0.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
  m = Material{};
  m.impact_eta = -1.0;
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

TEST(Outcome, StringRoundTrip)
{
  for (const Outcome o : {Outcome::Side, Outcome::FaceUp, Outcome::FaceDown})
  {
    EXPECT_EQ(outcome_from_string(to_string(o)), o);
  }
  EXPECT_FALSE(outcome_from_string("EDGE").has_value());
}
