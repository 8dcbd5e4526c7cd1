#include "tricoin/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tricoin
{

namespace
{

void require(bool condition, const std::string& message)
{
  if (!condition)
  {
    throw std::invalid_argument(message);
  }
}

bool positive(double value)
{
  return std::isfinite(value) && value > 0.0;
}

}  // namespace

void CoinSpec::validate() const
{
  require(positive(height), "coin.height must be positive and finite, got: " + std::to_string(height));
  require(positive(radius), "coin.radius must be positive and finite, got: " + std::to_string(radius));
  require(positive(mass), "coin.mass must be positive and finite, got: " + std::to_string(mass));
}

double CoinSpec::aspect_ratio() const
{
  return height / radius;
}

double CoinSpec::half_diagonal() const
{
  return std::hypot(radius, 0.5 * height);
}

void Material::validate() const
{
  require(std::isfinite(restitution) && restitution >= 0.0 && restitution <= 1.0,
          "material.restitution must be in [0, 1], got: " + std::to_string(restitution));
  require(std::isfinite(friction) && friction >= 0.0,
          "material.friction must be non-negative, got: " + std::to_string(friction));
  require(positive(impact_tau), "material.impact_tau must be positive, got: " + std::to_string(impact_tau));
  if (impact_eta)
  {
    require(std::isfinite(*impact_eta) && *impact_eta >= 0.0,
            "material.impact_eta must be non-negative, got: " + std::to_string(*impact_eta));
  }
  else
  {
    require(positive(youngs_modulus),
            "material.youngs_modulus must be positive, got: " + std::to_string(youngs_modulus));
    require(std::isfinite(poisson_ratio) && poisson_ratio >= 0.0 && poisson_ratio < 0.5,
            "material.poisson_ratio must be in [0, 0.5), got: " + std::to_string(poisson_ratio));
  }
  require(std::isfinite(rolling_resistance) && rolling_resistance >= 0.0,
          "material.rolling_resistance must be non-negative, got: " + std::to_string(rolling_resistance));
}

Inertia inertia_of(const CoinSpec& spec)
{
  require(positive(spec.mass), "inertia_of: mass must be positive, got: " + std::to_string(spec.mass));
  require(positive(spec.radius), "inertia_of: radius must be positive, got: " + std::to_string(spec.radius));
  require(std::isfinite(spec.height) && spec.height >= 0.0,
          "inertia_of: height must be non-negative, got: " + std::to_string(spec.height));

  const double r2 = spec.radius * spec.radius;
  const double h2 = spec.height * spec.height;
  return Inertia{spec.mass * (3.0 * r2 + h2) / 12.0, 0.5 * spec.mass * r2};
}

double aspect_ratio(const CoinSpec& spec)
{
  return spec.aspect_ratio();
}

std::string_view to_string(Outcome outcome)
{
  switch (outcome)
  {
    case Outcome::Side:
      return "SIDE";
    case Outcome::FaceUp:
      return "FACE_UP";
    case Outcome::FaceDown:
      return "FACE_DOWN";
  }
  return "UNKNOWN";
}

std::optional<Outcome> outcome_from_string(std::string_view text)
{
  if (text == "SIDE")
  {
    return Outcome::Side;
  }
  if (text == "FACE_UP")
  {
    return Outcome::FaceUp;
  }
  if (text == "FACE_DOWN")
  {
    return Outcome::FaceDown;
  }
  return std::nullopt;
}

}  // namespace tricoin
