#include "tricoin/impact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tricoin
{

namespace
{

constexpr double kHertzExponent = 10.0 / 9.0;
constexpr double kHertzLengthExponent = 8.0 / 9.0;
constexpr double kHertzStiffnessBase = 1.36;

void require(bool condition, const std::string& message)
{
  if (!condition)
  {
    throw std::invalid_argument(message);
  }
}

}  // namespace

HertzParams hertz_params(const Material& material, double contact_length)
{
  require(std::isfinite(material.youngs_modulus) && material.youngs_modulus > 0.0,
          "hertz_params: Young's modulus must be positive");
  require(std::isfinite(material.poisson_ratio) && material.poisson_ratio >= 0.0 && material.poisson_ratio < 0.5,
          "hertz_params: Poisson ratio must be in [0, 0.5)");
  require(std::isfinite(contact_length) && contact_length > 0.0, "hertz_params: contact length must be positive");

  HertzParams params;
  params.nonlinearity = kHertzExponent;
  params.contact_length = contact_length;
  params.composite_modulus =
    material.youngs_modulus / (1.0 - material.poisson_ratio * material.poisson_ratio);
  params.stiffness = params.composite_modulus * std::pow(contact_length, kHertzLengthExponent) /
                     std::pow(kHertzStiffnessBase, kHertzExponent);
  return params;
}

double hertz_force(const HertzParams& params, double indentation)
{
  require(std::isfinite(indentation) && indentation >= 0.0,
          "hertz_force: indentation must be non-negative, got: " + std::to_string(indentation));
  return params.stiffness * std::pow(indentation, params.nonlinearity);
}

double harmonic_impulse(double peak_force, double tau)
{
  require(std::isfinite(tau) && tau > 0.0, "harmonic_impulse: tau must be positive");
  require(std::isfinite(peak_force) && peak_force >= 0.0, "harmonic_impulse: peak force must be non-negative");
  return 2.0 * peak_force * tau / std::numbers::pi;
}

double hertz_peak_force(const HertzParams& params, double mass, double speed)
{
  const double n1 = params.nonlinearity + 1.0;
  const double max_indentation = std::pow(n1 * 0.5 * mass * speed * speed / params.stiffness, 1.0 / n1);
  return hertz_force(params, max_indentation);
}

double hertz_eta(const Material& material, double contact_length, double mass, double speed)
{
  const HertzParams params = hertz_params(material, contact_length);
  return harmonic_impulse(hertz_peak_force(params, mass, speed), material.impact_tau);
}

double impact_lever(const CoinSpec& spec, double tilt, LeverModel lever)
{
  if (lever == LeverModel::Height)
  {
    return spec.height * std::cos(tilt);
  }
  const double diagonal_angle = std::atan2(0.5 * spec.height, spec.radius);
  return std::abs(spec.half_diagonal() * std::cos(tilt + diagonal_angle));
}

double delta_omega(double eta, double lever, double inertia, ContactSide side)
{
  const double magnitude = eta * lever / inertia;
  return side == ContactSide::Leading ? magnitude : -magnitude;
}

double delta_omega(const Material& material,
                   const CoinSpec& spec,
                   double tilt,
                   ContactSide side,
                   LeverModel lever)
{
  if (!material.impact_eta)
  {
    throw std::invalid_argument("delta_omega: impact_eta is not set; derive it with hertz_eta first");
  }
  return delta_omega(*material.impact_eta, impact_lever(spec, tilt, lever), inertia_of(spec).transverse, side);
}

ImpactResult rebound(const ImpactInput& input, double spin_change, double h1, const ReboundParams& params)
{
  require(std::isfinite(h1) && h1 >= 0.0, "rebound: h1 must be non-negative");
  require(input.incoming_speed >= 0.0, "rebound: incoming speed must be non-negative");
  require(params.mass > 0.0 && params.inertia > 0.0 && params.gravity > 0.0,
          "rebound: mass, inertia and gravity must be positive");

  const double k = params.restitution;
  const double m = params.mass;
  const double inertia = params.inertia;
  const double g = params.gravity;
  const double w1 = input.incoming_omega;

  ImpactResult result;
  result.outgoing_omega = w1 + spin_change;
  result.energy_dissipated = (1.0 - k) * m * g * h1;

  const double w2 = result.outgoing_omega;
  // Split as k h1 plus the spin term so that equal spins give exactly k h1.
  const double apex = k * h1 + 0.5 * inertia * (w1 * w1 - w2 * w2) / (m * g);
  if (apex >= 0.0)
  {
    result.outgoing_speed = std::sqrt(2.0 * g * apex);
    result.apex_height = apex;
    return result;
  }

  result.negative_budget = true;
  result.outgoing_speed = 0.0;
  result.apex_height = 0.0;
  if (params.policy == BudgetPolicy::ConserveEnergy)
  {
    const double available = std::sqrt(w1 * w1 + 2.0 * k * m * g * h1 / inertia);
    result.outgoing_omega = std::copysign(available, w2);
  }
  return result;
}

ImpactResult rebound(const ImpactInput& input,
                     const CoinSpec& spec,
                     const Material& material,
                     double h1,
                     const ImpactOptions& options)
{
  const Inertia inertia = inertia_of(spec);
  double eta = 0.0;
  if (material.impact_eta)
  {
    eta = *material.impact_eta;
  }
  else
  {
    const double length = options.contact_length > 0.0 ? options.contact_length : spec.height;
    eta = hertz_eta(material, length, spec.mass, input.incoming_speed);
  }

  const double change =
    delta_omega(eta, impact_lever(spec, input.tilt, options.lever), inertia.transverse, input.side);
  return rebound(input,
                 change,
                 h1,
                 ReboundParams{material.restitution, spec.mass, inertia.transverse, options.gravity, options.policy});
}

}  // namespace tricoin
