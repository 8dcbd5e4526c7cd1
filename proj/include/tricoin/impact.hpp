#ifndef TRICOIN_IMPACT_HPP
#define TRICOIN_IMPACT_HPP

#include "tricoin/core.hpp"

namespace tricoin
{

/**
 * Which way the ground reaction turns the coin relative to its spin.
 *
 * Leading: the reaction torque acts along the current rotation and spins the
 * coin up. Trailing: it opposes the rotation and spins the coin down.
 */
enum class ContactSide
{
  Leading,
  Trailing
};

/// Moment arm used for the impact torque.
enum class LeverModel
{
  Height,        // H * cos(theta)
  HalfDiagonal,  // |sqrt(R^2 + H^2/4) * cos(theta + atan(H / 2R))|
};

/// What rebound does when the spin change needs more energy than the impact supplies.
enum class BudgetPolicy
{
  KeepSpin,        // v2 = 0, omega2 kept as computed
  ConserveEnergy,  // v2 = 0, |omega2| capped at the available energy
};

struct ImpactInput
{
  double incoming_speed{0.0};  // downward COM speed, >= 0
  double incoming_omega{0.0};  // signed, positive along the rotation sense
  double tilt{0.0};            // face plane vs ground, [0, pi/2]
  ContactSide side{ContactSide::Leading};
};

struct ImpactResult
{
  double outgoing_speed{0.0};  // upward
  double outgoing_omega{0.0};
  double energy_dissipated{0.0};
  double apex_height{0.0};     // h3: rise of the COM above the impact position
  bool negative_budget{false};
};

struct HertzParams
{
  double stiffness{0.0};
  double nonlinearity{10.0 / 9.0};
  double contact_length{0.0};
  double composite_modulus{0.0};
};

/**
 * Line-contact Hertz parameters: N = K delta^n, n = 10/9,
 * K = E* L^(8/9) / 1.36^n, E* = E / (1 - nu^2).
 */
HertzParams hertz_params(const Material& material, double contact_length);

double hertz_force(const HertzParams& params, double indentation);

/// Integral of N_max sin(pi t / tau) over one half period: 2 N_max tau / pi.
double harmonic_impulse(double peak_force, double tau);

/**
 * Peak Hertz force for a body of `mass` arriving at `speed`, from the
 * energy balance m v^2 / 2 = K delta^(n+1) / (n+1).
 */
double hertz_peak_force(const HertzParams& params, double mass, double speed);

/// Impact constant derived from Hertz contact and the half-sine force profile.
double hertz_eta(const Material& material, double contact_length, double mass, double speed);

double impact_lever(const CoinSpec& spec, double tilt, LeverModel lever = LeverModel::Height);

/// Signed spin change eta * lever / I: positive for Leading, negative for Trailing.
double delta_omega(double eta, double lever, double inertia, ContactSide side);

double delta_omega(const Material& material,
                   const CoinSpec& spec,
                   double tilt,
                   ContactSide side,
                   LeverModel lever = LeverModel::Height);

struct ReboundParams
{
  double restitution{0.5};
  double mass{1.0};
  double inertia{1.0};
  double gravity{kStandardGravity};
  BudgetPolicy policy{BudgetPolicy::ConserveEnergy};
};

/**
 * @brief Energy bookkeeping of one impact.
 *
 *   k m g h1 + I w1^2 / 2 = m v2^2 / 2 + I w2^2 / 2,   w2 = w1 + dw
 *   h3 = k h1 + I (w1^2 - w2^2) / (2 m g)
 *
 * `spin_change` is the signed delta_omega for this contact. A negative
 * budget sets negative_budget and resolves per params.policy.
 */
ImpactResult rebound(const ImpactInput& input, double spin_change, double h1, const ReboundParams& params);

struct ImpactOptions
{
  double gravity{kStandardGravity};
  LeverModel lever{LeverModel::Height};
  BudgetPolicy policy{BudgetPolicy::ConserveEnergy};
  double contact_length{0.0};  // Hertz-derived eta only; 0 selects the coin height
};

/// Full impact with the spin change taken from the material's eta (or Hertz-derived).
ImpactResult rebound(const ImpactInput& input,
                     const CoinSpec& spec,
                     const Material& material,
                     double h1,
                     const ImpactOptions& options = {});

}  // namespace tricoin

#endif  // TRICOIN_IMPACT_HPP
