#ifndef TRICOIN_SIM2D_HPP
#define TRICOIN_SIM2D_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tricoin/core.hpp"
#include "tricoin/impact.hpp"

namespace tricoin
{

/**
 * Planar state of a coin tumbling about a single diameter.
 *
 * phi is the angle of the symmetry axis from the upward vertical; positive
 * omega increases phi. The axis points out of the reference face, so phi = 0
 * puts the reference face on top and the outcome is FaceDown (tails up).
 */
struct TossState2D
{
  double height{0.0};      // COM above ground
  double horizontal{0.0};
  double phi{0.0};
  double v_vertical{0.0};
  double v_horizontal{0.0};
  double omega{0.0};
};

struct TossConfig2D
{
  double initial_clearance{0.3};  // lowest corner above ground at release
  double phi0{0.0};
  double omega0{0.0};
  double launch_speed{0.0};       // initial vertical velocity, upward positive
  double horizontal_speed{0.0};
  double energy_stop_fraction{0.01};
  std::size_t max_impacts{10000};
  double timestep{1e-4};          // minimum probe step of the contact search
  double gravity{kStandardGravity};
  LeverModel lever{LeverModel::Height};
  BudgetPolicy budget_policy{BudgetPolicy::ConserveEnergy};
  double contact_length{0.0};     // Hertz-derived eta only; 0 uses the coin height
  bool record_trajectory{false};

  void validate() const;
};

struct CornerContact
{
  double height{0.0};  // of the corner above ground
  double offset{0.0};  // horizontal offset of the corner from the COM
  int corner{0};       // 0..3: bit 0 = upper axis end, bit 1 = negative face direction
};

struct TrajectorySample2D
{
  double time{0.0};
  double height{0.0};
  double horizontal{0.0};
  double phi{0.0};
  bool impact{false};
};

enum class TrialStatus
{
  Settled,
  NonTermination
};

struct TossResult2D
{
  TrialStatus status{TrialStatus::Settled};
  Outcome outcome{Outcome::FaceDown};
  std::size_t impacts{0};
  double duration{0.0};
  double max_height{0.0};
  double initial_energy{0.0};
  double final_energy{0.0};
  TossState2D final_state;
  std::vector<TrajectorySample2D> trajectory;
};

/// Lower of the cross-section corners: height = z - (H/2)|cos phi| - R|sin phi|.
CornerContact lowest_corner(const TossState2D& state, const CoinSpec& spec);

/// Ballistic, torque-free flight over dt (exact for uniform gravity).
TossState2D step_flight(const TossState2D& state, double dt, double gravity = kStandardGravity);

/**
 * Side iff the axis tilt from vertical satisfies tan(tilt) > 2R / H.
 * Within 1e-9 of the threshold the tie goes to Side.
 */
Outcome classify_rest_2d(double phi, const CoinSpec& spec);

TossState2D initial_state_2d(const CoinSpec& spec, const TossConfig2D& config);

/**
 * Alternates exact flight and the impact model until the energy above the
 * contact drops below energy_stop_fraction of its initial value, then
 * classifies the orientation. Exceeding max_impacts reports NonTermination.
 */
TossResult2D simulate_toss_2d(const CoinSpec& spec, const Material& material, const TossConfig2D& config);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample2D>& samples);

}  // namespace tricoin

#endif  // TRICOIN_SIM2D_HPP
