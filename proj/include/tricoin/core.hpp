#ifndef TRICOIN_CORE_HPP
#define TRICOIN_CORE_HPP

#include <optional>
#include <string>
#include <string_view>

namespace tricoin
{

inline constexpr double kStandardGravity = 9.81;

/**
 * @brief Geometry and mass of a homogeneous cylindrical coin.
 *
 * height is the distance between the two faces (H), radius is the face
 * radius (R). All values are SI.
 */
struct CoinSpec
{
  double height{0.015};
  double radius{0.01};
  double mass{0.005};

  /// Throws std::invalid_argument unless every field is finite and positive.
  void validate() const;

  double aspect_ratio() const;

  /// Distance from the center of mass to any rim corner.
  double half_diagonal() const;
};

/**
 * @brief Contact material between the coin and the ground.
 *
 * restitution is the empirical coefficient k. In the flat model it scales
 * the gravitational energy carried into an impact; in the rigid-body model
 * it is the Newtonian normal-velocity ratio at the contact point.
 *
 * impact_eta is the lumped impulse scale (N*s) of the flat impact model.
 * When unset it is derived per impact from the Hertz parameters
 * (youngs_modulus, poisson_ratio, impact_tau).
 */
struct Material
{
  double restitution{0.5};
  double friction{0.5};
  std::optional<double> impact_eta{0.0};
  double youngs_modulus{2.0e9};
  double poisson_ratio{0.3};
  double impact_tau{1.0e-3};
  /// Rolling resistance coefficient for resting contact (rigid-body model only).
  double rolling_resistance{0.02};

  void validate() const;
};

struct Inertia
{
  double transverse{0.0};  // about a diameter through the center of mass
  double axial{0.0};       // about the symmetry axis
};

enum class Outcome
{
  Side,
  FaceUp,
  FaceDown
};

/// Accepts height == 0 (the thin-disk limit); rejects anything else non-positive.
Inertia inertia_of(const CoinSpec& spec);

double aspect_ratio(const CoinSpec& spec);

std::string_view to_string(Outcome outcome);
std::optional<Outcome> outcome_from_string(std::string_view text);

}  // namespace tricoin

#endif  // TRICOIN_CORE_HPP
