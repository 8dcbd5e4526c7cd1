#ifndef TRICOIN_SIM3D_HPP
#define TRICOIN_SIM3D_HPP

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "tricoin/core.hpp"
#include "tricoin/sim2d.hpp"

namespace tricoin
{

/// Rigid-body state; the body z axis is the coin's symmetry axis (out of the FaceUp face).
struct TossState3D
{
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::Quaterniond orientation{Eigen::Quaterniond::Identity()};
  Eigen::Vector3d linear_velocity{Eigen::Vector3d::Zero()};
  Eigen::Vector3d angular_velocity{Eigen::Vector3d::Zero()};  // world frame
};

enum class ContactFeature
{
  RimBottom,
  RimTop,
  FaceBottom,
  FaceTop,
  Lateral
};

struct ContactPoint
{
  Eigen::Vector3d world_point{Eigen::Vector3d::Zero()};
  Eigen::Vector3d normal{Eigen::Vector3d::UnitZ()};
  double penetration_depth{0.0};
  ContactFeature feature{ContactFeature::RimBottom};
  double height{0.0};  // signed height of the point above the ground
};

struct TossConfig3D
{
  TossState3D initial;
  double energy_stop_fraction{0.01};
  std::size_t settle_steps{50};
  double timestep{1e-3};
  double max_time{120.0};
  std::size_t max_impacts{10000};
  double gravity{kStandardGravity};
  double contact_slop{-1.0};            // < 0 selects 1e-3 R
  double restitution_threshold{0.1};    // approach speeds below this are resting contact
  std::size_t solver_iterations{6};
  bool require_class_lock{true};
  bool record_impacts{false};
  bool record_trajectory{false};

  void validate() const;
};

/// One impulse applied at a single contact point.
struct ImpactRecord3D
{
  bool applied{false};
  bool sticking{false};
  double normal_impulse{0.0};
  double tangential_impulse{0.0};      // magnitude
  double normal_velocity_before{0.0};  // contact point, negative when approaching
  double normal_velocity_after{0.0};
  double tangential_speed_before{0.0};
  double tangential_speed_after{0.0};
  TossState3D state;
};

struct TrajectorySample3D
{
  double time{0.0};
  TossState3D state;
};

struct TossResult3D
{
  TrialStatus status{TrialStatus::Settled};
  Outcome outcome{Outcome::FaceUp};
  std::size_t impacts{0};
  double duration{0.0};
  double initial_energy{0.0};
  double final_kinetic_energy{0.0};
  TossState3D final_state;
  std::vector<ImpactRecord3D> impact_log;
  std::vector<TrajectorySample3D> trajectory;
};

/// Symmetry axis in world coordinates.
Eigen::Vector3d coin_axis(const TossState3D& state);

/// Angle between the symmetry axis and the vertical, in [0, pi/2].
double axis_tilt(const Eigen::Quaterniond& orientation);

Eigen::Matrix3d world_inertia(const Eigen::Quaterniond& orientation, const Inertia& inertia);
Eigen::Matrix3d world_inverse_inertia(const Eigen::Quaterniond& orientation, const Inertia& inertia);

/**
 * Lowest point of the cylinder. Height above ground is
 * z - (H/2)|cos T| - R sin T with T the axis tilt. Exactly flat or exactly
 * horizontal orientations report the face center or the middle of the
 * lateral contact line.
 */
ContactPoint support_point(const TossState3D& state, const CoinSpec& spec);

/// The support point if it lies within `slop` of the ground.
std::optional<ContactPoint> ground_contact(const TossState3D& state, const CoinSpec& spec, double slop);

/// Rim quarter points (anchored at the steepest-descent azimuth) within `slop` of the ground.
std::vector<ContactPoint> contact_manifold(const TossState3D& state, const CoinSpec& spec, double slop);

/**
 * Torque-free flight of the axisymmetric body over dt. Orientation follows
 * the closed-form solution of Euler's equations (precession about the
 * angular momentum plus body spin about the axis), renormalized.
 */
TossState3D propagate_free(const TossState3D& state, const Inertia& inertia, double dt, double gravity);

/**
 * Single-point impulse with Newtonian restitution and a Coulomb cone.
 *
 * Sticking is attempted first by solving the full 3x3 contact system for
 * v_n' = -k v_n and v_t' = 0. If that impulse leaves the cone the contact
 * slides with j = j_n (n - mu t) along the pre-impact slip direction t,
 * j_n still chosen to meet the normal restitution target. Separating
 * contacts are returned unchanged with applied = false.
 */
ImpactRecord3D resolve_impact_3d(const TossState3D& state,
                                 const ContactPoint& contact,
                                 const Material& material,
                                 const CoinSpec& spec);

/// Side iff tan(T) > 2R / H; otherwise FaceUp when the axis points up.
Outcome classify_rest_3d(const Eigen::Quaterniond& orientation, const CoinSpec& spec);

double kinetic_energy(const TossState3D& state, const CoinSpec& spec, const Inertia& inertia);

TossResult3D simulate_toss_3d(const CoinSpec& spec, const Material& material, const TossConfig3D& config);

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample3D>& samples);

}  // namespace tricoin

#endif  // TRICOIN_SIM3D_HPP
