#include "tricoin/sim3d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tricoin
{

namespace
{

using Eigen::Matrix3d;
using Eigen::Quaterniond;
using Eigen::Vector3d;

constexpr double kDegenerateSine = 1e-9;
constexpr double kContactTimeTolerance = 1e-9;
constexpr double kTieTolerance = 1e-9;
constexpr double kMaxProbeStep = 5e-2;

Matrix3d skew(const Vector3d& v)
{
  Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

// Unit vector in the face plane pointing most steeply downward.
Vector3d descent_direction(const Vector3d& axis)
{
  const Vector3d up = Vector3d::UnitZ();
  Vector3d in_plane = up - axis.z() * axis;
  const double norm = in_plane.norm();
  if (norm < kDegenerateSine)
  {
    return axis.unitOrthogonal();
  }
  return -in_plane / norm;
}

Matrix3d contact_mass_matrix(const Vector3d& r, double inverse_mass, const Matrix3d& inverse_inertia)
{
  const Matrix3d rx = skew(r);
  return inverse_mass * Matrix3d::Identity() - rx * inverse_inertia * rx;
}

void apply_impulse(TossState3D& state,
                   const Vector3d& r,
                   const Vector3d& impulse,
                   double inverse_mass,
                   const Matrix3d& inverse_inertia)
{
  state.linear_velocity += inverse_mass * impulse;
  state.angular_velocity += inverse_inertia * r.cross(impulse);
}

Vector3d point_velocity(const TossState3D& state, const Vector3d& r)
{
  return state.linear_velocity + state.angular_velocity.cross(r);
}

struct FlightEvent
{
  double time{0.0};
  TossState3D state;
};

std::optional<FlightEvent> next_ground_contact(const TossState3D& start,
                                               const CoinSpec& spec,
                                               const Inertia& inertia,
                                               const TossConfig3D& config,
                                               double remaining_time,
                                               std::vector<TrajectorySample3D>* trajectory,
                                               double t0)
{
  const double g = config.gravity;
  const double diag = spec.half_diagonal();
  const double spin_rate = start.angular_velocity.norm() * diag;
  const double min_step = 0.1 * config.timestep;

  TossState3D s = start;
  double t = 0.0;
  while (t < remaining_time)
  {
    const double clearance = std::max(support_point(s, spec).height, 0.0);
    const double rate = std::abs(s.linear_velocity.z()) + spin_rate;
    const double bound = (std::sqrt(rate * rate + 2.0 * g * clearance) - rate) / g;
    const double dt = std::clamp(bound, min_step, kMaxProbeStep);

    TossState3D next = propagate_free(s, inertia, dt, g);
    if (support_point(next, spec).height < 0.0)
    {
      double lo = 0.0;
      double hi = dt;
      while (hi - lo > kContactTimeTolerance)
      {
        const double mid = 0.5 * (lo + hi);
        if (support_point(propagate_free(s, inertia, mid, g), spec).height < 0.0)
        {
          hi = mid;
        }
        else
        {
          lo = mid;
        }
      }
      return FlightEvent{t + lo, propagate_free(s, inertia, lo, g)};
    }
    s = next;
    t += dt;
    if (trajectory != nullptr)
    {
      trajectory->push_back({t0 + t, s});
    }
  }
  return std::nullopt;
}

}  // namespace

void TossConfig3D::validate() const
{
  auto require = [](bool ok, const std::string& message) {
    if (!ok)
    {
      throw std::invalid_argument(message);
    }
  };
  require(energy_stop_fraction > 0.0 && energy_stop_fraction < 1.0, "sim3d.energy_stop_fraction must be in (0, 1)");
  require(timestep > 0.0 && std::isfinite(timestep), "sim3d.timestep must be positive");
  require(max_time > 0.0, "sim3d.max_time must be positive");
  require(gravity > 0.0 && std::isfinite(gravity), "sim3d.gravity must be positive");
  require(restitution_threshold >= 0.0, "sim3d.restitution_threshold must be >= 0");
  require(solver_iterations > 0, "sim3d.solver_iterations must be positive");
  require(max_impacts > 0, "sim3d.max_impacts must be positive");
  require(initial.position.allFinite() && initial.linear_velocity.allFinite() &&
            initial.angular_velocity.allFinite() && initial.orientation.coeffs().allFinite(),
          "sim3d initial state must be finite");
  require(std::abs(initial.orientation.norm() - 1.0) < 1e-6, "sim3d initial orientation must be a unit quaternion");
}

Vector3d coin_axis(const TossState3D& state)
{
  return state.orientation * Vector3d::UnitZ();
}

double axis_tilt(const Quaterniond& orientation)
{
  const Vector3d axis = orientation * Vector3d::UnitZ();
  return std::atan2(std::hypot(axis.x(), axis.y()), std::abs(axis.z()));
}

Matrix3d world_inertia(const Quaterniond& orientation, const Inertia& inertia)
{
  const Vector3d axis = orientation * Vector3d::UnitZ();
  return inertia.transverse * Matrix3d::Identity() + (inertia.axial - inertia.transverse) * axis * axis.transpose();
}

Matrix3d world_inverse_inertia(const Quaterniond& orientation, const Inertia& inertia)
{
  const Vector3d axis = orientation * Vector3d::UnitZ();
  const double inv_t = 1.0 / inertia.transverse;
  const double inv_a = 1.0 / inertia.axial;
  return inv_t * Matrix3d::Identity() + (inv_a - inv_t) * axis * axis.transpose();
}

ContactPoint support_point(const TossState3D& state, const CoinSpec& spec)
{
  const Vector3d axis = coin_axis(state);
  const double half_h = 0.5 * spec.height;
  const double cos_tilt = axis.z();
  const double sin_tilt = std::hypot(axis.x(), axis.y());
  // The face at -axis is lower when the axis points up.
  const double lower_end = cos_tilt >= 0.0 ? -1.0 : 1.0;
  const Vector3d face_center = state.position + lower_end * half_h * axis;

  ContactPoint contact;
  contact.normal = Vector3d::UnitZ();
  contact.height = state.position.z() - half_h * std::abs(cos_tilt) - spec.radius * sin_tilt;
  contact.penetration_depth = std::max(0.0, -contact.height);

  if (sin_tilt < kDegenerateSine)
  {
    contact.feature = lower_end < 0.0 ? ContactFeature::FaceBottom : ContactFeature::FaceTop;
    contact.world_point = face_center;
  }
  else if (std::abs(cos_tilt) < kDegenerateSine)
  {
    contact.feature = ContactFeature::Lateral;
    contact.world_point = state.position + spec.radius * descent_direction(axis);
  }
  else
  {
    contact.feature = lower_end < 0.0 ? ContactFeature::RimBottom : ContactFeature::RimTop;
    contact.world_point = face_center + spec.radius * descent_direction(axis);
  }
  contact.world_point.z() = contact.height;
  return contact;
}

std::optional<ContactPoint> ground_contact(const TossState3D& state, const CoinSpec& spec, double slop)
{
  ContactPoint contact = support_point(state, spec);
  if (contact.height > slop)
  {
    return std::nullopt;
  }
  return contact;
}

std::vector<ContactPoint> contact_manifold(const TossState3D& state, const CoinSpec& spec, double slop)
{
  const Vector3d axis = coin_axis(state);
  const Vector3d down = descent_direction(axis);
  const Vector3d across = axis.cross(down);
  const std::array<Vector3d, 4> offsets{down, -down, across, -across};

  std::vector<ContactPoint> contacts;
  for (const double end : {-1.0, 1.0})
  {
    const Vector3d center = state.position + end * 0.5 * spec.height * axis;
    for (const Vector3d& offset : offsets)
    {
      const Vector3d point = center + spec.radius * offset;
      if (point.z() < slop)
      {
        ContactPoint contact;
        contact.world_point = point;
        contact.height = point.z();
        contact.penetration_depth = std::max(0.0, -point.z());
        contact.feature = end < 0.0 ? ContactFeature::RimBottom : ContactFeature::RimTop;
        contacts.push_back(contact);
      }
    }
  }
  return contacts;
}

TossState3D propagate_free(const TossState3D& state, const Inertia& inertia, double dt, double gravity)
{
  TossState3D next = state;
  next.position = state.position + dt * state.linear_velocity;
  next.position.z() -= 0.5 * gravity * dt * dt;
  next.linear_velocity.z() -= gravity * dt;

  const Vector3d axis = coin_axis(state);
  const Vector3d momentum = world_inertia(state.orientation, inertia) * state.angular_velocity;
  const double momentum_norm = momentum.norm();
  if (momentum_norm == 0.0)
  {
    return next;
  }

  const double spin_coefficient = 1.0 / inertia.axial - 1.0 / inertia.transverse;
  const double axial_momentum = momentum.dot(axis);
  const Quaterniond precession(Eigen::AngleAxisd(momentum_norm * dt / inertia.transverse, momentum / momentum_norm));
  const Quaterniond body_spin(Eigen::AngleAxisd(spin_coefficient * axial_momentum * dt, Vector3d::UnitZ()));

  next.orientation = (precession * state.orientation * body_spin).normalized();
  const Vector3d new_axis = next.orientation * Vector3d::UnitZ();
  next.angular_velocity = momentum / inertia.transverse + spin_coefficient * axial_momentum * new_axis;
  return next;
}

ImpactRecord3D resolve_impact_3d(const TossState3D& state,
                                 const ContactPoint& contact,
                                 const Material& material,
                                 const CoinSpec& spec)
{
  const Inertia inertia = inertia_of(spec);
  const double inverse_mass = 1.0 / spec.mass;
  const Matrix3d inverse_inertia = world_inverse_inertia(state.orientation, inertia);
  const Vector3d& n = contact.normal;
  const Vector3d r = contact.world_point - state.position;

  ImpactRecord3D record;
  record.state = state;
  const Vector3d velocity = point_velocity(state, r);
  const double vn = velocity.dot(n);
  const Vector3d vt = velocity - vn * n;
  record.normal_velocity_before = vn;
  record.normal_velocity_after = vn;
  record.tangential_speed_before = vt.norm();
  record.tangential_speed_after = vt.norm();
  if (vn >= 0.0)
  {
    return record;
  }

  const double k = material.restitution;
  const double mu = material.friction;
  const Matrix3d mass_matrix = contact_mass_matrix(r, inverse_mass, inverse_inertia);

  const Vector3d target = -(1.0 + k) * vn * n - vt;
  Vector3d impulse = mass_matrix.ldlt().solve(target);
  double jn = impulse.dot(n);
  Vector3d jt = impulse - jn * n;
  record.sticking = jn >= 0.0 && jt.norm() <= mu * jn;

  if (!record.sticking)
  {
    Vector3d slip = Vector3d::Zero();
    if (vt.norm() > 1e-12)
    {
      slip = vt.normalized();
    }
    else if (jt.norm() > 1e-12)
    {
      slip = -jt.normalized();
    }
    const Vector3d direction = n - mu * slip;
    const double denominator = n.dot(mass_matrix * direction);
    if (denominator > 1e-12)
    {
      jn = -(1.0 + k) * vn / denominator;
      impulse = jn * direction;
    }
    else
    {
      jn = -(1.0 + k) * vn / n.dot(mass_matrix * n);
      impulse = jn * n;
    }
    jt = impulse - jn * n;
  }

  // Newton restitution with friction can add energy on eccentric hits.
  // Shrink the tangential part until the impulse is dissipative; s = 0 is
  // the frictionless impulse, which always is.
  auto energy_change = [&](const Vector3d& j) { return j.dot(velocity) + 0.5 * j.dot(mass_matrix * j); };
  if (jn > 0.0 && energy_change(impulse) > 0.0)
  {
    const Vector3d tangent = jt / jn;
    auto scaled = [&](double s) {
      const Vector3d direction = n + s * tangent;
      const double denominator = n.dot(mass_matrix * direction);
      return denominator > 1e-12 ? Vector3d(-(1.0 + k) * vn / denominator * direction) : Vector3d(Vector3d::Zero());
    };
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 40; ++i)
    {
      const double mid = 0.5 * (lo + hi);
      const Vector3d j = scaled(mid);
      (j.isZero() || energy_change(j) > 0.0 ? hi : lo) = mid;
    }
    impulse = scaled(lo);
    jn = impulse.dot(n);
    jt = impulse - jn * n;
    record.sticking = false;
  }

  apply_impulse(record.state, r, impulse, inverse_mass, inverse_inertia);
  const Vector3d after = point_velocity(record.state, r);
  record.applied = true;
  record.normal_impulse = jn;
  record.tangential_impulse = jt.norm();
  record.normal_velocity_after = after.dot(n);
  record.tangential_speed_after = (after - after.dot(n) * n).norm();
  return record;
}

Outcome classify_rest_3d(const Quaterniond& orientation, const CoinSpec& spec)
{
  const Vector3d axis = orientation * Vector3d::UnitZ();
  const double cos_tilt = std::abs(axis.z());
  const double sin_tilt = std::hypot(axis.x(), axis.y());
  const double threshold = 2.0 * spec.radius / spec.height;
  if (cos_tilt == 0.0 || sin_tilt / cos_tilt > threshold - kTieTolerance)
  {
    return Outcome::Side;
  }
  return axis.z() > 0.0 ? Outcome::FaceUp : Outcome::FaceDown;
}

double kinetic_energy(const TossState3D& state, const CoinSpec& spec, const Inertia& inertia)
{
  const Vector3d momentum = world_inertia(state.orientation, inertia) * state.angular_velocity;
  return 0.5 * spec.mass * state.linear_velocity.squaredNorm() + 0.5 * state.angular_velocity.dot(momentum);
}

TossResult3D simulate_toss_3d(const CoinSpec& spec, const Material& material, const TossConfig3D& config)
{
  spec.validate();
  material.validate();
  config.validate();

  const Inertia inertia = inertia_of(spec);
  const double g = config.gravity;
  const double dt = config.timestep;
  const double slop = config.contact_slop >= 0.0 ? config.contact_slop : 1e-3 * spec.radius;
  const double inverse_mass = 1.0 / spec.mass;
  const double lock_energy = spec.mass * g * spec.half_diagonal();
  const double rest_energy = spec.mass * (g * dt) * (g * dt);

  TossResult3D result;
  TossState3D state = config.initial;
  state.orientation.normalize();
  result.initial_energy = kinetic_energy(state, spec, inertia) + spec.mass * g * state.position.z();
  const double stop_energy = config.energy_stop_fraction * result.initial_energy;

  std::vector<TrajectorySample3D>* trajectory = config.record_trajectory ? &result.trajectory : nullptr;
  if (trajectory != nullptr)
  {
    trajectory->push_back({0.0, state});
  }

  double time = 0.0;
  std::size_t contact_steps = 0;
  std::vector<double> normal_impulse;
  std::vector<Vector3d> friction_impulse;
  std::vector<Matrix3d> mass_matrices;

  result.status = TrialStatus::NonTermination;
  while (time < config.max_time)
  {
    std::vector<ContactPoint> contacts = contact_manifold(state, spec, slop);
    if (contacts.empty())
    {
      contact_steps = 0;
      const std::optional<FlightEvent> event =
        next_ground_contact(state, spec, inertia, config, config.max_time - time, trajectory, time);
      if (!event)
      {
        break;
      }
      time += event->time;
      state = event->state;
      continue;
    }

    // Impacts: resolve the fastest approaching point until all are slow.
    const std::size_t max_passes = 4 * contacts.size();
    for (std::size_t pass = 0; pass < max_passes; ++pass)
    {
      const ContactPoint* fastest = nullptr;
      double fastest_vn = -config.restitution_threshold;
      for (const ContactPoint& contact : contacts)
      {
        const double vn = point_velocity(state, contact.world_point - state.position).z();
        if (vn < fastest_vn)
        {
          fastest_vn = vn;
          fastest = &contact;
        }
      }
      if (fastest == nullptr)
      {
        break;
      }
      ImpactRecord3D record = resolve_impact_3d(state, *fastest, material, spec);
      state = record.state;
      ++result.impacts;
      if (config.record_impacts)
      {
        result.impact_log.push_back(std::move(record));
      }
    }
    if (result.impacts >= config.max_impacts)
    {
      break;
    }

    // Resting contact: gravity, then accumulated sequential impulses with k = 0.
    state.linear_velocity.z() -= g * dt;
    const Matrix3d inverse_inertia = world_inverse_inertia(state.orientation, inertia);
    normal_impulse.assign(contacts.size(), 0.0);
    friction_impulse.assign(contacts.size(), Vector3d::Zero());
    mass_matrices.resize(contacts.size());
    for (std::size_t i = 0; i < contacts.size(); ++i)
    {
      mass_matrices[i] = contact_mass_matrix(contacts[i].world_point - state.position, inverse_mass, inverse_inertia);
    }
    for (std::size_t iteration = 0; iteration < config.solver_iterations; ++iteration)
    {
      for (std::size_t i = 0; i < contacts.size(); ++i)
      {
        const Vector3d r = contacts[i].world_point - state.position;
        const Matrix3d& mass_matrix = mass_matrices[i];

        const double vn = point_velocity(state, r).z();
        const double accumulated = std::max(0.0, normal_impulse[i] - vn / mass_matrix(2, 2));
        apply_impulse(state, r, Vector3d::UnitZ() * (accumulated - normal_impulse[i]), inverse_mass, inverse_inertia);
        normal_impulse[i] = accumulated;

        Vector3d vt = point_velocity(state, r);
        vt.z() = 0.0;
        const double slip = vt.norm();
        if (slip > 0.0)
        {
          const Vector3d tangent = vt / slip;
          const double effective = tangent.dot(mass_matrix * tangent);
          Vector3d updated = friction_impulse[i] - (slip / effective) * tangent;
          const double limit = material.friction * normal_impulse[i];
          if (updated.norm() > limit)
          {
            updated *= limit / updated.norm();
          }
          apply_impulse(state, r, updated - friction_impulse[i], inverse_mass, inverse_inertia);
          friction_impulse[i] = updated;
        }
      }
    }

    // Rolling resistance: angular impulse bounded by mu_r * R * (total normal impulse).
    double total_normal = 0.0;
    for (const double value : normal_impulse)
    {
      total_normal += value;
    }
    const double resistance = material.rolling_resistance * spec.radius * total_normal;
    if (resistance > 0.0)
    {
      const Vector3d angular_momentum = world_inertia(state.orientation, inertia) * state.angular_velocity;
      const double momentum_norm = angular_momentum.norm();
      if (momentum_norm > 0.0)
      {
        const double scale = std::min(1.0, resistance / momentum_norm);
        state.angular_velocity -= scale * state.angular_velocity;
      }
    }

    state = propagate_free(state, inertia, dt, 0.0);
    const double lowest = support_point(state, spec).height;
    if (lowest < 0.0)
    {
      state.position.z() -= lowest;
    }
    time += dt;
    ++contact_steps;
    if (trajectory != nullptr)
    {
      trajectory->push_back({time, state});
    }

    const double kinetic = kinetic_energy(state, spec, inertia);
    // Below the tipping barrier the class can no longer change; below the
    // per-step gravity impulse scale the coin is at rest (e.g. balanced on the rim).
    const bool locked = kinetic + spec.mass * g * state.position.z() < lock_energy || kinetic < rest_energy;
    if (contact_steps >= config.settle_steps && kinetic < stop_energy && (!config.require_class_lock || locked))
    {
      result.status = TrialStatus::Settled;
      result.outcome = classify_rest_3d(state.orientation, spec);
      result.final_kinetic_energy = kinetic;
      break;
    }
  }

  result.duration = time;
  result.final_state = state;
  return result;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample3D>& samples)
{
  out << "time,x,y,z,qw,qx,qy,qz,tilt\n";
  out.precision(12);
  for (const auto& sample : samples)
  {
    const auto& s = sample.state;
    out << sample.time << ',' << s.position.x() << ',' << s.position.y() << ',' << s.position.z() << ','
        << s.orientation.w() << ',' << s.orientation.x() << ',' << s.orientation.y() << ',' << s.orientation.z()
        << ',' << axis_tilt(s.orientation) << '\n';
  }
}

}  // namespace tricoin
