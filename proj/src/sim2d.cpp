#include "tricoin/sim2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tricoin
{

namespace
{

constexpr double kContactTimeTolerance = 1e-9;
constexpr double kMaxProbeStep = 1e-2;
constexpr double kTieTolerance = 1e-9;

struct Contact
{
  double time{0.0};
  TossState2D state;
};

double rest_energy_scale(const CoinSpec& spec, const Inertia& inertia, const TossState2D& s, double clearance, double g)
{
  return spec.mass * g * clearance + 0.5 * spec.mass * s.v_vertical * s.v_vertical +
         0.5 * inertia.transverse * s.omega * s.omega;
}

// Lower bound on the time for the lowest corner to fall through `clearance`.
double conservative_step(const TossState2D& s, double clearance, double half_diagonal, double g)
{
  const double rate = std::abs(s.v_vertical) + std::abs(s.omega) * half_diagonal;
  return (std::sqrt(rate * rate + 2.0 * g * clearance) - rate) / g;
}

std::optional<Contact> next_contact(const TossState2D& start,
                                    const CoinSpec& spec,
                                    const TossConfig2D& config,
                                    std::vector<TrajectorySample2D>* trajectory,
                                    double t0)
{
  const double g = config.gravity;
  const double diag = spec.half_diagonal();
  // A coin launched upward returns within 2v/g plus the fall time; anything
  // far beyond that means the search is broken.
  const double horizon = 10.0 + 4.0 * std::abs(start.v_vertical) / g +
                         4.0 * std::sqrt(2.0 * std::max(start.height, 0.0) / g);

  TossState2D s = start;
  double t = 0.0;
  while (t < horizon)
  {
    const double clearance = std::max(lowest_corner(s, spec).height, 0.0);
    const double dt = std::clamp(conservative_step(s, clearance, diag, g), config.timestep, kMaxProbeStep);
    TossState2D next = step_flight(s, dt, g);
    if (lowest_corner(next, spec).height < 0.0)
    {
      double lo = 0.0;
      double hi = dt;
      while (hi - lo > kContactTimeTolerance)
      {
        const double mid = 0.5 * (lo + hi);
        if (lowest_corner(step_flight(s, mid, g), spec).height < 0.0)
        {
          hi = mid;
        }
        else
        {
          lo = mid;
        }
      }
      return Contact{t + lo, step_flight(s, lo, g)};
    }
    s = next;
    t += dt;
    if (trajectory != nullptr)
    {
      trajectory->push_back({t0 + t, s.height, s.horizontal, s.phi, false});
    }
  }
  return std::nullopt;
}

}  // namespace

void TossConfig2D::validate() const
{
  auto require = [](bool ok, const std::string& message) {
    if (!ok)
    {
      throw std::invalid_argument(message);
    }
  };
  require(std::isfinite(initial_clearance) && initial_clearance >= 0.0, "sim2d.initial_clearance must be >= 0");
  require(std::isfinite(phi0) && std::isfinite(omega0), "sim2d.phi0 and sim2d.omega0 must be finite");
  require(std::isfinite(launch_speed) && std::isfinite(horizontal_speed), "sim2d speeds must be finite");
  require(energy_stop_fraction > 0.0 && energy_stop_fraction < 1.0, "sim2d.energy_stop_fraction must be in (0, 1)");
  require(timestep > 0.0 && std::isfinite(timestep), "sim2d.timestep must be positive");
  require(gravity > 0.0 && std::isfinite(gravity), "sim2d.gravity must be positive");
  require(max_impacts > 0, "sim2d.max_impacts must be positive");
  require(std::isfinite(contact_length) && contact_length >= 0.0, "sim2d.contact_length must be >= 0");
}

CornerContact lowest_corner(const TossState2D& state, const CoinSpec& spec)
{
  const double c = std::cos(state.phi);
  const double s = std::sin(state.phi);
  const double half_h = 0.5 * spec.height;
  // Corner = axis_sign * (H/2) * (sin, cos) + face_sign * R * (cos, -sin).
  const double axis_sign = c >= 0.0 ? -1.0 : 1.0;
  const double face_sign = s >= 0.0 ? 1.0 : -1.0;

  CornerContact contact;
  contact.height = state.height - half_h * std::abs(c) - spec.radius * std::abs(s);
  contact.offset = axis_sign * half_h * s + face_sign * spec.radius * c;
  contact.corner = (axis_sign > 0.0 ? 1 : 0) | (face_sign < 0.0 ? 2 : 0);
  return contact;
}

TossState2D step_flight(const TossState2D& state, double dt, double gravity)
{
  TossState2D next = state;
  next.height = state.height + state.v_vertical * dt - 0.5 * gravity * dt * dt;
  next.v_vertical = state.v_vertical - gravity * dt;
  next.horizontal = state.horizontal + state.v_horizontal * dt;
  next.phi = state.phi + state.omega * dt;
  return next;
}

Outcome classify_rest_2d(double phi, const CoinSpec& spec)
{
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double threshold = 2.0 * spec.radius / spec.height;
  const double abs_c = std::abs(c);
  if (abs_c == 0.0 || std::abs(s) / abs_c > threshold - kTieTolerance)
  {
    return Outcome::Side;
  }
  return c > 0.0 ? Outcome::FaceDown : Outcome::FaceUp;
}

TossState2D initial_state_2d(const CoinSpec& spec, const TossConfig2D& config)
{
  TossState2D state;
  state.phi = config.phi0;
  state.omega = config.omega0;
  state.v_vertical = config.launch_speed;
  state.v_horizontal = config.horizontal_speed;
  state.height = config.initial_clearance + 0.5 * spec.height * std::abs(std::cos(config.phi0)) +
                 spec.radius * std::abs(std::sin(config.phi0));
  return state;
}

TossResult2D simulate_toss_2d(const CoinSpec& spec, const Material& material, const TossConfig2D& config)
{
  spec.validate();
  material.validate();
  config.validate();

  const Inertia inertia = inertia_of(spec);
  const double g = config.gravity;
  const ImpactOptions options{g, config.lever, config.budget_policy, config.contact_length};

  TossResult2D result;
  TossState2D state = initial_state_2d(spec, config);
  result.initial_energy = rest_energy_scale(spec, inertia, state, config.initial_clearance, g);
  result.max_height = state.height;
  const double stop_energy = config.energy_stop_fraction * result.initial_energy;

  std::vector<TrajectorySample2D>* trajectory = config.record_trajectory ? &result.trajectory : nullptr;
  if (trajectory != nullptr)
  {
    trajectory->push_back({0.0, state.height, state.horizontal, state.phi, false});
  }

  double time = 0.0;
  while (true)
  {
    const std::optional<Contact> contact = next_contact(state, spec, config, trajectory, time);
    if (!contact)
    {
      result.status = TrialStatus::NonTermination;
      break;
    }
    time += contact->time;
    state = contact->state;

    const CornerContact corner = lowest_corner(state, spec);
    // Upward reaction at a corner right of the COM turns the coin toward -phi.
    const double torque_sign = corner.offset > 0.0 ? -1.0 : 1.0;
    const double rotation_sign = state.omega != 0.0 ? std::copysign(1.0, state.omega) : torque_sign;

    ImpactInput input;
    input.incoming_speed = std::abs(state.v_vertical);
    input.incoming_omega = rotation_sign * state.omega;
    input.tilt = std::atan2(std::abs(std::sin(state.phi)), std::abs(std::cos(state.phi)));
    input.side = rotation_sign == torque_sign ? ContactSide::Leading : ContactSide::Trailing;

    const double h1 = state.v_vertical * state.v_vertical / (2.0 * g);
    const ImpactResult impact = rebound(input, spec, material, h1, options);

    state.v_vertical = impact.outgoing_speed;
    state.omega = rotation_sign * impact.outgoing_omega;
    ++result.impacts;
    if (trajectory != nullptr)
    {
      trajectory->push_back({time, state.height, state.horizontal, state.phi, true});
    }

    const double energy = 0.5 * spec.mass * state.v_vertical * state.v_vertical +
                          0.5 * inertia.transverse * state.omega * state.omega;
    result.max_height = std::max(result.max_height, state.height + impact.apex_height);
    if (energy <= stop_energy)
    {
      result.final_energy = energy;
      result.outcome = classify_rest_2d(state.phi, spec);
      result.status = TrialStatus::Settled;
      break;
    }
    if (result.impacts >= config.max_impacts)
    {
      result.final_energy = energy;
      result.status = TrialStatus::NonTermination;
      break;
    }
  }

  result.duration = time;
  result.final_state = state;
  return result;
}

void write_trajectory_csv(std::ostream& out, const std::vector<TrajectorySample2D>& samples)
{
  out << "time,height,horizontal,phi,impact\n";
  out.precision(12);
  for (const auto& sample : samples)
  {
    out << sample.time << ',' << sample.height << ',' << sample.horizontal << ',' << sample.phi << ','
        << (sample.impact ? 1 : 0) << '\n';
  }
}

}  // namespace tricoin
