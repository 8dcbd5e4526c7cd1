#include "tricoin/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

#include <sodium.h>

#include "json.hpp"

namespace tricoin
{

namespace
{

using Eigen::Vector3d;
using nlohmann::json;

void require(bool condition, const std::string& message)
{
  if (!condition)
  {
    throw std::invalid_argument(message);
  }
}

void check_interval(const Interval& range, const std::string& name)
{
  require(std::isfinite(range.lo) && std::isfinite(range.hi), "sampler." + name + " must be finite");
  require(range.lo <= range.hi, "sampler." + name + " must satisfy min <= max");
}

double draw(const Interval& range, TrialEngine& stream)
{
  if (range.lo == range.hi)
  {
    return range.lo;
  }
  return std::uniform_real_distribution<double>(range.lo, range.hi)(stream);
}

json vector_json(const Vector3d& v)
{
  return json::array({v.x(), v.y(), v.z()});
}

json initial_json(const InitialConditions& ic, SimulatorKind simulator, bool planar)
{
  json j;
  j["clearance"] = ic.clearance;
  if (planar)
  {
    j["phi0"] = ic.phi0;
    j["omega0"] = ic.omega0;
    j["launch_speed"] = ic.launch_speed;
  }
  if (simulator == SimulatorKind::Sim3D || !planar)
  {
    j["axis"] = vector_json(ic.axis);
    j["velocity"] = vector_json(ic.velocity);
    j["angular_velocity"] = vector_json(ic.angular_velocity);
  }
  return j;
}

}  // namespace

std::string_view to_string(OrientationMode mode)
{
  return mode == OrientationMode::PlanarUniform ? "planar" : "sphere";
}

std::string_view to_string(SimulatorKind kind)
{
  return kind == SimulatorKind::Sim2D ? "sim2d" : "sim3d";
}

void SamplerSpec::validate() const
{
  check_interval(angle_range, "angle");
  check_interval(spin_range, "spin");
  check_interval(height_range, "height");
  check_interval(speed_range, "speed");
  require(height_range.lo >= 0.0, "sampler.height must be >= 0");
  require(spin_range.lo >= 0.0 || orientation_mode == OrientationMode::PlanarUniform,
          "sampler.spin must be >= 0 in sphere mode (it is a magnitude)");
  require(speed_range.lo >= 0.0 || orientation_mode == OrientationMode::PlanarUniform,
          "sampler.speed must be >= 0 in sphere mode (it is a magnitude)");
}

Vector3d sample_unit_sphere(TrialEngine& stream)
{
  std::uniform_real_distribution<double> height(-1.0, 1.0);
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * std::numbers::pi);
  const double z = height(stream);
  const double a = azimuth(stream);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(a), s * std::sin(a), z};
}

InitialConditions sample_initial(const SamplerSpec& sampler, TrialEngine& stream)
{
  InitialConditions ic;
  ic.clearance = draw(sampler.height_range, stream);
  if (sampler.orientation_mode == OrientationMode::PlanarUniform)
  {
    ic.phi0 = draw(sampler.angle_range, stream);
    ic.omega0 = draw(sampler.spin_range, stream);
    ic.launch_speed = draw(sampler.speed_range, stream);
    // Same motion embedded in 3-D: tumbling about +y, launch along +z.
    ic.axis = Vector3d(std::sin(ic.phi0), 0.0, std::cos(ic.phi0));
    ic.angular_velocity = Vector3d(0.0, ic.omega0, 0.0);
    ic.velocity = Vector3d(0.0, 0.0, ic.launch_speed);
    return ic;
  }
  ic.axis = sample_unit_sphere(stream);
  const Vector3d spin_direction = sample_unit_sphere(stream);
  ic.angular_velocity = draw(sampler.spin_range, stream) * spin_direction;
  const Vector3d speed_direction = sample_unit_sphere(stream);
  ic.velocity = draw(sampler.speed_range, stream) * speed_direction;
  ic.phi0 = std::acos(std::clamp(ic.axis.z(), -1.0, 1.0));
  return ic;
}

TossConfig2D make_config_2d(const TossConfig2D& base, const InitialConditions& initial)
{
  TossConfig2D config = base;
  config.initial_clearance = initial.clearance;
  config.phi0 = initial.phi0;
  config.omega0 = initial.omega0;
  config.launch_speed = initial.launch_speed;
  return config;
}

TossConfig3D make_config_3d(const CoinSpec& spec, const TossConfig3D& base, const InitialConditions& initial)
{
  TossConfig3D config = base;
  const Vector3d axis = initial.axis.normalized();
  TossState3D& s = config.initial;
  s.orientation = Eigen::Quaterniond::FromTwoVectors(Vector3d::UnitZ(), axis).normalized();
  s.position = Vector3d(0.0, 0.0, 0.0);
  // Lift so that the lowest point sits at the sampled clearance.
  s.position.z() = initial.clearance - support_point(s, spec).height;
  s.linear_velocity = initial.velocity;
  s.angular_velocity = initial.angular_velocity;
  return config;
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index)
{
  static const int init = sodium_init();
  if (init < 0)
  {
    throw std::runtime_error("libsodium initialisation failed");
  }
  std::array<unsigned char, 16> message{};
  for (int i = 0; i < 8; ++i)
  {
    message[i] = static_cast<unsigned char>(master_seed >> (8 * i));
    message[8 + i] = static_cast<unsigned char>(index >> (8 * i));
  }
  std::array<unsigned char, 16> digest{};
  crypto_generichash(digest.data(), digest.size(), message.data(), message.size(), nullptr, 0);
  std::uint64_t seed = 0;
  for (int i = 0; i < 8; ++i)
  {
    seed |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
  }
  return seed;
}

void EstimateRequest::validate() const
{
  coin.validate();
  material.validate();
  sampler.validate();
  require(n_trials >= 1, "run.trials must be >= 1");
  if (simulator == SimulatorKind::Sim2D)
  {
    require(sampler.orientation_mode == OrientationMode::PlanarUniform,
            "sim2d requires sampler.orientation = planar");
    sim2d.validate();
  }
  else
  {
    sim3d.validate();
  }
}

TrialRecord run_trial(const EstimateRequest& request, std::size_t index)
{
  TrialRecord record;
  record.index = index;
  record.seed = trial_seed(request.master_seed, index);
  TrialEngine stream(record.seed);
  record.initial = sample_initial(request.sampler, stream);

  if (request.simulator == SimulatorKind::Sim2D)
  {
    const TossResult2D result =
      simulate_toss_2d(request.coin, request.material, make_config_2d(request.sim2d, record.initial));
    record.status = result.status;
    record.outcome = result.outcome;
    record.impacts = result.impacts;
    record.duration = result.duration;
  }
  else
  {
    const TossResult3D result = simulate_toss_3d(
      request.coin, request.material, make_config_3d(request.coin, request.sim3d, record.initial));
    record.status = result.status;
    record.outcome = result.outcome;
    record.impacts = result.impacts;
    record.duration = result.duration;
  }
  return record;
}

void finalize_report(EstimateReport& report)
{
  const std::size_t n = report.n_effective();
  if (n == 0)
  {
    report.p_side = std::numeric_limits<double>::quiet_NaN();
    report.abs_error = std::numeric_limits<double>::quiet_NaN();
    report.std_error = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const double p = static_cast<double>(report.n_side) / static_cast<double>(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  report.p_side = p;
  report.abs_error = p / root_n;
  report.std_error = (p == 0.0 || p == 1.0) ? 0.5 / root_n : std::sqrt(p * (1.0 - p)) / root_n;
}

EstimateReport estimate(const EstimateRequest& request, const TrialSink& sink)
{
  request.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = request.n_trials;
  unsigned workers = request.threads != 0 ? request.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<TrialRecord> records(n);
  std::vector<char> done(n, 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex flush_mutex;
  std::size_t flushed = 0;
  std::exception_ptr failure;

  auto worker = [&]() {
    while (!abort.load(std::memory_order_relaxed))
    {
      const std::size_t i = next.fetch_add(1);
      if (i >= n)
      {
        return;
      }
      try
      {
        TrialRecord record = run_trial(request, i);
        std::lock_guard<std::mutex> lock(flush_mutex);
        if (abort)
        {
          return;  // the sink already failed; do not feed it again
        }
        records[i] = std::move(record);
        done[i] = 1;
        while (flushed < n && done[flushed] != 0)
        {
          if (sink)
          {
            sink(records[flushed]);
          }
          ++flushed;
        }
      }
      catch (...)
      {
        std::lock_guard<std::mutex> lock(flush_mutex);
        if (!failure)
        {
          failure = std::current_exception();
        }
        abort = true;
        return;
      }
    }
  };

  if (workers <= 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t)
    {
      pool.emplace_back(worker);
    }
    for (auto& thread : pool)
    {
      thread.join();
    }
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }

  EstimateReport report;
  report.simulator = request.simulator;
  report.master_seed = request.master_seed;
  report.n_total = n;
  for (const TrialRecord& record : records)
  {
    if (record.status != TrialStatus::Settled)
    {
      ++report.n_discarded;
      continue;
    }
    switch (record.outcome)
    {
      case Outcome::Side:
        ++report.n_side;
        break;
      case Outcome::FaceUp:
        ++report.n_face_up;
        break;
      case Outcome::FaceDown:
        ++report.n_face_down;
        break;
    }
  }
  finalize_report(report);
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string_view outcome_marker(const TrialRecord& record)
{
  if (record.status != TrialStatus::Settled)
  {
    return "DISCARDED";
  }
  switch (record.outcome)
  {
    case Outcome::Side:
      return "SIDE";
    case Outcome::FaceUp:
      return "FACE_UP";
    case Outcome::FaceDown:
      return "FACE_DOWN";
  }
  return "DISCARDED";
}

TrialLog::TrialLog(std::ostream& out, const EstimateRequest& request)
  : out_(out), simulator_(request.simulator), mode_(request.sampler.orientation_mode)
{
  json header;
  header["record"] = "header";
  header["simulator"] = std::string(to_string(request.simulator));
  header["orientation"] = std::string(to_string(request.sampler.orientation_mode));
  header["master_seed"] = request.master_seed;
  header["n_trials"] = request.n_trials;
  header["coin"] = {{"height", request.coin.height}, {"radius", request.coin.radius}, {"mass", request.coin.mass}};
  out_ << header.dump() << '\n';
  if (!out_)
  {
    throw std::ios_base::failure("trial log: write failed");
  }
}

void TrialLog::append(const TrialRecord& record)
{
  json line;
  line["trial"] = record.index;
  line["seed"] = record.seed;
  line["initial"] = initial_json(record.initial, simulator_, mode_ == OrientationMode::PlanarUniform);
  line["outcome"] = std::string(outcome_marker(record));
  line["impacts"] = record.impacts;
  line["duration"] = record.duration;
  out_ << line.dump() << '\n';
  if (!out_)
  {
    out_.flush();
    throw std::ios_base::failure("trial log: write failed at trial " + std::to_string(record.index));
  }
}

void write_report_json(std::ostream& out, const EstimateReport& report)
{
  json j;
  j["simulator"] = std::string(to_string(report.simulator));
  j["n_total"] = report.n_total;
  j["n_side"] = report.n_side;
  j["n_face_up"] = report.n_face_up;
  j["n_face_down"] = report.n_face_down;
  j["n_discarded"] = report.n_discarded;
  j["p_side"] = report.p_side;
  j["abs_error"] = report.abs_error;
  j["std_error"] = report.std_error;
  j["master_seed"] = report.master_seed;
  j["wall_time"] = report.wall_time;
  out << j.dump(2) << '\n';
}

}  // namespace tricoin
