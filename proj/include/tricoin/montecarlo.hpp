#ifndef TRICOIN_MONTECARLO_HPP
#define TRICOIN_MONTECARLO_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "tricoin/core.hpp"
#include "tricoin/sim2d.hpp"
#include "tricoin/sim3d.hpp"

namespace tricoin
{

struct Interval
{
  double lo{0.0};
  double hi{0.0};

  double width() const { return hi - lo; }
};

enum class OrientationMode
{
  PlanarUniform,
  SphereUniform
};

enum class SimulatorKind
{
  Sim2D,
  Sim3D
};

std::string_view to_string(OrientationMode mode);
std::string_view to_string(SimulatorKind kind);

/**
 * @brief Ranges of the randomized release conditions.
 *
 * height_range is the clearance of the lowest point of the coin above the
 * ground at release. In planar mode speed is the vertical launch speed
 * (upward positive); in sphere mode it is the magnitude of a uniformly
 * directed velocity.
 */
struct SamplerSpec
{
  Interval angle_range{0.0, std::numbers::pi};
  Interval spin_range{0.0, 10.0 * std::numbers::pi};
  Interval height_range{0.3, 0.3};
  Interval speed_range{0.0, 0.0};
  OrientationMode orientation_mode{OrientationMode::PlanarUniform};

  void validate() const;
};

/// One draw. Planar draws fill phi0/omega0; sphere draws fill the vectors.
struct InitialConditions
{
  double clearance{0.0};
  double phi0{0.0};
  double omega0{0.0};
  double launch_speed{0.0};
  Eigen::Vector3d axis{Eigen::Vector3d::UnitZ()};
  Eigen::Vector3d velocity{Eigen::Vector3d::Zero()};
  Eigen::Vector3d angular_velocity{Eigen::Vector3d::Zero()};
};

using TrialEngine = std::mt19937_64;

InitialConditions sample_initial(const SamplerSpec& sampler, TrialEngine& stream);

/// Uniform point on the unit sphere.
Eigen::Vector3d sample_unit_sphere(TrialEngine& stream);

TossConfig2D make_config_2d(const TossConfig2D& base, const InitialConditions& initial);
TossConfig3D make_config_3d(const CoinSpec& spec, const TossConfig3D& base, const InitialConditions& initial);

/// Seed of trial `index`: first 8 bytes of BLAKE2b(master_seed || index), little endian.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t index);

struct TrialRecord
{
  std::size_t index{0};
  std::uint64_t seed{0};
  InitialConditions initial;
  TrialStatus status{TrialStatus::Settled};
  Outcome outcome{Outcome::FaceUp};
  std::size_t impacts{0};
  double duration{0.0};
};

/// Everything needed to run one estimate.
struct EstimateRequest
{
  CoinSpec coin;
  Material material;
  SamplerSpec sampler;
  SimulatorKind simulator{SimulatorKind::Sim2D};
  TossConfig2D sim2d;
  TossConfig3D sim3d;
  std::size_t n_trials{1000};
  std::uint64_t master_seed{0};
  unsigned threads{0};  // 0 = hardware concurrency

  void validate() const;
};

struct EstimateReport
{
  SimulatorKind simulator{SimulatorKind::Sim2D};
  std::size_t n_total{0};
  std::size_t n_side{0};
  std::size_t n_face_up{0};
  std::size_t n_face_down{0};
  std::size_t n_discarded{0};
  double p_side{0.0};
  double abs_error{0.0};  // p / sqrt(N)
  double std_error{0.0};  // sqrt(p (1 - p) / N); 0.5 / sqrt(N) when p is 0 or 1
  std::uint64_t master_seed{0};
  double wall_time{0.0};

  std::size_t n_effective() const { return n_total - n_discarded; }
};

/// Called once per trial, strictly in index order, from whichever worker completes the gap.
using TrialSink = std::function<void(const TrialRecord&)>;

TrialRecord run_trial(const EstimateRequest& request, std::size_t index);

/**
 * Runs request.n_trials independent trials across worker threads and
 * tallies them. Counts depend only on (request, master_seed). An exception
 * thrown by the sink stops the remaining trials and is rethrown.
 */
EstimateReport estimate(const EstimateRequest& request, const TrialSink& sink = {});

/// Fills p_side and both error fields from the counts.
void finalize_report(EstimateReport& report);

/// JSON-lines trial log. The header is the first record.
class TrialLog
{
public:
  TrialLog(std::ostream& out, const EstimateRequest& request);

  void append(const TrialRecord& record);

private:
  std::ostream& out_;
  SimulatorKind simulator_;
  OrientationMode mode_;
};

void write_report_json(std::ostream& out, const EstimateReport& report);

std::string_view outcome_marker(const TrialRecord& record);

}  // namespace tricoin

#endif  // TRICOIN_MONTECARLO_HPP
