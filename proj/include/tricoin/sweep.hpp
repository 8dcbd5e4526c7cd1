#ifndef TRICOIN_SWEEP_HPP
#define TRICOIN_SWEEP_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tricoin/montecarlo.hpp"

namespace tricoin
{

enum class SweepAxis
{
  AspectRatio,
  Friction,
  Restitution
};

enum class Backend
{
  AnalyticFlat,
  AnalyticVolumetric,
  Sim2D,
  Sim3D
};

std::string_view to_string(SweepAxis axis);
std::string_view to_string(Backend backend);
std::optional<SweepAxis> sweep_axis_from_string(std::string_view text);
std::optional<Backend> backend_from_string(std::string_view text);

/**
 * @brief A one-parameter sweep.
 *
 * For AspectRatio the coin radius is held and height = value * radius.
 * Point i uses master seed base.master_seed + i; base.n_trials is ignored
 * in favour of trials_per_point.
 */
struct SweepPlan
{
  SweepAxis axis{SweepAxis::AspectRatio};
  Backend backend{Backend::Sim2D};
  std::vector<double> grid;
  std::size_t trials_per_point{1000};
  EstimateRequest base;

  void validate() const;
};

struct SweepPoint
{
  double value{0.0};
  double p_side{0.0};
  double std_error{0.0};
  std::size_t n_trials{0};
  std::size_t n_discarded{0};
  std::string error;  // non-empty when the point failed
};

struct SweepTable
{
  SweepAxis axis{SweepAxis::AspectRatio};
  std::vector<SweepPoint> points;
};

/// Request for a single point: the base with the swept parameter replaced.
EstimateRequest apply_axis(const EstimateRequest& base, SweepAxis axis, double value);

/// Side probability for a backend; analytic backends ignore everything but the aspect ratio.
EstimateReport evaluate_backend(Backend backend, const EstimateRequest& request);

SweepTable run_sweep(const SweepPlan& plan);

void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// Indices i where p[i+1] falls below p[i] by more than `sigmas` combined standard errors.
std::vector<std::size_t> audit_monotonicity(const SweepTable& table, double sigmas = 3.0);

struct FairOptions
{
  Backend backend{Backend::AnalyticFlat};
  double tolerance{1e-6};
  double lower{0.2};
  double upper{3.0};
  double target{1.0 / 3.0};
  double sigmas{3.0};
  std::size_t trials_per_eval{10000};
  std::size_t max_trials_per_eval{160000};
  std::size_t max_iterations{64};
  EstimateRequest base;

  void validate() const;
};

struct FairEvaluation
{
  double ratio{0.0};
  double p_side{0.0};
  double std_error{0.0};
  std::size_t n_trials{0};
};

struct FairRatioResult
{
  double ratio{0.0};
  double half_width{0.0};
  std::size_t iterations{0};
  bool noise_limited{false};
  std::vector<FairEvaluation> evaluations;
};

class BracketFailure : public std::runtime_error
{
public:
  BracketFailure(const std::string& message, FairEvaluation lower, FairEvaluation upper);

  FairEvaluation lower;
  FairEvaluation upper;
};

class NoiseFloor : public std::runtime_error
{
public:
  NoiseFloor(const std::string& message, FairRatioResult partial);

  /// Best estimate reached; partial.half_width is the achievable half-width.
  FairRatioResult partial;
};

/**
 * Bisection for P(side; H/R) = target on [lower, upper].
 *
 * Every stochastic evaluation reuses the same master seed, so neighbouring
 * ratios share their initial conditions. A comparison is decided only when
 * p is more than `sigmas` standard errors away from the target; otherwise
 * N doubles up to max_trials_per_eval. If a comparison is still undecided
 * the search stops there and the half-width becomes the noise band
 * sigmas * stderr / slope, with the slope taken from the current bracket.
 * The result is returned when its half-width meets the tolerance and
 * NoiseFloor is thrown otherwise.
 */
FairRatioResult find_fair_ratio(const FairOptions& options);

void write_fair_json(std::ostream& out, const FairRatioResult& result, const FairOptions& options);

}  // namespace tricoin

#endif  // TRICOIN_SWEEP_HPP
