#include "tricoin/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>

#include "json.hpp"
#include "tricoin/analytic.hpp"

namespace tricoin
{

namespace
{

void require(bool condition, const std::string& message)
{
  if (!condition)
  {
    throw std::invalid_argument(message);
  }
}

bool stochastic(Backend backend)
{
  return backend == Backend::Sim2D || backend == Backend::Sim3D;
}

FairEvaluation evaluate_ratio(const FairOptions& options, double ratio, std::size_t trials)
{
  EstimateRequest request = apply_axis(options.base, SweepAxis::AspectRatio, ratio);
  request.n_trials = trials;
  const EstimateReport report = evaluate_backend(options.backend, request);
  return FairEvaluation{ratio, report.p_side, report.std_error, report.n_effective()};
}

}  // namespace

std::string_view to_string(SweepAxis axis)
{
  switch (axis)
  {
    case SweepAxis::AspectRatio:
      return "aspect_ratio";
    case SweepAxis::Friction:
      return "friction";
    case SweepAxis::Restitution:
      return "restitution";
  }
  return "aspect_ratio";
}

std::string_view to_string(Backend backend)
{
  switch (backend)
  {
    case Backend::AnalyticFlat:
      return "analytic-flat";
    case Backend::AnalyticVolumetric:
      return "analytic-volumetric";
    case Backend::Sim2D:
      return "sim2d";
    case Backend::Sim3D:
      return "sim3d";
  }
  return "sim2d";
}

std::optional<SweepAxis> sweep_axis_from_string(std::string_view text)
{
  for (const SweepAxis axis : {SweepAxis::AspectRatio, SweepAxis::Friction, SweepAxis::Restitution})
  {
    if (text == to_string(axis))
    {
      return axis;
    }
  }
  return std::nullopt;
}

std::optional<Backend> backend_from_string(std::string_view text)
{
  for (const Backend backend : {Backend::AnalyticFlat, Backend::AnalyticVolumetric, Backend::Sim2D, Backend::Sim3D})
  {
    if (text == to_string(backend))
    {
      return backend;
    }
  }
  return std::nullopt;
}

void SweepPlan::validate() const
{
  require(!grid.empty(), "sweep.grid must not be empty");
  for (std::size_t i = 0; i < grid.size(); ++i)
  {
    require(std::isfinite(grid[i]), "sweep.grid values must be finite");
    require(i == 0 || grid[i] > grid[i - 1], "sweep.grid must be strictly increasing");
  }
  require(!stochastic(backend) || trials_per_point >= 100, "sweep.trials must be >= 100");
}

EstimateRequest apply_axis(const EstimateRequest& base, SweepAxis axis, double value)
{
  EstimateRequest request = base;
  switch (axis)
  {
    case SweepAxis::AspectRatio:
      request.coin.height = value * request.coin.radius;
      break;
    case SweepAxis::Friction:
      request.material.friction = value;
      break;
    case SweepAxis::Restitution:
      request.material.restitution = value;
      break;
  }
  return request;
}

EstimateReport evaluate_backend(Backend backend, const EstimateRequest& request)
{
  if (!stochastic(backend))
  {
    const double ratio = request.coin.height / request.coin.radius;
    EstimateReport report;
    report.p_side = probability(backend == Backend::AnalyticFlat ? AnalyticModel::Flat : AnalyticModel::Volumetric, ratio);
    report.std_error = 0.0;
    report.abs_error = 0.0;
    report.master_seed = request.master_seed;
    return report;
  }
  EstimateRequest stochastic_request = request;
  stochastic_request.simulator = backend == Backend::Sim2D ? SimulatorKind::Sim2D : SimulatorKind::Sim3D;
  return estimate(stochastic_request);
}

SweepTable run_sweep(const SweepPlan& plan)
{
  plan.validate();
  SweepTable table;
  table.axis = plan.axis;
  for (std::size_t i = 0; i < plan.grid.size(); ++i)
  {
    SweepPoint point;
    point.value = plan.grid[i];
    try
    {
      EstimateRequest request = apply_axis(plan.base, plan.axis, point.value);
      request.n_trials = plan.trials_per_point;
      request.master_seed = plan.base.master_seed + i;
      const EstimateReport report = evaluate_backend(plan.backend, request);
      point.p_side = report.p_side;
      point.std_error = report.std_error;
      point.n_trials = report.n_total;
      point.n_discarded = report.n_discarded;
    }
    catch (const std::exception& error)
    {
      point.p_side = std::numeric_limits<double>::quiet_NaN();
      point.std_error = std::numeric_limits<double>::quiet_NaN();
      point.error = error.what();
    }
    table.points.push_back(std::move(point));
  }
  return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table)
{
  const auto old_precision = out.precision(12);
  out << "value,p_side,stderr,n_trials,n_discarded\n";
  for (const SweepPoint& point : table.points)
  {
    out << point.value << ',' << point.p_side << ',' << point.std_error << ',' << point.n_trials << ','
        << point.n_discarded << '\n';
  }
  out.precision(old_precision);
}

std::vector<std::size_t> audit_monotonicity(const SweepTable& table, double sigmas)
{
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i + 1 < table.points.size(); ++i)
  {
    const SweepPoint& a = table.points[i];
    const SweepPoint& b = table.points[i + 1];
    if (!a.error.empty() || !b.error.empty())
    {
      continue;
    }
    const double combined = std::hypot(a.std_error, b.std_error);
    if (a.p_side - b.p_side > sigmas * combined)
    {
      flagged.push_back(i);
    }
  }
  return flagged;
}

void FairOptions::validate() const
{
  require(std::isfinite(tolerance) && tolerance > 0.0, "fair.tolerance must be positive");
  require(std::isfinite(lower) && std::isfinite(upper) && lower < upper, "fair bracket must satisfy lower < upper");
  require(lower > 0.0, "fair.lower must be positive");
  require(target > 0.0 && target < 1.0, "fair.target must be in (0, 1)");
  require(sigmas >= 0.0, "fair.sigmas must be >= 0");
  require(!stochastic(backend) || trials_per_eval >= 1, "fair.trials must be >= 1");
  require(max_trials_per_eval >= trials_per_eval, "fair.max_trials must be >= fair.trials");
  require(max_iterations > 0, "fair.max_iterations must be positive");
}

BracketFailure::BracketFailure(const std::string& message, FairEvaluation lower_eval, FairEvaluation upper_eval)
  : std::runtime_error(message), lower(lower_eval), upper(upper_eval)
{
}

NoiseFloor::NoiseFloor(const std::string& message, FairRatioResult partial_result)
  : std::runtime_error(message), partial(std::move(partial_result))
{
}

FairRatioResult find_fair_ratio(const FairOptions& options)
{
  options.validate();
  FairRatioResult result;
  const double target = options.target;

  const FairEvaluation low = evaluate_ratio(options, options.lower, options.trials_per_eval);
  const FairEvaluation high = evaluate_ratio(options, options.upper, options.trials_per_eval);
  result.evaluations.push_back(low);
  result.evaluations.push_back(high);
  if (!(low.p_side < target && high.p_side > target))
  {
    throw BracketFailure("target probability is not straddled by the bracket: P(" + std::to_string(low.ratio) +
                           ") = " + std::to_string(low.p_side) + ", P(" + std::to_string(high.ratio) +
                           ") = " + std::to_string(high.p_side),
                         low,
                         high);
  }

  FairEvaluation lo = low;
  FairEvaluation hi = high;
  while (0.5 * (hi.ratio - lo.ratio) > options.tolerance && result.iterations < options.max_iterations)
  {
    const double mid = 0.5 * (lo.ratio + hi.ratio);
    std::size_t trials = options.trials_per_eval;
    int decision = 0;  // +1: P(mid) above target, -1: below
    FairEvaluation eval;
    while (true)
    {
      eval = evaluate_ratio(options, mid, trials);
      result.evaluations.push_back(eval);
      const double margin = options.sigmas * eval.std_error;
      if (eval.p_side - margin > target)
      {
        decision = 1;
      }
      else if (eval.p_side + margin < target)
      {
        decision = -1;
      }
      else if (!stochastic(options.backend))
      {
        decision = eval.p_side >= target ? 1 : -1;  // exact hit
      }
      if (decision != 0 || trials >= options.max_trials_per_eval)
      {
        break;
      }
      trials = std::min(2 * trials, options.max_trials_per_eval);
    }
    ++result.iterations;
    if (decision == 0)
    {
      // P(mid) equals the target within noise. With the secant slope of the
      // current bracket, the root lies within sigmas * stderr / slope of mid.
      result.noise_limited = true;
      result.ratio = mid;
      const double slope = (hi.p_side - lo.p_side) / (hi.ratio - lo.ratio);
      const double bracket_half = 0.5 * (hi.ratio - lo.ratio);
      const double noise_half = slope > 0.0 ? options.sigmas * eval.std_error / slope : bracket_half;
      result.half_width = std::min(noise_half, bracket_half);
      break;
    }
    (decision > 0 ? hi : lo) = eval;
  }

  if (!result.noise_limited)
  {
    result.ratio = 0.5 * (lo.ratio + hi.ratio);
    result.half_width = 0.5 * (hi.ratio - lo.ratio);
  }
  if (result.half_width > options.tolerance)
  {
    throw NoiseFloor("tolerance " + std::to_string(options.tolerance) + " unreachable; achievable half-width " +
                       std::to_string(result.half_width),
                     result);
  }
  return result;
}

void write_fair_json(std::ostream& out, const FairRatioResult& result, const FairOptions& options)
{
  nlohmann::json j;
  j["backend"] = std::string(to_string(options.backend));
  j["ratio"] = result.ratio;
  j["half_width"] = result.half_width;
  j["iterations"] = result.iterations;
  j["noise_limited"] = result.noise_limited;
  j["tolerance"] = options.tolerance;
  j["target"] = options.target;
  j["master_seed"] = options.base.master_seed;
  j["restitution"] = options.base.material.restitution;
  j["friction"] = options.base.material.friction;
  if (options.base.material.impact_eta)
  {
    j["impact_eta"] = *options.base.material.impact_eta;
  }
  nlohmann::json evals = nlohmann::json::array();
  for (const FairEvaluation& e : result.evaluations)
  {
    evals.push_back({{"ratio", e.ratio}, {"p_side", e.p_side}, {"stderr", e.std_error}, {"n_trials", e.n_trials}});
  }
  j["evaluations"] = evals;
  out << j.dump(2) << '\n';
}

}  // namespace tricoin
