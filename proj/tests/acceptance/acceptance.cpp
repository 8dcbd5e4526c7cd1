// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: tricoin_acceptance [criterion numbers...]   (default: all)

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tricoin/analytic.hpp"
#include "tricoin/config.hpp"
#include "tricoin/impact.hpp"
#include "tricoin/montecarlo.hpp"
#include "tricoin/sim2d.hpp"
#include "tricoin/sim3d.hpp"
#include "tricoin/sweep.hpp"

using namespace tricoin;
namespace fs = std::filesystem;

namespace
{

// Pinned tolerances.
constexpr double kClosedFormTol = 1e-9;
constexpr double kAnalyticRuntime = 1e-3;  // s per call
constexpr double kSigmas = 3.0;
constexpr std::size_t kInelasticTrials = 100000;
constexpr double kInelastic2DRuntime = 120.0;
constexpr double kInelastic3DRuntime = 600.0;
constexpr double kFair2DLo = 1.4, kFair2DHi = 1.6;
constexpr double kFair3DLo = 0.7, kFair3DHi = 0.9;
constexpr double kRestitutionLo = 0.3, kRestitutionHi = 0.6;
constexpr std::size_t kPropertyTrials = 50000;
constexpr double kPropertySigmas = 2.0;
constexpr std::size_t kErrorSeeds = 50;
constexpr std::size_t kErrorTrials = 10000;
constexpr double kErrorRatioLo = 0.7, kErrorRatioHi = 1.3;
constexpr double kQuadratureTol = 1e-10;
constexpr double kQuaternionDrift = 1e-9;
constexpr std::size_t kQuaternionSteps = 1000000;
constexpr double kMomentumTol = 1e-6;
constexpr std::size_t kLoggedTrials = 10000;
constexpr double kInequalitySlack = 1e-9;

struct Verdict
{
  bool pass{false};
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double value, int digits = 6)
{
  std::ostringstream text;
  text << std::setprecision(digits) << value;
  return text.str();
}

RunConfig scenario(const std::string& name)
{
  return load_config(std::string(TRICOIN_SCENARIO_DIR) + "/" + name);
}

EstimateRequest with_ratio(EstimateRequest request, double ratio)
{
  request.coin.height = ratio * request.coin.radius;
  return request;
}

double combined_sigma(const EstimateReport& a, const EstimateReport& b)
{
  return std::hypot(a.std_error, b.std_error);
}

// Criterion 1
Verdict analytic_flat()
{
  const double expected_fair = 2.0 * std::tan(std::numbers::pi / 6.0);
  const double fair = fair_ratio(AnalyticModel::Flat);
  const double p2 = probability(AnalyticModel::Flat, 2.0);

  constexpr int calls = 10000;
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (int i = 0; i < calls; ++i)
  {
    sink = sink + probability(AnalyticModel::Flat, 0.1 + 1e-4 * i) + fair_ratio(AnalyticModel::Flat);
  }
  const double per_call = seconds_since(start) / calls;

  const bool ok = std::abs(fair - expected_fair) < kClosedFormTol && std::abs(p2 - 0.5) < kClosedFormTol &&
                  per_call < kAnalyticRuntime;
  return {ok, "fair " + fmt(fair, 10) + ", P(2) " + fmt(p2, 10) + ", " + fmt(per_call * 1e6, 3) + " us/call"};
}

// Criterion 2
Verdict analytic_volumetric()
{
  const double fair = fair_ratio(AnalyticModel::Volumetric);
  const bool ok = std::abs(fair - 1.0 / std::sqrt(2.0)) < kClosedFormTol;
  return {ok, "fair " + fmt(fair, 10)};
}

Verdict inelastic_equivalence(const std::string& scenario_name,
                              const std::vector<double>& ratios,
                              AnalyticModel model,
                              double budget)
{
  EstimateRequest base = scenario(scenario_name).request;
  base.n_trials = kInelasticTrials;
  bool ok = true;
  std::string detail;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < ratios.size(); ++i)
  {
    EstimateRequest request = with_ratio(base, ratios[i]);
    request.master_seed = base.master_seed + i;
    const EstimateReport report = estimate(request);
    const double expected = probability(model, ratios[i]);
    const double n = static_cast<double>(report.n_effective());
    const double sigma = std::sqrt(expected * (1.0 - expected) / n);
    const double z = (report.p_side - expected) / sigma;
    ok = ok && std::abs(z) <= kSigmas && report.n_discarded == 0;
    detail += "H/R " + fmt(ratios[i], 5) + ": " + fmt(report.p_side, 5) + " vs " + fmt(expected, 5) + " (z " +
              fmt(z, 3) + ", discarded " + std::to_string(report.n_discarded) + "); ";
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < budget;
  return {ok, detail + fmt(elapsed, 4) + " s"};
}

// Criterion 3
Verdict inelastic_2d()
{
  return inelastic_equivalence("inelastic2d.ini", {0.5, 1.0, 1.5, 2.0}, AnalyticModel::Flat, kInelastic2DRuntime);
}

// Criterion 4
Verdict inelastic_3d()
{
  return inelastic_equivalence(
    "inelastic3d.ini", {0.4, 0.7071, 1.0, 2.0}, AnalyticModel::Volumetric, kInelastic3DRuntime);
}

std::string fair_line(const std::string& label, const RunConfig& config, double lo, double hi, bool& ok)
{
  const FairOptions options = config.fair_options();
  FairRatioResult result;
  std::string note;
  try
  {
    result = find_fair_ratio(options);
  }
  catch (const NoiseFloor& error)
  {
    result = error.partial;
    note = " (noise floor)";
  }
  catch (const BracketFailure& error)
  {
    ok = false;
    return label + ": bracket failure: " + error.what();
  }
  const bool in_band = result.ratio >= lo && result.ratio <= hi;
  ok = ok && in_band && note.empty();
  const Material& m = options.base.material;
  std::string line = label + " H/R " + fmt(result.ratio, 4) + " +/- " + fmt(result.half_width, 2) + note +
                     " [k " + fmt(m.restitution) + ", mu " + fmt(m.friction);
  if (m.impact_eta)
  {
    line += ", eta " + fmt(*m.impact_eta);
  }
  if (options.backend == Backend::Sim3D)
  {
    line += ", mu_r " + fmt(m.rolling_resistance) + ", bounce threshold " +
            fmt(options.base.sim3d.restitution_threshold);
  }
  return line + "]";
}

// Criterion 5
Verdict fair_ratios()
{
  bool ok = true;
  const RunConfig planar = scenario("bounce2d.ini");
  const RunConfig spatial = scenario("table1.ini");
  const double k2 = planar.request.material.restitution;
  const double k3 = spatial.request.material.restitution;
  ok = k2 >= kRestitutionLo && k2 <= kRestitutionHi && k3 >= kRestitutionLo && k3 <= kRestitutionHi;
  std::string detail = fair_line("sim2d", planar, kFair2DLo, kFair2DHi, ok);
  detail += "; " + fair_line("sim3d", spatial, kFair3DLo, kFair3DHi, ok);
  return {ok, detail};
}

// p non-increasing along the grid within kPropertySigmas.
Verdict non_increasing(const std::string& label, const EstimateRequest& base, SweepAxis axis,
                       const std::vector<double>& grid)
{
  std::vector<EstimateReport> reports;
  std::string detail = label + ":";
  for (const double value : grid)
  {
    EstimateRequest request = apply_axis(base, axis, value);
    request.n_trials = kPropertyTrials;
    reports.push_back(estimate(request));
    detail += " " + fmt(value, 3) + " -> " + fmt(reports.back().p_side, 4) + " +/- " +
              fmt(reports.back().std_error, 2) + ";";
  }
  bool ok = true;
  for (std::size_t i = 0; i + 1 < reports.size(); ++i)
  {
    const double rise = reports[i + 1].p_side - reports[i].p_side;
    ok = ok && rise <= kPropertySigmas * combined_sigma(reports[i], reports[i + 1]);
  }
  return {ok, detail};
}

// Criterion 6
Verdict monotonicity()
{
  const RunConfig planar = scenario("bounce2d.ini");
  const Verdict in_k = non_increasing("k (sim2d)", planar.request, SweepAxis::Restitution, {0.0, 0.3, 0.6});
  const RunConfig spatial = scenario("table1.ini");
  const Verdict in_mu = non_increasing("mu (sim3d)", spatial.request, SweepAxis::Friction, {0.1, 0.5, 1.0});
  return {in_k.pass && in_mu.pass, in_k.detail + " " + (in_k.pass ? "ok" : "VIOLATED") + "; " + in_mu.detail + " " +
                                     (in_mu.pass ? "ok" : "VIOLATED")};
}

// Criterion 7
Verdict mass_independence()
{
  // Rigid-body model with bounces; one master seed so all masses see the same tosses.
  EstimateRequest base = scenario("table1.ini").request;
  base.sampler.height_range = {0.0, 0.5};
  base.sampler.speed_range = {0.0, 2.0};
  base.sampler.spin_range = {0.0, 10.0};
  base.coin.height = base.coin.radius;
  base.n_trials = kPropertyTrials;
  std::vector<EstimateReport> reports;
  std::string detail;
  for (const double scale : {0.5, 1.0, 2.0})
  {
    EstimateRequest request = base;
    request.coin.mass = scale * base.coin.mass;
    reports.push_back(estimate(request));
    detail += "m x" + fmt(scale, 2) + ": " + fmt(reports.back().p_side, 5) + "; ";
  }
  bool ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i)
  {
    for (std::size_t j = i + 1; j < reports.size(); ++j)
    {
      ok = ok && std::abs(reports[i].p_side - reports[j].p_side) <= kPropertySigmas * combined_sigma(reports[i], reports[j]);
    }
  }
  return {ok, detail + "2 sigma = " + fmt(kPropertySigmas * combined_sigma(reports[0], reports[1]), 3)};
}

// Criterion 8
Verdict error_law()
{
  const RunConfig planar = scenario("bounce2d.ini");
  std::vector<double> estimates;
  double p_sum = 0.0;
  for (std::size_t s = 0; s < kErrorSeeds; ++s)
  {
    EstimateRequest request = planar.request;
    request.n_trials = kErrorTrials;
    request.master_seed = 1000 + s;
    const EstimateReport report = estimate(request);
    estimates.push_back(report.p_side);
    p_sum += report.p_side;
  }
  const double mean = p_sum / static_cast<double>(estimates.size());
  double ss = 0.0;
  for (const double p : estimates)
  {
    ss += (p - mean) * (p - mean);
  }
  const double empirical = std::sqrt(ss / static_cast<double>(estimates.size() - 1));
  const double predicted = std::sqrt(mean * (1.0 - mean) / static_cast<double>(kErrorTrials));
  const double ratio = empirical / predicted;
  return {ratio >= kErrorRatioLo && ratio <= kErrorRatioHi,
          "mean p " + fmt(mean, 4) + ", std " + fmt(empirical, 4) + ", predicted " + fmt(predicted, 4) + ", ratio " +
            fmt(ratio, 4)};
}

double trapezoid_half_sine(double peak, double tau, int panels)
{
  const double h = tau / panels;
  double sum = 0.0;
  for (int i = 1; i < panels; ++i)
  {
    sum += peak * std::sin(std::numbers::pi * i * h / tau);
  }
  return h * sum;
}

// Criterion 9
Verdict impact_oracles()
{
  double worst_quadrature = 0.0;
  for (const double peak : {1.0, 250.0, 9876.5})
  {
    for (const double tau : {1e-4, 1e-3, 0.2})
    {
      const double exact = harmonic_impulse(peak, tau);
      worst_quadrature = std::max(worst_quadrature, std::abs(trapezoid_half_sine(peak, tau, 400000) / exact - 1.0));
    }
  }

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool collapse = true;
  for (int i = 0; i < 1000; ++i)
  {
    ImpactInput in;
    in.incoming_omega = 60.0 * u(rng) - 30.0;
    in.tilt = 0.5 * std::numbers::pi * u(rng);
    const double k = u(rng);
    const double h1 = 3.0 * u(rng);
    const ImpactResult r = rebound(in, 0.0, h1, ReboundParams{k, 0.01, 2e-6, kStandardGravity, BudgetPolicy::ConserveEnergy});
    collapse = collapse && r.apex_height == k * h1 && r.outgoing_omega == in.incoming_omega;
  }

  bool sign_rule = true;
  const CoinSpec spec{0.015, 0.01, 0.005};
  Material m;
  m.impact_eta = 6e-4;
  for (double tilt = 0.0; tilt < 0.5 * std::numbers::pi - 1e-3; tilt += 0.1)
  {
    const double lead = delta_omega(m, spec, tilt, ContactSide::Leading);
    const double trail = delta_omega(m, spec, tilt, ContactSide::Trailing);
    sign_rule = sign_rule && lead > 0.0 && trail < 0.0 && lead == -trail;
  }

  return {worst_quadrature < kQuadratureTol && collapse && sign_rule,
          "quadrature rel. error " + fmt(worst_quadrature, 3) + ", h3 = k h1 " + (collapse ? "exact" : "BROKEN") +
            ", sign rule " + (sign_rule ? "holds" : "BROKEN")};
}

// Criterion 10
Verdict rigid_body_invariants()
{
  const CoinSpec flight_coin{0.4, 0.5, 1.0};
  const Inertia inertia = inertia_of(flight_coin);
  TrialEngine rng(10);
  TossState3D s;
  s.orientation = Eigen::Quaterniond::UnitRandom();
  s.angular_velocity = 40.0 * sample_unit_sphere(rng);
  const Eigen::Vector3d l0 = world_inertia(s.orientation, inertia) * s.angular_velocity;
  double drift = 0.0;
  double momentum = 0.0;
  for (std::size_t i = 0; i < kQuaternionSteps; ++i)
  {
    s = propagate_free(s, inertia, 1e-3, 0.0);
    drift = std::max(drift, std::abs(s.orientation.norm() - 1.0));
    if (i % 1000 == 0)
    {
      const Eigen::Vector3d l = world_inertia(s.orientation, inertia) * s.angular_velocity;
      momentum = std::max(momentum, (l - l0).norm() / l0.norm());
    }
  }

  const RunConfig spatial = scenario("table1.ini");
  const EstimateRequest& request = spatial.request;
  std::size_t logged = 0;
  std::size_t violations = 0;
  for (std::size_t i = 0; i < kLoggedTrials; ++i)
  {
    TrialEngine stream(trial_seed(request.master_seed, i));
    TossConfig3D config = make_config_3d(request.coin, request.sim3d, sample_initial(request.sampler, stream));
    config.record_impacts = true;
    const TossResult3D result = simulate_toss_3d(request.coin, request.material, config);
    for (const ImpactRecord3D& r : result.impact_log)
    {
      if (!r.applied)
      {
        continue;
      }
      ++logged;
      const bool cone = r.tangential_impulse <= request.material.friction * r.normal_impulse * (1.0 + kInequalitySlack) +
                                                  kInequalitySlack;
      const bool bound = std::abs(r.normal_velocity_after) <=
                         request.material.restitution * std::abs(r.normal_velocity_before) + kInequalitySlack;
      violations += (cone && bound && r.normal_impulse >= 0.0) ? 0 : 1;
    }
  }

  return {drift < kQuaternionDrift && momentum < kMomentumTol && violations == 0 && logged > 0,
          "norm drift " + fmt(drift, 3) + " over " + std::to_string(kQuaternionSteps) + " steps, |dL|/|L| " +
            fmt(momentum, 3) + ", " + std::to_string(violations) + " violations in " + std::to_string(logged) +
            " logged impacts"};
}

int run_command(const std::string& command)
{
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// Criterion 11
Verdict determinism()
{
  const fs::path root = fs::temp_directory_path() / "tricoin_acceptance_determinism";
  fs::remove_all(root);
  std::string detail;
  bool ok = true;
  for (const std::string name : {"bounce2d.ini", "table1.ini"})
  {
    const std::string base = std::string(TRICOIN_CLI_PATH) + " estimate -c " + TRICOIN_SCENARIO_DIR + "/" + name +
                             " --trials 400 --seed 77 --out ";
    const fs::path a = root / (name + "_t1");
    const fs::path b = root / (name + "_t4");
    const fs::path c = root / (name + "_t1_again");
    const int status = run_command(base + a.string() + " --threads 1 > /dev/null") |
                       run_command(base + b.string() + " --threads 4 > /dev/null") |
                       run_command(base + c.string() + " --threads 1 > /dev/null");
    const std::string log = slurp(a / "trials.jsonl");
    const bool same = status == 0 && !log.empty() && log == slurp(b / "trials.jsonl") && log == slurp(c / "trials.jsonl");
    ok = ok && same;
    detail += name + ": " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(log.size()) + " bytes); ";
  }
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv)
{
  const std::vector<std::function<Verdict()>> criteria{analytic_flat,   analytic_volumetric, inelastic_2d,
                                                        inelastic_3d,    fair_ratios,         monotonicity,
                                                        mass_independence, error_law,         impact_oracles,
                                                        rigid_body_invariants, determinism};
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i)
  {
    selected.insert(std::stoul(argv[i]));
  }

  int failures = 0;
  for (std::size_t n = 1; n <= criteria.size(); ++n)
  {
    if (!selected.empty() && selected.count(n) == 0)
    {
      continue;
    }
    const auto start = Clock::now();
    Verdict verdict;
    try
    {
      verdict = criteria[n - 1]();
    }
    catch (const std::exception& error)
    {
      verdict = {false, std::string("exception: ") + error.what()};
    }
    failures += verdict.pass ? 0 : 1;
    std::cout << "criterion " << std::setw(2) << n << ": " << (verdict.pass ? "PASS" : "FAIL") << "  "
              << verdict.detail << "  [" << fmt(seconds_since(start), 4) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
