// Command-line front end: analytic | toss | estimate | sweep | fair

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tricoin/analytic.hpp"
#include "tricoin/config.hpp"
#include "tricoin/montecarlo.hpp"
#include "tricoin/sim2d.hpp"
#include "tricoin/sim3d.hpp"
#include "tricoin/sweep.hpp"

namespace
{

using namespace tricoin;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonConvergence = 4;

struct CommonOptions
{
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* command, CommonOptions& options)
{
  command->add_option("-c,--config", options.config_path, "INI configuration file");
  command->add_option("--set", options.overrides, "Override a config value, e.g. --set material.friction=0.3");
  command->add_option("--seed", options.seed, "Master seed");
  command->add_option("--trials", options.trials, "Number of trials (per point / per evaluation)");
  command->add_option("--threads", options.threads, "Worker threads (0 = all cores)");
  command->add_option("--out", options.out, "Output directory");
}

enum class Target
{
  Estimate,
  Sweep,
  Fair
};

RunConfig resolve(const CommonOptions& options, Target target = Target::Estimate)
{
  RunConfig config = options.config_path.empty() ? default_config() : load_config(options.config_path);
  for (const std::string& assignment : options.overrides)
  {
    apply_override(config, assignment);
  }
  if (options.seed)
  {
    config.request.master_seed = *options.seed;
  }
  // --trials only touches the count the subcommand uses.
  if (options.trials)
  {
    switch (target)
    {
      case Target::Estimate:
        config.request.n_trials = *options.trials;
        break;
      case Target::Sweep:
        config.sweep.trials = *options.trials;
        break;
      case Target::Fair:
        config.fair.trials = *options.trials;
        config.fair.max_trials = std::max(config.fair.max_trials, *options.trials);
        break;
    }
  }
  if (options.threads)
  {
    config.request.threads = *options.threads;
  }
  if (options.out)
  {
    config.out_dir = *options.out;
  }
  config.validate();
  return config;
}

std::ofstream open_output(const std::string& dir, const std::string& name)
{
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out)
  {
    throw std::ios_base::failure("cannot write '" + path.string() + "'");
  }
  out.exceptions(std::ios::badbit | std::ios::failbit);
  return out;
}

std::string human(double value)
{
  std::ostringstream text;
  text << std::setprecision(4) << value;
  return text.str();
}

int cmd_analytic(const std::string& model_name, double ratio, bool fair)
{
  AnalyticModel model = AnalyticModel::Flat;
  if (model_name == "volumetric")
  {
    model = AnalyticModel::Volumetric;
  }
  else if (model_name != "flat")
  {
    throw std::invalid_argument("--model must be flat or volumetric");
  }
  if (fair)
  {
    std::cout << human(fair_ratio(model)) << '\n';
  }
  else
  {
    std::cout << human(probability(model, ratio)) << '\n';
  }
  return kExitOk;
}

int cmd_toss(const RunConfig& config, std::size_t index)
{
  const EstimateRequest& request = config.request;
  const std::uint64_t seed = trial_seed(request.master_seed, index);
  TrialEngine stream(seed);
  const InitialConditions initial = sample_initial(request.sampler, stream);

  std::ofstream trajectory = open_output(config.out_dir, "trajectory.csv");
  Outcome outcome = Outcome::FaceUp;
  TrialStatus status = TrialStatus::Settled;
  std::size_t impacts = 0;
  double duration = 0.0;
  if (request.simulator == SimulatorKind::Sim2D)
  {
    TossConfig2D toss = make_config_2d(request.sim2d, initial);
    toss.record_trajectory = true;
    const TossResult2D result = simulate_toss_2d(request.coin, request.material, toss);
    write_trajectory_csv(trajectory, result.trajectory);
    outcome = result.outcome;
    status = result.status;
    impacts = result.impacts;
    duration = result.duration;
  }
  else
  {
    TossConfig3D toss = make_config_3d(request.coin, request.sim3d, initial);
    toss.record_trajectory = true;
    const TossResult3D result = simulate_toss_3d(request.coin, request.material, toss);
    write_trajectory_csv(trajectory, result.trajectory);
    outcome = result.outcome;
    status = result.status;
    impacts = result.impacts;
    duration = result.duration;
  }

  std::cout << "trial " << index << " seed " << seed << ": "
            << (status == TrialStatus::Settled ? std::string(to_string(outcome)) : std::string("DISCARDED"))
            << " after " << impacts << " impacts, " << human(duration) << " s\n";
  return kExitOk;
}

int cmd_estimate(const RunConfig& config)
{
  std::ofstream log_file = open_output(config.out_dir, "trials.jsonl");
  TrialLog log(log_file, config.request);
  EstimateReport report;
  try
  {
    report = estimate(config.request, [&log](const TrialRecord& record) { log.append(record); });
  }
  catch (const std::ios_base::failure&)
  {
    log_file.flush();
    throw;
  }
  log_file.close();

  std::ofstream report_file = open_output(config.out_dir, "report.json");
  write_report_json(report_file, report);

  std::cout << "p_side = " << human(report.p_side) << " +/- " << human(report.std_error) << " (binomial), +/- "
            << human(report.abs_error) << " (1/sqrt(N))\n"
            << "side " << report.n_side << ", face_up " << report.n_face_up << ", face_down " << report.n_face_down
            << ", discarded " << report.n_discarded << " of " << report.n_total << '\n';
  return kExitOk;
}

int cmd_sweep(const RunConfig& config)
{
  const SweepPlan plan = config.sweep_plan();
  const SweepTable table = run_sweep(plan);
  std::ofstream csv = open_output(config.out_dir, "sweep.csv");
  write_sweep_csv(csv, table);

  std::cout << to_string(plan.axis) << "  p_side  stderr\n";
  for (const SweepPoint& point : table.points)
  {
    std::cout << human(point.value) << "  ";
    if (point.error.empty())
    {
      std::cout << human(point.p_side) << "  " << human(point.std_error) << '\n';
    }
    else
    {
      std::cout << "error: " << point.error << '\n';
    }
  }
  if (plan.axis == SweepAxis::AspectRatio)
  {
    for (const std::size_t i : audit_monotonicity(table))
    {
      std::cerr << "warning: P(side) drops by more than 3 sigma between " << human(table.points[i].value) << " and "
                << human(table.points[i + 1].value) << '\n';
    }
  }
  return kExitOk;
}

int cmd_fair(const RunConfig& config)
{
  const FairOptions options = config.fair_options();
  try
  {
    const FairRatioResult result = find_fair_ratio(options);
    std::ofstream out = open_output(config.out_dir, "fair.json");
    write_fair_json(out, result, options);
    std::cout << "fair H/R = " << human(result.ratio) << " +/- " << human(result.half_width) << " ("
              << result.iterations << " iterations)\n";
    return kExitOk;
  }
  catch (const NoiseFloor& error)
  {
    std::ofstream out = open_output(config.out_dir, "fair.json");
    write_fair_json(out, error.partial, options);
    std::cerr << "error: " << error.what() << " (best estimate " << human(error.partial.ratio) << ")\n";
    return kExitNonConvergence;
  }
  catch (const BracketFailure& error)
  {
    std::cerr << "error: " << error.what() << '\n';
    return kExitNonConvergence;
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Side-landing probability of a cylindrical coin"};
  app.require_subcommand(1);

  std::string model = "flat";
  double ratio = 0.0;
  bool fair_flag = false;
  CLI::App* analytic = app.add_subcommand("analytic", "Closed-form side probability");
  analytic->add_option("--model", model, "flat or volumetric")->check(CLI::IsMember({"flat", "volumetric"}));
  analytic->add_option("--ratio", ratio, "Aspect ratio H/R");
  analytic->add_flag("--fair", fair_flag, "Print the fair ratio instead");

  CommonOptions toss_options;
  std::size_t toss_index = 0;
  CLI::App* toss = app.add_subcommand("toss", "Single trial with trajectory dump");
  add_common(toss, toss_options);
  toss->add_option("--trial", toss_index, "Trial index within the master seed");

  CommonOptions estimate_options;
  CLI::App* estimate_cmd = app.add_subcommand("estimate", "Monte Carlo estimate of P(side)");
  add_common(estimate_cmd, estimate_options);

  CommonOptions sweep_options;
  CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweep");
  add_common(sweep, sweep_options);

  CommonOptions fair_options;
  std::optional<std::string> fair_backend;
  CLI::App* fair = app.add_subcommand("fair", "Find H/R with P(side) = 1/3");
  add_common(fair, fair_options);
  fair->add_option("--backend", fair_backend, "analytic-flat, analytic-volumetric, sim2d or sim3d");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::CallForAllHelp& e)
  {
    return app.exit(e);
  }
  catch (const CLI::ParseError& e)
  {
    app.exit(e);
    return kExitValidation;
  }

  try
  {
    if (*analytic)
    {
      if (!fair_flag && analytic->count("--ratio") == 0)
      {
        throw std::invalid_argument("--ratio is required");
      }
      return cmd_analytic(model, ratio, fair_flag);
    }
    if (*toss)
    {
      return cmd_toss(resolve(toss_options), toss_index);
    }
    if (*estimate_cmd)
    {
      return cmd_estimate(resolve(estimate_options));
    }
    if (*sweep)
    {
      return cmd_sweep(resolve(sweep_options, Target::Sweep));
    }
    if (*fair)
    {
      if (fair_backend)
      {
        fair_options.overrides.push_back("fair.backend=" + *fair_backend);
      }
      return cmd_fair(resolve(fair_options, Target::Fair));
    }
  }
  catch (const std::invalid_argument& error)
  {
    std::cerr << "error: " << error.what() << '\n';
    return kExitValidation;
  }
  catch (const std::ios_base::failure& error)
  {
    std::cerr << "I/O error: " << error.what() << '\n';
    return kExitIo;
  }
  catch (const std::filesystem::filesystem_error& error)
  {
    std::cerr << "I/O error: " << error.what() << '\n';
    return kExitIo;
  }
  catch (const std::exception& error)
  {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return kExitOk;
}
