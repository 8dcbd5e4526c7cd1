#include "tricoin/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace tricoin
{

namespace
{

std::string trim(std::string_view text)
{
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos)
  {
    return {};
  }
  const auto last = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value)
{
  const std::string text = trim(value);
  double result = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), result);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
  {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return result;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value)
{
  const std::string text = trim(value);
  std::uint64_t result = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), result);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
  {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
  return result;
}

bool to_bool(const std::string& key, const std::string& value)
{
  const std::string text = trim(value);
  if (text == "true" || text == "1" || text == "yes")
  {
    return true;
  }
  if (text == "false" || text == "0" || text == "no")
  {
    return false;
  }
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

Backend to_backend(const std::string& key, const std::string& value)
{
  const auto backend = backend_from_string(trim(value));
  if (!backend)
  {
    throw ConfigError(key + ": expected analytic-flat, analytic-volumetric, sim2d or sim3d, got '" + value + "'");
  }
  return *backend;
}

// "a,b,c" or "start:stop:step" (inclusive of stop within half a step).
std::vector<double> to_grid(const std::string& key, const std::string& value)
{
  std::vector<double> grid;
  const std::string text = trim(value);
  if (text.find(':') != std::string::npos)
  {
    std::vector<double> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ':'))
    {
      parts.push_back(to_double(key, item));
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    {
      throw ConfigError(key + ": range must be start:stop:step with step > 0 and stop >= start");
    }
    const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 0.5)) + 1;
    for (std::size_t i = 0; i < count; ++i)
    {
      grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    }
    return grid;
  }
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ','))
  {
    grid.push_back(to_double(key, item));
  }
  return grid;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename Field>
Setter number(Field field)
{
  return [field](RunConfig& c, const std::string& key, const std::string& value) { field(c) = to_double(key, value); };
}

template <typename Field>
Setter count(Field field)
{
  return [field](RunConfig& c, const std::string& key, const std::string& value) {
    field(c) = static_cast<std::remove_reference_t<decltype(field(c))>>(to_unsigned(key, value));
  };
}

const std::map<std::string, Setter>& setters()
{
  static const std::map<std::string, Setter> table = {
    {"coin.height", number([](RunConfig& c) -> double& { return c.request.coin.height; })},
    {"coin.radius", number([](RunConfig& c) -> double& { return c.request.coin.radius; })},
    {"coin.mass", number([](RunConfig& c) -> double& { return c.request.coin.mass; })},
    {"coin.aspect_ratio",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       c.request.coin.height = to_double(key, value) * c.request.coin.radius;
     }},

    {"material.restitution", number([](RunConfig& c) -> double& { return c.request.material.restitution; })},
    {"material.friction", number([](RunConfig& c) -> double& { return c.request.material.friction; })},
    {"material.impact_eta",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       if (trim(value) == "hertz")
       {
         c.request.material.impact_eta.reset();
       }
       else
       {
         c.request.material.impact_eta = to_double(key, value);
       }
     }},
    {"material.youngs_modulus", number([](RunConfig& c) -> double& { return c.request.material.youngs_modulus; })},
    {"material.poisson_ratio", number([](RunConfig& c) -> double& { return c.request.material.poisson_ratio; })},
    {"material.impact_tau", number([](RunConfig& c) -> double& { return c.request.material.impact_tau; })},
    {"material.rolling_resistance",
     number([](RunConfig& c) -> double& { return c.request.material.rolling_resistance; })},

    {"sampler.orientation",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const std::string text = trim(value);
       if (text == "planar")
       {
         c.request.sampler.orientation_mode = OrientationMode::PlanarUniform;
       }
       else if (text == "sphere")
       {
         c.request.sampler.orientation_mode = OrientationMode::SphereUniform;
       }
       else
       {
         throw ConfigError(key + ": expected planar or sphere, got '" + value + "'");
       }
     }},
    {"sampler.angle_min", number([](RunConfig& c) -> double& { return c.request.sampler.angle_range.lo; })},
    {"sampler.angle_max", number([](RunConfig& c) -> double& { return c.request.sampler.angle_range.hi; })},
    {"sampler.spin_min", number([](RunConfig& c) -> double& { return c.request.sampler.spin_range.lo; })},
    {"sampler.spin_max", number([](RunConfig& c) -> double& { return c.request.sampler.spin_range.hi; })},
    {"sampler.height_min", number([](RunConfig& c) -> double& { return c.request.sampler.height_range.lo; })},
    {"sampler.height_max", number([](RunConfig& c) -> double& { return c.request.sampler.height_range.hi; })},
    {"sampler.speed_min", number([](RunConfig& c) -> double& { return c.request.sampler.speed_range.lo; })},
    {"sampler.speed_max", number([](RunConfig& c) -> double& { return c.request.sampler.speed_range.hi; })},

    {"sim2d.energy_stop_fraction",
     number([](RunConfig& c) -> double& { return c.request.sim2d.energy_stop_fraction; })},
    {"sim2d.timestep", number([](RunConfig& c) -> double& { return c.request.sim2d.timestep; })},
    {"sim2d.max_impacts", count([](RunConfig& c) -> std::size_t& { return c.request.sim2d.max_impacts; })},
    {"sim2d.contact_length", number([](RunConfig& c) -> double& { return c.request.sim2d.contact_length; })},
    {"sim2d.lever",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const std::string text = trim(value);
       if (text == "height")
       {
         c.request.sim2d.lever = LeverModel::Height;
       }
       else if (text == "half_diagonal")
       {
         c.request.sim2d.lever = LeverModel::HalfDiagonal;
       }
       else
       {
         throw ConfigError(key + ": expected height or half_diagonal, got '" + value + "'");
       }
     }},
    {"sim2d.budget",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const std::string text = trim(value);
       if (text == "conserve_energy")
       {
         c.request.sim2d.budget_policy = BudgetPolicy::ConserveEnergy;
       }
       else if (text == "keep_spin")
       {
         c.request.sim2d.budget_policy = BudgetPolicy::KeepSpin;
       }
       else
       {
         throw ConfigError(key + ": expected conserve_energy or keep_spin, got '" + value + "'");
       }
     }},

    {"sim3d.energy_stop_fraction",
     number([](RunConfig& c) -> double& { return c.request.sim3d.energy_stop_fraction; })},
    {"sim3d.settle_steps", count([](RunConfig& c) -> std::size_t& { return c.request.sim3d.settle_steps; })},
    {"sim3d.timestep", number([](RunConfig& c) -> double& { return c.request.sim3d.timestep; })},
    {"sim3d.max_time", number([](RunConfig& c) -> double& { return c.request.sim3d.max_time; })},
    {"sim3d.max_impacts", count([](RunConfig& c) -> std::size_t& { return c.request.sim3d.max_impacts; })},
    {"sim3d.contact_slop", number([](RunConfig& c) -> double& { return c.request.sim3d.contact_slop; })},
    {"sim3d.restitution_threshold",
     number([](RunConfig& c) -> double& { return c.request.sim3d.restitution_threshold; })},
    {"sim3d.solver_iterations",
     count([](RunConfig& c) -> std::size_t& { return c.request.sim3d.solver_iterations; })},
    {"sim3d.require_class_lock",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       c.request.sim3d.require_class_lock = to_bool(key, value);
     }},

    {"run.simulator",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const std::string text = trim(value);
       if (text == "sim2d")
       {
         c.request.simulator = SimulatorKind::Sim2D;
       }
       else if (text == "sim3d")
       {
         c.request.simulator = SimulatorKind::Sim3D;
       }
       else
       {
         throw ConfigError(key + ": expected sim2d or sim3d, got '" + value + "'");
       }
     }},
    {"run.trials", count([](RunConfig& c) -> std::size_t& { return c.request.n_trials; })},
    {"run.seed", count([](RunConfig& c) -> std::uint64_t& { return c.request.master_seed; })},
    {"run.threads", count([](RunConfig& c) -> unsigned& { return c.request.threads; })},
    {"run.out", [](RunConfig& c, const std::string&, const std::string& value) { c.out_dir = trim(value); }},
    {"run.gravity",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const double g = to_double(key, value);
       c.request.sim2d.gravity = g;
       c.request.sim3d.gravity = g;
     }},

    {"sweep.axis",
     [](RunConfig& c, const std::string& key, const std::string& value) {
       const auto axis = sweep_axis_from_string(trim(value));
       if (!axis)
       {
         throw ConfigError(key + ": expected aspect_ratio, friction or restitution, got '" + value + "'");
       }
       c.sweep.axis = *axis;
     }},
    {"sweep.backend",
     [](RunConfig& c, const std::string& key, const std::string& value) { c.sweep.backend = to_backend(key, value); }},
    {"sweep.grid",
     [](RunConfig& c, const std::string& key, const std::string& value) { c.sweep.grid = to_grid(key, value); }},
    {"sweep.trials", count([](RunConfig& c) -> std::size_t& { return c.sweep.trials; })},

    {"fair.backend",
     [](RunConfig& c, const std::string& key, const std::string& value) { c.fair.backend = to_backend(key, value); }},
    {"fair.tolerance", number([](RunConfig& c) -> double& { return c.fair.tolerance; })},
    {"fair.trials", count([](RunConfig& c) -> std::size_t& { return c.fair.trials; })},
    {"fair.max_trials", count([](RunConfig& c) -> std::size_t& { return c.fair.max_trials; })},
    {"fair.lower", number([](RunConfig& c) -> double& { return c.fair.lower; })},
    {"fair.upper", number([](RunConfig& c) -> double& { return c.fair.upper; })},
  };
  return table;
}

void rethrow_as_config_error(const std::exception& error)
{
  throw ConfigError(error.what());
}

}  // namespace

void set_value(RunConfig& config, const std::string& key, const std::string& value)
{
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end())
  {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  it->second(config, key, value);
}

void apply_override(RunConfig& config, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
  {
    throw ConfigError("override must look like section.key=value, got '" + std::string(assignment) + "'");
  }
  set_value(config, trim(assignment.substr(0, eq)), std::string(assignment.substr(eq + 1)));
}

RunConfig default_config()
{
  return RunConfig{};
}

RunConfig parse_config(std::istream& in)
{
  boost::property_tree::ptree tree;
  try
  {
    boost::property_tree::ini_parser::read_ini(in, tree);
  }
  catch (const boost::property_tree::ini_parser_error& error)
  {
    throw ConfigError(std::string("config syntax: ") + error.what());
  }

  RunConfig config = default_config();
  std::optional<std::string> aspect_ratio;
  for (const auto& [section, entries] : tree)
  {
    if (entries.empty() && !entries.data().empty())
    {
      throw ConfigError("key '" + section + "' must be inside a section");
    }
    for (const auto& [key, node] : entries)
    {
      const std::string full = section + "." + key;
      if (full == "coin.aspect_ratio")
      {
        aspect_ratio = node.data();
        continue;
      }
      set_value(config, full, node.data());
    }
  }
  // Applied last so that it sees the final radius.
  if (aspect_ratio)
  {
    set_value(config, "coin.aspect_ratio", *aspect_ratio);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path)
{
  std::ifstream file(path);
  if (!file)
  {
    throw std::ios_base::failure("cannot read config file '" + path + "'");
  }
  return parse_config(file);
}

void RunConfig::validate() const
{
  try
  {
    request.validate();
    if (out_dir.empty())
    {
      throw ConfigError("run.out must not be empty");
    }
    sweep_plan().validate();
    fair_options().validate();
  }
  catch (const ConfigError&)
  {
    throw;
  }
  catch (const std::invalid_argument& error)
  {
    rethrow_as_config_error(error);
  }
}

SweepPlan RunConfig::sweep_plan() const
{
  SweepPlan plan;
  plan.axis = sweep.axis;
  plan.backend = sweep.backend;
  plan.grid = sweep.grid;
  plan.trials_per_point = sweep.trials;
  plan.base = request;
  return plan;
}

FairOptions RunConfig::fair_options() const
{
  FairOptions options;
  options.backend = fair.backend;
  options.tolerance = fair.tolerance;
  options.trials_per_eval = fair.trials;
  options.max_trials_per_eval = std::max(fair.max_trials, fair.trials);
  options.lower = fair.lower;
  options.upper = fair.upper;
  options.base = request;
  return options;
}

}  // namespace tricoin
