#ifndef TRICOIN_CONFIG_HPP
#define TRICOIN_CONFIG_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tricoin/montecarlo.hpp"
#include "tricoin/sweep.hpp"

namespace tricoin
{

/// Malformed or invalid configuration value. The message names the field.
class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

struct SweepSettings
{
  SweepAxis axis{SweepAxis::AspectRatio};
  Backend backend{Backend::Sim2D};
  std::vector<double> grid{0.5, 1.0, 1.5, 2.0};
  std::size_t trials{10000};
};

struct FairSettings
{
  Backend backend{Backend::Sim2D};
  double tolerance{0.05};
  std::size_t trials{20000};
  std::size_t max_trials{160000};
  double lower{0.2};
  double upper{3.0};
};

/**
 * @brief Merged run configuration.
 *
 * INI sections: [coin] [material] [sampler] [sim2d] [sim3d] [run] [sweep]
 * [fair]. Keys are documented in README.md; unknown keys are errors.
 */
struct RunConfig
{
  EstimateRequest request;
  std::string out_dir{"out"};
  SweepSettings sweep;
  FairSettings fair;

  /// Throws ConfigError with the offending field in the message.
  void validate() const;

  SweepPlan sweep_plan() const;
  FairOptions fair_options() const;
};

RunConfig default_config();

/// Throws std::ios_base::failure when unreadable, ConfigError when invalid.
RunConfig load_config(const std::string& path);

RunConfig parse_config(std::istream& in);

/// Applies "section.key=value" on top of an existing configuration.
void apply_override(RunConfig& config, std::string_view assignment);

void set_value(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace tricoin

#endif  // TRICOIN_CONFIG_HPP
