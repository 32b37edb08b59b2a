#pragma once

#include "memwalk/integrator/stepper.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace memwalk::cli {

/// Unknown key, type mismatch or range violation in a config document.
class ConfigError : public std::runtime_error {
 public:
  /// line 0: the key does not occur in the document (default or command-line value).
  ConfigError(std::string key, int line, const std::string& message);
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  std::string key_;
  int line_;
};

struct MetricBlock {
  double N = 1.0;
  double safety = 0.5;
  double p2 = 1.5;
  double x_min = 1e-8;
};

/// Settings of the `variational` and `control-path` subcommands.
struct VariationalBlock {
  double rate_alpha = 1.0;
  double t_end = 10.0;
  double control_t = 2.0;
  double control_eps = 0.25;
  double r_target = 0.1;
  double control_h = 1e-4;
};

/// Second starting point of the `mixing` subcommand; its past is constant at x0_b.
struct MixingBlock {
  Vec x0_b;
  Vec v0_b;
};

struct AnalysisBlock {
  int bins = 100;
  double split = 0.5;
  /// radius, speed_sq, x1..xd
  std::string observable = "radius";
  MetricBlock metric;
  VariationalBlock variational;
  MixingBlock mixing;
};

struct OutputBlock {
  std::string out_dir = "out";
  bool emit_plots = true;
};

struct RunConfig {
  /// Model and simulation settings (the model block lives in sim.model).
  integrator::SimConfig sim;
  int n_members = 64;
  AnalysisBlock analysis;
  OutputBlock output;
};

/// Values from the command line; they replace the document's values before validation.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> coulomb_alpha;
  std::optional<double> t_max;
};

/// Parses and validates a config document. Missing keys take defaults: the reference
/// walker model (alpha = 1), dt = 2^-6, x0 = initial_past = 2 pi e1, v0 = 0,
/// burn_in = t_max / 4, seed 0.
RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Reads the file and parses it; an unreadable file is a ConfigError on key "config".
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Every field, defaults included. parse_config(to_json(c).dump()) reproduces c.
nlohmann::ordered_json to_json(const RunConfig& config);

/// to_json rendered with two-space indentation and a trailing newline.
std::string effective_config_text(const RunConfig& config);

/// Field-by-field equality through the JSON rendering.
bool same_config(const RunConfig& a, const RunConfig& b);

}  // namespace memwalk::cli
