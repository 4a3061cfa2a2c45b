#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spincant/density.hpp"
#include "spincant/diagnostics.hpp"
#include "spincant/initial_state.hpp"
#include "spincant/params.hpp"

namespace spincant::app {

const char* version();

enum class ParamMode { none, physical, dimensionless };

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct VerifyOptions {
  int random_tuples = 200;
  int basis_tuples = 20;
  double coefficient_tolerance = 1e-8;
  double property_tolerance = 1e-6;
  // Test hook: scale one closed-form coefficient before it is compared.
  std::string corrupt;
  double corrupt_factor = 1.0 + 1e-6;
  // > 0 adds the closed-form vs grid comparison at this many points per axis.
  long grid_points = 0;
};

/// Resolved configuration. Parse errors are DomainError with a JSON pointer.
struct RunConfig {
  ParamMode mode = ParamMode::none;
  std::optional<PhysicalSetup> setup;
  nlohmann::json physical_input;  // as given, for sweeps and the echo
  DimensionlessParams params;
  InitialState init;
  std::uint64_t seed = 1;
  double mscs_margin = 10.0;
  std::optional<DistanceScaling> distance;

  std::vector<double> taus;  // evolve
  nlohmann::json tau_spec;

  double snapshot_tau = 0.0;
  std::optional<GridSpec> snapshot_grid;  // empty: chosen from the peak geometry
  std::int64_t max_grid_points = kDefaultMaxGridPoints;

  std::vector<SweepAxis> axes;  // sorted by name
  std::int64_t max_sweep_points = 100'000;

  VerifyOptions verify;

  bool physical() const { return mode == ParamMode::physical; }
  /// Throws DomainError unless a parameter mode is set.
  void require_params() const;
  nlohmann::json echo() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Artifacts. All pure functions of the config.
nlohmann::json thresholds_report(const RunConfig& c);
std::string evolve_csv(const RunConfig& c);
GridSpec default_snapshot_grid(const RunConfig& c);
DensityField snapshot_field(const RunConfig& c);
nlohmann::json snapshot_extra(const RunConfig& c, const DensityField& f);
std::string snapshot_csv(const RunConfig& c, const DensityField& f);
std::string sweep_csv(const RunConfig& c);

/// Distance between the |rho_{++}| and |rho_{--}| maxima along r = 0, from the
/// sampled field (log-parabolic refinement around the grid maximum).
double sampled_peak_separation(const DensityField& f);

struct CommandResult {
  int exit_code = 0;
  std::string summary;  // printed unless --quiet
  std::vector<std::filesystem::path> written;
};

CommandResult cmd_thresholds(const RunConfig& c, const std::filesystem::path& out);
CommandResult cmd_evolve(const RunConfig& c, const std::filesystem::path& out);
CommandResult cmd_snapshot(const RunConfig& c, const std::filesystem::path& out);
CommandResult cmd_verify(const RunConfig& c, const std::filesystem::path& out);
CommandResult cmd_sweep(const RunConfig& c, const std::filesystem::path& out);

}  // namespace spincant::app
