#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "oma/records.hpp"
#include "oma/simulator.hpp"

namespace oma {

/// A complete simulation request as described by a scenario JSON file.
struct Scenario {
  std::string name = "scenario";
  ModalModel model;
  ExcitationSpec excitation;
  std::vector<SensorSpec> sensors;
  double duration_s = 120.0;
  std::uint64_t seed = 0;
  SimulationOptions options;
  std::map<std::string, std::string> annotations;
};

/// Parses and validates a scenario file. Violations raise SchemaViolation
/// with the offending field path in the message. Omitted model/sensors fall
/// back to the Lillebaelt defaults.
Scenario load_scenario(const std::filesystem::path& path);

/// Built-in impulse scenario on the default model: drop device at x = 1.2 m
/// with a small lateral offset, sensors az@B, az@D, wx@C at 200 Hz.
Scenario default_impulse_scenario();

/// Runs the scenario deterministically (per-sensor seeds derived from the
/// scenario seed unless set explicitly) and stamps name/seed annotations.
TimeSeriesRecord run_scenario(const Scenario& scenario);

/// Loads, runs and writes `<name>.csv` + sidecar into out_dir.
/// Returns the path of the written data file.
std::filesystem::path run_simulate(const std::filesystem::path& scenario_path,
                                   const std::filesystem::path& out_dir,
                                   std::optional<std::uint64_t> seed_override = {});

}  // namespace oma
