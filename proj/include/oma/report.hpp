#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oma/similitude.hpp"
#include "oma/spectral.hpp"

namespace oma {

/// Knobs shared by the analysis commands and the report pipeline.
struct ReportConfig {
  Band band{1.0, 9.0};
  Window window = Window::rectangular;
  double peak_prominence = 0.05;
  std::size_t max_peaks = 8;
  std::vector<ModeLabel> mode_labels;  // defaults to the Lillebaelt modes
  double match_tolerance_hz = 0.15;

  int order_min = 2;
  int order_max = 40;
  int order_step = 2;
  int hankel_rows = 0;  // 0 derives a default from order_max and channel count
  std::size_t min_support = 3;
  double freq_gap_hz = 0.05;

  int n_periods = 5;
  double band_halfwidth_hz = 0.5;

  double geometry_factor = 200.0;
  /// Factor printed on the model's information sign; when set it takes
  /// precedence over the value derived from the geometry factor.
  std::optional<double> stated_frequency_factor = 0.07;
  /// Full-scale reference frequencies for the comparison column; empty
  /// disables the comparison.
  std::vector<LabeledFrequency> reference;

  static ReportConfig defaults();

  std::vector<int> orders() const;
  ScalingLaw scaling_law() const;
  int effective_hankel_rows(Eigen::Index channel_count) const;
};

/// Overrides config fields from a JSON file; unknown keys raise
/// SchemaViolation. Values in the file take precedence over flags.
void apply_config_file(ReportConfig& config, const std::filesystem::path& path);

struct StageFailure {
  std::string record;
  std::string stage;
  std::string message;
};

struct ReportOutcome {
  std::vector<StageFailure> failures;
  std::filesystem::path out_dir;
  bool ok() const { return failures.empty(); }
};

/// Full analysis bundle over a directory of record files: spectra, peaks and
/// aggregated frequencies from the impulse set; stabilization diagrams, SSI
/// and log-decrement damping from the servo set; full-scale conversion with
/// reference comparison. Per-record failures are recorded and the run
/// continues with the remaining records.
ReportOutcome run_report(const std::filesystem::path& measurement_dir,
                         const std::filesystem::path& out_dir,
                         const ReportConfig& config);

}  // namespace oma
