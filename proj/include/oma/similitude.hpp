#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oma {

enum class FactorSource { derived_from_geometry, stated };

/// Geometry/frequency scaling pair. When the frequency factor is stated (for
/// example read off the model's information sign), the value derived from the
/// geometry is retained alongside for discrepancy reporting.
struct ScalingLaw {
  double geometry_factor = 1.0;           // F_l, > 1 for a reduction
  double frequency_factor = 1.0;          // F_f in effect
  double derived_frequency_factor = 1.0;  // 1 / sqrt(F_l)
  FactorSource source = FactorSource::derived_from_geometry;

  static ScalingLaw from_geometry(double geometry_factor);
  static ScalingLaw stated(double geometry_factor, double frequency_factor);
};

/// F_f = 1 / sqrt(F_l).
double frequency_factor(double geometry_factor);

/// model_frequency * F_f.
double to_full_scale(double model_frequency_hz, const ScalingLaw& law);

struct LabeledFrequency {
  std::string label;
  double frequency_hz = 0.0;
};

struct FrequencyComparison {
  std::string label;
  double scaled_hz = 0.0;
  double reference_hz = 0.0;
  double absolute_diff_hz = 0.0;  // scaled - reference
  double relative_diff = 0.0;     // (scaled - reference) / reference
};

/// Per-label differences against reference values; labels must match.
std::vector<FrequencyComparison> compare_to_reference(
    const std::vector<LabeledFrequency>& scaled,
    const std::vector<LabeledFrequency>& reference);

struct DampingTransfer {
  double zeta = 0.0;
  /// Damping carries over unchanged under this similitude, but the physical
  /// model needs calibration before the value represents the full-scale
  /// structure; the flag is therefore always set.
  bool uncalibrated = true;
};

DampingTransfer transfer_damping(double model_zeta);

struct ScalingRow {
  std::string label;
  double model_hz = 0.0;
  double full_scale_hz = 0.0;
  double reference_hz = 0.0;  // NaN when no reference is known
  double relative_diff = 0.0;
};

/// CSV export `label, model_hz, factor, full_scale_hz, reference_hz, rel_diff`.
void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const ScalingLaw& law,
                       const std::filesystem::path& path);

}  // namespace oma
