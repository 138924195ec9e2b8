#include "oma/similitude.hpp"

#include <cmath>
#include <fstream>

#include "oma/errors.hpp"
#include "oma/numeric.hpp"

namespace oma {

double frequency_factor(double geometry_factor) {
  if (!(geometry_factor > 0.0))
    raise(errc::invalid_argument, "geometry factor must be positive");
  return 1.0 / std::sqrt(geometry_factor);
}

ScalingLaw ScalingLaw::from_geometry(double geometry_factor) {
  ScalingLaw law;
  law.geometry_factor = geometry_factor;
  law.derived_frequency_factor = oma::frequency_factor(geometry_factor);
  law.frequency_factor = law.derived_frequency_factor;
  law.source = FactorSource::derived_from_geometry;
  return law;
}

ScalingLaw ScalingLaw::stated(double geometry_factor, double frequency_factor) {
  if (!(frequency_factor > 0.0))
    raise(errc::invalid_argument, "stated frequency factor must be positive");
  ScalingLaw law;
  law.geometry_factor = geometry_factor;
  law.derived_frequency_factor = oma::frequency_factor(geometry_factor);
  law.frequency_factor = frequency_factor;
  law.source = FactorSource::stated;
  return law;
}

double to_full_scale(double model_frequency_hz, const ScalingLaw& law) {
  if (!(model_frequency_hz > 0.0))
    raise(errc::invalid_argument, "model frequency must be positive");
  return model_frequency_hz * law.frequency_factor;
}

std::vector<FrequencyComparison> compare_to_reference(
    const std::vector<LabeledFrequency>& scaled,
    const std::vector<LabeledFrequency>& reference) {
  std::vector<FrequencyComparison> rows;
  for (const auto& s : scaled) {
    const LabeledFrequency* match = nullptr;
    for (const auto& r : reference)
      if (r.label == s.label) {
        match = &r;
        break;
      }
    if (!match)
      raise(errc::invalid_argument,
            "no reference value for label '" + s.label + "'");
    FrequencyComparison row;
    row.label = s.label;
    row.scaled_hz = s.frequency_hz;
    row.reference_hz = match->frequency_hz;
    row.absolute_diff_hz = s.frequency_hz - match->frequency_hz;
    row.relative_diff = row.absolute_diff_hz / match->frequency_hz;
    rows.push_back(std::move(row));
  }
  return rows;
}

DampingTransfer transfer_damping(double model_zeta) {
  if (!(model_zeta >= 0.0) || !(model_zeta < 1.0))
    raise(errc::invalid_argument, "damping ratio must lie in [0, 1)");
  return DampingTransfer{model_zeta, true};
}

void write_scaling_csv(const std::vector<ScalingRow>& rows,
                       const ScalingLaw& law,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "label,model_hz,factor,full_scale_hz,reference_hz,rel_diff\n";
  for (const auto& row : rows) {
    out << row.label << ',' << format_double(row.model_hz) << ','
        << format_double(law.frequency_factor) << ','
        << format_double(row.full_scale_hz) << ',';
    if (std::isfinite(row.reference_hz))
      out << format_double(row.reference_hz) << ','
          << format_double(row.relative_diff);
    else
      out << ',';
    out << '\n';
  }
}

}  // namespace oma
