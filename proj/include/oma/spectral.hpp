#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oma/numeric.hpp"
#include "oma/records.hpp"

namespace oma {

enum class Window { rectangular, hann };

/// One-sided magnitude spectrum per channel, normalized so the maximum inside
/// normalized_band is 1 for every channel. peak_magnitude keeps the divisor so
/// the unnormalized spectrum can be reconstructed.
struct Spectrum {
  Eigen::VectorXd frequencies_hz;   // strictly increasing, spacing = resolution
  Eigen::MatrixXd magnitudes;       // n_bins x n_channels, normalized
  Eigen::VectorXd peak_magnitude;   // per-channel normalization divisor
  double resolution_hz = 0.0;
  Window window = Window::rectangular;
  Band normalized_band;
  std::vector<std::string> channel_ids;
};

struct NyquistCheck {
  bool ok = false;
  double minimum_rate_hz = 0.0;
};

/// ok iff sample_rate >= 2 * f_max_expected.
NyquistCheck check_nyquist(double sample_rate_hz, double f_max_expected_hz);

/// Magnitude spectrum of every channel, zero-padded to the next power of two
/// (or to zero_pad_to when given) and normalized per channel inside `band`.
Spectrum compute_spectrum(const TimeSeriesRecord& record, Window window,
                          Band band,
                          std::optional<std::size_t> zero_pad_to = {});

struct Peak {
  double frequency_hz = 0.0;
  double magnitude = 0.0;  // normalized, in (0, 1]
  std::string channel;
};

struct PeakSet {
  std::vector<Peak> peaks;  // sorted by frequency
  Band band;
};

/// Local maxima inside `band` with topographic prominence >= min_prominence,
/// frequency refined by three-point parabolic interpolation. At most max_peaks
/// peaks survive (largest magnitudes kept), returned sorted by frequency.
PeakSet pick_peaks(const Spectrum& spectrum, Band band, double min_prominence,
                   std::size_t max_peaks);

struct ModeLabel {
  std::string label;
  double nominal_hz = 0.0;
};

struct ModeFrequencyStat {
  std::string label;
  double mean_hz = 0.0;
  double std_dev_hz = 0.0;  // sample std (n-1); 0 when count == 1
  std::size_t count = 0;
};

struct FrequencyStatistics {
  std::vector<ModeFrequencyStat> modes;   // labels with at least one match
  std::vector<std::string> unmatched;     // labels with zero matches, flagged
};

/// Assigns every peak to the nearest nominal frequency within match_tolerance
/// and reports mean and sample standard deviation per label.
FrequencyStatistics aggregate_frequencies(const std::vector<PeakSet>& peak_sets,
                                          const std::vector<ModeLabel>& labels,
                                          double match_tolerance_hz);

/// CSV export `frequency_hz, <channel_id>...` of normalized magnitudes.
void write_spectrum_csv(const Spectrum& spectrum,
                        const std::filesystem::path& path);

/// CSV export `channel, frequency_hz, magnitude`.
void write_peaks_csv(const PeakSet& peaks, const std::filesystem::path& path);

/// CSV export `label, mean_hz, std_hz, count`; unmatched labels get count 0.
void write_frequency_stats_csv(const FrequencyStatistics& stats,
                               const std::filesystem::path& path);

}  // namespace oma
