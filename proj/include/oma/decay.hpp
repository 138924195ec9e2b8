#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oma/numeric.hpp"
#include "oma/records.hpp"

namespace oma {

/// Free-vibration portion of one channel, possibly band-pass isolated.
struct DecaySegment {
  std::string channel;
  double t_start_s = 0.0;
  Eigen::VectorXd samples;
  double sample_rate_hz = 0.0;
  std::optional<Band> band_filter;
};

/// Locates the free-decay window of every channel. With an excitation-off hint
/// the segment starts at the hint plus a settle margin of two periods of the
/// target mode; without it, at the global envelope maximum, which must be
/// followed by a monotone envelope decrease over at least five periods.
std::vector<DecaySegment> detect_free_decay(
    const TimeSeriesRecord& record, double target_frequency_hz,
    std::optional<double> excitation_off_hint_s = {});

/// Two oscillation maxima separated by n_periods periods of the target mode.
struct PeakPair {
  double t1_s = 0.0;
  double a1 = 0.0;
  double t2_s = 0.0;
  double a2 = 0.0;
  int n_periods = 1;
};

/// First oscillation maximum above the noise floor plus the maximum nearest to
/// t1 + n_periods/target_frequency, both refined by quadratic interpolation.
PeakPair extract_peak_pair(const DecaySegment& segment,
                           double target_frequency_hz, int n_periods);

/// Logarithmic decrement Lambda = ln(a1/a2) / n.
double log_decrement(const PeakPair& pair);

enum class DecrementRelation {
  small_damping,  // zeta = Lambda / 2pi
  exact,          // zeta = Lambda / sqrt(4 pi^2 + Lambda^2)
};

double damping_from_decrement(double lambda,
                              DecrementRelation relation =
                                  DecrementRelation::small_damping);

struct DampingTarget {
  std::string label;
  double frequency_hz = 0.0;
};

struct ChannelDamping {
  std::string channel;
  PeakPair pair;
  double lambda = 0.0;
  double zeta = 0.0;
};

struct DampingEstimate {
  std::string mode_label;
  std::vector<ChannelDamping> per_channel;
  double mean_zeta = 0.0;  // arithmetic mean over per_channel
};

/// Full chain per channel of every record: band-pass isolation around the
/// target (zero-phase, +-band_halfwidth), decay detection, peak extraction,
/// decrement, damping ratio; channels that fail are skipped. The band-pass is
/// applied to the whole record before slicing so filter transients settle
/// during the excitation phase.
DampingEstimate estimate_damping(const MeasurementSet& records,
                                 const DampingTarget& target, int n_periods,
                                 double band_halfwidth_hz = 0.5,
                                 std::optional<double> excitation_off_hint_s = {});

/// CSV export `mode, channel, t1_s, a1, t2_s, a2, n, lambda, zeta` plus one
/// aggregate mean row per mode.
void write_damping_csv(const std::vector<DampingEstimate>& estimates,
                       const std::filesystem::path& path);

}  // namespace oma
