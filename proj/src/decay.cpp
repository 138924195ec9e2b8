#include "oma/decay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "oma/filter.hpp"

namespace oma {

namespace {

constexpr double kPi = std::numbers::pi;

/// Per-period envelope: maximum |x| over consecutive windows of one period.
std::vector<double> period_envelope(const Eigen::VectorXd& x,
                                    Eigen::Index samples_per_period) {
  std::vector<double> env;
  for (Eigen::Index start = 0; start + samples_per_period <= x.size();
       start += samples_per_period)
    env.push_back(x.segment(start, samples_per_period).cwiseAbs().maxCoeff());
  return env;
}

struct RawPeak {
  Eigen::Index index;
  double t;      // seconds, refined
  double value;  // refined amplitude
};

/// Strict positive local maxima with quadratic refinement of time and value.
std::vector<RawPeak> local_maxima(const DecaySegment& segment) {
  std::vector<RawPeak> peaks;
  const auto& x = segment.samples;
  for (Eigen::Index i = 1; i + 1 < x.size(); ++i) {
    if (!(x(i) > 0.0) || !(x(i) > x(i - 1)) || !(x(i) > x(i + 1))) continue;
    const auto vertex = refine_parabolic(x(i - 1), x(i), x(i + 1));
    peaks.push_back({i,
                     segment.t_start_s + (static_cast<double>(i) + vertex.offset) /
                                             segment.sample_rate_hz,
                     vertex.value});
  }
  return peaks;
}

}  // namespace

std::vector<DecaySegment> detect_free_decay(
    const TimeSeriesRecord& record, double target_frequency_hz,
    std::optional<double> excitation_off_hint_s) {
  if (!(target_frequency_hz > 0.0))
    raise(errc::invalid_argument, "target frequency must be positive");
  const double fs = record.sample_rate_hz();
  const double duration = record.duration_s();
  const double period = 1.0 / target_frequency_hz;
  if (excitation_off_hint_s && !(*excitation_off_hint_s < duration))
    raise(errc::window_out_of_range, "excitation-off hint beyond record end");

  const auto samples_per_period =
      std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::floor(fs * period)));

  std::vector<DecaySegment> segments;
  for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
    const Eigen::VectorXd x = record.samples().col(c);

    Eigen::Index start = 0;
    if (excitation_off_hint_s) {
      const double t_start = *excitation_off_hint_s + 2.0 * period;
      start = static_cast<Eigen::Index>(std::ceil(t_start * fs - 1e-9));
    } else {
      const auto envelope = period_envelope(x, samples_per_period);
      if (envelope.size() < 6)
        raise(errc::segment_too_short,
              "record shorter than 6 periods of the target mode");
      std::size_t peak_bin = 0;
      for (std::size_t b = 1; b < envelope.size(); ++b)
        if (envelope[b] > envelope[peak_bin]) peak_bin = b;

      bool decaying = peak_bin + 5 < envelope.size();
      if (decaying) {
        for (std::size_t b = peak_bin; b < peak_bin + 5; ++b)
          if (envelope[b + 1] > envelope[b] * 1.001) decaying = false;
        // require a measurable drop, not a flat envelope
        if (envelope[peak_bin + 5] > envelope[peak_bin] * 0.99) decaying = false;
      }
      if (!decaying)
        raise(errc::no_decay_detected,
              "no decaying envelope in channel '" +
                  record.channels()[static_cast<std::size_t>(c)].id + "'");

      const Eigen::Index bin_start =
          static_cast<Eigen::Index>(peak_bin) * samples_per_period;
      Eigen::Index max_idx = bin_start;
      for (Eigen::Index i = bin_start; i < bin_start + samples_per_period; ++i)
        if (std::abs(x(i)) > std::abs(x(max_idx))) max_idx = i;
      start = max_idx;
    }

    const Eigen::Index remaining = x.size() - start;
    if (remaining < 3 * samples_per_period)
      raise(errc::segment_too_short,
            "free-decay window shorter than 3 periods of the target mode");

    DecaySegment segment;
    segment.channel = record.channels()[static_cast<std::size_t>(c)].id;
    segment.t_start_s = record.start_time_s() + static_cast<double>(start) / fs;
    segment.samples = x.tail(remaining);
    segment.sample_rate_hz = fs;
    segments.push_back(std::move(segment));
  }
  return segments;
}

PeakPair extract_peak_pair(const DecaySegment& segment,
                           double target_frequency_hz, int n_periods) {
  if (!(target_frequency_hz > 0.0))
    raise(errc::invalid_argument, "target frequency must be positive");
  if (n_periods < 1) raise(errc::invalid_argument, "n_periods must be >= 1");
  const double segment_duration =
      static_cast<double>(segment.samples.size()) / segment.sample_rate_hz;
  if (segment_duration * target_frequency_hz <
      static_cast<double>(n_periods + 1))
    raise(errc::segment_too_short,
          "segment shorter than n_periods + 1 oscillations");

  const auto peaks = local_maxima(segment);
  if (peaks.size() < static_cast<std::size_t>(n_periods) + 1)
    raise(errc::segment_too_short,
          "fewer than n_periods + 1 oscillation maxima");

  double global_max = 0.0;
  for (const auto& p : peaks) global_max = std::max(global_max, p.value);
  const double noise_floor = 0.5 * global_max;

  const RawPeak* first = nullptr;
  for (const auto& p : peaks) {
    if (p.value >= noise_floor) {
      first = &p;
      break;
    }
  }
  if (!first) raise(errc::no_decay_detected, "no peak above the noise floor");

  const double t2_target =
      first->t + static_cast<double>(n_periods) / target_frequency_hz;
  const RawPeak* second = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& p : peaks) {
    const double dist = std::abs(p.t - t2_target);
    if (dist < best_dist) {
      best_dist = dist;
      second = &p;
    }
  }
  if (!second || second == first)
    raise(errc::segment_too_short, "no second maximum near the target lag");

  PeakPair pair{first->t, first->value, second->t, second->value, n_periods};
  if (!(pair.a1 > 0.0) || !(pair.a2 > 0.0))
    raise(errc::non_positive_amplitude, "oscillation maxima must be positive");
  if (pair.a2 > pair.a1)
    raise(errc::no_decay_detected, "second maximum exceeds the first");
  const double observed_periods = (pair.t2_s - pair.t1_s) * target_frequency_hz;
  if (std::abs(observed_periods - static_cast<double>(n_periods)) >
      0.25 * static_cast<double>(n_periods))
    raise(errc::no_decay_detected,
          "peak spacing off the requested period count by more than 25%");
  return pair;
}

double log_decrement(const PeakPair& pair) {
  if (!(pair.a1 > 0.0) || !(pair.a2 > 0.0))
    raise(errc::non_positive_amplitude, "amplitudes must be positive");
  if (pair.n_periods < 1) raise(errc::invalid_argument, "n_periods must be >= 1");
  return std::log(pair.a1 / pair.a2) / static_cast<double>(pair.n_periods);
}

double damping_from_decrement(double lambda, DecrementRelation relation) {
  if (lambda < 0.0) raise(errc::invalid_argument, "decrement must be >= 0");
  if (relation == DecrementRelation::small_damping)
    return lambda / (2.0 * kPi);
  return lambda / std::sqrt(4.0 * kPi * kPi + lambda * lambda);
}

DampingEstimate estimate_damping(const MeasurementSet& records,
                                 const DampingTarget& target, int n_periods,
                                 double band_halfwidth_hz,
                                 std::optional<double> excitation_off_hint_s) {
  validate_measurement_set(records);
  if (!(target.frequency_hz > 0.0))
    raise(errc::invalid_argument, "target frequency must be positive");
  if (!(band_halfwidth_hz > 0.0))
    raise(errc::invalid_argument, "band halfwidth must be positive");

  DampingEstimate estimate;
  estimate.mode_label = target.label;

  for (const auto& record : records.records) {
    const double fs = record.sample_rate_hz();
    const double f_lo = std::max(target.frequency_hz - band_halfwidth_hz,
                                 0.05 * target.frequency_hz);
    const double f_hi =
        std::min(target.frequency_hz + band_halfwidth_hz, 0.49 * fs);
    const BandpassFilter filter = design_bandpass(f_lo, f_hi, fs);

    std::optional<double> hint = excitation_off_hint_s;
    if (!hint) {
      const auto it = record.annotations().find("excitation_off_s");
      if (it != record.annotations().end()) hint = std::stod(it->second);
    }

    for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
      try {
        Eigen::MatrixXd filtered(record.sample_count(), 1);
        filtered.col(0) = filtfilt(filter, record.samples().col(c));
        if (!(filtered.col(0).cwiseAbs().maxCoeff() > 1e-12)) continue;

        std::vector<ChannelSpec> one_channel{
            record.channels()[static_cast<std::size_t>(c)]};
        const TimeSeriesRecord isolated(fs, std::move(one_channel),
                                        std::move(filtered),
                                        record.start_time_s());

        auto segments =
            detect_free_decay(isolated, target.frequency_hz, hint);
        DecaySegment& segment = segments.front();
        segment.band_filter = Band{f_lo, f_hi};

        ChannelDamping channel;
        channel.channel = segment.channel;
        channel.pair = extract_peak_pair(segment, target.frequency_hz, n_periods);
        channel.lambda = log_decrement(channel.pair);
        channel.zeta = damping_from_decrement(channel.lambda);
        if (!(channel.zeta > 0.0)) continue;
        estimate.per_channel.push_back(std::move(channel));
      } catch (const Error&) {
        // unresponsive channel for this target; skipped
      }
    }
  }

  if (estimate.per_channel.empty())
    raise(errc::no_usable_channel,
          "no channel yielded a damping estimate for '" + target.label + "'");

  std::vector<double> zetas;
  for (const auto& ch : estimate.per_channel) zetas.push_back(ch.zeta);
  estimate.mean_zeta = mean(zetas);
  return estimate;
}

void write_damping_csv(const std::vector<DampingEstimate>& estimates,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "mode,channel,t1_s,a1,t2_s,a2,n,lambda,zeta\n";
  for (const auto& est : estimates) {
    for (const auto& ch : est.per_channel)
      out << est.mode_label << ',' << ch.channel << ','
          << format_double(ch.pair.t1_s) << ',' << format_double(ch.pair.a1)
          << ',' << format_double(ch.pair.t2_s) << ','
          << format_double(ch.pair.a2) << ',' << ch.pair.n_periods << ','
          << format_double(ch.lambda) << ',' << format_double(ch.zeta) << '\n';
    out << est.mode_label << ",mean,,,,,,," << format_double(est.mean_zeta)
        << '\n';
  }
}

}  // namespace oma
