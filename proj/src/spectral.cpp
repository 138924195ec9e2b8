#include "oma/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>

#include <fftw3.h>

namespace oma {

namespace {

/// One-sided magnitude |X_k| for k = 0..n/2 of the zero-padded signal.
Eigen::VectorXd magnitude_fft(const Eigen::VectorXd& x, std::size_t padded) {
  std::vector<double> in(padded, 0.0);
  const std::size_t n_bins = padded / 2 + 1;
  std::vector<std::complex<double>> out(n_bins);

  fftw_plan plan = fftw_plan_dft_r2c_1d(
      static_cast<int>(padded), in.data(),
      reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  std::copy(x.data(), x.data() + x.size(), in.begin());
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  Eigen::VectorXd mag(static_cast<Eigen::Index>(n_bins));
  for (std::size_t k = 0; k < n_bins; ++k) mag(static_cast<Eigen::Index>(k)) = std::abs(out[k]);
  return mag;
}

void validate_band(const Band& band) {
  if (!(band.lo_hz >= 0.0) || !(band.hi_hz > band.lo_hz))
    raise(errc::empty_band, "band must satisfy 0 <= lo < hi");
}

}  // namespace

NyquistCheck check_nyquist(double sample_rate_hz, double f_max_expected_hz) {
  if (!(sample_rate_hz > 0.0) || !(f_max_expected_hz > 0.0))
    raise(errc::invalid_argument, "rates must be positive");
  NyquistCheck check;
  check.minimum_rate_hz = 2.0 * f_max_expected_hz;
  check.ok = sample_rate_hz >= check.minimum_rate_hz;
  return check;
}

Spectrum compute_spectrum(const TimeSeriesRecord& record, Window window,
                          Band band, std::optional<std::size_t> zero_pad_to) {
  validate_band(band);
  const double fs = record.sample_rate_hz();
  if (band.hi_hz > fs / 2.0 + 1e-12)
    raise(errc::band_above_nyquist, "band extends beyond fs/2");
  const auto n = static_cast<std::size_t>(record.sample_count());
  if (n < 2) raise(errc::record_too_short, "need at least 2 samples");

  std::size_t padded = next_power_of_two(n);
  if (zero_pad_to) {
    if (*zero_pad_to < n)
      raise(errc::invalid_argument, "zero_pad_to smaller than sample count");
    padded = *zero_pad_to;
  }

  const Eigen::Index n_ch = record.channel_count();
  const auto n_bins = static_cast<Eigen::Index>(padded / 2 + 1);

  Spectrum spec;
  spec.resolution_hz = fs / static_cast<double>(padded);
  spec.window = window;
  spec.normalized_band = band;
  spec.frequencies_hz =
      Eigen::VectorXd::LinSpaced(n_bins, 0.0,
                                 spec.resolution_hz * static_cast<double>(n_bins - 1));
  spec.magnitudes.resize(n_bins, n_ch);
  spec.peak_magnitude.resize(n_ch);
  for (const auto& ch : record.channels()) spec.channel_ids.push_back(ch.id);

  Eigen::VectorXd taper;
  if (window == Window::hann) {
    taper.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      taper(static_cast<Eigen::Index>(i)) =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(n - 1));
  }

  for (Eigen::Index c = 0; c < n_ch; ++c) {
    Eigen::VectorXd x = record.samples().col(c);
    if (window == Window::hann) x = x.cwiseProduct(taper);
    spec.magnitudes.col(c) = magnitude_fft(x, padded);
  }

  // per-channel normalization to the in-band maximum
  Eigen::Index lo_bin = n_bins, hi_bin = -1;
  for (Eigen::Index k = 0; k < n_bins; ++k) {
    const double f = spec.frequencies_hz(k);
    if (f >= band.lo_hz && f <= band.hi_hz) {
      lo_bin = std::min(lo_bin, k);
      hi_bin = std::max(hi_bin, k);
    }
  }
  if (hi_bin < lo_bin) raise(errc::empty_band, "no spectral bins inside band");
  for (Eigen::Index c = 0; c < n_ch; ++c) {
    const double peak =
        spec.magnitudes.col(c).segment(lo_bin, hi_bin - lo_bin + 1).maxCoeff();
    if (!(peak > 0.0))
      raise(errc::degenerate_signal,
            "channel '" + spec.channel_ids[static_cast<std::size_t>(c)] +
                "' has no energy inside the normalization band");
    spec.peak_magnitude(c) = peak;
    spec.magnitudes.col(c) /= peak;
  }
  return spec;
}

PeakSet pick_peaks(const Spectrum& spectrum, Band band, double min_prominence,
                   std::size_t max_peaks) {
  validate_band(band);
  if (!(min_prominence > 0.0) || !(min_prominence < 1.0))
    raise(errc::invalid_argument, "min_prominence must lie in (0, 1)");
  const auto& f = spectrum.frequencies_hz;
  if (band.lo_hz < f(0) - 1e-12 || band.hi_hz > f(f.size() - 1) + 1e-12)
    raise(errc::invalid_argument, "band outside spectrum range");

  Eigen::Index lo = f.size(), hi = -1;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    if (f(k) >= band.lo_hz && f(k) <= band.hi_hz) {
      lo = std::min(lo, k);
      hi = std::max(hi, k);
    }
  }
  if (hi < lo) raise(errc::empty_band, "no spectral bins inside band");

  std::vector<Peak> found;
  for (Eigen::Index c = 0; c < spectrum.magnitudes.cols(); ++c) {
    const auto& m = spectrum.magnitudes.col(c);
    for (Eigen::Index i = lo + 1; i < hi; ++i) {
      if (!(m(i) > m(i - 1)) || !(m(i) > m(i + 1))) continue;

      // topographic prominence inside the band window
      double left_min = m(i);
      for (Eigen::Index j = i - 1; j >= lo; --j) {
        if (m(j) > m(i)) break;
        left_min = std::min(left_min, m(j));
      }
      double right_min = m(i);
      for (Eigen::Index j = i + 1; j <= hi; ++j) {
        if (m(j) > m(i)) break;
        right_min = std::min(right_min, m(j));
      }
      const double prominence = m(i) - std::max(left_min, right_min);
      if (prominence < min_prominence) continue;

      const auto vertex = refine_parabolic(m(i - 1), m(i), m(i + 1));
      Peak peak;
      peak.frequency_hz = std::clamp(
          f(i) + vertex.offset * spectrum.resolution_hz, band.lo_hz, band.hi_hz);
      peak.magnitude = std::min(vertex.value, 1.0);
      peak.channel = spectrum.channel_ids[static_cast<std::size_t>(c)];
      found.push_back(std::move(peak));
    }
  }

  std::sort(found.begin(), found.end(), [](const Peak& a, const Peak& b) {
    if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
    return a.frequency_hz < b.frequency_hz;
  });
  if (found.size() > max_peaks) found.resize(max_peaks);
  std::sort(found.begin(), found.end(), [](const Peak& a, const Peak& b) {
    return a.frequency_hz < b.frequency_hz;
  });

  return PeakSet{std::move(found), band};
}

FrequencyStatistics aggregate_frequencies(const std::vector<PeakSet>& peak_sets,
                                          const std::vector<ModeLabel>& labels,
                                          double match_tolerance_hz) {
  if (peak_sets.empty()) raise(errc::invalid_argument, "no peak sets given");
  if (labels.empty()) raise(errc::invalid_argument, "no mode labels given");
  if (!(match_tolerance_hz > 0.0))
    raise(errc::invalid_argument, "match tolerance must be positive");

  std::vector<std::vector<double>> matched(labels.size());
  for (const auto& set : peak_sets) {
    for (const auto& peak : set.peaks) {
      std::size_t best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < labels.size(); ++l) {
        const double d = std::abs(peak.frequency_hz - labels[l].nominal_hz);
        if (d < best_dist) {
          best_dist = d;
          best = l;
        }
      }
      if (best_dist <= match_tolerance_hz)
        matched[best].push_back(peak.frequency_hz);
    }
  }

  FrequencyStatistics stats;
  for (std::size_t l = 0; l < labels.size(); ++l) {
    if (matched[l].empty()) {
      stats.unmatched.push_back(labels[l].label);
      continue;
    }
    ModeFrequencyStat s;
    s.label = labels[l].label;
    s.mean_hz = mean(matched[l]);
    s.std_dev_hz = sample_std(matched[l]);
    s.count = matched[l].size();
    stats.modes.push_back(std::move(s));
  }
  return stats;
}

void write_spectrum_csv(const Spectrum& spectrum,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "frequency_hz";
  for (const auto& id : spectrum.channel_ids) out << ',' << id;
  out << '\n';
  for (Eigen::Index k = 0; k < spectrum.frequencies_hz.size(); ++k) {
    out << format_double(spectrum.frequencies_hz(k));
    for (Eigen::Index c = 0; c < spectrum.magnitudes.cols(); ++c)
      out << ',' << format_double(spectrum.magnitudes(k, c));
    out << '\n';
  }
}

void write_peaks_csv(const PeakSet& peaks, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "channel,frequency_hz,magnitude\n";
  for (const auto& p : peaks.peaks)
    out << p.channel << ',' << format_double(p.frequency_hz) << ','
        << format_double(p.magnitude) << '\n';
}

void write_frequency_stats_csv(const FrequencyStatistics& stats,
                               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "label,mean_hz,std_hz,count\n";
  for (const auto& m : stats.modes)
    out << m.label << ',' << format_double(m.mean_hz) << ','
        << format_double(m.std_dev_hz) << ',' << m.count << '\n';
  for (const auto& label : stats.unmatched) out << label << ",,,0\n";
}

}  // namespace oma
