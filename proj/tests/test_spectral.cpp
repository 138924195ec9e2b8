#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oma/spectral.hpp"

using namespace oma;

namespace {

constexpr double kPi = std::numbers::pi;

TimeSeriesRecord tone_record(const std::vector<double>& freqs,
                             const std::vector<double>& amps, double fs,
                             double duration) {
  const auto n = static_cast<Eigen::Index>(std::llround(fs * duration));
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    for (std::size_t m = 0; m < freqs.size(); ++m)
      samples(i, 0) += amps[m] * std::sin(2.0 * kPi * freqs[m] * t + 0.3);
  }
  std::vector<ChannelSpec> channels{
      {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.0, 0.0}};
  return TimeSeriesRecord(fs, channels, samples);
}

}  // namespace

TEST_CASE("check_nyquist verdicts") {
  // the torsional target near 8 Hz at the chosen 200 Hz rate
  const auto fine = check_nyquist(200.0, 8.0);
  CHECK(fine.ok);
  CHECK(fine.minimum_rate_hz == 16.0);

  const auto boundary = check_nyquist(16.0, 8.0);
  CHECK(boundary.ok);  // inclusive

  const auto under = check_nyquist(15.0, 8.0);
  CHECK_FALSE(under.ok);
  CHECK(under.minimum_rate_hz == 16.0);

  CHECK_THROWS_AS(check_nyquist(0.0, 8.0), Error);
  CHECK_THROWS_AS(check_nyquist(200.0, -1.0), Error);
}

TEST_CASE("spectrum of a pure sinusoid peaks at its frequency") {
  const auto record = tone_record({2.263}, {1.0}, 200.0, 90.0);
  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});

  CHECK(spectrum.resolution_hz * static_cast<double>(
            2 * (spectrum.frequencies_hz.size() - 1)) ==
        doctest::Approx(200.0).epsilon(1e-15));

  Eigen::Index arg = 0;
  spectrum.magnitudes.col(0).maxCoeff(&arg);
  CHECK(std::abs(spectrum.frequencies_hz(arg) - 2.263) <=
        spectrum.resolution_hz);
  CHECK(spectrum.magnitudes(arg, 0) == 1.0);

  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.1, 4);
  REQUIRE(peaks.peaks.size() == 1);
  CHECK(peaks.peaks[0].frequency_hz == doctest::Approx(2.263).epsilon(1e-3));
  CHECK(peaks.peaks[0].magnitude == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("all-zero record has no normalizable spectrum") {
  Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(256, 1);
  std::vector<ChannelSpec> channels{
      {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.0, 0.0}};
  const TimeSeriesRecord record(200.0, channels, zeros);
  try {
    compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
    FAIL("expected DegenerateSignal");
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_signal);
  }
}

TEST_CASE("two equal tones give two peaks within one bin") {
  const auto record = tone_record({2.085, 3.752}, {1.0, 1.0}, 200.0, 90.0);
  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.1, 8);
  REQUIRE(peaks.peaks.size() == 2);
  CHECK(std::abs(peaks.peaks[0].frequency_hz - 2.085) <= spectrum.resolution_hz);
  CHECK(std::abs(peaks.peaks[1].frequency_hz - 3.752) <= spectrum.resolution_hz);
}

TEST_CASE("sub-bin refinement lands within 0.02 Hz of an off-bin tone") {
  const auto record = tone_record({7.906}, {0.4}, 200.0, 90.0);
  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.1, 4);
  REQUIRE(peaks.peaks.size() == 1);
  CHECK(std::abs(peaks.peaks[0].frequency_hz - 7.906) <= 0.02);
}

TEST_CASE("monotone spectrum yields no peaks") {
  Spectrum spectrum;
  const int n = 64;
  spectrum.frequencies_hz = Eigen::VectorXd::LinSpaced(n, 0.0, 10.0);
  spectrum.magnitudes.resize(n, 1);
  for (int i = 0; i < n; ++i) spectrum.magnitudes(i, 0) = 1.0 - i * 0.01;
  spectrum.peak_magnitude = Eigen::VectorXd::Ones(1);
  spectrum.resolution_hz = 10.0 / (n - 1);
  spectrum.normalized_band = Band{0.0, 10.0};
  spectrum.channel_ids = {"az"};

  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.05, 8);
  CHECK(peaks.peaks.empty());
}

TEST_CASE("pick_peaks validates its arguments") {
  const auto record = tone_record({2.0}, {1.0}, 200.0, 10.0);
  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
  CHECK_THROWS_AS(pick_peaks(spectrum, Band{1.0, 9.0}, 0.0, 4), Error);
  CHECK_THROWS_AS(pick_peaks(spectrum, Band{1.0, 9.0}, 1.0, 4), Error);
  CHECK_THROWS_AS(pick_peaks(spectrum, Band{9.0, 1.0}, 0.05, 4), Error);
  CHECK_THROWS_AS(pick_peaks(spectrum, Band{1.0, 500.0}, 0.05, 4), Error);
}

TEST_CASE("compute_spectrum validates band and padding") {
  const auto record = tone_record({2.0}, {1.0}, 200.0, 5.0);
  try {
    compute_spectrum(record, Window::rectangular, Band{1.0, 150.0});
    FAIL("expected BandAboveNyquist");
  } catch (const Error& e) {
    CHECK(e.code() == errc::band_above_nyquist);
  }
  CHECK_THROWS_AS(
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0}, 10u),
      Error);
}

TEST_CASE("Parseval sanity before normalization, rectangular window") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int iter = 0; iter < 5; ++iter) {
    const int n = 1000 + 317 * iter;  // deliberately not a power of two
    Eigen::MatrixXd samples(n, 1);
    for (int i = 0; i < n; ++i) samples(i, 0) = noise(rng);
    std::vector<ChannelSpec> channels{
        {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.0, 0.0}};
    const TimeSeriesRecord record(200.0, channels, samples);

    const auto spectrum =
        compute_spectrum(record, Window::rectangular, Band{1.0, 90.0});
    const Eigen::VectorXd raw =
        spectrum.magnitudes.col(0) * spectrum.peak_magnitude(0);
    const auto n_bins = raw.size();
    const auto padded = 2 * (n_bins - 1);

    double freq_energy = raw(0) * raw(0) + raw(n_bins - 1) * raw(n_bins - 1);
    for (Eigen::Index k = 1; k < n_bins - 1; ++k)
      freq_energy += 2.0 * raw(k) * raw(k);
    freq_energy /= static_cast<double>(padded);

    const double time_energy = samples.col(0).squaredNorm();
    CHECK(freq_energy ==
          doctest::Approx(time_energy).epsilon(1e-6));
  }
}

TEST_CASE("peak frequencies are invariant under uniform amplitude scaling") {
  const auto base = tone_record({2.085, 3.752}, {1.0, 0.7}, 200.0, 60.0);
  Eigen::MatrixXd scaled_samples = base.samples() * 37.5;
  const TimeSeriesRecord scaled(base.sample_rate_hz(), base.channels(),
                                scaled_samples);

  const auto peaks_a = pick_peaks(
      compute_spectrum(base, Window::rectangular, Band{1.0, 9.0}),
      Band{1.0, 9.0}, 0.1, 8);
  const auto peaks_b = pick_peaks(
      compute_spectrum(scaled, Window::rectangular, Band{1.0, 9.0}),
      Band{1.0, 9.0}, 0.1, 8);
  REQUIRE(peaks_a.peaks.size() == peaks_b.peaks.size());
  for (std::size_t i = 0; i < peaks_a.peaks.size(); ++i)
    CHECK(peaks_a.peaks[i].frequency_hz ==
          doctest::Approx(peaks_b.peaks[i].frequency_hz).epsilon(1e-9));
}

TEST_CASE("hann window still finds the tone") {
  const auto record = tone_record({3.752}, {1.0}, 200.0, 60.0);
  const auto spectrum = compute_spectrum(record, Window::hann, Band{1.0, 9.0});
  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.1, 4);
  REQUIRE(peaks.peaks.size() == 1);
  CHECK(std::abs(peaks.peaks[0].frequency_hz - 3.752) <= 0.02);
}

TEST_CASE("aggregate_frequencies statistics") {
  auto set_with = [](std::vector<double> freqs) {
    PeakSet set;
    set.band = Band{1.0, 9.0};
    for (double f : freqs) set.peaks.push_back({f, 1.0, "az"});
    return set;
  };
  const std::vector<ModeLabel> labels{{"b1", 2.263}};

  SUBCASE("identical inputs give zero spread") {
    std::vector<PeakSet> sets(6, set_with({2.263}));
    const auto stats = aggregate_frequencies(sets, labels, 0.15);
    REQUIRE(stats.modes.size() == 1);
    CHECK(stats.modes[0].mean_hz == doctest::Approx(2.263).epsilon(1e-15));
    CHECK(stats.modes[0].std_dev_hz == 0.0);
    CHECK(stats.modes[0].count == 6);
  }

  SUBCASE("sample standard deviation uses the n-1 divisor") {
    std::vector<PeakSet> sets;
    for (double f : {2.25, 2.26, 2.27, 2.26, 2.27, 2.25})
      sets.push_back(set_with({f}));
    const auto stats = aggregate_frequencies(sets, labels, 0.15);
    REQUIRE(stats.modes.size() == 1);
    CHECK(stats.modes[0].mean_hz == doctest::Approx(2.26).epsilon(1e-12));
    // hand-computed: sqrt(4e-4 / 5) = 0.00894427...
    CHECK(stats.modes[0].std_dev_hz ==
          doctest::Approx(0.008944271909999159).epsilon(1e-9));
  }

  SUBCASE("single match has zero std by definition") {
    std::vector<PeakSet> sets{set_with({2.27})};
    const auto stats = aggregate_frequencies(sets, labels, 0.15);
    REQUIRE(stats.modes.size() == 1);
    CHECK(stats.modes[0].count == 1);
    CHECK(stats.modes[0].std_dev_hz == 0.0);
  }

  SUBCASE("four-mode table shape with an unmatched label flagged") {
    const std::vector<ModeLabel> table{
        {"b1", 2.263}, {"b2", 2.085}, {"b3", 3.752}, {"t1", 7.906}, {"x", 6.0}};
    std::vector<PeakSet> sets;
    for (int i = 0; i < 6; ++i)
      sets.push_back(set_with({2.26 + 0.001 * i, 2.08, 3.75, 7.90}));
    const auto stats = aggregate_frequencies(sets, table, 0.15);
    CHECK(stats.modes.size() == 4);
    REQUIRE(stats.unmatched.size() == 1);
    CHECK(stats.unmatched[0] == "x");
    for (const auto& mode : stats.modes) {
      CHECK(mode.count == 6);
      CHECK(mode.std_dev_hz >= 0.0);
    }
  }

  SUBCASE("mean lies within the matched range") {
    std::vector<PeakSet> sets{set_with({2.2}), set_with({2.3})};
    const auto stats = aggregate_frequencies(sets, labels, 0.15);
    REQUIRE(stats.modes.size() == 1);
    CHECK(stats.modes[0].mean_hz >= 2.2);
    CHECK(stats.modes[0].mean_hz <= 2.3);
  }
}
