#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oma/errors.hpp"
#include "oma/filter.hpp"

using namespace oma;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd tone(double f, double fs, double duration, double phase = 0.0) {
  const auto n = static_cast<Eigen::Index>(fs * duration);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x(i) = std::sin(2.0 * kPi * f * static_cast<double>(i) / fs + phase);
  return x;
}

/// Max amplitude over the middle half, away from any edge effects.
double mid_amplitude(const Eigen::VectorXd& x) {
  const Eigen::Index quarter = x.size() / 4;
  return x.segment(quarter, x.size() / 2).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("band-pass keeps the center tone at unit amplitude, zero phase") {
  const double fs = 200.0;
  const auto filter = design_bandpass(1.763, 2.763, fs);
  const auto x = tone(2.263, fs, 60.0);
  const auto y = filtfilt(filter, x);

  CHECK(mid_amplitude(y) == doctest::Approx(1.0).epsilon(0.02));
  // zero phase: mid-signal difference stays small
  const Eigen::Index quarter = x.size() / 4;
  double max_diff = 0.0;
  for (Eigen::Index i = quarter; i < 3 * quarter; ++i)
    max_diff = std::max(max_diff, std::abs(y(i) - x(i)));
  CHECK(max_diff < 0.05);
}

TEST_CASE("half-power corners attenuate to about one half after filtfilt") {
  const double fs = 200.0;
  const auto filter = design_bandpass(1.5, 2.5, fs);
  const auto lo = filtfilt(filter, tone(1.5, fs, 120.0));
  const auto hi = filtfilt(filter, tone(2.5, fs, 120.0));
  CHECK(mid_amplitude(lo) == doctest::Approx(0.5).epsilon(0.1));
  CHECK(mid_amplitude(hi) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("out-of-band content is strongly suppressed") {
  const double fs = 200.0;
  const auto filter = design_bandpass(1.763, 2.763, fs);
  CHECK(mid_amplitude(filtfilt(filter, tone(10.0, fs, 60.0))) < 0.01);
  CHECK(mid_amplitude(filtfilt(filter, Eigen::VectorXd::Ones(2000))) < 1e-6);
}

TEST_CASE("band edge validation") {
  CHECK_THROWS_AS(design_bandpass(2.0, 1.0, 200.0), Error);
  CHECK_THROWS_AS(design_bandpass(0.0, 1.0, 200.0), Error);
  CHECK_THROWS_AS(design_bandpass(1.0, 120.0, 200.0), Error);
}
