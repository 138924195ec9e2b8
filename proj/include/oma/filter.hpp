#pragma once

#include <Eigen/Core>
#include <vector>

#include "oma/numeric.hpp"

namespace oma {

/// Cascade of second-order sections (a0 normalized to 1).
struct BandpassFilter {
  struct Biquad {
    double b0, b1, b2;
    double a1, a2;
  };
  std::vector<Biquad> sections;
  double f_lo_hz = 0.0;
  double f_hi_hz = 0.0;
  double sample_rate_hz = 0.0;
};

/// Butterworth band-pass (order-2 analog prototype, bilinear transform, two
/// second-order sections) with half-power corners at f_lo / f_hi.
BandpassFilter design_bandpass(double f_lo_hz, double f_hi_hz,
                               double sample_rate_hz);

/// Zero-phase forward-backward application with odd-reflection edge padding.
/// The passband response is |H|^2, unity at the filter's center frequency.
Eigen::VectorXd filtfilt(const BandpassFilter& filter, const Eigen::VectorXd& x);

}  // namespace oma
