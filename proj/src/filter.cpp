#include "oma/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "oma/errors.hpp"

namespace oma {

namespace {

using cdouble = std::complex<double>;

/// |H(e^{i theta})| of one biquad.
double biquad_gain(const BandpassFilter::Biquad& s, double theta) {
  const cdouble z = std::polar(1.0, theta);
  const cdouble z1 = 1.0 / z, z2 = z1 * z1;
  const cdouble num = s.b0 + s.b1 * z1 + s.b2 * z2;
  const cdouble den = 1.0 + s.a1 * z1 + s.a2 * z2;
  return std::abs(num / den);
}

void run_biquad(const BandpassFilter::Biquad& s, std::vector<double>& x) {
  // direct form II transposed
  double z1 = 0.0, z2 = 0.0;
  for (double& v : x) {
    const double in = v;
    const double out = s.b0 * in + z1;
    z1 = s.b1 * in - s.a1 * out + z2;
    z2 = s.b2 * in - s.a2 * out;
    v = out;
  }
}

}  // namespace

BandpassFilter design_bandpass(double f_lo_hz, double f_hi_hz,
                               double sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  if (!(sample_rate_hz > 0.0))
    raise(errc::invalid_argument, "sample rate must be positive");
  if (!(f_lo_hz > 0.0) || !(f_hi_hz > f_lo_hz) || !(f_hi_hz < nyquist))
    raise(errc::invalid_argument,
          "band edges must satisfy 0 < lo < hi < fs/2");

  const double fs2 = 2.0 * sample_rate_hz;
  const double pi = std::numbers::pi;
  // pre-warped analog edges, bandwidth and center
  const double w1 = fs2 * std::tan(pi * f_lo_hz / sample_rate_hz);
  const double w2 = fs2 * std::tan(pi * f_hi_hz / sample_rate_hz);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // order-2 lowpass prototype pole in the upper half plane
  const cdouble proto = std::polar(1.0, 3.0 * pi / 4.0);

  // lowpass -> bandpass: each prototype pole spawns two poles
  const cdouble half = 0.5 * bw * proto;
  const cdouble root = std::sqrt(half * half - w0 * w0);
  const cdouble poles_s[2] = {half + root, half - root};

  BandpassFilter filter;
  filter.f_lo_hz = f_lo_hz;
  filter.f_hi_hz = f_hi_hz;
  filter.sample_rate_hz = sample_rate_hz;

  for (const cdouble& sp : poles_s) {
    const cdouble zp = (fs2 + sp) / (fs2 - sp);  // bilinear transform
    BandpassFilter::Biquad biquad;
    // one zero at z = +1 (from s = 0) and one at z = -1 (from s = infinity)
    biquad.b0 = 1.0;
    biquad.b1 = 0.0;
    biquad.b2 = -1.0;
    biquad.a1 = -2.0 * zp.real();
    biquad.a2 = std::norm(zp);
    filter.sections.push_back(biquad);
  }

  // normalize unit gain at the warped center frequency
  const double theta0 = 2.0 * std::atan(w0 / fs2);
  double gain = 1.0;
  for (const auto& s : filter.sections) gain *= biquad_gain(s, theta0);
  const double per_section = std::pow(1.0 / gain, 1.0 / 2.0);
  for (auto& s : filter.sections) {
    s.b0 *= per_section;
    s.b2 *= per_section;
  }
  return filter;
}

Eigen::VectorXd filtfilt(const BandpassFilter& filter, const Eigen::VectorXd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n < 4) raise(errc::invalid_argument, "signal too short to filter");

  // pad with several envelope time constants of the band so start-up
  // transients settle outside the signal
  const double bw = filter.f_hi_hz - filter.f_lo_hz;
  std::size_t pad =
      static_cast<std::size_t>(std::ceil(6.0 * filter.sample_rate_hz / bw));
  pad = std::min(pad, n - 1);

  std::vector<double> ext(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i)
    ext[i] = 2.0 * x(0) - x(static_cast<Eigen::Index>(pad - i));
  for (std::size_t i = 0; i < n; ++i) ext[pad + i] = x(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < pad; ++i)
    ext[pad + n + i] =
        2.0 * x(static_cast<Eigen::Index>(n - 1)) -
        x(static_cast<Eigen::Index>(n - 2 - i));

  for (const auto& s : filter.sections) run_biquad(s, ext);
  std::reverse(ext.begin(), ext.end());
  for (const auto& s : filter.sections) run_biquad(s, ext);
  std::reverse(ext.begin(), ext.end());

  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y(static_cast<Eigen::Index>(i)) = ext[pad + i];
  return y;
}

}  // namespace oma
