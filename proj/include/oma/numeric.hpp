#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>

namespace oma {

/// Shortest decimal string that parses back to exactly the same double.
/// Locale-independent; used for all CSV/JSON-adjacent numeric output.
std::string format_double(double value);

/// Frequency interval [lo_hz, hi_hz], used for spectral bands and filters.
struct Band {
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

double mean(std::span<const double> values);

/// Sample standard deviation (divisor n-1); zero for a single value.
double sample_std(std::span<const double> values);

std::size_t next_power_of_two(std::size_t n);

/// Vertex of the parabola through (-1, y_left), (0, y_center), (1, y_right).
/// offset is in sample units relative to the center point and lies in [-1, 1]
/// when y_center is a local maximum; value is the interpolated peak height.
struct ParabolicVertex {
  double offset;
  double value;
};
ParabolicVertex refine_parabolic(double y_left, double y_center, double y_right);

/// splitmix64 step, used to derive independent stream seeds from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Deterministic standard-normal generator: mt19937_64 engine with an explicit
/// Box-Muller transform, so draws do not depend on the standard library's
/// unspecified std::normal_distribution algorithm.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  /// Next N(0,1) sample.
  double next();

  /// Next uniform draw in [0, 1).
  double next_uniform();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace oma
