#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oma/records.hpp"

namespace oma {

enum class ModeKind { bending, torsion };

struct ModeSpec {
  std::string label;
  ModeKind kind = ModeKind::bending;
  int shape_index = 1;          // half-wave count k of the pinned-span shape
  double frequency_hz = 1.0;
  double damping_ratio = 0.0;
  double modal_mass = 1.0;      // kg for bending, kg*m^2 for torsion
};

/// Modal description of the decoupled main span: pinned-pinned sinusoidal
/// bending shapes and sinusoidal twist shapes.
struct ModalModel {
  double span_length_m = 1.0;
  double deck_half_width_m = 0.0;
  std::vector<ModeSpec> modes;
};

void validate_model(const ModalModel& model);

enum class ExcitationKind { impulse_drop, servo_harmonic };

struct ImpulseParams {
  double mass_kg = 0.0;
  double drop_height_m = 0.0;
  double pulse_width_s = 0.010;  // half-sine support
};

struct ServoParams {
  double mass_kg = 0.0;
  double arm_length_m = 0.0;
  double angle_amplitude_rad = 0.0;  // actuator limit: 30 degrees
  double drive_frequency_hz = 0.0;   // actuator limit: 10 Hz
  double on_duration_s = 0.0;
};

struct ExcitationSpec {
  ExcitationKind kind = ExcitationKind::impulse_drop;
  double position_x_m = 0.0;
  double position_y_m = 0.0;  // lateral eccentricity, torque arm
  ImpulseParams impulse;
  ServoParams servo;
};

void validate_excitation(const ExcitationSpec& excitation,
                         const ModalModel& model);

/// Vertical force and the torque it induces about the span axis at time t.
struct ForceSample {
  double vertical_force_n = 0.0;
  double torque_about_x_nm = 0.0;
};

/// Shape value of the named mode at position x (dimensionless; twist shapes
/// share the sinusoidal form and scale the modal twist angle).
double mode_shape(const ModalModel& model, const std::string& label, double x_m);

ForceSample excitation_force(const ExcitationSpec& excitation, double t_s);

/// One MPU-6050-style sensing node: vertical acceleration plus roll rate.
struct SensorSpec {
  std::string name = "s";
  double position_x_m = 0.0;
  bool accel_channel = true;
  bool gyro_channel = true;
  double sample_rate_hz = 200.0;
  double accel_range_m_s2 = 4.0 * 9.81;     // +-4 g
  double gyro_range_deg_s = 1000.0;         // +-1000 deg/s
  double accel_noise_density = 0.0;         // (m/s^2)/sqrt(Hz)
  double gyro_noise_density = 0.0;          // (deg/s)/sqrt(Hz)
  int quantization_bits = 0;                // 0 disables quantization
  std::uint64_t rng_seed = 0;
};

struct SimulationOptions {
  int oversample = 10;  // internal integration rate as a multiple of fs
  /// When set, per-channel noise sigma = rms(clean) / 10^(snr_db/20),
  /// overriding the sensor noise densities.
  std::optional<double> snr_db;
  std::map<std::string, std::string> annotations;
};

/// Modal superposition under the given excitation. Each mode is propagated by
/// the exact zero-order-hold discretization of its SDOF equation at the
/// oversampled internal rate, so no numerical damping is introduced. Sensor
/// outputs are mixed from the modal states, then noise, range clipping and
/// quantization are applied and the result is decimated to the sensor rate.
TimeSeriesRecord simulate(const ModalModel& model,
                          const ExcitationSpec& excitation,
                          const std::vector<SensorSpec>& sensors,
                          double duration_s,
                          const SimulationOptions& options = {});

/// Lillebaelt 1:200 scale-model defaults: 3 m main span, the four identified
/// modes with their log-decrement damping ratios, 200 Hz sensors, and the
/// measurement point coordinates A..E along the span.
struct LillebaeltDefaults {
  ModalModel model;
  SensorSpec sensor;
  std::map<std::string, double> measurement_points;
};

LillebaeltDefaults lillebaelt_default();

}  // namespace oma
