#include "oma/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "oma/numeric.hpp"

namespace oma {

namespace {

constexpr double kGravity = 9.81;              // m/s^2
constexpr double kPi = std::numbers::pi;
constexpr double kServoMaxFrequencyHz = 10.0;  // actuator limit
constexpr double kServoMaxAngleRad = 30.0 * kPi / 180.0 + 1e-12;

/// Exact zero-order-hold discretization of q" + 2*zeta*w*q' + w^2*q = u.
struct SdofPropagator {
  double a11, a12, a21, a22;
  double b1, b2;

  static SdofPropagator make(double omega, double zeta, double dt) {
    const double wd = omega * std::sqrt(1.0 - zeta * zeta);
    const double decay = std::exp(-zeta * omega * dt);
    const double c = std::cos(wd * dt);
    const double s = std::sin(wd * dt);
    SdofPropagator p;
    p.a11 = decay * (c + zeta * omega * s / wd);
    p.a12 = decay * (s / wd);
    p.a21 = -decay * (omega * omega * s / wd);
    p.a22 = decay * (c - zeta * omega * s / wd);
    // Bd = A^{-1} (Ad - I) B with B = [0, 1]^T
    p.b1 = -2.0 * zeta / omega * p.a12 - (p.a22 - 1.0) / (omega * omega);
    p.b2 = p.a12;
    return p;
  }
};

double quantize(double v, double range, int bits) {
  const double step = 2.0 * range / static_cast<double>(1LL << bits);
  return std::round(v / step) * step;
}

}  // namespace

void validate_model(const ModalModel& model) {
  if (!(model.span_length_m > 0.0))
    raise(errc::schema_violation, "model.span_length_m must be > 0");
  if (model.deck_half_width_m < 0.0)
    raise(errc::schema_violation, "model.deck_half_width_m must be >= 0");
  if (model.modes.empty())
    raise(errc::schema_violation, "model.modes must not be empty");
  std::set<std::string> labels;
  for (const auto& mode : model.modes) {
    if (!labels.insert(mode.label).second)
      raise(errc::schema_violation,
            "model.modes: duplicate label '" + mode.label + "'");
    if (!(mode.frequency_hz > 0.0))
      raise(errc::schema_violation,
            "mode '" + mode.label + "': frequency_hz must be > 0");
    if (!(mode.damping_ratio >= 0.0) || !(mode.damping_ratio < 1.0))
      raise(errc::schema_violation,
            "mode '" + mode.label + "': damping_ratio must lie in [0, 1)");
    if (!(mode.modal_mass > 0.0))
      raise(errc::schema_violation,
            "mode '" + mode.label + "': modal_mass must be > 0");
    if (mode.shape_index < 1)
      raise(errc::schema_violation,
            "mode '" + mode.label + "': shape_index must be >= 1");
  }
}

void validate_excitation(const ExcitationSpec& excitation,
                         const ModalModel& model) {
  if (excitation.position_x_m < 0.0 ||
      excitation.position_x_m > model.span_length_m)
    raise(errc::schema_violation, "excitation.position_x_m outside span");
  if (excitation.kind == ExcitationKind::impulse_drop) {
    const auto& p = excitation.impulse;
    if (!(p.mass_kg > 0.0))
      raise(errc::schema_violation, "excitation.impulse.mass_kg must be > 0");
    if (p.drop_height_m < 0.0)
      raise(errc::schema_violation,
            "excitation.impulse.drop_height_m must be >= 0");
    if (!(p.pulse_width_s > 0.0))
      raise(errc::schema_violation,
            "excitation.impulse.pulse_width_s must be > 0");
  } else {
    const auto& p = excitation.servo;
    if (!(p.mass_kg > 0.0))
      raise(errc::schema_violation, "excitation.servo.mass_kg must be > 0");
    if (!(p.arm_length_m > 0.0))
      raise(errc::schema_violation, "excitation.servo.arm_length_m must be > 0");
    if (!(p.angle_amplitude_rad > 0.0) ||
        p.angle_amplitude_rad > kServoMaxAngleRad)
      raise(errc::schema_violation,
            "excitation.servo.angle_amplitude_rad must lie in (0, 30 deg]");
    if (!(p.drive_frequency_hz > 0.0) ||
        p.drive_frequency_hz > kServoMaxFrequencyHz)
      raise(errc::schema_violation,
            "excitation.servo.drive_frequency_hz must lie in (0, 10]");
    if (!(p.on_duration_s > 0.0))
      raise(errc::schema_violation,
            "excitation.servo.on_duration_s must be > 0");
  }
}

double mode_shape(const ModalModel& model, const std::string& label,
                  double x_m) {
  if (x_m < 0.0 || x_m > model.span_length_m)
    raise(errc::invalid_argument, "position outside span");
  for (const auto& mode : model.modes) {
    if (mode.label == label)
      return std::sin(static_cast<double>(mode.shape_index) * kPi * x_m /
                      model.span_length_m);
  }
  raise(errc::invalid_argument, "unknown mode label '" + label + "'");
}

ForceSample excitation_force(const ExcitationSpec& excitation, double t_s) {
  double force = 0.0;
  if (excitation.kind == ExcitationKind::impulse_drop) {
    const auto& p = excitation.impulse;
    if (t_s >= 0.0 && t_s <= p.pulse_width_s) {
      const double impulse =
          p.mass_kg * std::sqrt(2.0 * kGravity * p.drop_height_m);
      // half-sine of width tau carrying total impulse J
      force = impulse * kPi / (2.0 * p.pulse_width_s) *
              std::sin(kPi * t_s / p.pulse_width_s);
    }
  } else {
    const auto& p = excitation.servo;
    if (t_s >= 0.0 && t_s < p.on_duration_s) {
      const double omega = 2.0 * kPi * p.drive_frequency_hz;
      // linearized inertia force of the oscillating eccentric arm
      force = p.mass_kg * p.arm_length_m * p.angle_amplitude_rad * omega *
              omega * std::sin(omega * t_s);
    }
  }
  return ForceSample{force, force * excitation.position_y_m};
}

TimeSeriesRecord simulate(const ModalModel& model,
                          const ExcitationSpec& excitation,
                          const std::vector<SensorSpec>& sensors,
                          double duration_s, const SimulationOptions& options) {
  validate_model(model);
  validate_excitation(excitation, model);
  if (!(duration_s > 0.0))
    raise(errc::schema_violation, "duration_s must be > 0");
  if (sensors.empty())
    raise(errc::schema_violation, "sensors must not be empty");
  if (options.oversample < 10)
    raise(errc::schema_violation, "oversample must be >= 10");

  const double fs = sensors.front().sample_rate_hz;
  for (const auto& s : sensors) {
    if (!(s.sample_rate_hz > 0.0))
      raise(errc::schema_violation, "sensor sample_rate_hz must be > 0");
    if (s.sample_rate_hz != fs)
      raise(errc::schema_violation, "all sensors must share one sample rate");
    if (s.position_x_m < 0.0 || s.position_x_m > model.span_length_m)
      raise(errc::schema_violation,
            "sensor '" + s.name + "' position outside span");
    if (!(s.accel_range_m_s2 > 0.0) || !(s.gyro_range_deg_s > 0.0))
      raise(errc::schema_violation, "sensor ranges must be positive");
    if (s.quantization_bits < 0 || s.quantization_bits > 32)
      raise(errc::schema_violation, "quantization_bits must lie in [0, 32]");
    if (!s.accel_channel && !s.gyro_channel)
      raise(errc::schema_violation,
            "sensor '" + s.name + "' enables no channel");
  }

  const auto n_out = static_cast<Eigen::Index>(std::llround(duration_s * fs));
  if (n_out < 2) raise(errc::schema_violation, "duration too short at this rate");
  const int oversample = options.oversample;
  const double dt = 1.0 / (fs * static_cast<double>(oversample));

  const std::size_t n_modes = model.modes.size();
  std::vector<SdofPropagator> props;
  std::vector<double> load_factor(n_modes);  // shape(exciter) / modal mass
  std::vector<double> two_zeta_omega(n_modes), omega_sq(n_modes);
  std::vector<bool> is_bending(n_modes);
  for (std::size_t m = 0; m < n_modes; ++m) {
    const auto& mode = model.modes[m];
    const double omega = 2.0 * kPi * mode.frequency_hz;
    props.push_back(SdofPropagator::make(omega, mode.damping_ratio, dt));
    load_factor[m] = mode_shape(model, mode.label, excitation.position_x_m) /
                     mode.modal_mass;
    two_zeta_omega[m] = 2.0 * mode.damping_ratio * omega;
    omega_sq[m] = omega * omega;
    is_bending[m] = mode.kind == ModeKind::bending;
  }

  // modal velocity and acceleration histories at the output instants
  Eigen::MatrixXd qd(n_out, static_cast<Eigen::Index>(n_modes));
  Eigen::MatrixXd qdd(n_out, static_cast<Eigen::Index>(n_modes));
  {
    std::vector<double> q(n_modes, 0.0), v(n_modes, 0.0);
    const long long n_internal =
        static_cast<long long>(n_out) * static_cast<long long>(oversample);
    for (long long k = 0; k < n_internal; ++k) {
      const double t = static_cast<double>(k) * dt;
      const ForceSample f = excitation_force(excitation, t);
      if (k % oversample == 0) {
        const auto j = static_cast<Eigen::Index>(k / oversample);
        for (std::size_t m = 0; m < n_modes; ++m) {
          const double load =
              load_factor[m] * (is_bending[m] ? f.vertical_force_n
                                              : f.torque_about_x_nm);
          qd(j, static_cast<Eigen::Index>(m)) = v[m];
          qdd(j, static_cast<Eigen::Index>(m)) =
              load - two_zeta_omega[m] * v[m] - omega_sq[m] * q[m];
        }
      }
      for (std::size_t m = 0; m < n_modes; ++m) {
        const double load = load_factor[m] * (is_bending[m]
                                                  ? f.vertical_force_n
                                                  : f.torque_about_x_nm);
        const auto& p = props[m];
        const double qn = p.a11 * q[m] + p.a12 * v[m] + p.b1 * load;
        const double vn = p.a21 * q[m] + p.a22 * v[m] + p.b2 * load;
        q[m] = qn;
        v[m] = vn;
      }
    }
  }

  Eigen::Index n_ch = 0;
  for (const auto& s : sensors)
    n_ch += (s.accel_channel ? 1 : 0) + (s.gyro_channel ? 1 : 0);

  Eigen::MatrixXd samples(n_out, n_ch);
  std::vector<ChannelSpec> channels;
  channels.reserve(static_cast<std::size_t>(n_ch));

  Eigen::Index col = 0;
  for (const auto& sensor : sensors) {
    std::uint64_t stream = 0;
    for (int which = 0; which < 2; ++which) {
      const bool accel = which == 0;
      if (accel && !sensor.accel_channel) continue;
      if (!accel && !sensor.gyro_channel) continue;

      Eigen::VectorXd y = Eigen::VectorXd::Zero(n_out);
      for (std::size_t m = 0; m < n_modes; ++m) {
        if (is_bending[m] != accel) continue;
        const double shape =
            mode_shape(model, model.modes[m].label, sensor.position_x_m);
        if (accel)
          y += shape * qdd.col(static_cast<Eigen::Index>(m));
        else
          y += shape * (180.0 / kPi) * qd.col(static_cast<Eigen::Index>(m));
      }

      double sigma = 0.0;
      if (options.snr_db) {
        const double rms = std::sqrt(y.squaredNorm() /
                                     static_cast<double>(y.size()));
        sigma = rms / std::pow(10.0, *options.snr_db / 20.0);
      } else {
        const double density =
            accel ? sensor.accel_noise_density : sensor.gyro_noise_density;
        sigma = density * std::sqrt(fs / 2.0);
      }
      if (sigma > 0.0) {
        GaussianRng rng(mix_seed(sensor.rng_seed, stream));
        for (Eigen::Index i = 0; i < n_out; ++i) y(i) += sigma * rng.next();
      }

      const double range = accel ? sensor.accel_range_m_s2 : sensor.gyro_range_deg_s;
      for (Eigen::Index i = 0; i < n_out; ++i) {
        double v = std::clamp(y(i), -range, range);
        if (sensor.quantization_bits > 0)
          v = quantize(v, range, sensor.quantization_bits);
        y(i) = v;
      }

      ChannelSpec ch;
      ch.id = sensor.name + (accel ? "_az" : "_wx");
      ch.kind = accel ? ChannelKind::acceleration_z
                      : ChannelKind::angular_velocity_x;
      ch.unit = expected_unit(ch.kind);
      ch.position_x_m = sensor.position_x_m;
      channels.push_back(ch);
      samples.col(col++) = y;
      ++stream;
    }
  }

  std::map<std::string, std::string> annotations = options.annotations;
  annotations["excitation_kind"] = excitation.kind == ExcitationKind::impulse_drop
                                       ? "impulse_drop"
                                       : "servo_harmonic";
  annotations["excitation_x_m"] = format_double(excitation.position_x_m);
  annotations["excitation_y_m"] = format_double(excitation.position_y_m);
  if (excitation.kind == ExcitationKind::servo_harmonic) {
    annotations["drive_frequency_hz"] =
        format_double(excitation.servo.drive_frequency_hz);
    annotations["excitation_off_s"] =
        format_double(excitation.servo.on_duration_s);
  }

  return TimeSeriesRecord(fs, std::move(channels), std::move(samples), 0.0,
                          std::move(annotations));
}

LillebaeltDefaults lillebaelt_default() {
  LillebaeltDefaults d;
  d.model.span_length_m = 3.0;
  d.model.deck_half_width_m = 0.08;
  d.model.modes = {
      {"b1", ModeKind::bending, 1, 2.263, 0.0037, 1.0},
      {"b2", ModeKind::bending, 2, 2.085, 0.0022, 1.0},
      {"b3", ModeKind::bending, 3, 3.752, 0.0019, 1.0},
      {"t1", ModeKind::torsion, 1, 7.906, 0.0033, 1.0},
  };

  d.sensor.sample_rate_hz = 200.0;
  d.sensor.accel_range_m_s2 = 4.0 * kGravity;
  d.sensor.gyro_range_deg_s = 1000.0;
  d.sensor.quantization_bits = 16;

  const double span = d.model.span_length_m;
  d.measurement_points = {
      {"A", span / 6.0}, {"B", span / 4.0},     {"C", span / 2.0},
      {"D", 3.0 * span / 4.0}, {"E", 5.0 * span / 6.0},
  };
  return d;
}

}  // namespace oma
