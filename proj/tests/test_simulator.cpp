#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oma/decay.hpp"
#include "oma/simulator.hpp"
#include "oma/spectral.hpp"

using namespace oma;

namespace {

constexpr double kPi = std::numbers::pi;

SensorSpec ideal_sensor(const std::string& name, double x, bool accel = true,
                        bool gyro = true) {
  SensorSpec s;
  s.name = name;
  s.position_x_m = x;
  s.accel_channel = accel;
  s.gyro_channel = gyro;
  s.quantization_bits = 0;
  return s;
}

ModalModel single_mode(double f, double zeta, ModeKind kind = ModeKind::bending,
                       int k = 1) {
  ModalModel model;
  model.span_length_m = 3.0;
  model.modes = {{"m", kind, k, f, zeta, 1.0}};
  return model;
}

ExcitationSpec midspan_impulse(double x = 1.5, double y = 0.0) {
  ExcitationSpec e;
  e.kind = ExcitationKind::impulse_drop;
  e.position_x_m = x;
  e.position_y_m = y;
  e.impulse = {0.192, 0.10, 0.010};
  return e;
}

}  // namespace

TEST_CASE("pinned-span mode shapes") {
  const auto model = lillebaelt_default().model;
  CHECK(mode_shape(model, "b1", 1.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mode_shape(model, "b2", 1.5)) < 1e-12);
  CHECK(mode_shape(model, "b3", 0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mode_shape(model, "t1", 0.75) ==
        doctest::Approx(std::sin(kPi / 4.0)).epsilon(1e-12));
  CHECK_THROWS_AS(mode_shape(model, "nope", 1.0), Error);
  CHECK_THROWS_AS(mode_shape(model, "b1", 5.0), Error);
}

TEST_CASE("impulse force integrates to m*sqrt(2gh)") {
  const auto excitation = midspan_impulse();
  // trapezoid over the pulse support
  const double dt = 1e-6;
  double impulse = 0.0;
  for (double t = 0.0; t < 0.010; t += dt) {
    impulse += 0.5 *
               (excitation_force(excitation, t).vertical_force_n +
                excitation_force(excitation, t + dt).vertical_force_n) *
               dt;
  }
  CHECK(impulse == doctest::Approx(0.26893710788955846).epsilon(1e-6));

  ExcitationSpec no_drop = excitation;
  no_drop.impulse.drop_height_m = 0.0;
  for (double t : {0.0, 0.005, 0.02})
    CHECK(excitation_force(no_drop, t).vertical_force_n == 0.0);
}

TEST_CASE("servo force amplitude and shutoff") {
  ExcitationSpec e;
  e.kind = ExcitationKind::servo_harmonic;
  e.position_x_m = 1.87;
  e.position_y_m = 0.04;
  e.servo = {0.024, 0.029, 30.0 * kPi / 180.0, 2.263, 30.0};

  double peak = 0.0;
  for (double t = 0.0; t < 1.0; t += 1e-4)
    peak = std::max(peak, std::abs(excitation_force(e, t).vertical_force_n));
  // m * l * theta * (2 pi f)^2 = 0.0737 N
  CHECK(peak == doctest::Approx(0.0736769).epsilon(3e-4));
  CHECK(excitation_force(e, 30.0).vertical_force_n == 0.0);
  CHECK(excitation_force(e, 31.0).vertical_force_n == 0.0);
  // torque arm
  const auto f = excitation_force(e, 0.11);
  CHECK(f.torque_about_x_nm ==
        doctest::Approx(f.vertical_force_n * 0.04).epsilon(1e-12));
}

TEST_CASE("excitation validation enforces the actuator limits") {
  const auto model = lillebaelt_default().model;
  ExcitationSpec e;
  e.kind = ExcitationKind::servo_harmonic;
  e.position_x_m = 1.87;
  e.servo = {0.024, 0.029, 0.5, 2.0, 30.0};

  SUBCASE("drive frequency cap") {
    e.servo.drive_frequency_hz = 12.0;
    CHECK_THROWS_AS(validate_excitation(e, model), Error);
  }
  SUBCASE("angle cap") {
    e.servo.angle_amplitude_rad = 40.0 * kPi / 180.0;
    CHECK_THROWS_AS(validate_excitation(e, model), Error);
  }
  SUBCASE("position on span") {
    e.position_x_m = 3.5;
    CHECK_THROWS_AS(validate_excitation(e, model), Error);
  }
}

TEST_CASE("single-mode impulse response round-trips through the analyses") {
  const auto model = single_mode(2.263, 0.0037);
  const auto record = simulate(model, midspan_impulse(), {ideal_sensor("c", 1.5)},
                               90.0, {});

  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.1, 4);
  REQUIRE(peaks.peaks.size() >= 1);
  CHECK(std::abs(peaks.peaks[0].frequency_hz - 2.263) <= 0.02);

  MeasurementSet set{"m", {record}};
  const auto damping = estimate_damping(set, {"m", 2.263}, 5);
  CHECK(damping.mean_zeta == doctest::Approx(0.0037).epsilon(0.005));
}

TEST_CASE("node excitation produces no response") {
  const auto model = single_mode(2.085, 0.0022, ModeKind::bending, 2);
  const auto record = simulate(model, midspan_impulse(1.5), {ideal_sensor("b", 0.75)},
                               10.0, {});
  CHECK(record.samples().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("noiseless response is exactly linear in the impulse") {
  const auto model = lillebaelt_default().model;
  auto excitation = midspan_impulse(1.2, 0.04);
  const auto base =
      simulate(model, excitation, {ideal_sensor("b", 0.75)}, 10.0, {});
  excitation.impulse.mass_kg *= 2.0;
  const auto doubled =
      simulate(model, excitation, {ideal_sensor("b", 0.75)}, 10.0, {});
  CHECK((doubled.samples() - 2.0 * base.samples()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("undamped mode keeps constant amplitude over 100 periods") {
  const auto model = single_mode(2.0, 0.0);
  const auto record =
      simulate(model, midspan_impulse(), {ideal_sensor("c", 1.5, true, false)},
               50.0, {});
  const auto& x = record.samples().col(0);
  const int samples_per_period = 100;  // fs / f = 200 / 2
  double first = 0.0;
  for (int period = 0; period < 100; ++period) {
    double peak = 0.0;
    for (int i = 0; i < samples_per_period; ++i)
      peak = std::max(peak,
                      std::abs(x(period * samples_per_period + i)));
    if (period == 0)
      first = peak;
    else
      CHECK(peak == doctest::Approx(first).epsilon(1e-6));
  }
}

TEST_CASE("damped free response has a non-increasing envelope") {
  const auto model = single_mode(3.752, 0.0019, ModeKind::bending, 3);
  const auto record =
      simulate(model, midspan_impulse(0.5), {ideal_sensor("a", 0.5, true, false)},
               40.0, {});
  const auto& x = record.samples().col(0);
  const auto period = static_cast<Eigen::Index>(200.0 / 3.752);
  double prev = 1e300;
  for (Eigen::Index start = 200; start + period <= x.size(); start += period) {
    const double peak = x.segment(start, period).cwiseAbs().maxCoeff();
    CHECK(peak <= prev * (1.0 + 1e-9));
    prev = peak;
  }
}

TEST_CASE("seeded noise is deterministic and tracks the requested SNR") {
  const auto model = lillebaelt_default().model;
  const auto excitation = midspan_impulse(1.2, 0.04);
  SensorSpec sensor = ideal_sensor("b", 0.75);
  sensor.rng_seed = 77;

  SimulationOptions with_noise;
  with_noise.snr_db = 40.0;
  const auto noisy_a = simulate(model, excitation, {sensor}, 20.0, with_noise);
  const auto noisy_b = simulate(model, excitation, {sensor}, 20.0, with_noise);
  CHECK(noisy_a.samples() == noisy_b.samples());

  const auto clean = simulate(model, excitation, {sensor}, 20.0, {});
  const Eigen::VectorXd noise = noisy_a.samples().col(0) - clean.samples().col(0);
  const double snr_measured =
      20.0 * std::log10(std::sqrt(clean.samples().col(0).squaredNorm()) /
                        std::sqrt(noise.squaredNorm()));
  CHECK(snr_measured == doctest::Approx(40.0).epsilon(0.05));

  sensor.rng_seed = 78;
  const auto other_seed = simulate(model, excitation, {sensor}, 20.0, with_noise);
  CHECK(other_seed.samples() != noisy_a.samples());
}

TEST_CASE("quantization snaps samples to the sensor grid") {
  const auto model = single_mode(2.263, 0.0037);
  SensorSpec sensor = ideal_sensor("c", 1.5, true, false);
  sensor.quantization_bits = 16;
  const auto record = simulate(model, midspan_impulse(), {sensor}, 5.0, {});
  const double step = 2.0 * sensor.accel_range_m_s2 / 65536.0;
  for (Eigen::Index i = 0; i < record.sample_count(); i += 97) {
    const double v = record.samples()(i, 0);
    CHECK(std::abs(v / step - std::round(v / step)) < 1e-9);
  }
}

TEST_CASE("lillebaelt defaults carry the identified modal parameters") {
  const auto defaults = lillebaelt_default();
  REQUIRE(defaults.model.modes.size() == 4);
  const auto& m = defaults.model.modes;
  CHECK(m[0].label == "b1");
  CHECK(m[0].frequency_hz == 2.263);
  CHECK(m[0].damping_ratio == 0.0037);
  CHECK(m[1].frequency_hz == 2.085);
  CHECK(m[1].damping_ratio == 0.0022);
  CHECK(m[2].frequency_hz == 3.752);
  CHECK(m[2].damping_ratio == 0.0019);
  CHECK(m[3].label == "t1");
  CHECK(m[3].kind == ModeKind::torsion);
  CHECK(m[3].frequency_hz == 7.906);
  CHECK(m[3].damping_ratio == 0.0033);
  CHECK(defaults.model.span_length_m == 3.0);
  CHECK(defaults.sensor.sample_rate_hz == 200.0);
  CHECK(defaults.measurement_points.at("C") == doctest::Approx(1.5));
  CHECK(defaults.measurement_points.at("A") == doctest::Approx(0.5));
  CHECK(defaults.measurement_points.at("E") == doctest::Approx(2.5));
}

TEST_CASE("gyro channels see torsion only, accel channels bending only") {
  ModalModel model = lillebaelt_default().model;
  const auto record = simulate(model, midspan_impulse(1.2, 0.04),
                               {ideal_sensor("b", 0.75)}, 30.0, {});
  REQUIRE(record.channel_count() == 2);
  const auto spectrum =
      compute_spectrum(record, Window::rectangular, Band{1.0, 9.0});
  const auto peaks = pick_peaks(spectrum, Band{1.0, 9.0}, 0.05, 8);

  int accel_peaks = 0, gyro_peaks = 0;
  for (const auto& p : peaks.peaks) {
    if (p.channel == "b_az") {
      ++accel_peaks;
      CHECK(p.frequency_hz < 4.0);  // bending modes only
    } else {
      ++gyro_peaks;
      CHECK(p.frequency_hz == doctest::Approx(7.906).epsilon(0.01));
    }
  }
  CHECK(accel_peaks == 3);
  CHECK(gyro_peaks == 1);
}
