#include "oma/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "oma/numeric.hpp"

namespace oma {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  raise(errc::schema_violation, path + ": " + what);
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

double number_or(const json& parent, const char* key, double fallback,
                 const std::string& path) {
  if (!parent.contains(key)) return fallback;
  return require_number(parent.at(key), path + "." + key);
}

std::string require_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

ModeKind parse_mode_kind(const std::string& text, const std::string& path) {
  if (text == "bending") return ModeKind::bending;
  if (text == "torsion") return ModeKind::torsion;
  schema_error(path, "mode kind must be 'bending' or 'torsion'");
}

ModalModel parse_model(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  ModalModel model;
  model.span_length_m = number_or(j, "span_length_m", 3.0, path);
  model.deck_half_width_m = number_or(j, "deck_half_width_m", 0.08, path);
  if (!j.contains("modes") || !j.at("modes").is_array())
    schema_error(path + ".modes", "expected an array of modes");
  std::size_t idx = 0;
  for (const auto& jm : j.at("modes")) {
    const std::string mpath = path + ".modes[" + std::to_string(idx++) + "]";
    if (!jm.is_object()) schema_error(mpath, "expected an object");
    ModeSpec mode;
    if (!jm.contains("label")) schema_error(mpath + ".label", "missing");
    mode.label = require_string(jm.at("label"), mpath + ".label");
    if (!jm.contains("kind")) schema_error(mpath + ".kind", "missing");
    mode.kind = parse_mode_kind(require_string(jm.at("kind"), mpath + ".kind"),
                                mpath + ".kind");
    mode.shape_index =
        static_cast<int>(number_or(jm, "shape_index", 1.0, mpath));
    if (!jm.contains("frequency_hz"))
      schema_error(mpath + ".frequency_hz", "missing");
    mode.frequency_hz =
        require_number(jm.at("frequency_hz"), mpath + ".frequency_hz");
    mode.damping_ratio = number_or(jm, "damping_ratio", 0.0, mpath);
    mode.modal_mass = number_or(jm, "modal_mass", 1.0, mpath);
    model.modes.push_back(std::move(mode));
  }
  return model;
}

ExcitationSpec parse_excitation(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  ExcitationSpec spec;
  if (!j.contains("kind")) schema_error(path + ".kind", "missing");
  const std::string kind = require_string(j.at("kind"), path + ".kind");
  if (kind == "impulse_drop")
    spec.kind = ExcitationKind::impulse_drop;
  else if (kind == "servo_harmonic")
    spec.kind = ExcitationKind::servo_harmonic;
  else
    schema_error(path + ".kind",
                 "must be 'impulse_drop' or 'servo_harmonic'");

  if (!j.contains("position_x_m")) schema_error(path + ".position_x_m", "missing");
  spec.position_x_m = require_number(j.at("position_x_m"), path + ".position_x_m");
  spec.position_y_m = number_or(j, "position_y_m", 0.0, path);

  if (spec.kind == ExcitationKind::impulse_drop) {
    const std::string ipath = path + ".impulse";
    const json ji = j.contains("impulse") ? j.at("impulse") : json::object();
    spec.impulse.mass_kg = number_or(ji, "mass_kg", 0.192, ipath);
    spec.impulse.drop_height_m = number_or(ji, "drop_height_m", 0.10, ipath);
    spec.impulse.pulse_width_s = number_or(ji, "pulse_width_s", 0.010, ipath);
  } else {
    const std::string spath = path + ".servo";
    if (!j.contains("servo")) schema_error(spath, "missing");
    const json& js = j.at("servo");
    spec.servo.mass_kg = number_or(js, "mass_kg", 0.024, spath);
    spec.servo.arm_length_m = number_or(js, "arm_length_m", 0.029, spath);
    spec.servo.angle_amplitude_rad =
        number_or(js, "angle_amplitude_deg", 30.0, spath) * std::numbers::pi /
        180.0;
    if (!js.contains("drive_frequency_hz"))
      schema_error(spath + ".drive_frequency_hz", "missing");
    spec.servo.drive_frequency_hz =
        require_number(js.at("drive_frequency_hz"), spath + ".drive_frequency_hz");
    spec.servo.on_duration_s = number_or(js, "on_duration_s", 30.0, spath);
  }
  return spec;
}

std::vector<SensorSpec> parse_sensors(const json& j, const SensorSpec& proto,
                                      const std::string& path) {
  if (!j.is_array() || j.empty())
    schema_error(path, "expected a non-empty array of sensors");
  std::vector<SensorSpec> sensors;
  std::size_t idx = 0;
  for (const auto& js : j) {
    const std::string spath = path + "[" + std::to_string(idx++) + "]";
    if (!js.is_object()) schema_error(spath, "expected an object");
    SensorSpec s = proto;
    s.name = js.contains("name")
                 ? require_string(js.at("name"), spath + ".name")
                 : "s" + std::to_string(idx);
    if (!js.contains("position_x_m")) schema_error(spath + ".position_x_m", "missing");
    s.position_x_m = require_number(js.at("position_x_m"), spath + ".position_x_m");
    if (js.contains("channels")) {
      if (!js.at("channels").is_array() || js.at("channels").empty())
        schema_error(spath + ".channels", "expected a non-empty array");
      s.accel_channel = false;
      s.gyro_channel = false;
      for (const auto& jc : js.at("channels")) {
        const std::string ch = require_string(jc, spath + ".channels[]");
        if (ch == "acceleration_z")
          s.accel_channel = true;
        else if (ch == "angular_velocity_x")
          s.gyro_channel = true;
        else
          schema_error(spath + ".channels[]", "unknown channel '" + ch + "'");
      }
    }
    s.sample_rate_hz = number_or(js, "sample_rate_hz", proto.sample_rate_hz, spath);
    s.accel_range_m_s2 = number_or(js, "accel_range_m_s2", proto.accel_range_m_s2, spath);
    s.gyro_range_deg_s = number_or(js, "gyro_range_deg_s", proto.gyro_range_deg_s, spath);
    s.accel_noise_density =
        number_or(js, "accel_noise_density", proto.accel_noise_density, spath);
    s.gyro_noise_density =
        number_or(js, "gyro_noise_density", proto.gyro_noise_density, spath);
    s.quantization_bits = static_cast<int>(number_or(
        js, "quantization_bits", static_cast<double>(proto.quantization_bits), spath));
    if (js.contains("seed"))
      s.rng_seed = static_cast<std::uint64_t>(
          require_number(js.at("seed"), spath + ".seed"));
    sensors.push_back(std::move(s));
  }
  return sensors;
}

Scenario parse_scenario(const json& j) {
  if (!j.is_object()) schema_error("scenario", "expected a JSON object");
  const auto defaults = lillebaelt_default();

  Scenario scenario;
  if (j.contains("name"))
    scenario.name = require_string(j.at("name"), "name");
  scenario.model = j.contains("model") ? parse_model(j.at("model"), "model")
                                       : defaults.model;

  if (!j.contains("excitation")) schema_error("excitation", "missing");
  scenario.excitation = parse_excitation(j.at("excitation"), "excitation");

  if (j.contains("sensors")) {
    scenario.sensors = parse_sensors(j.at("sensors"), defaults.sensor, "sensors");
  } else {
    const auto& points = defaults.measurement_points;
    SensorSpec b = defaults.sensor;
    b.name = "B";
    b.position_x_m = points.at("B");
    b.gyro_channel = false;
    SensorSpec d = defaults.sensor;
    d.name = "D";
    d.position_x_m = points.at("D");
    d.gyro_channel = false;
    SensorSpec c = defaults.sensor;
    c.name = "C";
    c.position_x_m = points.at("C");
    c.accel_channel = false;
    scenario.sensors = {b, d, c};
  }

  scenario.duration_s = number_or(j, "duration_s", 120.0, "duration_s");
  if (!(scenario.duration_s > 0.0))
    schema_error("duration_s", "must be > 0");
  if (j.contains("seed"))
    scenario.seed =
        static_cast<std::uint64_t>(require_number(j.at("seed"), "seed"));
  scenario.options.oversample = static_cast<int>(
      number_or(j, "oversample", 10.0, "oversample"));
  if (j.contains("snr_db"))
    scenario.options.snr_db = require_number(j.at("snr_db"), "snr_db");
  if (j.contains("target_mode"))
    scenario.annotations["target_mode"] =
        require_string(j.at("target_mode"), "target_mode");

  // surface validation errors (span bounds, actuator limits...) now, with the
  // scenario file context, rather than at run time
  validate_model(scenario.model);
  validate_excitation(scenario.excitation, scenario.model);
  return scenario;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_failure, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(errc::bad_format, path.string() + ": " + e.what());
  }
  Scenario scenario = parse_scenario(j);
  if (!j.contains("name")) scenario.name = path.stem().string();
  return scenario;
}

Scenario default_impulse_scenario() {
  const auto defaults = lillebaelt_default();
  Scenario scenario;
  scenario.name = "impulse_default";
  scenario.model = defaults.model;
  scenario.excitation.kind = ExcitationKind::impulse_drop;
  scenario.excitation.position_x_m = 1.2;
  scenario.excitation.position_y_m = 0.04;
  scenario.excitation.impulse = {0.192, 0.10, 0.010};

  const auto& points = defaults.measurement_points;
  SensorSpec b = defaults.sensor;
  b.name = "B";
  b.position_x_m = points.at("B");
  b.gyro_channel = false;
  SensorSpec d = defaults.sensor;
  d.name = "D";
  d.position_x_m = points.at("D");
  d.gyro_channel = false;
  SensorSpec c = defaults.sensor;
  c.name = "C";
  c.position_x_m = points.at("C");
  c.accel_channel = false;
  scenario.sensors = {b, d, c};
  scenario.duration_s = 120.0;
  scenario.seed = 1;
  return scenario;
}

TimeSeriesRecord run_scenario(const Scenario& scenario) {
  std::vector<SensorSpec> sensors = scenario.sensors;
  for (std::size_t i = 0; i < sensors.size(); ++i)
    if (sensors[i].rng_seed == 0)
      sensors[i].rng_seed = mix_seed(scenario.seed, i);

  SimulationOptions options = scenario.options;
  for (const auto& [k, v] : scenario.annotations) options.annotations[k] = v;
  options.annotations["scenario"] = scenario.name;
  options.annotations["seed"] = std::to_string(scenario.seed);

  return simulate(scenario.model, scenario.excitation, sensors,
                  scenario.duration_s, options);
}

std::filesystem::path run_simulate(const std::filesystem::path& scenario_path,
                                   const std::filesystem::path& out_dir,
                                   std::optional<std::uint64_t> seed_override) {
  Scenario scenario = load_scenario(scenario_path);
  if (seed_override) scenario.seed = *seed_override;
  const TimeSeriesRecord record = run_scenario(scenario);
  std::filesystem::create_directories(out_dir);
  const auto csv_path = out_dir / (scenario.name + ".csv");
  write_record(record, csv_path);
  return csv_path;
}

}  // namespace oma
