#include "oma/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "oma/decay.hpp"
#include "oma/filter.hpp"
#include "oma/simulator.hpp"
#include "oma/ssi.hpp"
#include "oma/svg.hpp"

namespace oma {

using nlohmann::json;
namespace fs = std::filesystem;

ReportConfig ReportConfig::defaults() {
  ReportConfig config;
  const auto defaults = lillebaelt_default();
  for (const auto& mode : defaults.model.modes)
    config.mode_labels.push_back({mode.label, mode.frequency_hz});
  return config;
}

std::vector<int> ReportConfig::orders() const {
  if (order_min <= 0 || order_min % 2 != 0 || order_step <= 0 ||
      order_step % 2 != 0 || order_max < order_min)
    raise(errc::invalid_argument, "order sweep must be even and increasing");
  std::vector<int> result;
  for (int n = order_min; n <= order_max; n += order_step) result.push_back(n);
  return result;
}

ScalingLaw ReportConfig::scaling_law() const {
  if (stated_frequency_factor)
    return ScalingLaw::stated(geometry_factor, *stated_frequency_factor);
  return ScalingLaw::from_geometry(geometry_factor);
}

int ReportConfig::effective_hankel_rows(Eigen::Index channel_count) const {
  if (hankel_rows > 0) return hankel_rows;
  const int minimum =
      static_cast<int>(order_max / std::max<Eigen::Index>(channel_count, 1)) + 2;
  return std::max(minimum, 40);
}

void apply_config_file(ReportConfig& config, const fs::path& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io_failure, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    raise(errc::bad_format, path.string() + ": " + e.what());
  }
  if (!j.is_object())
    raise(errc::schema_violation, path.string() + ": expected a JSON object");

  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "band") {
        config.band = Band{value.at(0).get<double>(), value.at(1).get<double>()};
      } else if (key == "window") {
        const auto name = value.get<std::string>();
        if (name == "rectangular")
          config.window = Window::rectangular;
        else if (name == "hann")
          config.window = Window::hann;
        else
          raise(errc::schema_violation, "window: unknown value '" + name + "'");
      } else if (key == "prominence") {
        config.peak_prominence = value.get<double>();
      } else if (key == "max_peaks") {
        config.max_peaks = value.get<std::size_t>();
      } else if (key == "modes") {
        config.mode_labels.clear();
        for (const auto& jm : value)
          config.mode_labels.push_back({jm.at("label").get<std::string>(),
                                        jm.at("frequency_hz").get<double>()});
      } else if (key == "match_tolerance_hz") {
        config.match_tolerance_hz = value.get<double>();
      } else if (key == "orders") {
        config.order_min = value.at(0).get<int>();
        config.order_max = value.at(1).get<int>();
        config.order_step = value.at(2).get<int>();
      } else if (key == "hankel_rows") {
        config.hankel_rows = value.get<int>();
      } else if (key == "min_support") {
        config.min_support = value.get<std::size_t>();
      } else if (key == "freq_gap_hz") {
        config.freq_gap_hz = value.get<double>();
      } else if (key == "n_periods") {
        config.n_periods = value.get<int>();
      } else if (key == "band_halfwidth_hz") {
        config.band_halfwidth_hz = value.get<double>();
      } else if (key == "fl") {
        config.geometry_factor = value.get<double>();
        config.stated_frequency_factor.reset();
      } else if (key == "ff") {
        config.stated_frequency_factor = value.get<double>();
      } else if (key == "reference") {
        config.reference.clear();
        for (const auto& jr : value)
          config.reference.push_back({jr.at("label").get<std::string>(),
                                      jr.at("frequency_hz").get<double>()});
      } else {
        raise(errc::schema_violation,
              path.string() + ": unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      raise(errc::schema_violation,
            path.string() + ": key '" + key + "': " + e.what());
    }
  }
}

namespace {

double annotation_number(const TimeSeriesRecord& record, const std::string& key,
                         double fallback) {
  const auto it = record.annotations().find(key);
  if (it == record.annotations().end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (...) {
    return fallback;
  }
}

std::string round3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string percent2(double zeta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f %%", zeta * 100.0);
  return buf;
}

struct ServoRow {
  std::string record;
  std::string mode;
  double f_ssi = std::numeric_limits<double>::quiet_NaN();
  double zeta_ssi = std::numeric_limits<double>::quiet_NaN();
  double zeta_logdec = std::numeric_limits<double>::quiet_NaN();
  std::size_t support = 0;
};

void plot_spectrum(const Spectrum& spectrum, const Band& band,
                   const fs::path& path, const std::string& title) {
  SvgPlot plot(640, 420, title);
  plot.set_axes(band.lo_hz, band.hi_hz, 0.0, 1.05, "frequency [Hz]",
                "normalized magnitude");
  const char* colors[] = {"#1a73e8", "#c62828", "#188038", "#f9ab00",
                          "#9334e6", "#12808a"};
  for (Eigen::Index c = 0; c < spectrum.magnitudes.cols(); ++c) {
    std::vector<SvgPlot::Point> points;
    for (Eigen::Index k = 0; k < spectrum.frequencies_hz.size(); ++k) {
      const double f = spectrum.frequencies_hz(k);
      if (f < band.lo_hz || f > band.hi_hz) continue;
      points.push_back({f, spectrum.magnitudes(k, c)});
    }
    plot.add_polyline(points, colors[c % 6], 1.0);
  }
  plot.write(path);
}

void plot_decay(const TimeSeriesRecord& record, double target_hz,
                double halfwidth_hz, double off_s, const fs::path& path,
                const std::string& title) {
  const double fs = record.sample_rate_hz();
  const BandpassFilter filter =
      design_bandpass(std::max(target_hz - halfwidth_hz, 0.05 * target_hz),
                      std::min(target_hz + halfwidth_hz, 0.49 * fs), fs);
  const Eigen::VectorXd filtered = filtfilt(filter, record.samples().col(0));
  const auto first = static_cast<Eigen::Index>(off_s * fs);

  std::vector<SvgPlot::Point> points;
  const Eigen::Index n = filtered.size();
  const Eigen::Index stride = std::max<Eigen::Index>(1, (n - first) / 4000);
  for (Eigen::Index i = first; i < n; i += stride)
    points.push_back({static_cast<double>(i) / fs, filtered(i)});

  double amp = 1e-12;
  for (const auto& p : points) amp = std::max(amp, std::abs(p.y));
  SvgPlot plot(640, 420, title);
  plot.set_axes(off_s, record.duration_s(), -1.1 * amp, 1.1 * amp, "time [s]",
                record.channels().front().id);
  plot.add_polyline(points, "#1a73e8", 0.8);
  plot.write(path);
}

}  // namespace

ReportOutcome run_report(const fs::path& measurement_dir,
                         const fs::path& out_dir, const ReportConfig& config) {
  ReportOutcome outcome;
  outcome.out_dir = out_dir;

  std::vector<fs::path> csv_files;
  if (fs::exists(measurement_dir))
    for (const auto& entry : fs::directory_iterator(measurement_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".csv")
        csv_files.push_back(entry.path());
  std::sort(csv_files.begin(), csv_files.end());
  if (csv_files.empty())
    raise(errc::no_records, "no record files in " + measurement_dir.string());

  fs::create_directories(out_dir);
  fs::create_directories(out_dir / "spectra");
  fs::create_directories(out_dir / "peaks");
  fs::create_directories(out_dir / "stabilization");
  fs::create_directories(out_dir / "decay");

  std::vector<std::pair<std::string, TimeSeriesRecord>> impulse, servo;
  for (const auto& path : csv_files) {
    try {
      TimeSeriesRecord record = read_record(path);
      const auto it = record.annotations().find("excitation_kind");
      const bool is_servo =
          it != record.annotations().end() && it->second == "servo_harmonic";
      (is_servo ? servo : impulse)
          .emplace_back(path.stem().string(), std::move(record));
    } catch (const Error& e) {
      outcome.failures.push_back({path.filename().string(), "read", e.what()});
    }
  }

  // natural-frequency table from the impulse set
  std::vector<PeakSet> peak_sets;
  for (const auto& [name, record] : impulse) {
    try {
      const Spectrum spectrum = compute_spectrum(record, config.window, config.band);
      write_spectrum_csv(spectrum, out_dir / "spectra" / (name + ".csv"));
      plot_spectrum(spectrum, config.band, out_dir / "spectra" / (name + ".svg"),
                    "normalized spectrum: " + name);
      PeakSet peaks = pick_peaks(spectrum, config.band, config.peak_prominence,
                                 config.max_peaks);
      write_peaks_csv(peaks, out_dir / "peaks" / (name + ".csv"));
      peak_sets.push_back(std::move(peaks));
    } catch (const Error& e) {
      outcome.failures.push_back({name, "spectrum", e.what()});
    }
  }
  FrequencyStatistics stats;
  if (!peak_sets.empty()) {
    stats = aggregate_frequencies(peak_sets, config.mode_labels,
                                  config.match_tolerance_hz);
    write_frequency_stats_csv(stats, out_dir / "frequencies.csv");
  }

  // damping table from the servo set
  std::vector<ServoRow> servo_rows;
  std::vector<DampingEstimate> damping_estimates;
  for (const auto& [name, record] : servo) {
    ServoRow row;
    row.record = name;

    const double drive =
        annotation_number(record, "drive_frequency_hz", 0.0);
    const ModeLabel* target = nullptr;
    const auto target_it = record.annotations().find("target_mode");
    for (const auto& label : config.mode_labels) {
      if (target_it != record.annotations().end() &&
          label.label == target_it->second)
        target = &label;
    }
    if (!target && drive > 0.0) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& label : config.mode_labels) {
        const double d = std::abs(label.nominal_hz - drive);
        if (d < best) {
          best = d;
          target = &label;
        }
      }
    }
    if (!target) {
      outcome.failures.push_back(
          {name, "servo", "record names no target mode and no drive frequency"});
      continue;
    }
    row.mode = target->label;
    const double f_target = target->nominal_hz > 0.0 ? target->nominal_hz : drive;
    const double off_s = annotation_number(record, "excitation_off_s", 0.0);
    const double margin = 2.0 / f_target;

    try {
      const TimeSeriesRecord decay_slice =
          off_s > 0.0 ? slice_time(record, off_s + margin, record.duration_s())
                      : record;

      const auto covariances = estimate_covariances(
          decay_slice,
          static_cast<std::size_t>(
              2 * config.effective_hankel_rows(record.channel_count()) - 1));
      const auto diagram = build_stabilization_diagram(
          covariances, config.orders(),
          config.effective_hankel_rows(record.channel_count()));
      write_stabilization_csv(diagram,
                              out_dir / "stabilization" / (name + ".csv"));
      write_stabilization_svg(diagram,
                              out_dir / "stabilization" / (name + ".svg"));

      const auto modal =
          cluster_stable_poles(diagram, config.min_support, config.freq_gap_hz);
      const ModeEstimate* best = nullptr;
      double best_dist = config.match_tolerance_hz;
      for (const auto& mode : modal.modes) {
        const double d = std::abs(mode.frequency_hz - f_target);
        if (d <= best_dist) {
          best_dist = d;
          best = &mode;
        }
      }
      if (best) {
        row.f_ssi = best->frequency_hz;
        row.zeta_ssi = best->damping_ratio;
        row.support = best->support;
      } else {
        outcome.failures.push_back(
            {name, "ssi",
             "no stable cluster within tolerance of " + round3(f_target) + " Hz"});
      }
    } catch (const Error& e) {
      outcome.failures.push_back({name, "ssi", e.what()});
    }

    try {
      MeasurementSet set{row.mode, {record}};
      DampingEstimate estimate = estimate_damping(
          set, {row.mode, f_target}, config.n_periods, config.band_halfwidth_hz,
          off_s > 0.0 ? std::optional<double>(off_s) : std::nullopt);
      row.zeta_logdec = estimate.mean_zeta;
      damping_estimates.push_back(std::move(estimate));
    } catch (const Error& e) {
      outcome.failures.push_back({name, "logdec", e.what()});
    }

    try {
      plot_decay(record, f_target, config.band_halfwidth_hz,
                 off_s > 0.0 ? off_s + margin : 0.0,
                 out_dir / "decay" / (name + ".svg"), "free decay: " + name);
    } catch (const Error& e) {
      outcome.failures.push_back({name, "decay-plot", e.what()});
    }

    servo_rows.push_back(std::move(row));
  }

  {
    std::ofstream out(out_dir / "damping.csv");
    out << "record,mode,f_ssi_hz,zeta_ssi,zeta_logdec,support\n";
    for (const auto& row : servo_rows) {
      out << row.record << ',' << row.mode << ',';
      if (std::isfinite(row.f_ssi))
        out << format_double(row.f_ssi) << ',' << format_double(row.zeta_ssi);
      else
        out << ',';
      out << ',';
      if (std::isfinite(row.zeta_logdec)) out << format_double(row.zeta_logdec);
      out << ',' << row.support << '\n';
    }
  }
  if (!damping_estimates.empty())
    write_damping_csv(damping_estimates, out_dir / "damping_detail.csv");

  // full-scale conversion of the aggregated frequencies
  const ScalingLaw law = config.scaling_law();
  std::vector<ScalingRow> scaling_rows;
  for (const auto& mode : stats.modes) {
    ScalingRow row;
    row.label = mode.label;
    row.model_hz = mode.mean_hz;
    row.full_scale_hz = to_full_scale(mode.mean_hz, law);
    row.reference_hz = std::numeric_limits<double>::quiet_NaN();
    for (const auto& ref : config.reference)
      if (ref.label == mode.label) {
        row.reference_hz = ref.frequency_hz;
        row.relative_diff =
            (row.full_scale_hz - ref.frequency_hz) / ref.frequency_hz;
      }
    scaling_rows.push_back(std::move(row));
  }
  if (!scaling_rows.empty())
    write_scaling_csv(scaling_rows, law, out_dir / "scaling.csv");

  // human-readable summary; the timestamp is confined to this one header line
  {
    std::ofstream out(out_dir / "summary.txt");
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "generated: " << stamp << '\n';
    out << '\n';
    out << "natural frequencies (impulse set, " << peak_sets.size()
        << " records)\n";
    out << "  label   mean        std\n";
    for (const auto& mode : stats.modes)
      out << "  " << mode.label << "      " << round3(mode.mean_hz) << " Hz   "
          << round3(mode.std_dev_hz) << " Hz  (n=" << mode.count << ")\n";
    for (const auto& label : stats.unmatched)
      out << "  " << label << "      no matched peaks\n";

    out << '\n';
    out << "damping ratios (servo set, " << servo_rows.size() << " records)\n";
    out << "  mode    SSI        log. decrement\n";
    for (const auto& row : servo_rows) {
      out << "  " << row.mode << "      ";
      out << (std::isfinite(row.zeta_ssi) ? percent2(row.zeta_ssi)
                                          : std::string("-"));
      out << "     ";
      out << (std::isfinite(row.zeta_logdec) ? percent2(row.zeta_logdec)
                                             : std::string("-"));
      out << '\n';
    }

    out << '\n';
    out << "full-scale frequencies (factor " << format_double(law.frequency_factor)
        << (law.source == FactorSource::stated ? ", stated" : ", derived")
        << "; derived 1/sqrt(Fl) = " << format_double(law.derived_frequency_factor)
        << ")\n";
    out << "  label   model       full scale   reference\n";
    for (const auto& row : scaling_rows) {
      out << "  " << row.label << "      " << round3(row.model_hz) << " Hz   "
          << round3(row.full_scale_hz) << " Hz     ";
      if (std::isfinite(row.reference_hz))
        out << round3(row.reference_hz) << " Hz";
      else
        out << "-";
      out << '\n';
    }

    if (!outcome.failures.empty()) {
      out << '\n' << "failures\n";
      for (const auto& f : outcome.failures)
        out << "  " << f.record << " [" << f.stage << "]: " << f.message << '\n';
    }
  }

  return outcome;
}

}  // namespace oma
