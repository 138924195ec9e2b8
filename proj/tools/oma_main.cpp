// oma: operational modal analysis toolkit for scale-model vibration records.
//
// Subcommands: simulate, spectrum, peaks, ssi, logdec, scale, report.
// Analysis knobs shared with the report pipeline can also come from a JSON
// config file (--config), whose values override command-line flags.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oma/decay.hpp"
#include "oma/numeric.hpp"
#include "oma/records.hpp"
#include "oma/report.hpp"
#include "oma/scenario.hpp"
#include "oma/similitude.hpp"
#include "oma/spectral.hpp"
#include "oma/ssi.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string out_dir = ".";
  std::string config_path;
  std::string band = "1,9";
  std::string orders = "2,40,2";
  int n_periods = 5;
  double fl = 200.0;
  double ff = 0.07;
  bool fl_given = false;
  bool ff_given = false;
};

oma::Band parse_band(const std::string& text) {
  double lo = 0.0, hi = 0.0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> lo >> comma >> hi) || comma != ',')
    oma::raise(oma::errc::invalid_argument, "--band expects LO,HI");
  return oma::Band{lo, hi};
}

void parse_orders(const std::string& text, oma::ReportConfig& config) {
  int lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ',' || c2 != ',')
    oma::raise(oma::errc::invalid_argument, "--orders expects MIN,MAX,STEP");
  config.order_min = lo;
  config.order_max = hi;
  config.order_step = step;
}

std::vector<oma::LabeledFrequency> read_label_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) oma::raise(oma::errc::io_failure, "cannot open " + path.string());
  std::vector<oma::LabeledFrequency> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      oma::raise(oma::errc::bad_format,
                 path.string() + ": expected 'label,frequency_hz' rows");
    const std::string label = line.substr(0, comma);
    std::string rest = line.substr(comma + 1);
    const auto next = rest.find(',');
    if (next != std::string::npos) rest = rest.substr(0, next);
    try {
      rows.push_back({label, std::stod(rest)});
    } catch (...) {
      if (first) {  // tolerate a header row
        first = false;
        continue;
      }
      oma::raise(oma::errc::bad_format,
                 path.string() + ": unparsable frequency '" + rest + "'");
    }
    first = false;
  }
  if (rows.empty())
    oma::raise(oma::errc::bad_format, path.string() + ": no data rows");
  return rows;
}

oma::ReportConfig build_config(const CommonFlags& flags) {
  oma::ReportConfig config = oma::ReportConfig::defaults();
  config.band = parse_band(flags.band);
  parse_orders(flags.orders, config);
  config.n_periods = flags.n_periods;
  if (flags.ff_given)
    config.stated_frequency_factor = flags.ff;
  else if (flags.fl_given) {
    config.geometry_factor = flags.fl;
    config.stated_frequency_factor.reset();
  }
  if (flags.fl_given) config.geometry_factor = flags.fl;
  if (!flags.config_path.empty())
    oma::apply_config_file(config, flags.config_path);
  return config;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const oma::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operational modal analysis toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  double prominence = 0.05;
  std::size_t max_peaks = 8;
  std::string window_name = "rectangular";
  std::size_t zero_pad = 0;
  int hankel_rows = 0;
  std::size_t min_support = 3;
  double freq_gap = 0.05;
  std::string slice = "auto";
  double target_freq = 0.0;
  std::string target_label = "mode";
  double halfwidth = 0.5;
  std::string reference_path;

  auto add_common = [&](CLI::App* cmd, bool with_scaling) {
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--config", flags.config_path,
                    "JSON config overriding flags");
    cmd->add_option("--band", flags.band, "analysis band LO,HI in Hz");
    cmd->add_option("--orders", flags.orders, "model order sweep MIN,MAX,STEP");
    cmd->add_option("--n-periods", flags.n_periods,
                    "periods between decay maxima");
    if (with_scaling) {
      auto* fl = cmd->add_option("--fl", flags.fl, "geometry scale factor");
      auto* ff = cmd->add_option("--ff", flags.ff,
                                 "stated frequency scale factor");
      fl->excludes(ff);
      cmd->callback([&flags, fl, ff]() {
        flags.fl_given = fl->count() > 0;
        flags.ff_given = ff->count() > 0;
      });
    }
  };

  // simulate
  auto* cmd_simulate =
      app.add_subcommand("simulate", "run a scenario and write the record");
  cmd_simulate->add_option("scenario", scenario_path, "scenario JSON file")
      ->required();
  cmd_simulate->add_option("--out", flags.out_dir, "output directory");
  cmd_simulate->add_option("--seed", seed, "override the scenario seed");

  // spectrum
  auto* cmd_spectrum =
      app.add_subcommand("spectrum", "normalized magnitude spectrum");
  cmd_spectrum->add_option("record", input, "record CSV file")->required();
  cmd_spectrum->add_option("--window", window_name, "rectangular | hann");
  cmd_spectrum->add_option("--pad", zero_pad, "explicit FFT length");
  add_common(cmd_spectrum, false);

  // peaks
  auto* cmd_peaks = app.add_subcommand("peaks", "spectral peak picking");
  cmd_peaks->add_option("record", input, "record CSV file")->required();
  cmd_peaks->add_option("--prominence", prominence, "minimum peak prominence");
  cmd_peaks->add_option("--max-peaks", max_peaks, "peak count cap");
  add_common(cmd_peaks, false);

  // ssi
  auto* cmd_ssi =
      app.add_subcommand("ssi", "stabilization diagram and modal estimates");
  cmd_ssi->add_option("record", input, "record CSV file")->required();
  cmd_ssi->add_option("--hankel-rows", hankel_rows,
                      "block Hankel rows (0 = auto)");
  cmd_ssi->add_option("--min-support", min_support, "minimum cluster size");
  cmd_ssi->add_option("--freq-gap", freq_gap, "cluster frequency gap in Hz");
  cmd_ssi->add_option("--slice", slice,
                      "free-decay window: 'auto', 'none' or T0,T1 seconds");
  add_common(cmd_ssi, false);

  // logdec
  auto* cmd_logdec =
      app.add_subcommand("logdec", "log-decrement damping estimate");
  cmd_logdec->add_option("record", input, "record CSV file")->required();
  cmd_logdec->add_option("--target-freq", target_freq, "target mode frequency")
      ->required();
  cmd_logdec->add_option("--label", target_label, "mode label for the report");
  cmd_logdec->add_option("--halfwidth", halfwidth,
                         "band-pass half width in Hz");
  add_common(cmd_logdec, false);

  // scale
  auto* cmd_scale =
      app.add_subcommand("scale", "full-scale conversion of frequencies");
  cmd_scale->add_option("frequencies", input,
                        "CSV with label,frequency_hz rows")
      ->required();
  cmd_scale->add_option("--reference", reference_path,
                        "CSV with full-scale reference rows");
  add_common(cmd_scale, true);

  // report
  auto* cmd_report =
      app.add_subcommand("report", "full analysis bundle over a directory");
  std::string measurement_dir;
  cmd_report->add_option("dir", measurement_dir, "directory of record files")
      ->required();
  add_common(cmd_report, true);

  CLI11_PARSE(app, argc, argv);

  if (cmd_simulate->parsed()) {
    return run_guarded([&]() {
      const auto path = oma::run_simulate(scenario_path, flags.out_dir, seed);
      std::cout << path.string() << '\n';
      return 0;
    });
  }

  if (cmd_spectrum->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      oma::Window window = oma::Window::rectangular;
      if (window_name == "hann")
        window = oma::Window::hann;
      else if (window_name != "rectangular")
        oma::raise(oma::errc::invalid_argument,
                   "--window must be rectangular or hann");
      const auto record = oma::read_record(input);
      const auto spectrum = oma::compute_spectrum(
          record, window, config.band,
          zero_pad > 0 ? std::optional<std::size_t>(zero_pad) : std::nullopt);
      fs::create_directories(flags.out_dir);
      const auto stem = fs::path(input).stem().string();
      oma::write_spectrum_csv(spectrum,
                              fs::path(flags.out_dir) / (stem + ".spectrum.csv"));
      std::cout << (fs::path(flags.out_dir) / (stem + ".spectrum.csv")).string()
                << '\n';
      return 0;
    });
  }

  if (cmd_peaks->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      const auto record = oma::read_record(input);
      const auto spectrum =
          oma::compute_spectrum(record, oma::Window::rectangular, config.band);
      const auto peaks =
          oma::pick_peaks(spectrum, config.band, prominence, max_peaks);
      fs::create_directories(flags.out_dir);
      const auto stem = fs::path(input).stem().string();
      oma::write_peaks_csv(peaks,
                           fs::path(flags.out_dir) / (stem + ".peaks.csv"));
      for (const auto& p : peaks.peaks)
        std::cout << p.channel << "  " << oma::format_double(p.frequency_hz)
                  << " Hz  " << oma::format_double(p.magnitude) << '\n';
      return 0;
    });
  }

  if (cmd_ssi->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      auto record = oma::read_record(input);

      if (slice != "none") {
        double t0 = -1.0, t1 = record.duration_s();
        if (slice == "auto") {
          const auto it = record.annotations().find("excitation_off_s");
          if (it != record.annotations().end()) {
            const double off = std::stod(it->second);
            const auto drive = record.annotations().find("drive_frequency_hz");
            const double f =
                drive != record.annotations().end() ? std::stod(drive->second) : 1.0;
            t0 = off + 2.0 / f;
          }
        } else {
          char comma = 0;
          std::istringstream in(slice);
          if (!(in >> t0 >> comma >> t1) || comma != ',')
            oma::raise(oma::errc::invalid_argument,
                       "--slice expects 'auto', 'none' or T0,T1");
        }
        if (t0 >= 0.0) record = oma::slice_time(record, t0, t1);
      }

      const int rows = hankel_rows > 0
                           ? hankel_rows
                           : config.effective_hankel_rows(record.channel_count());
      const auto covariances = oma::estimate_covariances(
          record, static_cast<std::size_t>(2 * rows - 1));
      const auto diagram =
          oma::build_stabilization_diagram(covariances, config.orders(), rows);
      const auto modal =
          oma::cluster_stable_poles(diagram, min_support, freq_gap);

      fs::create_directories(flags.out_dir);
      const auto stem = fs::path(input).stem().string();
      oma::write_stabilization_csv(
          diagram, fs::path(flags.out_dir) / (stem + ".stabilization.csv"));
      oma::write_stabilization_svg(
          diagram, fs::path(flags.out_dir) / (stem + ".stabilization.svg"));
      {
        std::ofstream out(fs::path(flags.out_dir) / (stem + ".modes.csv"));
        out << "label,frequency_hz,frequency_std_hz,damping_ratio,damping_std,"
               "support\n";
        for (const auto& m : modal.modes)
          out << m.label << ',' << oma::format_double(m.frequency_hz) << ','
              << oma::format_double(m.frequency_std_hz) << ','
              << oma::format_double(m.damping_ratio) << ','
              << oma::format_double(m.damping_std) << ',' << m.support << '\n';
      }
      for (const auto& m : modal.modes)
        std::cout << m.label << "  " << oma::format_double(m.frequency_hz)
                  << " Hz  zeta " << oma::format_double(m.damping_ratio)
                  << "  support " << m.support << '\n';
      for (const auto& f : diagram.failed_orders)
        std::cerr << "order " << f.order << " skipped: " << f.message << '\n';
      return 0;
    });
  }

  if (cmd_logdec->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      const auto record = oma::read_record(input);
      oma::MeasurementSet set{target_label, {record}};
      const auto estimate = oma::estimate_damping(
          set, {target_label, target_freq}, config.n_periods, halfwidth);
      fs::create_directories(flags.out_dir);
      const auto stem = fs::path(input).stem().string();
      oma::write_damping_csv({estimate},
                             fs::path(flags.out_dir) / (stem + ".damping.csv"));
      for (const auto& ch : estimate.per_channel)
        std::cout << ch.channel << "  lambda "
                  << oma::format_double(ch.lambda) << "  zeta "
                  << oma::format_double(ch.zeta) << '\n';
      std::cout << "mean zeta " << oma::format_double(estimate.mean_zeta)
                << '\n';
      return 0;
    });
  }

  if (cmd_scale->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      const auto model_freqs = read_label_csv(input);
      const oma::ScalingLaw law = config.scaling_law();
      std::vector<oma::LabeledFrequency> reference = config.reference;
      if (!reference_path.empty()) reference = read_label_csv(reference_path);

      std::vector<oma::ScalingRow> rows;
      for (const auto& mf : model_freqs) {
        oma::ScalingRow row;
        row.label = mf.label;
        row.model_hz = mf.frequency_hz;
        row.full_scale_hz = oma::to_full_scale(mf.frequency_hz, law);
        row.reference_hz = std::numeric_limits<double>::quiet_NaN();
        for (const auto& ref : reference)
          if (ref.label == mf.label) {
            row.reference_hz = ref.frequency_hz;
            row.relative_diff =
                (row.full_scale_hz - ref.frequency_hz) / ref.frequency_hz;
          }
        rows.push_back(std::move(row));
      }
      fs::create_directories(flags.out_dir);
      oma::write_scaling_csv(rows, law,
                             fs::path(flags.out_dir) / "scaling.csv");
      for (const auto& row : rows)
        std::cout << row.label << "  " << oma::format_double(row.model_hz)
                  << " -> " << oma::format_double(row.full_scale_hz)
                  << " Hz\n";
      return 0;
    });
  }

  if (cmd_report->parsed()) {
    return run_guarded([&]() {
      const auto config = build_config(flags);
      const auto outcome =
          oma::run_report(measurement_dir, flags.out_dir, config);
      for (const auto& f : outcome.failures)
        std::cerr << f.record << " [" << f.stage << "]: " << f.message << '\n';
      std::cout << "report written to " << outcome.out_dir.string() << '\n';
      return outcome.ok() ? 0 : 1;
    });
  }

  return 0;
}
