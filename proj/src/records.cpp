#include "oma/records.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "oma/numeric.hpp"

namespace oma {

using nlohmann::json;

Unit expected_unit(ChannelKind kind) {
  return kind == ChannelKind::acceleration_z ? Unit::m_per_s2 : Unit::deg_per_s;
}

const char* channel_kind_name(ChannelKind kind) {
  return kind == ChannelKind::acceleration_z ? "acceleration_z"
                                             : "angular_velocity_x";
}

const char* unit_name(Unit unit) {
  return unit == Unit::m_per_s2 ? "m_per_s2" : "deg_per_s";
}

ChannelKind parse_channel_kind(const std::string& text) {
  if (text == "acceleration_z") return ChannelKind::acceleration_z;
  if (text == "angular_velocity_x") return ChannelKind::angular_velocity_x;
  raise(errc::bad_format, "unknown channel kind '" + text + "'");
}

Unit parse_unit(const std::string& text) {
  if (text == "m_per_s2") return Unit::m_per_s2;
  if (text == "deg_per_s") return Unit::deg_per_s;
  raise(errc::bad_format, "unknown unit '" + text + "'");
}

TimeSeriesRecord::TimeSeriesRecord(double sample_rate_hz,
                                   std::vector<ChannelSpec> channels,
                                   Eigen::MatrixXd samples, double start_time_s,
                                   std::map<std::string, std::string> annotations)
    : sample_rate_hz_(sample_rate_hz),
      start_time_s_(start_time_s),
      channels_(std::move(channels)),
      samples_(std::move(samples)),
      annotations_(std::move(annotations)) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    raise(errc::invalid_rate, "sample rate must be positive");
  if (samples_.rows() < 2)
    raise(errc::record_too_short, "need at least 2 samples");
  if (channels_.empty() ||
      static_cast<Eigen::Index>(channels_.size()) != samples_.cols())
    raise(errc::invalid_argument, "channel list must match sample columns");
  if (!samples_.allFinite())
    raise(errc::non_finite_sample, "sample matrix contains non-finite values");
  for (const auto& ch : channels_) {
    if (ch.unit != expected_unit(ch.kind))
      raise(errc::unit_kind_mismatch,
            "channel '" + ch.id + "' pairs " +
                std::string(channel_kind_name(ch.kind)) + " with " +
                unit_name(ch.unit));
  }
}

TimeSeriesRecord TimeSeriesRecord::with_annotations(
    std::map<std::string, std::string> extra) const {
  std::map<std::string, std::string> merged = annotations_;
  for (auto& [k, v] : extra) merged[k] = std::move(v);
  return TimeSeriesRecord(sample_rate_hz_, channels_, samples_, start_time_s_,
                          std::move(merged));
}

void validate_measurement_set(const MeasurementSet& set) {
  if (set.records.empty())
    raise(errc::no_records, "measurement set '" + set.label + "' is empty");
  const auto& ref = set.records.front().channels();
  for (const auto& rec : set.records) {
    const auto& chs = rec.channels();
    if (chs.size() != ref.size())
      raise(errc::invalid_argument,
            "records in set '" + set.label + "' differ in channel count");
    for (std::size_t i = 0; i < chs.size(); ++i) {
      if (chs[i].id != ref[i].id || chs[i].kind != ref[i].kind)
        raise(errc::invalid_argument,
              "records in set '" + set.label + "' differ in channel layout");
    }
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".meta.json");
  return p;
}

namespace {

double parse_double_field(std::string_view field, const std::string& context) {
  // trim spaces and a trailing CR from Windows-style lines
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t'))
    field.remove_prefix(1);
  while (!field.empty() &&
         (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
    field.remove_suffix(1);
  double value = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    raise(errc::bad_format, "unparsable number '" + std::string(field) + "' " +
                                context);
  return value;
}

}  // namespace

TimeSeriesRecord read_record(const std::filesystem::path& csv_path) {
  const auto meta_path = sidecar_path(csv_path);
  if (!std::filesystem::exists(meta_path))
    raise(errc::missing_sidecar, "no sidecar at " + meta_path.string());
  if (!std::filesystem::exists(csv_path))
    raise(errc::io_failure, "no data file at " + csv_path.string());

  json meta;
  {
    std::ifstream in(meta_path);
    try {
      in >> meta;
    } catch (const json::exception& e) {
      raise(errc::bad_format, meta_path.string() + ": " + e.what());
    }
  }

  double rate = 0.0, start_time = 0.0;
  std::vector<ChannelSpec> channels;
  std::map<std::string, std::string> annotations;
  try {
    rate = meta.at("sample_rate_hz").get<double>();
    start_time = meta.value("start_time_s", 0.0);
    for (const auto& jch : meta.at("channels")) {
      ChannelSpec ch;
      ch.id = jch.at("id").get<std::string>();
      ch.kind = parse_channel_kind(jch.at("kind").get<std::string>());
      ch.unit = parse_unit(jch.at("unit").get<std::string>());
      ch.position_x_m = jch.value("position_x_m", 0.0);
      ch.position_y_m = jch.value("position_y_m", 0.0);
      channels.push_back(std::move(ch));
    }
    if (meta.contains("annotations")) {
      for (auto& [k, v] : meta.at("annotations").items())
        annotations[k] = v.get<std::string>();
    }
  } catch (const json::exception& e) {
    raise(errc::bad_format, meta_path.string() + ": " + e.what());
  }
  if (!(rate > 0.0))
    raise(errc::invalid_rate, meta_path.string() + ": sample_rate_hz must be > 0");
  if (channels.empty())
    raise(errc::bad_format, meta_path.string() + ": channels array is empty");
  for (const auto& ch : channels) {
    if (ch.unit != expected_unit(ch.kind))
      raise(errc::unit_kind_mismatch,
            meta_path.string() + ": channel '" + ch.id + "' pairs " +
                channel_kind_name(ch.kind) + " with " + unit_name(ch.unit));
  }

  const std::size_t n_ch = channels.size();
  std::vector<double> values;
  std::size_t n_rows = 0;
  {
    std::ifstream in(csv_path);
    if (!in) raise(errc::io_failure, "cannot open " + csv_path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      std::size_t fields = 0;
      std::size_t pos = 0;
      while (true) {
        const std::size_t comma = line.find(',', pos);
        const std::string_view field =
            comma == std::string::npos
                ? std::string_view(line).substr(pos)
                : std::string_view(line).substr(pos, comma - pos);
        values.push_back(parse_double_field(
            field, "in " + csv_path.filename().string() + " row " +
                       std::to_string(n_rows + 1)));
        ++fields;
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (fields != n_ch)
        raise(errc::ragged_row, csv_path.filename().string() + " row " +
                                    std::to_string(n_rows + 1) + " has " +
                                    std::to_string(fields) + " fields, expected " +
                                    std::to_string(n_ch));
      ++n_rows;
    }
  }
  if (n_rows < 2)
    raise(errc::record_too_short,
          csv_path.filename().string() + " has fewer than 2 sample rows");

  Eigen::MatrixXd samples(static_cast<Eigen::Index>(n_rows),
                          static_cast<Eigen::Index>(n_ch));
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t c = 0; c < n_ch; ++c) {
      const double v = values[r * n_ch + c];
      if (!std::isfinite(v))
        raise(errc::non_finite_sample, csv_path.filename().string() + " row " +
                                           std::to_string(r + 1) +
                                           " contains a non-finite value");
      samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }

  return TimeSeriesRecord(rate, std::move(channels), std::move(samples),
                          start_time, std::move(annotations));
}

void write_record(const TimeSeriesRecord& record,
                  const std::filesystem::path& csv_path) {
  if (!record.samples().allFinite())
    raise(errc::non_finite_sample, "record contains non-finite samples");

  json meta;
  meta["sample_rate_hz"] = record.sample_rate_hz();
  meta["start_time_s"] = record.start_time_s();
  meta["channels"] = json::array();
  for (const auto& ch : record.channels()) {
    meta["channels"].push_back({{"id", ch.id},
                                {"kind", channel_kind_name(ch.kind)},
                                {"unit", unit_name(ch.unit)},
                                {"position_x_m", ch.position_x_m},
                                {"position_y_m", ch.position_y_m}});
  }
  meta["annotations"] = record.annotations();

  if (csv_path.has_parent_path())
    std::filesystem::create_directories(csv_path.parent_path());

  {
    std::ofstream out(csv_path);
    if (!out) raise(errc::io_failure, "cannot write " + csv_path.string());
    const auto& m = record.samples();
    std::string line;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      line.clear();
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) line += ',';
        line += format_double(m(r, c));
      }
      line += '\n';
      out << line;
    }
    if (!out) raise(errc::io_failure, "write failed for " + csv_path.string());
  }
  {
    std::ofstream out(sidecar_path(csv_path));
    if (!out)
      raise(errc::io_failure, "cannot write " + sidecar_path(csv_path).string());
    out << meta.dump(2) << '\n';
    if (!out)
      raise(errc::io_failure,
            "write failed for " + sidecar_path(csv_path).string());
  }
}

TimeSeriesRecord slice_time(const TimeSeriesRecord& record, double t0_s,
                            double t1_s) {
  if (t0_s >= t1_s) raise(errc::reversed_window, "require t0 < t1");
  const double duration = record.duration_s();
  if (t0_s < 0.0 || t1_s > duration + 1e-9)
    raise(errc::window_out_of_range, "window must lie in [0, duration]");

  const double fs = record.sample_rate_hz();
  // half-open [t0, t1): indices k with k/fs >= t0 and k/fs < t1
  const auto first = static_cast<Eigen::Index>(std::ceil(t0_s * fs - 1e-9));
  auto last = static_cast<Eigen::Index>(std::ceil(t1_s * fs - 1e-9));
  if (last > record.sample_count()) last = record.sample_count();
  if (last - first < 2)
    raise(errc::empty_window, "window contains fewer than 2 samples");

  Eigen::MatrixXd sliced = record.samples().middleRows(first, last - first);
  return TimeSeriesRecord(fs, record.channels(), std::move(sliced),
                          record.start_time_s() + static_cast<double>(first) / fs,
                          record.annotations());
}

}  // namespace oma
