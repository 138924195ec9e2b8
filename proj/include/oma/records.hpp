#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "oma/errors.hpp"

namespace oma {

enum class ChannelKind { acceleration_z, angular_velocity_x };
enum class Unit { m_per_s2, deg_per_s };

/// The physically consistent unit for a channel kind.
Unit expected_unit(ChannelKind kind);

const char* channel_kind_name(ChannelKind kind);
const char* unit_name(Unit unit);
ChannelKind parse_channel_kind(const std::string& text);
Unit parse_unit(const std::string& text);

struct ChannelSpec {
  std::string id;
  ChannelKind kind = ChannelKind::acceleration_z;
  Unit unit = Unit::m_per_s2;
  double position_x_m = 0.0;
  double position_y_m = 0.0;
};

/// Synchronized multi-channel samples at a fixed rate. Immutable after
/// construction; the constructor enforces all invariants (positive rate,
/// at least two samples, finite values, unit/kind consistency).
class TimeSeriesRecord {
 public:
  TimeSeriesRecord(double sample_rate_hz, std::vector<ChannelSpec> channels,
                   Eigen::MatrixXd samples, double start_time_s = 0.0,
                   std::map<std::string, std::string> annotations = {});

  double sample_rate_hz() const { return sample_rate_hz_; }
  double start_time_s() const { return start_time_s_; }
  double duration_s() const {
    return static_cast<double>(samples_.rows()) / sample_rate_hz_;
  }
  Eigen::Index sample_count() const { return samples_.rows(); }
  Eigen::Index channel_count() const { return samples_.cols(); }

  const std::vector<ChannelSpec>& channels() const { return channels_; }
  /// n_samples x n_channels; one column per channel.
  const Eigen::MatrixXd& samples() const { return samples_; }
  const std::map<std::string, std::string>& annotations() const {
    return annotations_;
  }

  /// Copy of this record with annotations replaced/merged.
  TimeSeriesRecord with_annotations(
      std::map<std::string, std::string> extra) const;

 private:
  double sample_rate_hz_;
  double start_time_s_;
  std::vector<ChannelSpec> channels_;
  Eigen::MatrixXd samples_;
  std::map<std::string, std::string> annotations_;
};

/// Repeated measurements under one protocol (same channel layout).
struct MeasurementSet {
  std::string label;
  std::vector<TimeSeriesRecord> records;
};

/// Throws unless the set is non-empty and channel ids/kinds agree across records.
void validate_measurement_set(const MeasurementSet& set);

/// Reads `<name>.csv` plus its `<name>.meta.json` sidecar.
TimeSeriesRecord read_record(const std::filesystem::path& csv_path);

/// Writes the sample matrix as CSV plus the metadata sidecar. Values survive a
/// round trip exactly (shortest-round-trip formatting).
void write_record(const TimeSeriesRecord& record,
                  const std::filesystem::path& csv_path);

/// Sidecar path for a data file: replaces the .csv extension with .meta.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Samples whose time offset from the record start lies in [t0_s, t1_s).
/// Rate and channels are unchanged; the slice's start_time shifts accordingly.
TimeSeriesRecord slice_time(const TimeSeriesRecord& record, double t0_s,
                            double t1_s);

}  // namespace oma
