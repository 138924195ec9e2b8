#include <doctest.h>

#include <fstream>
#include <random>

#include "oma/records.hpp"
#include "test_util.hpp"

using namespace oma;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kTwoChannelSidecar = R"({
  "sample_rate_hz": 200.0,
  "start_time_s": 0.0,
  "channels": [
    {"id": "az", "kind": "acceleration_z", "unit": "m_per_s2", "position_x_m": 0.75, "position_y_m": 0.0},
    {"id": "wx", "kind": "angular_velocity_x", "unit": "deg_per_s", "position_x_m": 0.75, "position_y_m": 0.0}
  ],
  "annotations": {"note": "fixture"}
})";

}  // namespace

TEST_CASE("read_record accepts a minimal two-channel file") {
  const auto dir = testutil::make_temp_dir("records");
  write_file(dir / "rec.csv", "0.1,1\n0.2,2\n0.3,3\n0.4,4\n");
  write_file(dir / "rec.meta.json", kTwoChannelSidecar);

  const auto record = read_record(dir / "rec.csv");
  CHECK(record.sample_count() == 4);
  CHECK(record.channel_count() == 2);
  CHECK(record.sample_rate_hz() == 200.0);
  CHECK(record.channels()[0].id == "az");
  CHECK(record.channels()[1].kind == ChannelKind::angular_velocity_x);
  CHECK(record.samples()(2, 0) == doctest::Approx(0.3));
  CHECK(record.annotations().at("note") == "fixture");
}

TEST_CASE("read_record error paths carry distinct codes") {
  const auto dir = testutil::make_temp_dir("records");

  SUBCASE("missing sidecar") {
    write_file(dir / "a.csv", "1,2\n3,4\n");
    CHECK_THROWS_WITH_AS(read_record(dir / "a.csv"),
                         doctest::Contains("MissingSidecar"), Error);
  }
  SUBCASE("zero sample rate") {
    write_file(dir / "b.csv", "1,2\n3,4\n");
    std::string meta = kTwoChannelSidecar;
    meta.replace(meta.find("200.0"), 5, "0.000");
    write_file(dir / "b.meta.json", meta);
    try {
      read_record(dir / "b.csv");
      FAIL("expected InvalidRate");
    } catch (const Error& e) {
      CHECK(e.code() == errc::invalid_rate);
    }
  }
  SUBCASE("ragged row") {
    write_file(dir / "c.csv", "1,2\n3\n");
    write_file(dir / "c.meta.json", kTwoChannelSidecar);
    try {
      read_record(dir / "c.csv");
      FAIL("expected RaggedRow");
    } catch (const Error& e) {
      CHECK(e.code() == errc::ragged_row);
    }
  }
  SUBCASE("non-finite sample") {
    write_file(dir / "d.csv", "1,2\nnan,4\n");
    write_file(dir / "d.meta.json", kTwoChannelSidecar);
    try {
      read_record(dir / "d.csv");
      FAIL("expected NonFiniteSample");
    } catch (const Error& e) {
      CHECK(e.code() == errc::non_finite_sample);
    }
  }
  SUBCASE("unit/kind mismatch") {
    write_file(dir / "e.csv", "1,2\n3,4\n");
    std::string meta = kTwoChannelSidecar;
    const std::string wanted = "\"unit\": \"deg_per_s\"";
    meta.replace(meta.find(wanted), wanted.size(), "\"unit\": \"m_per_s2\"");
    write_file(dir / "e.meta.json", meta);
    try {
      read_record(dir / "e.csv");
      FAIL("expected UnitKindMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == errc::unit_kind_mismatch);
    }
  }
}

TEST_CASE("record constructor rejects NaN before anything touches disk") {
  Eigen::MatrixXd samples(2, 1);
  samples << 1.0, std::nan("");
  std::vector<ChannelSpec> channels{{"az", ChannelKind::acceleration_z,
                                     Unit::m_per_s2, 0.0, 0.0}};
  try {
    TimeSeriesRecord record(200.0, channels, samples);
    FAIL("expected NonFiniteSample");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_finite_sample);
  }
}

TEST_CASE("write_record emits the file pair and a 120 s record reads back") {
  const auto dir = testutil::make_temp_dir("records");

  Eigen::MatrixXd small(2, 2);
  small << 1.0, 2.0, 3.0, 4.0;
  std::vector<ChannelSpec> channels{
      {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.1, 0.0},
      {"wx", ChannelKind::angular_velocity_x, Unit::deg_per_s, 0.1, 0.0}};
  write_record(TimeSeriesRecord(200.0, channels, small), dir / "tiny.csv");
  CHECK(fs::exists(dir / "tiny.csv"));
  CHECK(fs::exists(dir / "tiny.meta.json"));

  // the damping protocol length: 24000 rows at 200 Hz span 120 s
  Eigen::MatrixXd long_samples = Eigen::MatrixXd::Random(24000, 3);
  std::vector<ChannelSpec> three{
      {"b", ChannelKind::acceleration_z, Unit::m_per_s2, 0.75, 0.0},
      {"c", ChannelKind::acceleration_z, Unit::m_per_s2, 1.5, 0.0},
      {"d", ChannelKind::acceleration_z, Unit::m_per_s2, 2.25, 0.0}};
  write_record(TimeSeriesRecord(200.0, three, long_samples), dir / "long.csv");
  const auto loaded = read_record(dir / "long.csv");
  CHECK(loaded.sample_count() == 24000);
  CHECK(loaded.channel_count() == 3);
  CHECK(loaded.duration_s() == doctest::Approx(120.0).epsilon(1e-12));
}

TEST_CASE("round trip reproduces values within 1e-9 relative") {
  const auto dir = testutil::make_temp_dir("records");
  std::mt19937_64 rng(42);
  for (int iter = 0; iter < 25; ++iter) {
    const auto record = testutil::random_record(rng);
    const auto path = dir / ("rt_" + std::to_string(iter) + ".csv");
    write_record(record, path);
    const auto loaded = read_record(path);
    REQUIRE(loaded.sample_count() == record.sample_count());
    REQUIRE(loaded.channel_count() == record.channel_count());
    CHECK(loaded.sample_rate_hz() == record.sample_rate_hz());
    for (Eigen::Index r = 0; r < record.sample_count(); ++r)
      for (Eigen::Index c = 0; c < record.channel_count(); ++c) {
        const double a = record.samples()(r, c);
        const double b = loaded.samples()(r, c);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
      }
  }
}

TEST_CASE("slice_time windows and properties") {
  Eigen::MatrixXd samples(24000, 1);
  for (int i = 0; i < 24000; ++i) samples(i, 0) = i;
  std::vector<ChannelSpec> channels{
      {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.0, 0.0}};
  const TimeSeriesRecord record(200.0, channels, samples);

  SUBCASE("free-vibration slice of the servo protocol") {
    const auto sliced = slice_time(record, 30.0, 120.0);
    CHECK(sliced.sample_count() == 18000);
    CHECK(sliced.duration_s() == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(sliced.start_time_s() == doctest::Approx(30.0));
    CHECK(sliced.samples()(0, 0) == 6000.0);
  }
  SUBCASE("identity slice keeps the sample count") {
    const auto sliced = slice_time(record, 0.0, record.duration_s());
    CHECK(sliced.sample_count() == record.sample_count());
  }
  SUBCASE("reversed bounds") {
    try {
      slice_time(record, 50.0, 40.0);
      FAIL("expected ReversedWindow");
    } catch (const Error& e) {
      CHECK(e.code() == errc::reversed_window);
    }
  }
  SUBCASE("window beyond the record") {
    try {
      slice_time(record, 0.0, 300.0);
      FAIL("expected WindowOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == errc::window_out_of_range);
    }
  }
  SUBCASE("adjacent slices concatenate to the enclosing slice") {
    const auto ab = slice_time(record, 10.0, 40.0);
    const auto bc = slice_time(record, 40.0, 90.0);
    const auto ac = slice_time(record, 10.0, 90.0);
    REQUIRE(ab.sample_count() + bc.sample_count() == ac.sample_count());
    for (Eigen::Index i = 0; i < ab.sample_count(); ++i)
      CHECK(ab.samples()(i, 0) == ac.samples()(i, 0));
    for (Eigen::Index i = 0; i < bc.sample_count(); ++i)
      CHECK(bc.samples()(i, 0) == ac.samples()(ab.sample_count() + i, 0));
  }
}

TEST_CASE("measurement set validation") {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Random(16, 1);
  std::vector<ChannelSpec> channels{
      {"az", ChannelKind::acceleration_z, Unit::m_per_s2, 0.0, 0.0}};
  const TimeSeriesRecord record(100.0, channels, samples);

  MeasurementSet empty{"empty", {}};
  try {
    validate_measurement_set(empty);
    FAIL("expected NoRecords");
  } catch (const Error& e) {
    CHECK(e.code() == errc::no_records);
  }

  std::vector<ChannelSpec> other{
      {"wx", ChannelKind::angular_velocity_x, Unit::deg_per_s, 0.0, 0.0}};
  const TimeSeriesRecord mismatched(100.0, other, samples);
  MeasurementSet bad{"bad", {record, mismatched}};
  CHECK_THROWS_AS(validate_measurement_set(bad), Error);

  MeasurementSet good{"good", {record, record}};
  CHECK_NOTHROW(validate_measurement_set(good));
}
