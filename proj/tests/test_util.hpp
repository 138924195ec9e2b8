#pragma once

#include <Eigen/Core>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "oma/records.hpp"

namespace testutil {

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("oma_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline bool same_bytes(const std::filesystem::path& a,
                       const std::filesystem::path& b) {
  return slurp(a) == slurp(b);
}

inline oma::TimeSeriesRecord random_record(std::mt19937_64& rng,
                                           int max_channels = 3,
                                           int max_samples = 64) {
  std::uniform_int_distribution<int> ch_dist(1, max_channels);
  std::uniform_int_distribution<int> n_dist(2, max_samples);
  std::uniform_real_distribution<double> value(-1e3, 1e3);
  std::uniform_real_distribution<double> rate(1.0, 2000.0);

  const int n_ch = ch_dist(rng);
  const int n = n_dist(rng);
  Eigen::MatrixXd samples(n, n_ch);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n_ch; ++c) samples(r, c) = value(rng);

  std::vector<oma::ChannelSpec> channels;
  for (int c = 0; c < n_ch; ++c) {
    oma::ChannelSpec ch;
    ch.id = "ch" + std::to_string(c);
    if (c % 2 == 0) {
      ch.kind = oma::ChannelKind::acceleration_z;
      ch.unit = oma::Unit::m_per_s2;
    } else {
      ch.kind = oma::ChannelKind::angular_velocity_x;
      ch.unit = oma::Unit::deg_per_s;
    }
    ch.position_x_m = 0.25 * c;
    channels.push_back(ch);
  }
  return oma::TimeSeriesRecord(rate(rng), channels, samples, 0.0,
                               {{"origin", "random"}});
}

}  // namespace testutil
