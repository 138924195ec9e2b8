#pragma once

#include <stdexcept>
#include <string>

namespace oma {

/// Error codes for every failure mode the toolkit reports. Each code maps
/// to one contract violation so callers can branch without string matching.
enum class errc {
  // records / io
  missing_sidecar,
  invalid_rate,
  ragged_row,
  non_finite_sample,
  unit_kind_mismatch,
  bad_format,
  io_failure,
  record_too_short,
  empty_window,
  reversed_window,
  window_out_of_range,
  // spectral
  band_above_nyquist,
  degenerate_signal,
  empty_band,
  // ssi
  invalid_order,
  rank_deficient,
  insufficient_lags,
  degenerate_shape,
  // decay
  no_decay_detected,
  segment_too_short,
  non_positive_amplitude,
  no_usable_channel,
  // scenario / reporting
  schema_violation,
  no_records,
  // generic precondition violation
  invalid_argument,
};

const char* errc_name(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] void raise(errc code, const std::string& what);

}  // namespace oma
