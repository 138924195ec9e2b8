#include "oma/errors.hpp"

namespace oma {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::missing_sidecar: return "MissingSidecar";
    case errc::invalid_rate: return "InvalidRate";
    case errc::ragged_row: return "RaggedRow";
    case errc::non_finite_sample: return "NonFiniteSample";
    case errc::unit_kind_mismatch: return "UnitKindMismatch";
    case errc::bad_format: return "BadFormat";
    case errc::io_failure: return "IoFailure";
    case errc::record_too_short: return "RecordTooShort";
    case errc::empty_window: return "EmptyWindow";
    case errc::reversed_window: return "ReversedWindow";
    case errc::window_out_of_range: return "WindowOutOfRange";
    case errc::band_above_nyquist: return "BandAboveNyquist";
    case errc::degenerate_signal: return "DegenerateSignal";
    case errc::empty_band: return "EmptyBand";
    case errc::invalid_order: return "InvalidOrder";
    case errc::rank_deficient: return "RankDeficient";
    case errc::insufficient_lags: return "InsufficientLags";
    case errc::degenerate_shape: return "DegenerateShape";
    case errc::no_decay_detected: return "NoDecayDetected";
    case errc::segment_too_short: return "SegmentTooShort";
    case errc::non_positive_amplitude: return "NonPositiveAmplitude";
    case errc::no_usable_channel: return "NoUsableChannel";
    case errc::schema_violation: return "SchemaViolation";
    case errc::no_records: return "NoRecords";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

void raise(errc code, const std::string& what) {
  throw Error(code, std::string(errc_name(code)) + ": " + what);
}

}  // namespace oma
