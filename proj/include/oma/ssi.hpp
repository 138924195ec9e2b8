#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "oma/records.hpp"

namespace oma {

/// Output covariance blocks R_i (n_ch x n_ch) for lags i = 0..max_lag,
/// estimated on mean-removed data as R_i = 1/(N-i) * sum_k y_{k+i} y_k^T.
struct CovarianceSequence {
  std::vector<Eigen::MatrixXd> blocks;
  double sample_rate_hz = 0.0;

  std::size_t max_lag() const { return blocks.empty() ? 0 : blocks.size() - 1; }
  Eigen::Index channel_count() const {
    return blocks.empty() ? 0 : blocks.front().rows();
  }
};

CovarianceSequence estimate_covariances(const TimeSeriesRecord& record,
                                        std::size_t max_lag);

/// Discrete state-space pair identified from the covariance Hankel matrix.
struct StateSpaceRealization {
  Eigen::MatrixXd a;  // order x order
  Eigen::MatrixXd c;  // n_ch x order
};

/// Balanced realization: block Hankel from R_1 onward, SVD truncated at
/// `order`, observability O = U1 S1^{1/2}, C = first block row, A from the
/// shift invariance of O solved through a pseudo-inverse.
StateSpaceRealization realize_system(const CovarianceSequence& covariances,
                                     int order, int hankel_rows);

struct PoleEstimate {
  double frequency_hz = 0.0;
  double damping_ratio = 0.0;
  Eigen::VectorXcd mode_shape;  // scaled so the largest entry is 1+0i
  int model_order = 0;
  bool stable_frequency = false;
  bool stable_damping = false;
  bool stable_shape = false;
  bool fully_stable = false;
};

/// Continuous-time modal parameters of a discrete eigenvalue:
/// mu = ln(lambda) * fs, f = |mu| / 2pi, zeta = -Re(mu) / |mu|.
struct ModalPair {
  double frequency_hz;
  double damping_ratio;
};
ModalPair pole_from_eigenvalue(std::complex<double> lambda, double sample_rate_hz);

/// Discrete eigenvalue whose modal parameters are (f, zeta) at rate fs.
std::complex<double> eigenvalue_from_modal(double frequency_hz,
                                           double damping_ratio,
                                           double sample_rate_hz);

/// One pole per conjugate pair (positive-frequency member). Eigenvalues on the
/// negative real axis have no oscillatory interpretation and are counted in
/// *discarded_negative_real when the pointer is given.
std::vector<PoleEstimate> poles_from_realization(
    const StateSpaceRealization& realization, double sample_rate_hz,
    int* discarded_negative_real = nullptr);

/// Modal assurance criterion |a^H b|^2 / ((a^H a)(b^H b)) in [0, 1].
double mac(const Eigen::VectorXcd& shape_a, const Eigen::VectorXcd& shape_b);

struct StabilizationCriteria {
  double df_rel = 0.01;     // |f - f_prev| / f_prev
  double dzeta_rel = 0.05;  // |zeta - zeta_prev| / |zeta_prev|
  double mac_min = 0.99;

  /// require_all: a pole is fully stable iff frequency, damping and shape all
  /// hold. damping_and_frequency_or_shape: damping must hold plus at least one
  /// of frequency / shape (the disjunctive reading of the criteria).
  enum class Rule { require_all, damping_and_frequency_or_shape };
  Rule rule = Rule::require_all;
};

/// Sets the three stability flags of `pole` against its nearest-in-frequency
/// predecessor and derives fully_stable per the criteria rule. Thresholds are
/// inclusive at the boundary.
void apply_stability_flags(PoleEstimate& pole, const PoleEstimate& previous,
                           const StabilizationCriteria& criteria);

struct OrderFailure {
  int order = 0;
  errc code = errc::invalid_order;
  std::string message;
};

struct StabilizationDiagram {
  std::vector<PoleEstimate> poles;  // ordered by model order, then frequency
  std::vector<int> orders;          // orders that produced a realization
  StabilizationCriteria criteria;
  std::vector<OrderFailure> failed_orders;
};

/// Realizes every requested order and classifies each pole against the
/// nearest-in-frequency pole of the previous successful order (ties broken
/// toward higher MAC). Failed orders are recorded and skipped.
StabilizationDiagram build_stabilization_diagram(
    const CovarianceSequence& covariances, const std::vector<int>& orders,
    int hankel_rows, const StabilizationCriteria& criteria = {});

struct ModeEstimate {
  std::string label;
  double frequency_hz = 0.0;
  double frequency_std_hz = 0.0;
  double damping_ratio = 0.0;
  double damping_std = 0.0;
  Eigen::VectorXcd mode_shape;  // shape of the pole at the median order
  std::size_t support = 0;      // fully stable poles in the cluster
};

struct ModalResult {
  std::vector<ModeEstimate> modes;  // sorted by frequency
};

/// Single-linkage clustering of fully stable poles in frequency with gap
/// <= freq_gap; clusters below min_support are dropped.
ModalResult cluster_stable_poles(const StabilizationDiagram& diagram,
                                 std::size_t min_support, double freq_gap_hz);

/// CSV export `order, frequency_hz, damping_ratio, stable_f, stable_zeta,
/// stable_mac, fully_stable`.
void write_stabilization_csv(const StabilizationDiagram& diagram,
                             const std::filesystem::path& path);

/// Scatter of poles (frequency on x, model order on y); fully stable poles
/// drawn as filled dots, others as open crosses.
void write_stabilization_svg(const StabilizationDiagram& diagram,
                             const std::filesystem::path& path);

}  // namespace oma
