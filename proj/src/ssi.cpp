#include "oma/ssi.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "oma/numeric.hpp"
#include "oma/svg.hpp"

namespace oma {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRankCutoff = 1e-12;   // singular value ratio for RankDeficient
constexpr double kPinvCutoff = 1e-10;   // relative cutoff in the shift solve

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  const double cutoff = kPinvCutoff * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

CovarianceSequence estimate_covariances(const TimeSeriesRecord& record,
                                        std::size_t max_lag) {
  const auto n = record.sample_count();
  if (max_lag < 1) raise(errc::invalid_argument, "max_lag must be >= 1");
  if (static_cast<Eigen::Index>(2 * max_lag) >= n)
    raise(errc::insufficient_lags,
          "record too short for lag " + std::to_string(max_lag));

  Eigen::MatrixXd centered = record.samples();
  centered.rowwise() -= centered.colwise().mean();

  CovarianceSequence cov;
  cov.sample_rate_hz = record.sample_rate_hz();
  cov.blocks.reserve(max_lag + 1);
  for (std::size_t i = 0; i <= max_lag; ++i) {
    const auto rows = n - static_cast<Eigen::Index>(i);
    Eigen::MatrixXd block =
        centered.middleRows(static_cast<Eigen::Index>(i), rows).transpose() *
        centered.topRows(rows) / static_cast<double>(rows);
    cov.blocks.push_back(std::move(block));
  }
  return cov;
}

StateSpaceRealization realize_system(const CovarianceSequence& covariances,
                                     int order, int hankel_rows) {
  const Eigen::Index n_ch = covariances.channel_count();
  if (n_ch == 0) raise(errc::invalid_argument, "empty covariance sequence");
  if (hankel_rows < 2) raise(errc::invalid_argument, "hankel_rows must be >= 2");
  if (order <= 0 || order % 2 != 0)
    raise(errc::invalid_order, "order must be even and positive");
  if (static_cast<Eigen::Index>(order) > (hankel_rows - 1) * n_ch)
    raise(errc::invalid_order,
          "order " + std::to_string(order) + " exceeds (hankel_rows-1)*n_ch = " +
              std::to_string((hankel_rows - 1) * n_ch));
  const std::size_t needed = static_cast<std::size_t>(2 * hankel_rows - 1);
  if (covariances.max_lag() < needed)
    raise(errc::insufficient_lags,
          "need covariance lags up to " + std::to_string(needed) + ", have " +
              std::to_string(covariances.max_lag()));

  // block Hankel from R_1 onward; R_0 excluded
  const Eigen::Index p = hankel_rows;
  Eigen::MatrixXd hankel(p * n_ch, p * n_ch);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j)
      hankel.block(i * n_ch, j * n_ch, n_ch, n_ch) =
          covariances.blocks[static_cast<std::size_t>(i + j + 1)];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(hankel, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(order - 1) / s(0) < kRankCutoff)
    raise(errc::rank_deficient,
          "Hankel rank below requested order " + std::to_string(order));

  Eigen::MatrixXd observability =
      svd.matrixU().leftCols(order) *
      s.head(order).cwiseSqrt().asDiagonal();

  StateSpaceRealization realization;
  realization.c = observability.topRows(n_ch);
  const Eigen::MatrixXd upper = observability.topRows((p - 1) * n_ch);
  const Eigen::MatrixXd lower = observability.bottomRows((p - 1) * n_ch);
  realization.a = pseudo_inverse(upper) * lower;
  return realization;
}

ModalPair pole_from_eigenvalue(std::complex<double> lambda,
                               double sample_rate_hz) {
  const std::complex<double> mu = std::log(lambda) * sample_rate_hz;
  const double mu_abs = std::abs(mu);
  return ModalPair{mu_abs / (2.0 * kPi), -mu.real() / mu_abs};
}

std::complex<double> eigenvalue_from_modal(double frequency_hz,
                                           double damping_ratio,
                                           double sample_rate_hz) {
  const double omega = 2.0 * kPi * frequency_hz;
  const std::complex<double> mu(
      -damping_ratio * omega,
      omega * std::sqrt(1.0 - damping_ratio * damping_ratio));
  return std::exp(mu / sample_rate_hz);
}

std::vector<PoleEstimate> poles_from_realization(
    const StateSpaceRealization& realization, double sample_rate_hz,
    int* discarded_negative_real) {
  if (realization.a.rows() != realization.a.cols())
    raise(errc::invalid_argument, "state matrix must be square");
  if (!(sample_rate_hz > 0.0))
    raise(errc::invalid_argument, "sample rate must be positive");

  Eigen::EigenSolver<Eigen::MatrixXd> eig(realization.a);
  if (eig.info() != Eigen::Success)
    raise(errc::rank_deficient, "eigendecomposition failed");

  const Eigen::MatrixXcd c = realization.c.cast<std::complex<double>>();
  std::vector<PoleEstimate> poles;
  int discarded = 0;
  for (Eigen::Index j = 0; j < eig.eigenvalues().size(); ++j) {
    const std::complex<double> lambda = eig.eigenvalues()(j);
    if (lambda.imag() <= 0.0) {
      // real eigenvalues: negative axis has no oscillatory meaning, flag it;
      // conjugates with negative imaginary part are the stored pair's twin
      if (lambda.imag() == 0.0 && lambda.real() < 0.0) ++discarded;
      continue;
    }
    if (std::abs(lambda) < 1e-300) continue;

    const ModalPair modal = pole_from_eigenvalue(lambda, sample_rate_hz);
    PoleEstimate pole;
    pole.frequency_hz = modal.frequency_hz;
    pole.damping_ratio = modal.damping_ratio;
    pole.mode_shape = c * eig.eigenvectors().col(j);
    Eigen::Index max_idx = 0;
    pole.mode_shape.cwiseAbs().maxCoeff(&max_idx);
    const std::complex<double> scale = pole.mode_shape(max_idx);
    if (std::abs(scale) > 0.0) pole.mode_shape /= scale;
    poles.push_back(std::move(pole));
  }
  if (discarded_negative_real) *discarded_negative_real = discarded;

  std::sort(poles.begin(), poles.end(),
            [](const PoleEstimate& a, const PoleEstimate& b) {
              return a.frequency_hz < b.frequency_hz;
            });
  return poles;
}

double mac(const Eigen::VectorXcd& shape_a, const Eigen::VectorXcd& shape_b) {
  if (shape_a.size() != shape_b.size() || shape_a.size() == 0)
    raise(errc::invalid_argument, "shape vectors must match in length");
  const double na = shape_a.squaredNorm();
  const double nb = shape_b.squaredNorm();
  if (!(na > 0.0) || !(nb > 0.0))
    raise(errc::degenerate_shape, "zero-norm mode shape");
  const std::complex<double> inner = shape_a.adjoint() * shape_b;
  return std::min(std::norm(inner) / (na * nb), 1.0);
}

void apply_stability_flags(PoleEstimate& pole, const PoleEstimate& previous,
                           const StabilizationCriteria& criteria) {
  pole.stable_frequency = std::abs(pole.frequency_hz - previous.frequency_hz) <=
                          criteria.df_rel * previous.frequency_hz;
  if (previous.damping_ratio == 0.0)
    pole.stable_damping = pole.damping_ratio == 0.0;
  else
    pole.stable_damping =
        std::abs(pole.damping_ratio - previous.damping_ratio) <=
        criteria.dzeta_rel * std::abs(previous.damping_ratio);
  pole.stable_shape = mac(pole.mode_shape, previous.mode_shape) >= criteria.mac_min;

  if (criteria.rule == StabilizationCriteria::Rule::require_all)
    pole.fully_stable =
        pole.stable_frequency && pole.stable_damping && pole.stable_shape;
  else
    pole.fully_stable =
        pole.stable_damping && (pole.stable_frequency || pole.stable_shape);
}

StabilizationDiagram build_stabilization_diagram(
    const CovarianceSequence& covariances, const std::vector<int>& orders,
    int hankel_rows, const StabilizationCriteria& criteria) {
  if (orders.empty()) raise(errc::invalid_argument, "order list is empty");
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] <= 0 || orders[i] % 2 != 0)
      raise(errc::invalid_order, "orders must be even and positive");
    if (i > 0 && orders[i] <= orders[i - 1])
      raise(errc::invalid_argument, "orders must be strictly increasing");
  }

  StabilizationDiagram diagram;
  diagram.criteria = criteria;

  std::vector<PoleEstimate> previous;
  bool have_previous = false;
  for (int order : orders) {
    std::vector<PoleEstimate> current;
    try {
      const auto realization = realize_system(covariances, order, hankel_rows);
      current = poles_from_realization(realization, covariances.sample_rate_hz);
    } catch (const Error& e) {
      diagram.failed_orders.push_back({order, e.code(), e.what()});
      continue;
    }

    for (auto& pole : current) {
      pole.model_order = order;
      if (!have_previous) continue;
      const PoleEstimate* best = nullptr;
      double best_dist = std::numeric_limits<double>::infinity();
      for (const auto& prev : previous) {
        const double dist = std::abs(pole.frequency_hz - prev.frequency_hz);
        if (dist < best_dist - 1e-15) {
          best_dist = dist;
          best = &prev;
        } else if (best && std::abs(dist - best_dist) <= 1e-15) {
          if (mac(pole.mode_shape, prev.mode_shape) >
              mac(pole.mode_shape, best->mode_shape))
            best = &prev;
        }
      }
      if (best) apply_stability_flags(pole, *best, criteria);
    }

    diagram.orders.push_back(order);
    previous = current;
    have_previous = true;
    for (auto& pole : current)
      diagram.poles.push_back(std::move(pole));
  }
  return diagram;
}

ModalResult cluster_stable_poles(const StabilizationDiagram& diagram,
                                 std::size_t min_support, double freq_gap_hz) {
  if (min_support < 2) raise(errc::invalid_argument, "min_support must be >= 2");
  if (!(freq_gap_hz > 0.0))
    raise(errc::invalid_argument, "freq_gap must be positive");

  std::vector<const PoleEstimate*> stable;
  for (const auto& pole : diagram.poles)
    if (pole.fully_stable) stable.push_back(&pole);
  std::sort(stable.begin(), stable.end(),
            [](const PoleEstimate* a, const PoleEstimate* b) {
              return a->frequency_hz < b->frequency_hz;
            });

  ModalResult result;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= stable.size(); ++i) {
    const bool break_here =
        i == stable.size() || stable[i]->frequency_hz -
                                  stable[i - 1]->frequency_hz > freq_gap_hz;
    if (!break_here) continue;

    const std::size_t size = i - begin;
    if (size >= min_support) {
      std::vector<double> freqs, zetas;
      std::vector<const PoleEstimate*> members(stable.begin() + begin,
                                               stable.begin() + i);
      for (const auto* p : members) {
        freqs.push_back(p->frequency_hz);
        zetas.push_back(p->damping_ratio);
      }
      std::sort(members.begin(), members.end(),
                [](const PoleEstimate* a, const PoleEstimate* b) {
                  return a->model_order < b->model_order;
                });
      ModeEstimate mode;
      mode.frequency_hz = mean(freqs);
      mode.frequency_std_hz = sample_std(freqs);
      mode.damping_ratio = mean(zetas);
      mode.damping_std = sample_std(zetas);
      mode.mode_shape = members[(members.size() - 1) / 2]->mode_shape;
      mode.support = size;
      result.modes.push_back(std::move(mode));
    }
    begin = i;
  }

  std::sort(result.modes.begin(), result.modes.end(),
            [](const ModeEstimate& a, const ModeEstimate& b) {
              return a.frequency_hz < b.frequency_hz;
            });
  for (std::size_t i = 0; i < result.modes.size(); ++i)
    result.modes[i].label = "mode_" + std::to_string(i + 1);
  return result;
}

void write_stabilization_csv(const StabilizationDiagram& diagram,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());
  out << "order,frequency_hz,damping_ratio,stable_f,stable_zeta,stable_mac,"
         "fully_stable\n";
  for (const auto& p : diagram.poles)
    out << p.model_order << ',' << format_double(p.frequency_hz) << ','
        << format_double(p.damping_ratio) << ',' << (p.stable_frequency ? 1 : 0)
        << ',' << (p.stable_damping ? 1 : 0) << ',' << (p.stable_shape ? 1 : 0)
        << ',' << (p.fully_stable ? 1 : 0) << '\n';
}

void write_stabilization_svg(const StabilizationDiagram& diagram,
                             const std::filesystem::path& path) {
  double f_max = 1.0;
  int order_max = 2;
  for (const auto& p : diagram.poles) {
    f_max = std::max(f_max, p.frequency_hz);
    order_max = std::max(order_max, p.model_order);
  }

  SvgPlot plot(640, 420, "stabilization diagram");
  plot.set_axes(0.0, f_max * 1.05, 0.0, static_cast<double>(order_max) + 2.0,
                "frequency [Hz]", "model order");
  std::vector<SvgPlot::Point> stable, unstable;
  for (const auto& p : diagram.poles) {
    const SvgPlot::Point point{p.frequency_hz,
                               static_cast<double>(p.model_order)};
    (p.fully_stable ? stable : unstable).push_back(point);
  }
  plot.add_markers(unstable, SvgPlot::Marker::cross, "#9aa0a6", 3.0);
  plot.add_markers(stable, SvgPlot::Marker::dot, "#c62828", 3.0);
  plot.write(path);
}

}  // namespace oma
