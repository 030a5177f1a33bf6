// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_DENOISER_HPP_
#define MVDENOISE_DENOISER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mvdenoise/common.hpp"
#include "mvdenoise/gofstat.hpp"
#include "mvdenoise/robustcov.hpp"
#include "mvdenoise/wavelet.hpp"

namespace mvdenoise {

enum class WindowMode { sliding, tiling };

inline std::string_view to_string(WindowMode m) { return m == WindowMode::sliding ? "sliding" : "tiling"; }

struct DenoiseConfig {
  std::string filter = "db8";
  int levels = 5;
  /// Window size is L + 1 rows. Unset means L = 28 * M.
  std::optional<std::size_t> window_l;
  double p_fa = 0.005;
  int calibration_reps = 1000;
  std::uint64_t seed = 0;
  EvalMode eval_mode = EvalMode::gamma_closed_form;
  AdForm ad_form = AdForm::standard;
  /// Series mode only: drive the reference by the eigenvalues of Sigma^{-1}
  /// instead of the unit eigenvalues of Sigma^{-1} Sigma.
  bool sigma_inverse_eigenvalues = false;
  Boundary boundary = Boundary::periodic;
  WindowMode window_mode = WindowMode::sliding;
  /// Number of finest scales pooled for the noise covariance estimate (1 or 2).
  int covariance_scales = 1;
  McdOptions mcd;

  std::size_t window_l_for(std::size_t channels) const { return window_l.value_or(28 * channels); }

  void validate() const {
    if (!(p_fa > 0.0 && p_fa < 0.5)) throw InvalidArgument("p_fa must lie in (0, 0.5)");
    if (levels < 1) throw InvalidArgument("levels must be >= 1");
    if (calibration_reps < 100) throw InvalidArgument("calibration_reps must be >= 100");
    if (window_l && *window_l < 1) throw InvalidArgument("window L must be >= 1");
    if (covariance_scales < 1 || covariance_scales > 2) throw InvalidArgument("covariance_scales must be 1 or 2");
    if (covariance_scales > levels) throw InvalidArgument("covariance_scales exceeds levels");
  }
};

// ---------------------------------------------------------------------------
// Windows

namespace detail {

/// Whole-sample symmetric reflection: -1 -> 1, n -> n - 2.
inline std::size_t reflect_whole_sample(std::ptrdiff_t j, std::size_t n) {
  const auto sn = static_cast<std::ptrdiff_t>(n);
  if (sn == 1) return 0;
  const std::ptrdiff_t period = 2 * (sn - 1);
  j %= period;
  if (j < 0) j += period;
  return static_cast<std::size_t>(j < sn ? j : period - j);
}

}  // namespace detail

/// Row indices of the window centred on coefficient `i` of a block with
/// `block_len` rows. The window spans L + 1 rows with symmetric reflection at
/// the block edges, or the whole block when it is shorter than L + 1.
inline std::vector<std::size_t> window_indices(std::size_t block_len, std::size_t L, std::size_t i) {
  std::vector<std::size_t> idx;
  if (block_len < L + 1) {
    idx.resize(block_len);
    for (std::size_t r = 0; r < block_len; ++r) idx[r] = r;
    return idx;
  }
  const auto left = static_cast<std::ptrdiff_t>(L / 2);
  const auto right = static_cast<std::ptrdiff_t>(L) - left;
  idx.reserve(L + 1);
  for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - left; j <= static_cast<std::ptrdiff_t>(i) + right; ++j)
    idx.push_back(detail::reflect_whole_sample(j, block_len));
  return idx;
}

/// Iterable view over the per-coefficient windows of a coefficient block.
class SlidingWindows {
 public:
  struct Window {
    std::size_t index;
    Matrix rows;
  };

  class iterator {
   public:
    iterator(const SlidingWindows* owner, std::size_t i) : owner_(owner), i_(i) {}
    Window operator*() const { return owner_->at(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }
    bool operator!=(const iterator& o) const { return i_ != o.i_; }

   private:
    const SlidingWindows* owner_;
    std::size_t i_;
  };

  SlidingWindows(const Matrix& block, std::size_t L) : block_(&block), L_(L) {
    if (block.rows() < 2) throw InvalidArgument("sliding_windows: block needs at least 2 rows");
  }

  std::size_t size() const { return static_cast<std::size_t>(block_->rows()); }
  Window at(std::size_t i) const {
    const auto idx = window_indices(size(), L_, i);
    Matrix rows(static_cast<Eigen::Index>(idx.size()), block_->cols());
    for (std::size_t r = 0; r < idx.size(); ++r) rows.row(static_cast<Eigen::Index>(r)) = block_->row(static_cast<Eigen::Index>(idx[r]));
    return {i, std::move(rows)};
  }
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size()}; }

 private:
  const Matrix* block_;
  std::size_t L_;
};

inline SlidingWindows sliding_windows(const Matrix& block, std::size_t L) { return SlidingWindows(block, L); }

// ---------------------------------------------------------------------------
// Per-scale statistics

/// Per-coefficient quantities shared by every window containing the coefficient.
struct CoefficientScores {
  std::vector<double> y;       // squared Mahalanobis distance
  std::vector<double> log_f;   // ln F0(y), clamped
  std::vector<double> log_sf;  // ln(1 - F0(y)), clamped
};

inline CoefficientScores score_coefficients(const Matrix& block, const CovarianceMatrix& sigma,
                                            const ReferenceDistribution& ref) {
  CoefficientScores s;
  s.y = sigma.squared_distances(block);
  s.log_f.resize(s.y.size());
  s.log_sf.resize(s.y.size());
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double f = clamp_cdf(ref.cdf(s.y[i]));
    s.log_f[i] = std::log(f);
    s.log_sf[i] = std::log1p(-f);
  }
  return s;
}

namespace detail {

struct ScoredSample {
  double y;
  double log_f;
  double log_sf;
};

inline double ad_of_sorted(const std::vector<ScoredSample>& sorted, AdForm form) {
  const std::size_t n = sorted.size();
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  if (form == AdForm::standard) {
    // Same accumulation order as ad_from_sorted_logs.
    for (std::size_t l = 0; l < n; ++l) {
      const double w = static_cast<double>(2 * l + 1);
      acc += w * sorted[l].log_f + (2.0 * dn - w) * sorted[l].log_sf;
    }
    return -dn - acc / dn;
  }
  for (std::size_t l = 0; l < n; ++l)
    acc += static_cast<double>(2 * l + 1) * (sorted[l].log_f - sorted[n - 1 - l].log_f);
  return (dn - 1.0) - acc / (dn - 1.0);
}

inline void insert_sorted(std::vector<ScoredSample>& v, const ScoredSample& s) {
  const auto it = std::lower_bound(v.begin(), v.end(), s.y, [](const ScoredSample& a, double y) { return a.y < y; });
  v.insert(it, s);
}

inline void erase_sorted(std::vector<ScoredSample>& v, double y) {
  const auto it = std::lower_bound(v.begin(), v.end(), y, [](const ScoredSample& a, double b) { return a.y < b; });
  v.erase(it);
}

}  // namespace detail

/// AD statistic of the window around every coefficient of a block.
inline std::vector<double> window_statistics(const CoefficientScores& s, std::size_t L, AdForm form,
                                             WindowMode mode = WindowMode::sliding) {
  const std::size_t n = s.y.size();
  if (n < 2) throw GeometryError("window_statistics: block needs at least 2 coefficients");
  auto sample = [&](std::size_t i) { return detail::ScoredSample{s.y[i], s.log_f[i], s.log_sf[i]}; };
  std::vector<double> tau(n);
  std::vector<detail::ScoredSample> win;

  auto tau_of_range = [&](std::size_t lo, std::size_t hi) {
    win.clear();
    for (std::size_t r = lo; r < hi; ++r) win.push_back(sample(r));
    std::sort(win.begin(), win.end(), [](const auto& a, const auto& b) { return a.y < b.y; });
    return detail::ad_of_sorted(win, form);
  };

  if (n < L + 1) {
    std::fill(tau.begin(), tau.end(), tau_of_range(0, n));
    return tau;
  }
  if (mode == WindowMode::tiling) {
    const std::size_t size = L + 1;
    for (std::size_t lo = 0; lo < n; lo += size) {
      const std::size_t hi = std::min(n, lo + size);
      const std::size_t start = hi - lo < size ? n - size : lo;
      const double t = tau_of_range(start, start + size);
      std::fill(tau.begin() + static_cast<std::ptrdiff_t>(lo), tau.begin() + static_cast<std::ptrdiff_t>(hi), t);
    }
    return tau;
  }

  const auto left = static_cast<std::ptrdiff_t>(L / 2);
  const auto right = static_cast<std::ptrdiff_t>(L) - left;
  win.reserve(L + 2);
  for (std::ptrdiff_t j = -left; j <= right; ++j) detail::insert_sorted(win, sample(detail::reflect_whole_sample(j, n)));
  for (std::size_t i = 0; i < n; ++i) {
    tau[i] = detail::ad_of_sorted(win, form);
    if (i + 1 == n) break;
    const auto si = static_cast<std::ptrdiff_t>(i);
    detail::erase_sorted(win, s.y[detail::reflect_whole_sample(si - left, n)]);
    detail::insert_sorted(win, sample(detail::reflect_whole_sample(si + 1 + right, n)));
  }
  return tau;
}

// ---------------------------------------------------------------------------
// Threshold calibration

/// Empirical quantile with linear interpolation between order statistics.
/// Reorders `values`.
inline double empirical_quantile(std::vector<double>& values, double q) {
  if (values.empty()) throw InvalidArgument("empirical_quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("empirical_quantile: q outside [0, 1]");
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
  const double a = values[lo];
  if (lo + 1 >= values.size()) return a;
  const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
  return a + (h - static_cast<double>(lo)) * (b - a);
}

inline ReferenceDistribution make_reference(const CovarianceMatrix& sigma, const DenoiseConfig& config) {
  const auto m = static_cast<std::size_t>(sigma.dims());
  if (config.eval_mode == EvalMode::series && config.sigma_inverse_eigenvalues) {
    const Vector inv = sigma.spectrum().inverse_values();
    return ReferenceDistribution(std::vector<double>(inv.data(), inv.data() + inv.size()), EvalMode::series);
  }
  return ReferenceDistribution::chi_square(m, config.eval_mode);
}

/// Pooled null sample of window statistics per scale: `reps` pure-noise
/// realizations of length `signal_length` drawn from N(0, sigma), each
/// decomposed and windowed exactly like the data. Realization r uses
/// substream derive_seed(seed, r).
inline std::vector<std::vector<double>> null_statistics(const CovarianceMatrix& sigma, std::size_t signal_length,
                                                        const DenoiseConfig& config, std::uint64_t seed) {
  const auto m = static_cast<std::size_t>(sigma.dims());
  const std::size_t L = config.window_l_for(m);
  const auto reps = static_cast<std::size_t>(config.calibration_reps);
  const WaveletFilter filter = make_filter(config.filter);
  const ReferenceDistribution ref = make_reference(sigma, config);
  const Matrix lower = sigma.cholesky();

  std::vector<std::vector<std::vector<double>>> per_rep(reps);
  parallel_for(reps, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(static_cast<Eigen::Index>(signal_length), static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      for (Eigen::Index c = 0; c < z.cols(); ++c) z(i, c) = normal(rng);
    const Matrix psi = z * lower.transpose();
    const auto dec = dwt_forward(psi, filter, config.levels, config.boundary);
    auto& out = per_rep[r];
    out.reserve(dec.details.size());
    for (const auto& block : dec.details)
      out.push_back(window_statistics(score_coefficients(block, sigma, ref), L, config.ad_form, config.window_mode));
  });

  std::vector<std::vector<double>> pooled(static_cast<std::size_t>(config.levels));
  for (auto& rep : per_rep)
    for (std::size_t k = 0; k < rep.size(); ++k) pooled[k].insert(pooled[k].end(), rep[k].begin(), rep[k].end());
  return pooled;
}

struct Calibration {
  std::vector<double> thresholds;  // T_k, k = 1..levels
  std::vector<std::size_t> sample_sizes;
  std::vector<std::string> warnings;
};

inline Calibration thresholds_from_null(std::vector<std::vector<double>> pooled, double p_fa) {
  if (!(p_fa > 0.0 && p_fa < 1.0)) throw InvalidArgument("p_fa must lie in (0, 1)");
  Calibration cal;
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    auto& sample = pooled[k];
    cal.sample_sizes.push_back(sample.size());
    if (static_cast<double>(sample.size()) < 10.0 / p_fa)
      cal.warnings.push_back("scale " + std::to_string(k + 1) + ": null sample of " + std::to_string(sample.size()) +
                             " is below 10/p_fa; threshold resolution is coarse");
    cal.thresholds.push_back(empirical_quantile(sample, 1.0 - p_fa));
  }
  return cal;
}

/// Per-scale thresholds T_k: the (1 - p_fa) quantile of the pooled null sample.
inline Calibration calibrate_thresholds(const CovarianceMatrix& sigma, std::size_t signal_length,
                                        const DenoiseConfig& config, std::uint64_t seed) {
  if (config.calibration_reps < 1) throw InvalidArgument("calibration_reps must be positive");
  return thresholds_from_null(null_statistics(sigma, signal_length, config, seed), config.p_fa);
}

// ---------------------------------------------------------------------------
// Whole-sample test: every row of x forms one window.

struct SampleGofResult {
  double tau = 0.0;
  double threshold = 0.0;
  Decision decision = Decision::H0_noise;
  std::size_t rows = 0;
  std::size_t calibration_sample = 0;
};

inline double sample_statistic(const Matrix& x, const CovarianceMatrix& sigma, const ReferenceDistribution& ref,
                               AdForm form) {
  return ad_statistic(mahalanobis_edf(x, sigma), ref, form);
}

/// Tests whether the rows of x are N(0, sigma) draws. T is the (1 - p_fa)
/// quantile of the statistic over simulated samples of the same size.
inline SampleGofResult sample_gof(const Matrix& x, const CovarianceMatrix& sigma, const DenoiseConfig& config,
                                  std::uint64_t seed) {
  if (x.cols() != sigma.dims()) throw InvalidArgument("sample_gof: covariance dimension does not match data");
  if (x.rows() < 2) throw GeometryError("sample_gof: need at least 2 rows");
  if (config.calibration_reps < 1) throw InvalidArgument("calibration_reps must be positive");
  require_finite(x, "sample_gof");
  const ReferenceDistribution ref = make_reference(sigma, config);
  const auto reps = static_cast<std::size_t>(config.calibration_reps);
  const Matrix lower = sigma.cholesky();
  std::vector<double> null(reps);
  parallel_for(reps, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      for (Eigen::Index c = 0; c < z.cols(); ++c) z(i, c) = normal(rng);
    null[r] = sample_statistic(z * lower.transpose(), sigma, ref, config.ad_form);
  });
  SampleGofResult out;
  out.rows = static_cast<std::size_t>(x.rows());
  out.calibration_sample = reps;
  out.tau = sample_statistic(x, sigma, ref, config.ad_form);
  out.threshold = empirical_quantile(null, 1.0 - config.p_fa);
  out.decision = gof_test(out.tau, out.threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

struct ScaleReport {
  int scale = 0;
  double threshold = 0.0;
  std::vector<double> tau;
  std::vector<std::uint8_t> keep;
  std::size_t retained = 0;
};

struct DenoiseReport {
  std::vector<ScaleReport> scales;
  Matrix sigma_hat;
  std::size_t window_l = 0;
  std::vector<std::string> warnings;
  std::vector<double> channel_snr_db;
  std::optional<double> average_snr_db;
};

struct DenoiseResult {
  Signal denoised;
  DenoiseReport report;
};

namespace detail {

inline constexpr std::uint64_t kCovarianceStream = 0x6d6364;
inline constexpr std::uint64_t kCalibrationStream = 0x63616c;

inline Matrix covariance_source(const WaveletDecomposition& dec, int scales) {
  if (scales == 1) return dec.details[0];
  Matrix stacked(dec.details[0].rows() + dec.details[1].rows(), dec.details[0].cols());
  stacked << dec.details[0], dec.details[1];
  return stacked;
}

struct NoiseCovariance {
  CovarianceMatrix sigma;
  std::vector<std::string> warnings;
};

// Noise-free or linearly dependent channels leave the finest scale rank
// deficient; fall back to a ridged scatter so the pipeline still runs.
inline NoiseCovariance estimate_noise_covariance(const Matrix& source, const DenoiseConfig& config) {
  try {
    auto mcd = mcd_estimate(source, derive_seed(config.seed, kCovarianceStream), config.mcd);
    NoiseCovariance out{std::move(mcd.covariance), {}};
    if (mcd.regularized) out.warnings.push_back("noise covariance subset was singular; ridge added");
    return out;
  } catch (const SingularCovarianceError&) {
    const auto m = source.cols();
    Matrix scatter = source.transpose() * source / static_cast<double>(source.rows());
    const double ridge = std::max(1e-10 * scatter.trace() / static_cast<double>(m), 1e-300);
    scatter += ridge * Matrix::Identity(m, m);
    return NoiseCovariance{CovarianceMatrix(scatter),
                           {"detail coefficients are rank deficient (noise-free or dependent channels); "
                            "ridged sample covariance used"}};
  }
}

inline void zero_discarded(Matrix& block, const std::vector<std::uint8_t>& keep) {
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    if (!keep[static_cast<std::size_t>(i)]) block.row(i).setZero();
}

}  // namespace detail

/// Multiscale goodness-of-fit denoising. Detail coefficients whose window
/// statistic falls below the calibrated scale threshold are zeroed; the
/// coarsest approximation is passed through untouched.
inline DenoiseResult denoise(const Signal& x, const DenoiseConfig& config) {
  config.validate();
  const auto m = static_cast<std::size_t>(x.cols());
  if (m < 1) throw GeometryError("denoise: signal has no channels");
  const std::size_t L = config.window_l_for(m);

  auto dec = dwt_forward(x, make_filter(config.filter), config.levels, config.boundary);
  if (static_cast<std::size_t>(dec.details[0].rows()) < L + 1)
    throw GeometryError("denoise: signal is shorter than the window (L + 1 = " + std::to_string(L + 1) +
                        ") at every scale");
  for (const auto& block : dec.details)
    if (block.rows() < 2) throw GeometryError("denoise: coarsest detail block has fewer than 2 coefficients");

  DenoiseResult result;
  auto& report = result.report;
  report.window_l = L;

  const auto noise = detail::estimate_noise_covariance(detail::covariance_source(dec, config.covariance_scales), config);
  report.warnings = noise.warnings;
  const CovarianceMatrix& sigma = noise.sigma;
  report.sigma_hat = sigma.sigma();

  auto cal = calibrate_thresholds(sigma, x.rows(), config, derive_seed(config.seed, detail::kCalibrationStream));
  report.warnings.insert(report.warnings.end(), cal.warnings.begin(), cal.warnings.end());

  const ReferenceDistribution ref = make_reference(sigma, config);
  for (std::size_t k = 0; k < dec.details.size(); ++k) {
    ScaleReport sr;
    sr.scale = static_cast<int>(k + 1);
    sr.threshold = cal.thresholds[k];
    sr.tau = window_statistics(score_coefficients(dec.details[k], sigma, ref), L, config.ad_form, config.window_mode);
    sr.keep.resize(sr.tau.size());
    for (std::size_t i = 0; i < sr.tau.size(); ++i) {
      sr.keep[i] = gof_test(sr.tau[i], sr.threshold) == Decision::H1_signal ? 1 : 0;
      sr.retained += sr.keep[i];
    }
    detail::zero_discarded(dec.details[k], sr.keep);
    report.scales.push_back(std::move(sr));
  }
  result.denoised = dwt_inverse(dec);
  return result;
}

/// Reconstructs the denoised signal from the masks stored in a report.
inline Signal apply_masks(const Signal& x, const DenoiseReport& report, const DenoiseConfig& config) {
  auto dec = dwt_forward(x, make_filter(config.filter), config.levels, config.boundary);
  if (report.scales.size() != dec.details.size()) throw GeometryError("apply_masks: report has wrong number of scales");
  for (std::size_t k = 0; k < dec.details.size(); ++k) {
    if (report.scales[k].keep.size() != static_cast<std::size_t>(dec.details[k].rows()))
      throw GeometryError("apply_masks: mask length does not match scale " + std::to_string(k + 1));
    detail::zero_discarded(dec.details[k], report.scales[k].keep);
  }
  return dwt_inverse(dec);
}

// ---------------------------------------------------------------------------
// Universal-threshold baseline

enum class ThresholdRule { hard, soft };

/// Coordinates in which the baseline thresholds act.
///  channel:   threshold T_m applies to original channel m.
///  principal: coefficients are rotated into the noise-covariance eigenbasis,
///             thresholded per principal direction, and rotated back.
enum class BaselineBasis { channel, principal };

struct BaselineResult {
  Signal denoised;
  Matrix sigma_hat;
  /// T_m = sqrt(2 lambda_m log N), lambda_m the eigenvalues of the noise
  /// covariance in descending order.
  std::vector<double> thresholds;
};

inline double apply_threshold(double v, double t, ThresholdRule rule) {
  if (std::abs(v) < t) return 0.0;
  return rule == ThresholdRule::hard ? v : std::copysign(std::abs(v) - t, v);
}

inline std::vector<double> universal_thresholds(const CovarianceMatrix& sigma, std::size_t signal_length) {
  std::vector<double> t;
  const double log_n = std::log(static_cast<double>(signal_length));
  for (Eigen::Index i = 0; i < sigma.eigenvalues().size(); ++i) t.push_back(std::sqrt(2.0 * sigma.eigenvalues()(i) * log_n));
  return t;
}

inline void threshold_columns(Matrix& block, const std::vector<double>& thresholds, ThresholdRule rule) {
  for (Eigen::Index c = 0; c < block.cols(); ++c)
    for (Eigen::Index i = 0; i < block.rows(); ++i)
      block(i, c) = apply_threshold(block(i, c), thresholds[static_cast<std::size_t>(c)], rule);
}

/// Channel-wise universal-threshold denoising with thresholds taken from the
/// eigenvalues of the robust noise covariance.
inline BaselineResult baseline_universal(const Signal& x, const DenoiseConfig& config,
                                         ThresholdRule rule = ThresholdRule::hard,
                                         BaselineBasis basis = BaselineBasis::channel) {
  config.validate();
  auto dec = dwt_forward(x, make_filter(config.filter), config.levels, config.boundary);
  const auto noise = detail::estimate_noise_covariance(detail::covariance_source(dec, config.covariance_scales), config);
  const CovarianceMatrix& sigma = noise.sigma;
  BaselineResult out;
  out.sigma_hat = sigma.sigma();
  out.thresholds = universal_thresholds(sigma, static_cast<std::size_t>(x.rows()));
  const Matrix& vectors = sigma.eigenvectors();
  for (auto& block : dec.details) {
    if (basis == BaselineBasis::channel) {
      threshold_columns(block, out.thresholds, rule);
    } else {
      Matrix rotated = block * vectors;
      threshold_columns(rotated, out.thresholds, rule);
      block = rotated * vectors.transpose();
    }
  }
  out.denoised = dwt_inverse(dec);
  return out;
}

}  // namespace mvdenoise

#endif  // MVDENOISE_DENOISER_HPP_
