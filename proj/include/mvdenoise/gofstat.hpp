// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_GOFSTAT_HPP_
#define MVDENOISE_GOFSTAT_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mvdenoise/common.hpp"
#include "mvdenoise/robustcov.hpp"

namespace mvdenoise {

namespace detail {
// Double-precision evaluation; the default policy promotes to long double.
using GammaPolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
}  // namespace detail

/// How the reference CDF/pdf is evaluated.
///  - gamma_closed_form: regularized incomplete gamma (a positive mixture of
///    gamma laws when the eigenvalues are not all equal).
///  - series: the alternating power series in the c_n coefficients, falling
///    back to the closed form when cancellation makes it unreliable.
enum class EvalMode { gamma_closed_form, series };

/// Law of y = sum_m lambda_m z_m^2 with z ~ N(0, I_M): the squared Mahalanobis
/// distance of a Gaussian vector, parameterised by the eigenvalues lambda of
/// A * Sigma_true for the quadratic form x^T A x. With A = Sigma^{-1} all
/// eigenvalues are 1 and the law is chi-square with M degrees of freedom.
class ReferenceDistribution {
 public:
  static constexpr int kMaxSeriesTerms = 200;
  /// Largest tolerated |term| in the alternating series.
  static constexpr double kMaxSeriesTerm = 1e8;
  /// Cancellation error of the long double sum, relative to its largest term.
  static constexpr long double kTermRoundoff = 1e-16L;

  ReferenceDistribution(std::vector<double> eigenvalues, EvalMode mode, bool allow_fallback = true)
      : eigenvalues_(std::move(eigenvalues)), mode_(mode), allow_fallback_(allow_fallback) {
    if (eigenvalues_.empty()) throw InvalidArgument("reference distribution needs at least one eigenvalue");
    for (double l : eigenvalues_)
      if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("reference eigenvalues must be positive and finite");
    half_dims_ = 0.5 * static_cast<double>(eigenvalues_.size());
    const auto [lo, hi] = std::minmax_element(eigenvalues_.begin(), eigenvalues_.end());
    equal_eigenvalues_ = (*hi - *lo) <= 1e-14 * *hi;
    build_series_coefficients();
    build_gamma_mixture();
  }

  /// chi-square law with `dims` degrees of freedom.
  static ReferenceDistribution chi_square(std::size_t dims, EvalMode mode = EvalMode::gamma_closed_form) {
    return ReferenceDistribution(std::vector<double>(dims, 1.0), mode);
  }

  std::size_t dims() const { return eigenvalues_.size(); }
  EvalMode mode() const { return mode_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  /// c_0 .. c_{kMaxSeriesTerms-1}.
  const std::vector<double>& series_coefficients() const { return c_; }
  /// h_1 .. h_{kMaxSeriesTerms-1}; index 0 is unused.
  const std::vector<double>& series_auxiliaries() const { return h_; }

  double cdf(double t) const {
    check_argument(t);
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    if (mode_ == EvalMode::series) {
      if (auto v = series_cdf(t)) return *v;
      if (!allow_fallback_) throw SeriesDivergenceError("reference_cdf: series diverged at t=" + std::to_string(t));
    }
    return closed_cdf(t);
  }

  double pdf(double y) const {
    check_argument(y);
    if (std::isinf(y)) return 0.0;
    if (y == 0.0) {
      if (dims() == 1) return std::numeric_limits<double>::infinity();
      if (dims() == 2) return c_[0];
      return 0.0;
    }
    if (mode_ == EvalMode::series) {
      if (auto v = series_pdf(y)) return *v;
      if (!allow_fallback_) throw SeriesDivergenceError("reference_pdf: series diverged at y=" + std::to_string(y));
    }
    return closed_pdf(y);
  }

  /// Literal series evaluation; nullopt when it does not converge reliably.
  std::optional<double> series_cdf(double t) const { return series(t, /*density=*/false); }
  std::optional<double> series_pdf(double y) const { return series(y, /*density=*/true); }

  double closed_cdf(double t) const {
    if (t <= 0.0) return 0.0;
    if (equal_eigenvalues_) return boost::math::gamma_p(half_dims_, t / (2.0 * beta_), detail::GammaPolicy());
    const double x = t / (2.0 * beta_);
    double acc = 0.0;
    for (std::size_t k = 0; k < mixture_.size(); ++k) acc += mixture_[k] * boost::math::gamma_p(half_dims_ + static_cast<double>(k), x, detail::GammaPolicy());
    return std::clamp(acc, 0.0, 1.0);
  }

  double closed_pdf(double y) const {
    if (y <= 0.0) return pdf(0.0);
    const double x = y / (2.0 * beta_);
    double acc = 0.0;
    for (std::size_t k = 0; k < mixture_.size(); ++k)
      acc += mixture_[k] * boost::math::gamma_p_derivative(half_dims_ + static_cast<double>(k), x, detail::GammaPolicy());
    return acc / (2.0 * beta_);
  }

 private:
  static void check_argument(double t) {
    if (std::isnan(t) || t < 0.0) throw InvalidArgument("reference distribution evaluated at negative argument");
  }

  void build_series_coefficients() {
    std::vector<long double> h(kMaxSeriesTerms, 0.0L);
    c_ext_.assign(kMaxSeriesTerms, 0.0L);
    long double c0 = 1.0L;
    for (double l : eigenvalues_) c0 /= std::sqrt(2.0L * l);
    c_ext_[0] = c0;
    for (int n = 1; n < kMaxSeriesTerms; ++n) {
      long double hn = 0.0L;
      for (double l : eigenvalues_) hn += std::pow(2.0L * l, static_cast<long double>(-n));
      h[static_cast<std::size_t>(n)] = 0.5L * hn;
    }
    for (int n = 1; n < kMaxSeriesTerms; ++n) {
      long double acc = 0.0L;
      for (int r = 0; r < n; ++r) acc += h[static_cast<std::size_t>(n - r)] * c_ext_[static_cast<std::size_t>(r)];
      c_ext_[static_cast<std::size_t>(n)] = acc / n;
    }
    c_.assign(c_ext_.begin(), c_ext_.end());
    h_.assign(h.begin(), h.end());
  }

  // Positive-weight gamma mixture with scale parameter beta = min eigenvalue:
  // F(t) = sum_k a_k P(M/2 + k, t / (2 beta)), sum_k a_k = 1.
  void build_gamma_mixture() {
    beta_ = *std::min_element(eigenvalues_.begin(), eigenvalues_.end());
    mixture_.clear();
    if (equal_eigenvalues_) {
      mixture_.push_back(1.0);
      return;
    }
    double a0 = 1.0;
    for (double l : eigenvalues_) a0 *= std::sqrt(beta_ / l);
    mixture_.push_back(a0);
    std::vector<double> g{0.0};
    double total = a0;
    constexpr std::size_t kMaxTerms = 20000;
    for (std::size_t k = 1; k < kMaxTerms && total < 1.0 - 1e-15; ++k) {
      double gk = 0.0;
      for (double l : eigenvalues_) gk += std::pow(1.0 - beta_ / l, static_cast<double>(k));
      g.push_back(0.5 * gk);
      double acc = 0.0;
      for (std::size_t r = 0; r < k; ++r) acc += g[k - r] * mixture_[r];
      const double ak = acc / static_cast<double>(k);
      mixture_.push_back(ak);
      total += ak;
      if (ak < 1e-300) break;
    }
  }

  std::optional<double> series(double t, bool density) const {
    if (t == 0.0) {
      if (!density) return 0.0;
      return dims() == 1 ? std::numeric_limits<double>::infinity() : (dims() == 2 ? c_[0] : 0.0);
    }
    const long double log_t = std::log(static_cast<long double>(t));
    long double sum = 0.0L;
    long double peak = 0.0L;
    long double previous = std::numeric_limits<long double>::infinity();
    auto finish = [&](long double v) -> double {
      const auto d = static_cast<double>(v);
      return density ? std::max(d, 0.0) : std::clamp(d, 0.0, 1.0);
    };
    for (int n = 0; n < kMaxSeriesTerms; ++n) {
      const long double c = c_ext_[static_cast<std::size_t>(n)];
      if (c == 0.0L) return finish(sum);
      const long double power = half_dims_ + n - (density ? 1.0L : 0.0L);
      const long double mag = std::exp(std::log(c) + power * log_t - std::lgamma(power + 1.0L));
      if (!std::isfinite(mag)) return std::nullopt;
      peak = std::max(peak, mag);
      if (peak > kMaxSeriesTerm) return std::nullopt;
      sum += (n % 2 == 0) ? mag : -mag;
      if (n > 0 && mag < previous && mag < 1e-12L * std::abs(sum)) {
        // Reject a converged sum whose cancellation error could swamp it:
        // a CDF must resolve min(F, 1 - F) to 1e-3, a density to 1e-6.
        const long double error = peak * kTermRoundoff;
        const long double scale = density ? 1e-6L * std::abs(sum) : 1e-3L * std::min(sum, 1.0L - sum);
        if (!(error <= scale)) return std::nullopt;
        return finish(sum);
      }
      previous = mag;
    }
    return std::nullopt;
  }

  std::vector<double> eigenvalues_;
  EvalMode mode_;
  bool allow_fallback_;
  double half_dims_ = 0.0;
  bool equal_eigenvalues_ = false;
  std::vector<double> c_;
  std::vector<long double> c_ext_;
  std::vector<double> h_;
  double beta_ = 1.0;
  std::vector<double> mixture_;
};

// ---------------------------------------------------------------------------
// Mahalanobis EDF

/// Ascending squared Mahalanobis distances of the rows of a window.
class MahalanobisEdf {
 public:
  MahalanobisEdf() = default;
  explicit MahalanobisEdf(std::vector<double> values) : sorted_(std::move(values)) {
    for (double v : sorted_)
      if (!(v >= 0.0)) throw InvalidArgument("Mahalanobis EDF values must be nonnegative");
    std::sort(sorted_.begin(), sorted_.end());
  }

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

  /// Fraction of samples <= t.
  double operator()(double t) const {
    if (sorted_.empty()) return 0.0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }

 private:
  std::vector<double> sorted_;
};

inline MahalanobisEdf mahalanobis_edf(const Matrix& window, const CovarianceMatrix& sigma) {
  if (window.rows() < 2) throw InvalidArgument("mahalanobis_edf: window needs at least 2 rows");
  return MahalanobisEdf(sigma.squared_distances(window));
}

// ---------------------------------------------------------------------------
// Anderson-Darling statistic

enum class AdForm {
  /// tau = -n - (1/n) sum_l (2l-1) [ln F(y_(l)) + ln(1 - F(y_(n+1-l)))]
  standard,
  /// Printed variant: tau = (n-1) - sum_l (2l-1)/(n-1) [ln F(y_(l)) - ln F(y_(n+1-l))],
  /// kept for comparison only.
  literal,
};

inline constexpr double kCdfClampLow = 1e-15;
inline constexpr double kCdfClampHigh = 1.0 - 1e-15;

inline double clamp_cdf(double f) {
  if (std::isnan(f)) return kCdfClampLow;
  return std::clamp(f, kCdfClampLow, kCdfClampHigh);
}

/// AD statistic from per-sample log terms already sorted by y ascending:
/// log_f[l] = ln F(y_(l)), log_sf[l] = ln(1 - F(y_(l))).
inline double ad_from_sorted_logs(std::span<const double> log_f, std::span<const double> log_sf,
                                  AdForm form = AdForm::standard) {
  const std::size_t n = log_f.size();
  if (n < 2 || log_sf.size() != n) throw InvalidArgument("ad_statistic: need at least 2 samples");
  const double dn = static_cast<double>(n);
  double acc = 0.0;
  if (form == AdForm::standard) {
    for (std::size_t l = 0; l < n; ++l) {
      const double w = static_cast<double>(2 * l + 1);
      acc += w * log_f[l] + (2.0 * dn - w) * log_sf[l];
    }
    return -dn - acc / dn;
  }
  for (std::size_t l = 0; l < n; ++l)
    acc += static_cast<double>(2 * l + 1) * (log_f[l] - log_f[n - 1 - l]);
  return (dn - 1.0) - acc / (dn - 1.0);
}

inline double ad_statistic(const MahalanobisEdf& edf, const ReferenceDistribution& dist,
                           AdForm form = AdForm::standard) {
  const std::size_t n = edf.size();
  if (n < 2) throw InvalidArgument("ad_statistic: need at least 2 samples");
  std::vector<double> log_f(n), log_sf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = clamp_cdf(dist.cdf(edf.sorted()[i]));
    log_f[i] = std::log(f);
    log_sf[i] = std::log1p(-f);
  }
  return ad_from_sorted_logs(log_f, log_sf, form);
}

enum class Decision { H0_noise, H1_signal };

inline std::string_view to_string(Decision d) { return d == Decision::H0_noise ? "H0" : "H1"; }

/// Ties go to H1 so that a coefficient at the threshold is retained.
inline Decision gof_test(double tau, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("gof_test: threshold must be positive");
  return tau < threshold ? Decision::H0_noise : Decision::H1_signal;
}

}  // namespace mvdenoise

#endif  // MVDENOISE_GOFSTAT_HPP_
