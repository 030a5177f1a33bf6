// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_ROBUSTCOV_HPP_
#define MVDENOISE_ROBUSTCOV_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/math/distributions/chi_squared.hpp>

#include "mvdenoise/common.hpp"

namespace mvdenoise {

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// (columns of `vectors`).
struct SpectralDecomposition {
  Vector values;
  Matrix vectors;

  /// Eigenvalues of the inverse matrix, in the order matching `vectors`.
  Vector inverse_values() const { return values.cwiseInverse(); }
};

namespace detail {

inline bool is_symmetric(const Matrix& a, double rel_tol = 1e-12) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

}  // namespace detail

/// Symmetric eigendecomposition with eigenvalues sorted descending.
inline SpectralDecomposition eigen(const Matrix& a) {
  if (!detail::is_symmetric(a)) throw InvalidArgument("eigen: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw InvalidArgument("eigen: decomposition failed");
  const auto m = a.rows();
  SpectralDecomposition out{Vector(m), Matrix(m, m)};
  // Eigen returns ascending order.
  for (Eigen::Index i = 0; i < m; ++i) {
    out.values(i) = solver.eigenvalues()(m - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
  }
  return out;
}

/// Symmetric positive-definite covariance with a cached spectral
/// decomposition and Cholesky factor for evaluating v^T Sigma^{-1} v.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(const Matrix& sigma) {
    if (sigma.rows() == 0 || sigma.rows() != sigma.cols())
      throw InvalidArgument("covariance must be a non-empty square matrix");
    if (!sigma.allFinite()) throw InvalidArgument("covariance has non-finite entries");
    if (!detail::is_symmetric(sigma)) throw InvalidArgument("covariance is not symmetric");
    sigma_ = 0.5 * (sigma + sigma.transpose());
    spectrum_ = eigen(sigma_);
    const double largest = spectrum_.values(0);
    const double smallest = spectrum_.values(spectrum_.values.size() - 1);
    if (!(smallest > 0.0) || smallest <= largest * 1e-14)
      throw SingularCovarianceError("covariance is not positive definite (smallest eigenvalue " +
                                    std::to_string(smallest) + ")");
    Eigen::LLT<Matrix> llt(sigma_);
    if (llt.info() != Eigen::Success) throw SingularCovarianceError("covariance Cholesky factorization failed");
    lower_ = llt.matrixL();
    whitener_ = lower_.triangularView<Eigen::Lower>().solve(Matrix::Identity(dims(), dims()));
  }

  Eigen::Index dims() const { return sigma_.rows(); }
  const Matrix& sigma() const { return sigma_; }
  /// Eigenvalues of Sigma, descending.
  const Vector& eigenvalues() const { return spectrum_.values; }
  const Matrix& eigenvectors() const { return spectrum_.vectors; }
  const SpectralDecomposition& spectrum() const { return spectrum_; }
  /// Lower Cholesky factor L with Sigma = L L^T.
  const Matrix& cholesky() const { return lower_; }
  /// L^{-1}; ||L^{-1} v||^2 = v^T Sigma^{-1} v.
  const Matrix& whitener() const { return whitener_; }

  double quadratic_form(const Vector& v) const {
    if (v.size() != dims()) throw InvalidArgument("quadratic_form: dimension mismatch");
    return (whitener_ * v).squaredNorm();
  }

  /// Squared Mahalanobis distance of every row of `rows`.
  std::vector<double> squared_distances(const Matrix& rows) const {
    if (rows.cols() != dims()) throw InvalidArgument("squared_distances: dimension mismatch");
    const Matrix white = rows * whitener_.transpose();
    std::vector<double> out(static_cast<std::size_t>(rows.rows()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out[static_cast<std::size_t>(i)] = white.row(i).squaredNorm();
    return out;
  }

 private:
  Matrix sigma_;
  SpectralDecomposition spectrum_;
  Matrix lower_;
  Matrix whitener_;
};

/// Unbiased covariance of zero-mean data: X^T X / (n - 1).
inline CovarianceMatrix sample_covariance(const Matrix& x) {
  if (x.rows() < 2) throw InvalidArgument("sample_covariance: need at least 2 rows");
  if (x.cols() < 1) throw InvalidArgument("sample_covariance: need at least 1 column");
  const Matrix s = (x.transpose() * x) / static_cast<double>(x.rows() - 1);
  return CovarianceMatrix(s);
}

// ---------------------------------------------------------------------------
// Minimum covariance determinant

struct McdOptions {
  int trials = 500;         // random elemental starts
  int initial_csteps = 2;   // C-steps applied to every start
  int candidates = 10;      // best starts refined to convergence
  int max_csteps = 100;
  /// One-step reweighting at the 0.975 chi-square quantile after the raw fit.
  bool reweight = true;
};

struct McdResult {
  CovarianceMatrix covariance;
  /// Consistency-corrected covariance of the optimal h-subset, before any reweighting.
  Matrix raw;
  std::vector<std::size_t> subset;
  std::size_t h = 0;
  double consistency_factor = 1.0;
  /// Set when the optimal subset was singular and a ridge was added.
  bool regularized = false;
};

namespace detail {

/// Scatter about the origin of the selected rows, divided by the count.
inline Matrix subset_scatter(const Matrix& x, const std::vector<std::size_t>& rows) {
  Matrix s = Matrix::Zero(x.cols(), x.cols());
  for (std::size_t r : rows) s.selfadjointView<Eigen::Lower>().rankUpdate(x.row(static_cast<Eigen::Index>(r)).transpose());
  s = s.selfadjointView<Eigen::Lower>();
  return s / static_cast<double>(rows.size());
}

/// log det of a symmetric PSD matrix; -inf when numerically singular.
inline double log_det(const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const Matrix& l = llt.matrixLLT();
  double acc = 0.0;
  const double trace = s.trace();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double d = l(i, i);
    if (!(d > 0.0) || d * d <= 1e-14 * trace) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * std::log(d);
  }
  return acc;
}

/// Indices of the h rows with the smallest squared distance under `s`.
inline std::vector<std::size_t> concentrate(const Matrix& x, const Matrix& s, std::size_t h) {
  Eigen::LLT<Matrix> llt(s);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> d(n);
  const Matrix white = llt.matrixL().solve(x.transpose());
  for (std::size_t i = 0; i < n; ++i) d[i] = white.col(static_cast<Eigen::Index>(i)).squaredNorm();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(h - 1), idx.end(),
                   [&](std::size_t a, std::size_t b) { return d[a] < d[b] || (d[a] == d[b] && a < b); });
  idx.resize(h);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct McdCandidate {
  std::vector<std::size_t> subset;
  Matrix scatter;
  double log_det = std::numeric_limits<double>::infinity();
  std::size_t trial = 0;
};

inline McdCandidate cstep_run(const Matrix& x, std::vector<std::size_t> subset, std::size_t h, int steps,
                              std::size_t trial) {
  McdCandidate c{std::move(subset), Matrix(), 0.0, trial};
  c.scatter = subset_scatter(x, c.subset);
  if (c.subset.size() != h) {
    // Elemental start: its determinant is not comparable with h-subsets, so
    // the first concentration step is unconditional.
    c.subset = concentrate(x, c.scatter, h);
    c.scatter = subset_scatter(x, c.subset);
    --steps;
  }
  c.log_det = log_det(c.scatter);
  for (int s = 0; s < steps && std::isfinite(c.log_det); ++s) {
    auto next = concentrate(x, c.scatter, h);
    if (next == c.subset) break;
    Matrix scatter = subset_scatter(x, next);
    const double ld = log_det(scatter);
    if (ld > c.log_det) break;  // C-steps never increase the determinant; stop on round-off
    c.subset = std::move(next);
    c.scatter = std::move(scatter);
    c.log_det = ld;
  }
  return c;
}

/// Multiplier making the h-subset scatter consistent for Gaussian data.
inline double mcd_consistency_factor(std::size_t h, std::size_t n, std::size_t m) {
  const double alpha = static_cast<double>(h) / static_cast<double>(n);
  if (alpha >= 1.0) return 1.0;
  const boost::math::chi_squared chi_m(static_cast<double>(m));
  const boost::math::chi_squared chi_m2(static_cast<double>(m + 2));
  const double q = boost::math::quantile(chi_m, alpha);
  return alpha / boost::math::cdf(chi_m2, q);
}

}  // namespace detail

/// FAST-MCD covariance about the origin (the rows are treated as zero-mean).
/// Deterministic for a given seed: trial t draws from substream derive_seed(seed, t).
inline McdResult mcd_estimate(const Matrix& x, std::uint64_t seed, const McdOptions& options = {}) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto m = static_cast<std::size_t>(x.cols());
  if (m < 1) throw InvalidArgument("mcd_estimate: need at least one column");
  if (n < 2 * (m + 1))
    throw InvalidArgument("mcd_estimate: need at least " + std::to_string(2 * (m + 1)) + " rows, got " +
                          std::to_string(n));
  if (!x.allFinite()) throw InvalidArgument("mcd_estimate: non-finite coefficient");
  {
    const Matrix full = x.transpose() * x;
    const double trace = full.trace();
    if (!(trace > 0.0) || detail::log_det(full / static_cast<double>(n)) == -std::numeric_limits<double>::infinity())
      throw SingularCovarianceError("mcd_estimate: data has rank < " + std::to_string(m));
  }

  const std::size_t h = (n + m + 1) / 2;
  const auto trials = static_cast<std::size_t>(std::max(1, options.trials));

  std::vector<detail::McdCandidate> starts(trials);
  parallel_for(trials, [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, t));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Partial Fisher-Yates: grow the elemental subset until it is nonsingular.
    std::size_t take = 0;
    auto draw_one = [&] {
      std::uniform_int_distribution<std::size_t> pick(take, n - 1);
      std::swap(perm[take], perm[pick(rng)]);
      ++take;
    };
    for (std::size_t i = 0; i < m + 1; ++i) draw_one();
    std::vector<std::size_t> subset(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(take));
    while (!std::isfinite(detail::log_det(detail::subset_scatter(x, subset))) && take < n) {
      draw_one();
      subset.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(take));
    }
    starts[t] = detail::cstep_run(x, std::move(subset), h, options.initial_csteps, t);
  });

  auto better = [](const detail::McdCandidate& a, const detail::McdCandidate& b) {
    return a.log_det < b.log_det || (a.log_det == b.log_det && a.trial < b.trial);
  };
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, options.candidates)), trials);
  std::partial_sort(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(keep), starts.end(), better);

  std::vector<detail::McdCandidate> refined(keep);
  parallel_for(keep, [&](std::size_t i) {
    refined[i] = detail::cstep_run(x, starts[i].subset, h, options.max_csteps, starts[i].trial);
  });
  const auto best = *std::min_element(refined.begin(), refined.end(), better);

  Matrix scatter = best.scatter;
  bool regularized = false;
  if (!std::isfinite(best.log_det)) {
    const double ridge = 1e-10 * std::max(scatter.trace(), std::numeric_limits<double>::min()) / static_cast<double>(m);
    scatter += ridge * Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    regularized = true;
  }
  const double factor = detail::mcd_consistency_factor(h, n, m);
  Matrix raw = factor * scatter;
  Matrix final_sigma = raw;

  if (options.reweight && !regularized) {
    const CovarianceMatrix raw_cov(raw);
    const auto d = raw_cov.squared_distances(x);
    const boost::math::chi_squared chi_m(static_cast<double>(m));
    const double cutoff = boost::math::quantile(chi_m, 0.975);
    std::vector<std::size_t> inliers;
    for (std::size_t i = 0; i < n; ++i)
      if (d[i] <= cutoff) inliers.push_back(i);
    if (inliers.size() > m) {
      const Matrix s = detail::subset_scatter(x, inliers);
      if (std::isfinite(detail::log_det(s))) {
        const boost::math::chi_squared chi_m2(static_cast<double>(m + 2));
        const double c2 = 0.975 / boost::math::cdf(chi_m2, cutoff);
        final_sigma = c2 * s;
      }
    }
  }

  return McdResult{CovarianceMatrix(final_sigma), raw, best.subset, h, factor, regularized};
}

}  // namespace mvdenoise

#endif  // MVDENOISE_ROBUSTCOV_HPP_
