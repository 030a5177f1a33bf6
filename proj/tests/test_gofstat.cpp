// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "mvdenoise/denoiser.hpp"
#include "mvdenoise/gofstat.hpp"

namespace mvdenoise {
namespace {

// ---------------------------------------------------------------------------
// Oracles built from elementary functions only.

double chi2_cdf(int m, double t) {
  if (t <= 0.0) return 0.0;
  const double x = t / 2.0;
  if (m % 2 == 0) {
    double term = 1.0, sum = 0.0;
    for (int k = 0; k < m / 2; ++k) {
      sum += term;
      term *= x / (k + 1);
    }
    return 1.0 - std::exp(-x) * sum;
  }
  double p = std::erf(std::sqrt(x));  // P(1/2, x)
  for (double a = 0.5; a < m / 2.0 - 0.25; a += 1.0) p -= std::exp(a * std::log(x) - x - std::lgamma(a + 1.0));
  return p;
}

double chi2_pdf(int m, double y) {
  const double k = m / 2.0;
  return std::exp((k - 1.0) * std::log(y) - y / 2.0 - k * std::log(2.0) - std::lgamma(k));
}

double chi2_quantile(int m, double p) {
  double lo = 0.0, hi = 1.0;
  while (chi2_cdf(m, hi) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf(m, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double ad_oracle(std::vector<double> y, int m) {
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(y.size());
  double s = 0.0;
  for (std::size_t l = 1; l <= y.size(); ++l) {
    const double fl = std::clamp(chi2_cdf(m, y[l - 1]), 1e-15, 1.0 - 1e-15);
    const double fr = std::clamp(chi2_cdf(m, y[y.size() - l]), 1e-15, 1.0 - 1e-15);
    s += (2.0 * static_cast<double>(l) - 1.0) * (std::log(fl) + std::log(1.0 - fr));
  }
  return -n - s / n;
}

// CDF of l1 z1^2 + l2 z2^2 by one-dimensional quadrature (substitution u = s^2).
double two_term_cdf(double l1, double l2, double t) {
  const double upper = std::sqrt(t / l1);
  const int n = 20000;
  const double h = upper / n;
  auto f = [&](double s) {
    const double rest = std::max(0.0, (t - l1 * s * s) / (2.0 * l2));
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-s * s / 2.0) * std::erf(std::sqrt(rest));
  };
  double acc = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

Matrix gaussian(Eigen::Index n, Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix z(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < m; ++c) z(i, c) = nd(rng);
  return z;
}

// ---------------------------------------------------------------------------

TEST(ReferenceCdf, ClosedFormMatchesIncompleteGammaOracle) {
  for (int m : {1, 2, 3, 4, 5, 6, 8}) {
    const auto d = ReferenceDistribution::chi_square(static_cast<std::size_t>(m));
    const double tmax = m + 6.0 * std::sqrt(2.0 * m);
    for (int i = 0; i <= 200; ++i) {
      const double t = tmax * i / 200.0;
      EXPECT_NEAR(d.cdf(t), chi2_cdf(m, t), 1e-10) << "M=" << m << " t=" << t;
    }
  }
}

TEST(ReferenceCdf, SeriesModeMatchesOracle) {
  for (int m : {2, 3, 4, 6}) {
    const auto d = ReferenceDistribution::chi_square(static_cast<std::size_t>(m), EvalMode::series);
    const double tmax = m + 6.0 * std::sqrt(2.0 * m);
    for (int i = 0; i < 200; ++i) {
      const double t = tmax * i / 199.0;
      const auto s = d.series_cdf(t);
      ASSERT_TRUE(s.has_value()) << "series did not converge at M=" << m << " t=" << t;
      EXPECT_NEAR(*s, chi2_cdf(m, t), 1e-6) << "M=" << m << " t=" << t;
    }
  }
}

TEST(ReferenceCdf, Examples) {
  EXPECT_EQ(ReferenceDistribution::chi_square(3).cdf(0.0), 0.0);
  EXPECT_NEAR(ReferenceDistribution::chi_square(2).cdf(2.0), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_NEAR(ReferenceDistribution::chi_square(3).cdf(3.0), 0.6083748237289110, 1e-10);
  EXPECT_NEAR(ReferenceDistribution::chi_square(3, EvalMode::series).cdf(3.0), 0.6083748237289110, 1e-8);
  EXPECT_THROW(ReferenceDistribution::chi_square(2).cdf(-0.1), InvalidArgument);
}

TEST(ReferenceCdf, MonotoneAndReachesOne) {
  for (int m : {2, 3, 5}) {
    for (EvalMode mode : {EvalMode::gamma_closed_form, EvalMode::series}) {
      const auto d = ReferenceDistribution::chi_square(static_cast<std::size_t>(m), mode);
      const double far = m + 20.0 * std::sqrt(2.0 * m);
      double prev = 0.0;
      for (int i = 0; i <= 400; ++i) {
        const double v = d.cdf(far * i / 400.0);
        EXPECT_GE(v, prev);
        prev = v;
      }
      EXPECT_GE(d.cdf(far), 0.999);
    }
  }
}

TEST(ReferencePdf, ExamplesAndOracle) {
  EXPECT_NEAR(ReferenceDistribution::chi_square(2).pdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(ReferenceDistribution::chi_square(2, EvalMode::series).pdf(0.0), 0.5, 1e-15);
  EXPECT_EQ(ReferenceDistribution::chi_square(3).pdf(0.0), 0.0);
  EXPECT_EQ(ReferenceDistribution::chi_square(6).pdf(0.0), 0.0);
  for (int m : {2, 3, 4, 7})
    for (double y : {0.1, 1.0, 3.3, 9.0})
      EXPECT_NEAR(ReferenceDistribution::chi_square(static_cast<std::size_t>(m)).pdf(y), chi2_pdf(m, y), 1e-12);
}

TEST(ReferencePdf, IntegratesToOne) {
  for (EvalMode mode : {EvalMode::gamma_closed_form, EvalMode::series}) {
    const auto d = ReferenceDistribution::chi_square(4, mode);
    const int n = 20000;
    const double h = 50.0 / n;
    double acc = d.pdf(0.0) + d.pdf(50.0);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * d.pdf(i * h);
    EXPECT_NEAR(acc * h / 3.0, 1.0, 1e-6);
  }
}

TEST(ReferencePdf, IsDerivativeOfCdf) {
  for (EvalMode mode : {EvalMode::gamma_closed_form, EvalMode::series}) {
    for (std::size_t m : {2u, 3u, 5u}) {
      const auto d = ReferenceDistribution::chi_square(m, mode);
      for (double y : {0.5, 1.5, 4.0, 8.0}) {
        const double h = 1e-4;
        EXPECT_NEAR((d.cdf(y + h) - d.cdf(y - h)) / (2 * h), d.pdf(y), 1e-5) << m << " " << y;
      }
    }
  }
}

TEST(ReferenceDistributionTest, SeriesCoefficientsStartFromEigenvalues) {
  const ReferenceDistribution d({0.5, 2.0}, EvalMode::series);
  // c_0 = prod (2 lambda)^(-1/2); h_1 = (1/2) sum (2 lambda)^(-1).
  EXPECT_NEAR(d.series_coefficients()[0], 0.5, 1e-15);
  EXPECT_NEAR(d.series_auxiliaries()[1], 0.625, 1e-15);
}

TEST(ReferenceDistributionTest, UnequalEigenvaluesMatchQuadratureOracle) {
  const double l1 = 0.7, l2 = 1.9;
  const ReferenceDistribution closed({l1, l2}, EvalMode::gamma_closed_form);
  const ReferenceDistribution series({l1, l2}, EvalMode::series);
  for (double t : {0.2, 1.0, 2.5, 5.0, 9.0}) {
    const double oracle = two_term_cdf(l1, l2, t);
    EXPECT_NEAR(closed.cdf(t), oracle, 1e-6) << t;
    EXPECT_NEAR(series.cdf(t), oracle, 1e-6) << t;
  }
}

TEST(ReferenceDistributionTest, DivergenceIsDetected) {
  const ReferenceDistribution strict(std::vector<double>(3, 1.0), EvalMode::series, /*allow_fallback=*/false);
  EXPECT_FALSE(strict.series_cdf(400.0).has_value());
  EXPECT_THROW(strict.cdf(400.0), SeriesDivergenceError);
  const auto lenient = ReferenceDistribution::chi_square(3, EvalMode::series);
  EXPECT_NEAR(lenient.cdf(400.0), 1.0, 1e-12);
}

TEST(ReferenceDistributionTest, RejectsBadEigenvalues) {
  EXPECT_THROW(ReferenceDistribution({}, EvalMode::series), InvalidArgument);
  EXPECT_THROW(ReferenceDistribution({1.0, 0.0}, EvalMode::series), InvalidArgument);
}

TEST(MahalanobisEdfTest, Examples) {
  const CovarianceMatrix id2(Matrix::Identity(2, 2));
  const auto zero = mahalanobis_edf(Matrix::Zero(5, 2), id2);
  for (double y : zero.sorted()) EXPECT_EQ(y, 0.0);
  EXPECT_EQ(zero(0.0), 1.0);
  EXPECT_EQ(zero(3.0), 1.0);

  Matrix rows(3, 1);
  rows << 1, -2, 3;
  const auto e = mahalanobis_edf(rows, CovarianceMatrix(Matrix::Identity(1, 1)));
  EXPECT_EQ(e.sorted(), (std::vector<double>{1.0, 4.0, 9.0}));
  EXPECT_DOUBLE_EQ(e(0.5), 0.0);
  EXPECT_DOUBLE_EQ(e(4.0), 2.0 / 3.0);

  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 4.0;
  s(1, 1) = 1.0;
  Matrix r(2, 2);
  r << 2, 0, 0, 0;
  EXPECT_NEAR(mahalanobis_edf(r, CovarianceMatrix(s)).sorted()[1], 1.0, 1e-15);
  EXPECT_THROW(mahalanobis_edf(Matrix::Zero(1, 2), id2), InvalidArgument);
}

TEST(AdStatistic, PerfectlyPlacedQuantilesGiveSmallTau) {
  constexpr int kM = 3;
  std::vector<double> y;
  for (int i = 1; i <= 100; ++i) y.push_back(chi2_quantile(kM, (i - 0.5) / 100.0));
  const double tau = ad_statistic(MahalanobisEdf(y), ReferenceDistribution::chi_square(kM));
  EXPECT_LT(tau, 0.4);
  EXPECT_NEAR(tau, ad_oracle(y, kM), 1e-9);
}

TEST(AdStatistic, MatchesOracleOnRandomWindows) {
  std::mt19937_64 rng(4);
  const auto ref = ReferenceDistribution::chi_square(2);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix x = gaussian(57, 2, rng) * (rep % 3 == 0 ? 1.7 : 1.0);
    const auto edf = mahalanobis_edf(x, CovarianceMatrix(Matrix::Identity(2, 2)));
    EXPECT_NEAR(ad_statistic(edf, ref), ad_oracle(edf.sorted(), 2), 1e-9);
  }
}

TEST(AdStatistic, LiteralFormFollowsPrintedFormula) {
  std::vector<double> y = {0.3, 1.1, 2.0, 2.2, 4.5, 7.0};
  const auto ref = ReferenceDistribution::chi_square(2);
  const double n = 6.0;
  double s = 0.0;
  for (int l = 1; l <= 6; ++l)
    s += (2.0 * l - 1.0) / (n - 1.0) * (std::log(chi2_cdf(2, y[l - 1])) - std::log(chi2_cdf(2, y[6 - l])));
  EXPECT_NEAR(ad_statistic(MahalanobisEdf(y), ref, AdForm::literal), (n - 1.0) - s, 1e-12);
}

TEST(AdStatistic, TailWindowIsLargeAndFinite) {
  const auto ref = ReferenceDistribution::chi_square(2);
  const double t = chi2_quantile(2, 1.0 - 1e-10);
  const double tau = ad_statistic(MahalanobisEdf(std::vector<double>(20, t)), ref);
  EXPECT_TRUE(std::isfinite(tau));
  EXPECT_GT(tau, 100.0);
}

TEST(AdStatistic, ClampKeepsExtremeWindowsFinite) {
  const auto ref = ReferenceDistribution::chi_square(3);
  for (const auto& y : {std::vector<double>(10, 0.0), std::vector<double>(10, 1e6), std::vector<double>{0.0, 1e-300, 1e300, 1e6},
                        std::vector<double>{0.0, 0.0, 1e308, 1e308}}) {
    for (AdForm form : {AdForm::standard, AdForm::literal}) {
      const double tau = ad_statistic(MahalanobisEdf(y), ref, form);
      EXPECT_TRUE(std::isfinite(tau));
    }
  }
  EXPECT_EQ(clamp_cdf(0.0), 1e-15);
  EXPECT_EQ(clamp_cdf(1.0), 1.0 - 1e-15);
  EXPECT_EQ(clamp_cdf(std::nan("")), 1e-15);
}

TEST(AdStatistic, PermutationInvariantBitForBit) {
  std::mt19937_64 rng(5);
  Matrix x = gaussian(40, 3, rng);
  const CovarianceMatrix sigma(Matrix::Identity(3, 3));
  const auto ref = ReferenceDistribution::chi_square(3);
  const double tau = ad_statistic(mahalanobis_edf(x, sigma), ref);
  std::vector<Eigen::Index> perm(40);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix y(40, 3);
  for (Eigen::Index i = 0; i < 40; ++i) y.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
  EXPECT_EQ(ad_statistic(mahalanobis_edf(y, sigma), ref), tau);
}

TEST(AdStatistic, AffineInvariance) {
  std::mt19937_64 rng(6);
  Matrix sigma(3, 3);
  sigma << 2, 0.5, 0.1, 0.5, 1, -0.2, 0.1, -0.2, 0.7;
  const Matrix x = gaussian(30, 3, rng);
  Matrix a(3, 3);
  a << 1.5, -0.3, 2.0, 0.1, 0.9, 0.0, -1.0, 0.4, 3.0;
  const auto e1 = mahalanobis_edf(x, CovarianceMatrix(sigma));
  const Matrix s2 = a * sigma * a.transpose();
  const auto e2 = mahalanobis_edf(x * a.transpose(), CovarianceMatrix(0.5 * (s2 + s2.transpose())));
  for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_NEAR(e1.sorted()[i], e2.sorted()[i], 1e-10 * std::max(1.0, e1.sorted()[i]));
}

TEST(AdStatistic, NullPercentileReproducibleAcrossSeeds) {
  const auto ref = ReferenceDistribution::chi_square(2);
  const CovarianceMatrix id(Matrix::Identity(2, 2));
  auto percentile = [&](std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> tau;
    for (int r = 0; r < 10000; ++r) tau.push_back(ad_statistic(mahalanobis_edf(gaussian(57, 2, rng), id), ref));
    return empirical_quantile(tau, 0.995);
  };
  const double a = percentile(1), b = percentile(2);
  EXPECT_LT(std::abs(a - b), 0.05 * std::min(a, b));
}

TEST(AdStatistic, MedianGrowsWithOffset) {
  const auto ref = ReferenceDistribution::chi_square(2);
  const CovarianceMatrix id(Matrix::Identity(2, 2));
  double prev = -1.0;
  for (double offset : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    std::mt19937_64 rng(12);
    std::vector<double> tau;
    for (int r = 0; r < 1000; ++r) {
      Matrix x = gaussian(57, 2, rng);
      x.col(0).array() += offset / std::sqrt(2.0);
      x.col(1).array() += offset / std::sqrt(2.0);
      tau.push_back(ad_statistic(mahalanobis_edf(x, id), ref));
    }
    const double med = empirical_quantile(tau, 0.5);
    EXPECT_GE(med, prev) << offset;
    prev = med;
  }
}

TEST(GofTest, DecisionRule) {
  EXPECT_EQ(gof_test(0.1, 1.0), Decision::H0_noise);
  EXPECT_EQ(gof_test(1.0, 1.0), Decision::H1_signal);
  EXPECT_EQ(gof_test(5.3, 2.1), Decision::H1_signal);
  EXPECT_THROW(gof_test(1.0, 0.0), InvalidArgument);
  EXPECT_EQ(to_string(Decision::H0_noise), "H0");
}

}  // namespace
}  // namespace mvdenoise
