// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mvdenoise/siggen.hpp"
#include "mvdenoise/wavelet.hpp"

namespace mvdenoise {
namespace {

Signal random_signal(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Signal x(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < m; ++c) x(i, c) = nd(rng);
  return x;
}

double energy(const WaveletDecomposition& d) {
  double e = d.approx.squaredNorm();
  for (const auto& b : d.details) e += b.squaredNorm();
  return e;
}

Signal ramp_sine(Eigen::Index n) {
  Signal x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = std::sin(0.7 * static_cast<double>(i)) + 0.1 * static_cast<double>(i);
  return x;
}

class FilterTest : public ::testing::TestWithParam<const char*> {};

TEST_P(FilterTest, SatisfiesOrthonormalityInvariants) {
  const WaveletFilter w = make_filter(GetParam());
  const auto& h = w.lowpass;
  double sum = 0.0;
  for (double v : h) sum += v;
  EXPECT_NEAR(sum, std::sqrt(2.0), 1e-10);
  for (std::size_t shift = 0; shift < h.size(); shift += 2) {
    double dot = 0.0;
    for (std::size_t k = 0; k + shift < h.size(); ++k) dot += h[k] * h[k + shift];
    EXPECT_NEAR(dot, shift == 0 ? 1.0 : 0.0, 1e-10) << "shift " << shift;
  }
  // Highpass is orthogonal to lowpass at every even shift.
  for (std::size_t shift = 0; shift < h.size(); shift += 2) {
    double dot = 0.0;
    for (std::size_t k = 0; k + shift < h.size(); ++k) dot += h[k + shift] * w.highpass[k];
    EXPECT_NEAR(dot, 0.0, 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Filters, FilterTest, ::testing::Values("haar", "db1", "db8"));

TEST(Wavelet, Db8HasSixteenTapsAndEightVanishingMoments) {
  const WaveletFilter w = make_filter("db8");
  ASSERT_EQ(w.length(), 16u);
  // Vanishing moments of the highpass: sum_k k^p g[k] = 0 for p < 8.
  for (int p = 0; p < 8; ++p) {
    double m = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      const double term = std::pow(static_cast<double>(k), p) * w.highpass[k];
      m += term;
      scale += std::abs(term);
    }
    EXPECT_LT(std::abs(m), 1e-9 * scale) << "moment " << p;
  }
}

TEST(Wavelet, UnknownFilterRejected) { EXPECT_THROW(make_filter("sym4"), InvalidArgument); }

TEST(Wavelet, MatchesReferencePeriodizationCoefficients) {
  // Frozen from an independent implementation (pywt.dwt, mode="periodization").
  const auto dec = dwt_forward(ramp_sine(32), make_filter("db8"), 1, Boundary::periodic);
  ASSERT_EQ(dec.approx.rows(), 16);
  EXPECT_NEAR(dec.approx(0, 0), 3.4106157619428812, 1e-12);
  EXPECT_NEAR(dec.approx(1, 0), 6.1631489125661147, 1e-12);
  EXPECT_NEAR(dec.approx(2, 0), 3.4502796343551689, 1e-12);
  EXPECT_NEAR(dec.details[0](0, 0), -0.20477171892707996, 1e-12);
  EXPECT_NEAR(dec.details[0](1, 0), 0.05196512305628842, 1e-12);
  EXPECT_NEAR(dec.details[0](2, 0), 0.0079493742997859135, 1e-12);
}

TEST(Wavelet, MatchesReferenceSymmetricCoefficients) {
  // Frozen from pywt.dwt, mode="symmetric".
  const auto dec = dwt_forward(ramp_sine(32), make_filter("db8"), 1, Boundary::symmetric);
  ASSERT_EQ(dec.approx.rows(), 23);
  EXPECT_NEAR(dec.approx(0, 0), 3.0020751113620139, 1e-12);
  EXPECT_NEAR(dec.approx(1, 0), 1.4648599360758259, 1e-12);
  EXPECT_NEAR(dec.approx(2, 0), -0.31722542693294109, 1e-12);
}

TEST(Wavelet, ConstantSignalHasZeroHaarDetails) {
  const Signal x = Signal::Constant(64, 2, 3.25);
  const auto dec = dwt_forward(x, make_filter("haar"), 4);
  for (const auto& b : dec.details) EXPECT_LT(b.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Wavelet, DyadicBlockShapes) {
  const auto dec = dwt_forward(random_signal(16, 2, 1), make_filter("haar"), 2);
  ASSERT_EQ(dec.details.size(), 2u);
  EXPECT_EQ(dec.details[0].rows(), 8);
  EXPECT_EQ(dec.details[1].rows(), 4);
  EXPECT_EQ(dec.approx.rows(), 4);
  EXPECT_EQ(dec.approx.cols(), 2);
}

TEST(Wavelet, NonDyadicLengthIsPaddedAndTrimmed) {
  const Signal x = random_signal(1000, 3, 2);
  const auto dec = dwt_forward(x, make_filter("db8"), 5);
  EXPECT_EQ(dec.original_length, 1000u);
  EXPECT_EQ(dec.padded_length % 32, 0u);
  EXPECT_GE(dec.padded_length, 1000u);
  for (std::size_t k = 0; k < dec.details.size(); ++k)
    EXPECT_EQ(static_cast<std::size_t>(dec.details[k].rows()), dec.padded_length >> (k + 1));
  const Signal y = dwt_inverse(dec);
  ASSERT_EQ(y.rows(), 1000);
  EXPECT_LE((y - x).cwiseAbs().maxCoeff(), 1e-10 * x.cwiseAbs().maxCoeff());
}

TEST(Wavelet, PerfectReconstructionBothBoundaries) {
  for (const char* f : {"haar", "db8"}) {
    for (Boundary b : {Boundary::periodic, Boundary::symmetric}) {
      for (Eigen::Index n : {64, 333, 2048}) {
        const Signal x = random_signal(n, 4, static_cast<std::uint64_t>(n));
        const auto dec = dwt_forward(x, make_filter(f), 5, b);
        const Signal y = dwt_inverse(dec);
        EXPECT_LE((y - x).cwiseAbs().maxCoeff(), 1e-8 * x.cwiseAbs().maxCoeff()) << f << " " << to_string(b) << " " << n;
      }
    }
  }
}

TEST(Wavelet, ParsevalInPeriodicMode) {
  for (const char* f : {"haar", "db8"}) {
    const Signal x = random_signal(4096, 3, 9);
    const auto dec = dwt_forward(x, make_filter(f), 5);
    EXPECT_NEAR(energy(dec) / x.squaredNorm(), 1.0, 1e-10);
  }
}

TEST(Wavelet, ZeroDecompositionGivesZeroSignal) {
  auto dec = dwt_forward(random_signal(256, 2, 3), make_filter("db8"), 4);
  for (auto& b : dec.details) b.setZero();
  dec.approx.setZero();
  EXPECT_EQ(dwt_inverse(dec).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Wavelet, SingleCoefficientSynthesizesUnitEnergyAtom) {
  auto dec = dwt_forward(Signal::Zero(256, 1), make_filter("db8"), 4);
  dec.details[2](5, 0) = 1.0;
  EXPECT_NEAR(dwt_inverse(dec).squaredNorm(), 1.0, 1e-10);
  dec.details[2](5, 0) = 0.0;
  dec.approx(3, 0) = 1.0;
  EXPECT_NEAR(dwt_inverse(dec).squaredNorm(), 1.0, 1e-10);
}

TEST(Wavelet, ChannelsAreTransformedIndependently) {
  const Signal x = random_signal(512, 3, 4);
  const auto joint = dwt_forward(x, make_filter("db8"), 5);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const auto single = dwt_forward(Signal(x.col(c)), make_filter("db8"), 5);
    for (std::size_t k = 0; k < joint.details.size(); ++k)
      EXPECT_TRUE(joint.details[k].col(c) == single.details[k].col(0));
    EXPECT_TRUE(joint.approx.col(c) == single.approx.col(0));
  }
}

TEST(Wavelet, ErrorsAreReported) {
  EXPECT_THROW(dwt_forward(random_signal(16, 1, 1), make_filter("haar"), 0), InvalidArgument);
  EXPECT_THROW(dwt_forward(random_signal(8, 1, 1), make_filter("haar"), 5), GeometryError);
  Signal bad = random_signal(64, 2, 1);
  bad(10, 1) = std::nan("");
  EXPECT_THROW(dwt_forward(bad, make_filter("haar"), 2), InvalidArgument);

  auto dec = dwt_forward(random_signal(64, 2, 1), make_filter("haar"), 3);
  dec.details[1].conservativeResize(dec.details[1].rows() - 1, Eigen::NoChange);
  EXPECT_THROW(dwt_inverse(dec), GeometryError);
}

TEST(Wavelet, DetailCoefficientsKeepNoiseCovariance) {
  // Pool coefficient rows over realizations until every scale holds >= 1e5.
  const Matrix sigma = (Matrix(3, 3) << 2.0, 0.6, -0.3, 0.6, 1.0, 0.2, -0.3, 0.2, 0.5).finished();
  const Matrix lower = Eigen::LLT<Matrix>(sigma).matrixL();
  const WaveletFilter f = make_filter("db8");
  constexpr int kLevels = 5;
  std::vector<Matrix> scatter(kLevels, Matrix::Zero(3, 3));
  std::vector<double> count(kLevels, 0.0);
  std::uint64_t seed = 100;
  while (count.back() < 1e5) {
    const Signal x = random_signal(4096, 3, seed++) * lower.transpose();
    const auto dec = dwt_forward(x, f, kLevels);
    for (int k = 0; k < kLevels; ++k) {
      scatter[static_cast<std::size_t>(k)] += dec.details[static_cast<std::size_t>(k)].transpose() * dec.details[static_cast<std::size_t>(k)];
      count[static_cast<std::size_t>(k)] += static_cast<double>(dec.details[static_cast<std::size_t>(k)].rows());
    }
  }
  for (int k = 0; k < kLevels; ++k) {
    const Matrix est = scatter[static_cast<std::size_t>(k)] / count[static_cast<std::size_t>(k)];
    EXPECT_LE((est - sigma).norm(), 0.05 * sigma.norm()) << "scale " << k + 1;
  }
}

}  // namespace
}  // namespace mvdenoise
