// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_SIGGEN_HPP_
#define MVDENOISE_SIGGEN_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "mvdenoise/common.hpp"

namespace mvdenoise {

// ---------------------------------------------------------------------------
// Donoho-Johnstone test functions, sampled at t_i = (i + 1) / n.

namespace donoho {

inline constexpr std::array<double, 11> kPositions = {0.10, 0.13, 0.15, 0.23, 0.25, 0.40,
                                                      0.44, 0.65, 0.76, 0.78, 0.81};

inline double sample_time(std::size_t i, std::size_t n) { return static_cast<double>(i + 1) / static_cast<double>(n); }

/// Piecewise constant; a step contributes its full height from its position on.
inline std::vector<double> blocks(std::size_t n) {
  constexpr std::array<double, 11> heights = {4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2};
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_time(i, n);
    for (std::size_t j = 0; j < kPositions.size(); ++j)
      if (t >= kPositions[j]) f[i] += heights[j];
  }
  return f;
}

inline std::vector<double> bumps(std::size_t n) {
  constexpr std::array<double, 11> heights = {4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2};
  constexpr std::array<double, 11> widths = {0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005};
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_time(i, n);
    for (std::size_t j = 0; j < kPositions.size(); ++j)
      f[i] += heights[j] * std::pow(1.0 + std::abs((t - kPositions[j]) / widths[j]), -4.0);
  }
  return f;
}

inline double sign(double v) { return (v > 0.0) - (v < 0.0); }

inline std::vector<double> heavy_sine(std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_time(i, n);
    f[i] = 4.0 * std::sin(4.0 * std::numbers::pi * t) - sign(t - 0.3) - sign(0.72 - t);
  }
  return f;
}

inline std::vector<double> doppler(std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = sample_time(i, n);
    f[i] = std::sqrt(t * (1.0 - t)) * std::sin(2.0 * std::numbers::pi * 1.05 / (t + 0.05));
  }
  return f;
}

}  // namespace donoho

struct TestSignal {
  std::string name;
  Signal channels;
  std::string provenance;
};

namespace detail {

inline Vector unit_power(const std::vector<double>& v) {
  Vector out = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  const double power = out.squaredNorm() / static_cast<double>(out.size());
  return out / std::sqrt(power);
}

}  // namespace detail

/// Builds a named synthetic test signal of length n. Primitives are scaled to
/// unit power before they are combined, so sums and differences stay exact.
///  heavydoppler3: [HeavySine, Doppler, HeavySine + Doppler]
///  bumpsblocks4:  [Blocks, Bumps, Blocks - Bumps, Blocks + Bumps]
///  blocks, bumps, heavysine, doppler: the single primitive.
inline TestSignal make_signal(std::string_view name, std::size_t n) {
  if (n < 256) throw InvalidArgument("make_signal: length must be >= 256");
  TestSignal s;
  s.name = std::string(name);
  const auto rows = static_cast<Eigen::Index>(n);
  if (name == "heavydoppler3") {
    const Vector hs = detail::unit_power(donoho::heavy_sine(n));
    const Vector dp = detail::unit_power(donoho::doppler(n));
    s.channels.resize(rows, 3);
    s.channels << hs, dp, hs + dp;
    s.provenance = "ch1 = HeavySine (unit power); ch2 = Doppler (unit power); ch3 = ch1 + ch2";
  } else if (name == "bumpsblocks4") {
    const Vector bl = detail::unit_power(donoho::blocks(n));
    const Vector bu = detail::unit_power(donoho::bumps(n));
    s.channels.resize(rows, 4);
    s.channels << bl, bu, bl - bu, bl + bu;
    s.provenance = "ch1 = Blocks (unit power); ch2 = Bumps (unit power); ch3 = ch1 - ch2; ch4 = ch1 + ch2";
  } else if (name == "blocks" || name == "bumps" || name == "heavysine" || name == "doppler") {
    const auto raw = name == "blocks"      ? donoho::blocks(n)
                     : name == "bumps"     ? donoho::bumps(n)
                     : name == "heavysine" ? donoho::heavy_sine(n)
                                           : donoho::doppler(n);
    s.channels = detail::unit_power(raw);
    s.provenance = s.name + " (unit power)";
  } else {
    throw InvalidArgument("make_signal: unknown signal '" + std::string(name) + "'");
  }
  return s;
}

/// Wraps user-supplied samples as a test signal.
inline TestSignal custom_signal(Signal channels, std::string name = "custom") {
  if (channels.rows() < 1 || channels.cols() < 1) throw InvalidArgument("custom_signal: empty signal");
  require_finite(channels, "custom_signal");
  return {std::move(name), std::move(channels), "user supplied"};
}

// ---------------------------------------------------------------------------
// Noise

struct NoiseSpec {
  Matrix correlation;              // M x M, unit diagonal, positive definite
  std::vector<double> target_snr;  // per-channel input SNR in dB
  std::uint64_t seed = 0;

  std::size_t channels() const { return static_cast<std::size_t>(correlation.rows()); }

  static Matrix equicorrelation(std::size_t m, double rho) {
    if (!(std::abs(rho) < 1.0)) throw InvalidArgument("equicorrelation: |rho| must be < 1");
    Matrix r = Matrix::Constant(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m), rho);
    r.diagonal().setOnes();
    return r;
  }

  static NoiseSpec balanced(std::size_t m, double rho, double snr_db, std::uint64_t seed) {
    return {equicorrelation(m, rho), std::vector<double>(m, snr_db), seed};
  }

  static NoiseSpec unbalanced(double rho, std::vector<double> snr_db, std::uint64_t seed) {
    const std::size_t m = snr_db.size();
    return {equicorrelation(m, rho), std::move(snr_db), seed};
  }

  void validate() const {
    const auto m = correlation.rows();
    if (m < 1 || correlation.cols() != m) throw InvalidArgument("noise correlation must be square and non-empty");
    if (target_snr.size() != static_cast<std::size_t>(m))
      throw InvalidArgument("noise spec: one target SNR per channel required");
    for (double v : target_snr)
      if (!std::isfinite(v)) throw InvalidArgument("noise spec: target SNR must be finite");
    if (!correlation.allFinite() || (correlation - correlation.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidArgument("noise correlation must be symmetric");
    for (Eigen::Index i = 0; i < m; ++i)
      if (std::abs(correlation(i, i) - 1.0) > 1e-12) throw InvalidArgument("noise correlation must have unit diagonal");
    Eigen::LLT<Matrix> llt(correlation);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-7)
      throw InvalidArgument("noise correlation is not positive definite");
  }
};

struct NoisyRealization {
  Signal noisy;
  Signal noise;
  /// D^{1/2} R D^{1/2} with D the per-channel target noise powers.
  Matrix noise_covariance;
};

/// Adds correlated Gaussian noise scaled so that every channel's realized
/// SNR equals its target exactly.
inline NoisyRealization add_noise(const TestSignal& s, const NoiseSpec& spec) {
  spec.validate();
  const auto n = s.channels.rows();
  const auto m = s.channels.cols();
  if (static_cast<std::size_t>(m) != spec.channels()) throw InvalidArgument("add_noise: spec dimension does not match signal");
  if (n < 2) throw InvalidArgument("add_noise: signal too short");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < m; ++c) z(i, c) = normal(rng);
  const Matrix lower = Eigen::LLT<Matrix>(spec.correlation).matrixL();
  Matrix psi = z * lower.transpose();

  Vector target_power(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const double signal_power = s.channels.col(c).squaredNorm() / static_cast<double>(n);
    if (!(signal_power > 0.0)) throw InvalidArgument("add_noise: channel " + std::to_string(c) + " has zero energy");
    target_power(c) = signal_power / std::pow(10.0, spec.target_snr[static_cast<std::size_t>(c)] / 10.0);
    const double realized = psi.col(c).squaredNorm() / static_cast<double>(n);
    psi.col(c) *= std::sqrt(target_power(c) / realized);
  }
  const Vector sd = target_power.cwiseSqrt();
  NoisyRealization out;
  out.noise = std::move(psi);
  out.noisy = s.channels + out.noise;
  out.noise_covariance = sd.asDiagonal() * spec.correlation * sd.asDiagonal();
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

inline constexpr double kSnrCapDb = 200.0;

/// 10 log10(sum s^2 / sum (s - estimate)^2), capped at 200 dB.
inline double snr_db(const Vector& clean, const Vector& estimate) {
  if (clean.size() != estimate.size()) throw InvalidArgument("snr_db: length mismatch");
  const double signal = clean.squaredNorm();
  if (!(signal > 0.0)) throw InvalidArgument("snr_db: clean channel has zero energy");
  const double error = (clean - estimate).squaredNorm();
  if (error == 0.0) return kSnrCapDb;
  return std::min(kSnrCapDb, 10.0 * std::log10(signal / error));
}

inline std::vector<double> channel_snr_db(const Signal& clean, const Signal& estimate) {
  if (clean.rows() != estimate.rows() || clean.cols() != estimate.cols()) throw InvalidArgument("snr_db: shape mismatch");
  std::vector<double> out;
  for (Eigen::Index c = 0; c < clean.cols(); ++c) out.push_back(snr_db(clean.col(c), estimate.col(c)));
  return out;
}

inline double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace mvdenoise

#endif  // MVDENOISE_SIGGEN_HPP_
