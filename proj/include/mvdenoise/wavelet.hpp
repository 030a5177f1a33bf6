// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_WAVELET_HPP_
#define MVDENOISE_WAVELET_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mvdenoise/common.hpp"

namespace mvdenoise {

/// Orthogonal two-channel filter bank. `lowpass` holds the scaling filter in
/// synthesis order; `highpass` is its quadrature mirror
/// g[n] = (-1)^n h[F-1-n]. Analysis uses the time-reversed taps.
struct WaveletFilter {
  std::string name;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t length() const { return lowpass.size(); }
};

enum class Boundary { periodic, symmetric };

inline std::string_view to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "symmetric";
}

inline Boundary parse_boundary(std::string_view s) {
  if (s == "periodic") return Boundary::periodic;
  if (s == "symmetric") return Boundary::symmetric;
  throw InvalidArgument("unknown boundary policy '" + std::string(s) + "'");
}

namespace detail {

inline std::vector<double> quadrature_mirror(const std::vector<double>& h) {
  const std::size_t f = h.size();
  std::vector<double> g(f);
  for (std::size_t n = 0; n < f; ++n) g[n] = ((n % 2) ? -1.0 : 1.0) * h[f - 1 - n];
  return g;
}

/// Throws unless the scaling filter is orthonormal with DC gain sqrt(2).
inline void validate_orthonormal(const WaveletFilter& w) {
  const auto& h = w.lowpass;
  constexpr double tol = 1e-10;
  if (h.empty() || h.size() % 2 != 0)
    throw InvalidArgument("wavelet '" + w.name + "': filter length must be even and nonzero");
  double sum = 0.0;
  for (double v : h) sum += v;
  if (std::abs(sum - std::sqrt(2.0)) > tol)
    throw InvalidArgument("wavelet '" + w.name + "': lowpass taps do not sum to sqrt(2)");
  for (std::size_t shift = 0; shift < h.size(); shift += 2) {
    double acc = 0.0;
    for (std::size_t n = 0; n + shift < h.size(); ++n) acc += h[n] * h[n + shift];
    const double expected = shift == 0 ? 1.0 : 0.0;
    if (std::abs(acc - expected) > tol)
      throw InvalidArgument("wavelet '" + w.name + "': filter is not orthonormal");
  }
}

/// Symmetric (half-sample) reflection of an arbitrary index into [0, n).
inline std::ptrdiff_t reflect_half_sample(std::ptrdiff_t k, std::ptrdiff_t n) {
  const std::ptrdiff_t period = 2 * n;
  k %= period;
  if (k < 0) k += period;
  return k < n ? k : period - 1 - k;
}

inline std::ptrdiff_t wrap(std::ptrdiff_t k, std::ptrdiff_t n) {
  k %= n;
  return k < 0 ? k + n : k;
}

}  // namespace detail

/// Returns the named filter. Known names: "haar" (alias "db1") and "db8".
inline WaveletFilter make_filter(std::string_view name) {
  WaveletFilter w;
  w.name = std::string(name);
  if (name == "haar" || name == "db1") {
    const double r = 1.0 / std::sqrt(2.0);
    w.lowpass = {r, r};
  } else if (name == "db8") {
    // Daubechies scaling filter with eight vanishing moments.
    w.lowpass = {
        0.05441584224310401,    0.31287159091429995,   0.6756307362972898,
        0.5853546836542067,     -0.015829105256349306, -0.2840155429615469,
        0.0004724845739132828,  0.12874742662047847,   -0.017369301001807547,
        -0.044088253930794755,  0.013981027917398282,  0.008746094047405777,
        -0.004870352993451574,  -0.00039174037337694705, 0.0006754494064505693,
        -0.00011747678412476953};
  } else {
    throw InvalidArgument("unknown wavelet filter '" + std::string(name) + "'");
  }
  w.highpass = detail::quadrature_mirror(w.lowpass);
  detail::validate_orthonormal(w);
  return w;
}

/// Channel-wise multilevel decomposition. details[k-1] holds the scale-k
/// detail block; rows are coefficient indices, columns are channels.
struct WaveletDecomposition {
  std::vector<Matrix> details;
  Matrix approx;

  WaveletFilter filter;
  Boundary boundary = Boundary::periodic;
  int levels = 0;
  std::size_t original_length = 0;
  std::size_t padded_length = 0;
  /// Length of the sequence entering level k+1 (level_lengths[0] == padded_length).
  std::vector<std::size_t> level_lengths;

  std::size_t channels() const { return static_cast<std::size_t>(approx.cols()); }
  std::size_t padding() const { return padded_length - original_length; }
};

namespace detail {

inline std::size_t coefficient_count(std::size_t n, std::size_t f, Boundary b) {
  return b == Boundary::periodic ? (n + 1) / 2 : (n + f - 1) / 2;
}

/// One analysis step on a single channel.
inline void analysis_step(const double* x, std::size_t n, const WaveletFilter& w, Boundary b,
                          double* approx, double* detail) {
  const auto& h = w.lowpass;
  const auto& g = w.highpass;
  const auto f = static_cast<std::ptrdiff_t>(h.size());
  const auto sn = static_cast<std::ptrdiff_t>(n);
  const std::size_t out = coefficient_count(n, h.size(), b);
  for (std::size_t i = 0; i < out; ++i) {
    double a = 0.0, d = 0.0;
    if (b == Boundary::periodic) {
      const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(i) + 1 - f / 2;
      if (base >= 0 && base + f <= sn) {
        const double* p = x + base;
        for (std::ptrdiff_t k = 0; k < f; ++k) {
          a += h[k] * p[k];
          d += g[k] * p[k];
        }
      } else {
        for (std::ptrdiff_t k = 0; k < f; ++k) {
          const double v = x[wrap(base + k, sn)];
          a += h[k] * v;
          d += g[k] * v;
        }
      }
    } else {
      const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(i) + 2 - f;
      for (std::ptrdiff_t k = 0; k < f; ++k) {
        const double v = x[reflect_half_sample(base + k, sn)];
        a += h[k] * v;
        d += g[k] * v;
      }
    }
    approx[i] = a;
    detail[i] = d;
  }
}

/// One synthesis step on a single channel; writes `n` output samples.
inline void synthesis_step(const double* approx, const double* detail, std::size_t count,
                           const WaveletFilter& w, Boundary b, double* x, std::size_t n) {
  const auto& h = w.lowpass;
  const auto& g = w.highpass;
  const auto f = static_cast<std::ptrdiff_t>(h.size());
  std::fill(x, x + n, 0.0);
  if (b == Boundary::periodic) {
    const auto sn = static_cast<std::ptrdiff_t>(n);
    for (std::size_t i = 0; i < count; ++i) {
      const std::ptrdiff_t base = 2 * static_cast<std::ptrdiff_t>(i) + 1 - f / 2;
      if (base >= 0 && base + f <= sn) {
        double* p = x + base;
        for (std::ptrdiff_t k = 0; k < f; ++k) p[k] += h[k] * approx[i] + g[k] * detail[i];
      } else {
        for (std::ptrdiff_t k = 0; k < f; ++k) x[wrap(base + k, sn)] += h[k] * approx[i] + g[k] * detail[i];
      }
    }
  } else {
    for (std::size_t m = 0; m < n; ++m) {
      double acc = 0.0;
      // x[m] = sum_i a[i] h[m + F - 2 - 2i] + d[i] g[m + F - 2 - 2i]
      const std::ptrdiff_t top = static_cast<std::ptrdiff_t>(m) + f - 2;
      // k = top - 2i must land in [0, F)
      const std::ptrdiff_t i_lo = std::max<std::ptrdiff_t>(0, (top - f + 2) / 2);
      const std::ptrdiff_t i_hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(count) - 1, top / 2);
      for (std::ptrdiff_t i = i_lo; i <= i_hi; ++i) {
        const std::ptrdiff_t k = top - 2 * i;
        acc += approx[i] * h[k] + detail[i] * g[k];
      }
      x[m] = acc;
    }
  }
}

}  // namespace detail

/// Multilevel forward transform applied independently to every channel.
/// Lengths that are not a multiple of 2^levels are padded at the end by
/// symmetric extension; the pad is recorded and trimmed by dwt_inverse.
inline WaveletDecomposition dwt_forward(const Signal& x, const WaveletFilter& filter, int levels,
                                        Boundary boundary = Boundary::periodic) {
  if (levels < 1) throw InvalidArgument("dwt_forward: levels must be >= 1");
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t dyadic = std::size_t{1} << levels;
  if (x.cols() < 1) throw GeometryError("dwt_forward: signal has no channels");
  if (n < dyadic)
    throw GeometryError("dwt_forward: signal of length " + std::to_string(n) + " is too short for " +
                        std::to_string(levels) + " levels");
  require_finite(x, "dwt_forward");

  WaveletDecomposition dec;
  dec.filter = filter;
  dec.boundary = boundary;
  dec.levels = levels;
  dec.original_length = n;
  dec.padded_length = (n + dyadic - 1) / dyadic * dyadic;

  const auto m = static_cast<std::size_t>(x.cols());
  Matrix current(dec.padded_length, m);
  current.topRows(n) = x;
  for (std::size_t r = n; r < dec.padded_length; ++r)
    current.row(r) = x.row(detail::reflect_half_sample(static_cast<std::ptrdiff_t>(r), static_cast<std::ptrdiff_t>(n)));

  for (int level = 0; level < levels; ++level) {
    const auto len = static_cast<std::size_t>(current.rows());
    dec.level_lengths.push_back(len);
    const std::size_t out = detail::coefficient_count(len, filter.length(), boundary);
    Matrix approx(out, m);
    Matrix det(out, m);
    for (std::size_t c = 0; c < m; ++c)
      detail::analysis_step(current.col(c).data(), len, filter, boundary, approx.col(c).data(), det.col(c).data());
    dec.details.push_back(std::move(det));
    current = std::move(approx);
  }
  dec.approx = std::move(current);
  return dec;
}

inline WaveletDecomposition dwt_forward(const Signal& x, std::string_view filter_name, int levels,
                                        Boundary boundary = Boundary::periodic) {
  return dwt_forward(x, make_filter(filter_name), levels, boundary);
}

/// Inverse of dwt_forward; returns the original (unpadded) length.
inline Signal dwt_inverse(const WaveletDecomposition& dec) {
  const auto levels = static_cast<std::size_t>(dec.levels);
  if (dec.details.size() != levels || dec.level_lengths.size() != levels)
    throw GeometryError("dwt_inverse: decomposition has inconsistent level count");
  const auto m = static_cast<std::size_t>(dec.approx.cols());
  const std::size_t f = dec.filter.length();
  for (std::size_t k = 0; k < levels; ++k) {
    const std::size_t expected = detail::coefficient_count(dec.level_lengths[k], f, dec.boundary);
    if (static_cast<std::size_t>(dec.details[k].rows()) != expected || static_cast<std::size_t>(dec.details[k].cols()) != m)
      throw GeometryError("dwt_inverse: detail block at scale " + std::to_string(k + 1) + " has wrong shape");
  }
  if (static_cast<std::size_t>(dec.approx.rows()) !=
      detail::coefficient_count(dec.level_lengths.back(), f, dec.boundary))
    throw GeometryError("dwt_inverse: approximation block has wrong shape");
  if (dec.level_lengths.front() != dec.padded_length || dec.original_length > dec.padded_length)
    throw GeometryError("dwt_inverse: length metadata is inconsistent");

  Matrix current = dec.approx;
  for (std::size_t k = levels; k-- > 0;) {
    const std::size_t len = dec.level_lengths[k];
    const auto& det = dec.details[k];
    Matrix next(len, m);
    for (std::size_t c = 0; c < m; ++c)
      detail::synthesis_step(current.col(c).data(), det.col(c).data(), static_cast<std::size_t>(det.rows()),
                             dec.filter, dec.boundary, next.col(c).data(), len);
    current = std::move(next);
  }
  return current.topRows(static_cast<Eigen::Index>(dec.original_length));
}

}  // namespace mvdenoise

#endif  // MVDENOISE_WAVELET_HPP_
