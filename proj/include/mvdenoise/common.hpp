// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_COMMON_HPP_
#define MVDENOISE_COMMON_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace mvdenoise {

/// N x M multichannel signal: one row per time index, one column per channel.
using Signal = Eigen::MatrixXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr const char* kVersion = "1.0.0";

// ---------------------------------------------------------------------------
// Errors. Every error the library raises derives from mvdenoise::Error so the
// CLI can map categories onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input values or arguments outside an operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Signal length / window / level combination that cannot be processed.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class SingularCovarianceError : public Error {
 public:
  using Error::Error;
};

class SeriesDivergenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Seeding. Independent substreams are derived from a master seed by a
// splitmix64 finalizer so that parallel work maps to fixed streams.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

// ---------------------------------------------------------------------------
// Parallelism. MVDENOISE_THREADS caps the worker count.

inline unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MVDENOISE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Runs fn(i) for i in [0, count). Each index must write only its own output
/// slot; the result is then independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline void require_finite(const Signal& x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite sample encountered");
}

}  // namespace mvdenoise

#endif  // MVDENOISE_COMMON_HPP_
