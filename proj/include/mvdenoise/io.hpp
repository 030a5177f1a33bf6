// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_IO_HPP_
#define MVDENOISE_IO_HPP_

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "mvdenoise/common.hpp"
#include "mvdenoise/denoiser.hpp"

namespace mvdenoise::io {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Numbers

/// Shortest text that parses back to exactly the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

/// Parses "a,b,c" into doubles; throws InvalidArgument naming the flag.
inline std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    double v = 0.0;
    if (!parse_double(text.substr(start, comma - start), v))
      throw InvalidArgument(std::string(what) + ": cannot parse '" + std::string(text.substr(start, comma - start)) + "'");
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV: one row per time index, one column per channel, optional header row.

struct CsvTable {
  Signal data;
  std::vector<std::string> header;  // empty when the file had none
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

}  // namespace detail

/// Parses CSV text. The first line is a header when none of its fields is
/// numeric; any other non-numeric cell is an error reported by row and column
/// (both 1-based, counting physical lines).
inline CsvTable parse_csv(std::string_view text, std::string_view source = "input") {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool first = true;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line);
    std::vector<double> values(fields.size());
    std::size_t numeric = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) numeric += parse_double(fields[c], values[c]) ? 1 : 0;
    if (first && numeric == 0) {
      for (auto f : fields) table.header.push_back(detail::trim(f));
      width = fields.size();
      first = false;
      continue;
    }
    first = false;
    if (width == 0) width = fields.size();
    if (fields.size() != width)
      throw ParseError(std::string(source) + ": row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " columns, expected " + std::to_string(width));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], values[c]) || !std::isfinite(values[c]))
        throw ParseError(std::string(source) + ": row " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                         ": not a finite number: '" + detail::trim(fields[c]) + "'");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError(std::string(source) + ": no data rows");
  table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c)
      table.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

inline std::vector<std::string> default_header(Eigen::Index channels) {
  std::vector<std::string> h;
  for (Eigen::Index c = 0; c < channels; ++c) h.push_back("ch" + std::to_string(c + 1));
  return h;
}

inline std::string to_csv(const Signal& x, const std::vector<std::string>& header) {
  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
  if (!header.empty()) out += '\n';
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (c) out += ',';
      out += format_double(x(r, c));
    }
    out += '\n';
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Provenance

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xf];
  return s;
}

inline std::string digest(std::string_view bytes) { return "fnv1a64:" + hex64(fnv1a64(bytes)); }

/// UTC ISO-8601 time; SOURCE_DATE_EPOCH overrides the clock.
inline std::string timestamp_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json config_json(const DenoiseConfig& c, std::size_t channels) {
  Json j;
  j["filter"] = c.filter;
  j["levels"] = c.levels;
  j["window_l"] = c.window_l_for(channels);
  j["window_l_explicit"] = c.window_l.has_value();
  j["p_fa"] = c.p_fa;
  j["calibration_reps"] = c.calibration_reps;
  j["seed"] = c.seed;
  j["eval_mode"] = c.eval_mode == EvalMode::series ? "series" : "gamma";
  j["ad_form"] = c.ad_form == AdForm::literal ? "literal" : "standard";
  j["sigma_inverse_eigenvalues"] = c.sigma_inverse_eigenvalues;
  j["boundary"] = std::string(to_string(c.boundary));
  j["window_mode"] = std::string(to_string(c.window_mode));
  j["covariance_scales"] = c.covariance_scales;
  j["mcd"] = {{"trials", c.mcd.trials},
              {"initial_csteps", c.mcd.initial_csteps},
              {"candidates", c.mcd.candidates},
              {"max_csteps", c.mcd.max_csteps},
              {"reweight", c.mcd.reweight}};
  return j;
}

/// Collects output files and writes manifest.json listing them with digests.
class Manifest {
 public:
  Manifest(std::string command, Json config) : command_(std::move(command)), config_(std::move(config)) {}

  void add_input(const std::string& name, std::string_view bytes) { inputs_[name] = digest(bytes); }

  /// Writes the file under dir and records it.
  void emit(const std::filesystem::path& dir, const std::string& name, std::string_view contents) {
    write_file(dir / name, contents);
    outputs_[name] = digest(contents);
  }

  Json to_json() const {
    Json j;
    j["tool"] = "mvdenoise";
    j["version"] = kVersion;
    j["command"] = command_;
    j["created_utc"] = timestamp_utc();
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["outputs"] = outputs_;
    return j;
  }

  void write(const std::filesystem::path& dir) const { write_file(dir / kFileName, to_json().dump(2) + "\n"); }

  static constexpr const char* kFileName = "manifest.json";

 private:
  std::string command_;
  Json config_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
};

}  // namespace mvdenoise::io

#endif  // MVDENOISE_IO_HPP_
