// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#ifndef MVDENOISE_CLI_HPP_
#define MVDENOISE_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "mvdenoise/denoiser.hpp"
#include "mvdenoise/io.hpp"
#include "mvdenoise/siggen.hpp"

namespace mvdenoise::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitUsage = 64;

/// Bad flag values detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace fs = std::filesystem;
using io::Json;

// ---------------------------------------------------------------------------
// Flags shared by denoise, gof and benchmark

struct SharedOptions {
  std::uint64_t seed = 0;
  std::string filter = "db8";
  int levels = 5;
  std::size_t window_l = 0;  // 0 selects 28 * M
  double p_fa = 0.005;
  int calibration_reps = 1000;
  std::string eval_mode = "gamma";
  std::string boundary = "periodic";
};

inline void add_shared(CLI::App& app, SharedOptions& o) {
  app.add_option("--seed", o.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--filter", o.filter, "Wavelet filter (db8, haar)")->capture_default_str();
  app.add_option("--levels", o.levels, "Decomposition levels")->capture_default_str();
  app.add_option("--window-l", o.window_l, "Window size minus one (0: 28 x channels)")->capture_default_str();
  app.add_option("--pfa", o.p_fa, "False-alarm probability, in (0, 0.5)")->capture_default_str();
  app.add_option("--calib-reps", o.calibration_reps, "Monte-Carlo calibration replications")->capture_default_str();
  app.add_option("--eval-mode", o.eval_mode, "Reference CDF / statistic form")
      ->check(CLI::IsMember({"gamma", "series", "paper-literal-ad"}))
      ->capture_default_str();
  app.add_option("--boundary", o.boundary, "DWT boundary handling")
      ->check(CLI::IsMember({"periodic", "symmetric"}))
      ->capture_default_str();
}

inline DenoiseConfig to_config(const SharedOptions& o) {
  if (!(o.p_fa > 0.0 && o.p_fa < 0.5)) throw UsageError("--pfa must lie in (0, 0.5)");
  if (o.calibration_reps < 100) throw UsageError("--calib-reps must be >= 100");
  if (o.levels < 1) throw UsageError("--levels must be >= 1");
  DenoiseConfig c;
  c.seed = o.seed;
  c.filter = o.filter;
  c.levels = o.levels;
  if (o.window_l > 0) c.window_l = o.window_l;
  c.p_fa = o.p_fa;
  c.calibration_reps = o.calibration_reps;
  c.eval_mode = o.eval_mode == "series" ? EvalMode::series : EvalMode::gamma_closed_form;
  c.ad_form = o.eval_mode == "paper-literal-ad" ? AdForm::literal : AdForm::standard;
  c.boundary = parse_boundary(o.boundary);
  make_filter(c.filter);
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  std::string signal = "heavydoppler3";
  std::size_t n = 2048;
  std::string snr_db = "0";  // one value (balanced) or one per channel
  double rho = 0.0;
  std::uint64_t seed = 0;
  std::string input;  // clean CSV for signal=custom
  std::string out = ".";
};

inline NoiseSpec noise_spec_for(std::size_t channels, const std::vector<double>& snr, double rho, std::uint64_t seed) {
  if (snr.size() == 1) return NoiseSpec::balanced(channels, rho, snr.front(), seed);
  if (snr.size() != channels)
    throw UsageError("--snr needs 1 or " + std::to_string(channels) + " values, got " + std::to_string(snr.size()));
  return NoiseSpec::unbalanced(rho, snr, seed);
}

inline int cmd_generate(const GenerateOptions& o, std::ostream& out) {
  TestSignal sig;
  io::Manifest manifest("generate", Json{{"signal", o.signal},
                                         {"n", o.n},
                                         {"snr_db", o.snr_db},
                                         {"rho", o.rho},
                                         {"seed", o.seed}});
  if (o.signal == "custom") {
    if (o.input.empty()) throw UsageError("signal 'custom' requires --input");
    const std::string text = io::read_file(o.input);
    manifest.add_input(o.input, text);
    sig = custom_signal(io::parse_csv(text, o.input).data);
  } else {
    sig = make_signal(o.signal, o.n);
  }
  const auto channels = static_cast<std::size_t>(sig.channels.cols());
  const auto spec = noise_spec_for(channels, io::parse_double_list(o.snr_db, "--snr"), o.rho, o.seed);
  const auto noisy = add_noise(sig, spec);
  const auto header = io::default_header(sig.channels.cols());
  const fs::path dir(o.out);
  manifest.emit(dir, "clean.csv", io::to_csv(sig.channels, header));
  manifest.emit(dir, "noisy.csv", io::to_csv(noisy.noisy, header));
  manifest.emit(dir, "noise.csv", io::to_csv(noisy.noise, header));
  manifest.write(dir);
  out << "wrote " << sig.channels.rows() << "x" << channels << " clean/noisy/noise to " << dir.string() << " ("
      << sig.provenance << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// denoise

struct DenoiseOptions {
  SharedOptions shared;
  std::string input;
  std::string clean;
  std::string method = "mgwd";
  std::string out = ".";
};

namespace detail {

inline Json tau_summary(std::vector<double> tau) {
  if (tau.empty()) return Json::object();
  double sum = 0.0;
  for (double t : tau) sum += t;
  const double mean = sum / static_cast<double>(tau.size());
  const double median = empirical_quantile(tau, 0.5);
  const auto [lo, hi] = std::minmax_element(tau.begin(), tau.end());
  return Json{{"min", *lo}, {"median", median}, {"mean", mean}, {"max", *hi}};
}

inline std::string mask_string(const std::vector<std::uint8_t>& keep) {
  std::string s(keep.size(), '0');
  for (std::size_t i = 0; i < keep.size(); ++i)
    if (keep[i]) s[i] = '1';
  return s;
}

}  // namespace detail

inline int cmd_denoise(const DenoiseOptions& o, std::ostream& out) {
  if (o.method != "mgwd" && o.method != "baseline") throw UsageError("--method must be mgwd or baseline");
  const DenoiseConfig config = to_config(o.shared);
  const std::string text = io::read_file(o.input);
  const io::CsvTable table = io::parse_csv(text, o.input);
  const Signal& x = table.data;

  io::Manifest manifest("denoise", Json{{"method", o.method}, {"denoise", io::config_json(config, x.cols())}});
  manifest.add_input(o.input, text);

  std::optional<Signal> clean;
  if (!o.clean.empty()) {
    const std::string ctext = io::read_file(o.clean);
    manifest.add_input(o.clean, ctext);
    clean = io::parse_csv(ctext, o.clean).data;
    if (clean->rows() != x.rows() || clean->cols() != x.cols())
      throw ParseError("--clean shape " + std::to_string(clean->rows()) + "x" + std::to_string(clean->cols()) +
                       " does not match input " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }

  Json report;
  report["manifest"] = io::Manifest::kFileName;
  report["method"] = o.method;
  report["input"] = {{"rows", x.rows()}, {"channels", x.cols()}};
  Signal denoised;
  if (o.method == "mgwd") {
    auto res = denoise(x, config);
    denoised = std::move(res.denoised);
    const auto& rep = res.report;
    report["window_l"] = rep.window_l;
    report["sigma_hat"] = io::matrix_json(rep.sigma_hat);
    report["warnings"] = rep.warnings;
    Json scales = Json::array();
    for (const auto& sc : rep.scales) {
      scales.push_back({{"scale", sc.scale},
                        {"coefficients", sc.keep.size()},
                        {"threshold", sc.threshold},
                        {"retained", sc.retained},
                        {"retained_fraction", static_cast<double>(sc.retained) / static_cast<double>(sc.keep.size())},
                        {"tau", detail::tau_summary(sc.tau)},
                        {"mask", detail::mask_string(sc.keep)}});
    }
    report["scales"] = std::move(scales);
  } else {
    auto res = baseline_universal(x, config);
    denoised = std::move(res.denoised);
    report["sigma_hat"] = io::matrix_json(res.sigma_hat);
    report["thresholds"] = res.thresholds;
  }
  if (clean) {
    const auto per_channel = channel_snr_db(*clean, denoised);
    report["snr_db"] = {{"channels", per_channel}, {"average", mean(per_channel)}};
  }

  const fs::path dir(o.out);
  const auto header = table.header.empty() ? io::default_header(x.cols()) : table.header;
  manifest.emit(dir, "denoised.csv", io::to_csv(denoised, header));
  manifest.emit(dir, "report.json", report.dump(2) + "\n");
  manifest.write(dir);
  out << "denoised " << x.rows() << "x" << x.cols() << " (" << o.method << ") -> " << (dir / "denoised.csv").string();
  if (report.contains("snr_db")) out << ", average output SNR " << report["snr_db"]["average"].get<double>() << " dB";
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gof

struct GofOptions {
  SharedOptions shared;
  std::string input;
  std::string sigma;  // CSV with an M x M covariance; empty means MCD
  bool json = false;
};

inline int cmd_gof(const GofOptions& o, std::ostream& out) {
  const DenoiseConfig config = to_config(o.shared);
  const Signal x = io::read_csv(o.input).data;
  std::string source = "mcd";
  const CovarianceMatrix sigma = [&] {
    if (!o.sigma.empty()) {
      source = "file";
      const Matrix s = io::read_csv(o.sigma).data;
      if (s.rows() != x.cols() || s.cols() != x.cols())
        throw ParseError("--sigma must be " + std::to_string(x.cols()) + "x" + std::to_string(x.cols()));
      return CovarianceMatrix(s);
    }
    return mcd_estimate(x, derive_seed(config.seed, mvdenoise::detail::kCovarianceStream), config.mcd).covariance;
  }();
  const auto res = sample_gof(x, sigma, config, derive_seed(config.seed, mvdenoise::detail::kCalibrationStream));
  if (o.json) {
    Json j{{"tau", res.tau},
           {"threshold", res.threshold},
           {"decision", std::string(to_string(res.decision))},
           {"p_fa", config.p_fa},
           {"rows", res.rows},
           {"sigma_source", source},
           {"sigma", io::matrix_json(sigma.sigma())},
           {"calibration_reps", res.calibration_sample},
           {"version", kVersion}};
    out << j.dump(2) << "\n";
  } else {
    out << "tau       " << io::format_double(res.tau) << "\n"
        << "threshold " << io::format_double(res.threshold) << "\n"
        << "decision  " << to_string(res.decision)
        << (res.decision == Decision::H0_noise ? " (consistent with Gaussian noise)" : " (signal present)") << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// benchmark

struct ResultRow {
  std::string signal;
  std::string method;
  double rho = 0.0;
  bool balanced = true;
  int channel = 0;  // 1-based
  double input_snr_db = 0.0;
  double output_snr_db = 0.0;
  std::uint64_t seed = 0;
  std::string status = "ok";
};

inline constexpr const char* kResultsHeader = "signal,method,rho,balanced,channel,input_snr_db,output_snr_db,seed,status";

inline std::string results_csv(const std::vector<ResultRow>& rows) {
  std::string s = std::string(kResultsHeader) + "\n";
  for (const auto& r : rows) {
    s += r.signal + "," + r.method + "," + io::format_double(r.rho) + "," + (r.balanced ? "true" : "false") + "," +
         std::to_string(r.channel) + "," + io::format_double(r.input_snr_db) + "," + io::format_double(r.output_snr_db) +
         "," + std::to_string(r.seed) + "," + r.status + "\n";
  }
  return s;
}

inline std::vector<ResultRow> parse_results_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no == 1) {
      if (line != kResultsHeader) throw ParseError("results.csv: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = io::detail::split_fields(line);
    if (f.size() != 9) throw ParseError("results.csv: row " + std::to_string(line_no) + " has wrong column count");
    ResultRow r;
    r.signal = std::string(f[0]);
    r.method = std::string(f[1]);
    double channel = 0.0;
    if (!io::parse_double(f[2], r.rho) || !io::parse_double(f[4], channel) || !io::parse_double(f[5], r.input_snr_db) ||
        !io::parse_double(f[6], r.output_snr_db))
      throw ParseError("results.csv: row " + std::to_string(line_no) + " has a malformed number");
    r.balanced = f[3] == "true";
    r.channel = static_cast<int>(channel);
    r.seed = std::stoull(std::string(f[7]));
    r.status = std::string(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

struct AggregateRow {
  std::string signal;
  bool balanced = true;
  double rho = 0.0;
  double input_snr_db = 0.0;  // average over channels
  std::string method;
  std::vector<double> channel_mean;  // mean output SNR per channel over seeds
  double average = 0.0;              // mean of channel_mean
  std::size_t seeds = 0;
};

/// Groups ok rows into cells (signal, method, rho, noise type, seed), then
/// averages cells sharing the same mean input SNR. Depends only on the rows.
inline std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  using CellKey = std::tuple<std::string, std::string, double, bool, std::uint64_t>;
  struct Cell {
    std::map<int, double> out;
    std::map<int, double> in;
  };
  std::map<CellKey, Cell> cells;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    auto& c = cells[{r.signal, r.method, r.rho, r.balanced, r.seed}];
    c.out[r.channel] = r.output_snr_db;
    c.in[r.channel] = r.input_snr_db;
  }
  // Input level rounded to 1e-9 dB so per-channel offsets that cancel group together.
  using GroupKey = std::tuple<std::string, bool, double, long long, std::string>;
  struct Group {
    double input = 0.0;
    std::map<int, std::vector<double>> out;
    std::size_t seeds = 0;
  };
  std::map<GroupKey, Group> groups;
  for (const auto& [key, cell] : cells) {
    double in = 0.0;
    for (const auto& [ch, v] : cell.in) in += v;
    in /= static_cast<double>(cell.in.size());
    const auto level = static_cast<long long>(std::llround(in * 1e9));
    auto& g = groups[{std::get<0>(key), std::get<3>(key), std::get<2>(key), level, std::get<1>(key)}];
    g.input = static_cast<double>(level) / 1e9;
    for (const auto& [ch, v] : cell.out) g.out[ch].push_back(v);
    ++g.seeds;
  }
  std::vector<AggregateRow> table;
  for (const auto& [key, g] : groups) {
    AggregateRow a;
    a.signal = std::get<0>(key);
    a.balanced = std::get<1>(key);
    a.rho = std::get<2>(key);
    a.input_snr_db = g.input;
    a.method = std::get<4>(key);
    a.seeds = g.seeds;
    for (const auto& [ch, v] : g.out) a.channel_mean.push_back(mean(v));
    a.average = mean(a.channel_mean);
    table.push_back(std::move(a));
  }
  return table;
}

inline std::string aggregate_text(const std::vector<AggregateRow>& table) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  std::string last;
  for (const auto& a : table) {
    if (a.signal != last) {
      s << (last.empty() ? "" : "\n") << a.signal << " (mean output SNR, dB)\n";
      s << std::left << std::setw(11) << "noise" << std::setw(7) << "rho" << std::setw(9) << "in_snr" << std::setw(10)
        << "method";
      for (std::size_t c = 0; c < a.channel_mean.size(); ++c) s << std::right << std::setw(9) << ("ch" + std::to_string(c + 1));
      s << std::right << std::setw(9) << "Avg" << std::setw(7) << "n" << "\n";
      last = a.signal;
    }
    s << std::left << std::setw(11) << (a.balanced ? "balanced" : "unbalanced") << std::setw(7) << a.rho << std::setw(9)
      << a.input_snr_db << std::setw(10) << a.method << std::right;
    for (double v : a.channel_mean) s << std::setw(9) << v;
    s << std::setw(9) << a.average << std::setw(7) << a.seeds << "\n";
  }
  return s.str();
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& table, const std::string& signal) {
  std::string s;
  for (const auto& a : table) {
    if (a.signal != signal) continue;
    if (s.empty()) {
      s = "noise,rho,input_snr_db,method";
      for (std::size_t c = 0; c < a.channel_mean.size(); ++c) s += ",ch" + std::to_string(c + 1);
      s += ",avg,seeds\n";
    }
    s += std::string(a.balanced ? "balanced" : "unbalanced") + "," + io::format_double(a.rho) + "," +
         io::format_double(a.input_snr_db) + "," + a.method;
    for (double v : a.channel_mean) s += "," + io::format_double(v);
    s += "," + io::format_double(a.average) + "," + std::to_string(a.seeds) + "\n";
  }
  return s;
}

struct BenchmarkOptions {
  SharedOptions shared;
  std::string signals = "heavydoppler3,bumpsblocks4";
  std::string snr_db = "0";
  std::string rho = "0,0.75";
  std::string noise = "balanced";  // balanced, unbalanced or both
  std::string offsets;             // per-channel dB offsets for unbalanced noise
  std::string methods = "mgwd,baseline";
  int seeds = 10;
  std::size_t n = 2048;
  std::string out = ".";
};

inline std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Offsets spread linearly from +2 dB to -2 dB; their mean is zero.
inline std::vector<double> default_offsets(std::size_t channels) {
  std::vector<double> v(channels, 0.0);
  if (channels < 2) return v;
  for (std::size_t c = 0; c < channels; ++c)
    v[c] = 2.0 - 4.0 * static_cast<double>(c) / static_cast<double>(channels - 1);
  return v;
}

inline std::string sanitize_status(std::string msg) {
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  std::replace(msg.begin(), msg.end(), '\r', ' ');
  return "error: " + msg;
}

inline int cmd_benchmark(const BenchmarkOptions& o, std::ostream& out) {
  DenoiseConfig base = to_config(o.shared);
  const auto signals = split_names(o.signals);
  const auto methods = split_names(o.methods);
  const auto snrs = io::parse_double_list(o.snr_db, "--snr");
  const auto rhos = io::parse_double_list(o.rho, "--rho");
  std::vector<bool> noise_types;
  if (o.noise == "balanced" || o.noise == "both") noise_types.push_back(true);
  if (o.noise == "unbalanced" || o.noise == "both") noise_types.push_back(false);
  if (noise_types.empty()) throw UsageError("--noise must be balanced, unbalanced or both");
  if (signals.empty() || methods.empty()) throw UsageError("--signals and --methods must not be empty");
  for (const auto& m : methods)
    if (m != "mgwd" && m != "baseline") throw UsageError("unknown method '" + m + "'");
  if (o.seeds < 1) throw UsageError("--seeds must be >= 1");
  std::optional<std::vector<double>> offsets;
  if (!o.offsets.empty()) offsets = io::parse_double_list(o.offsets, "--offsets");

  std::vector<ResultRow> rows;
  std::uint64_t cell = 0;
  for (const auto& name : signals) {
    const TestSignal sig = make_signal(name, o.n);
    const auto channels = static_cast<std::size_t>(sig.channels.cols());
    for (const bool balanced : noise_types) {
      std::vector<double> shift = balanced ? std::vector<double>(channels, 0.0) : offsets.value_or(default_offsets(channels));
      if (shift.size() != channels) throw UsageError("--offsets needs one value per channel of " + name);
      for (const double snr : snrs) {
        std::vector<double> target(channels);
        for (std::size_t c = 0; c < channels; ++c) target[c] = snr + shift[c];
        for (const double rho : rhos) {
          for (int s = 0; s < o.seeds; ++s, ++cell) {
            const std::uint64_t cell_seed = derive_seed(o.shared.seed, cell);
            std::optional<NoisyRealization> noisy;
            std::string noise_error;
            try {
              noisy = add_noise(sig, NoiseSpec::unbalanced(rho, target, cell_seed));
            } catch (const Error& e) {
              noise_error = sanitize_status(e.what());
            }
            for (const auto& method : methods) {
              std::vector<double> snr_out(channels, std::nan(""));
              std::string status = noise_error.empty() ? "ok" : noise_error;
              if (noisy) {
                try {
                  DenoiseConfig cfg = base;
                  cfg.seed = cell_seed;
                  const Signal est =
                      method == "mgwd" ? denoise(noisy->noisy, cfg).denoised : baseline_universal(noisy->noisy, cfg).denoised;
                  snr_out = channel_snr_db(sig.channels, est);
                } catch (const Error& e) {
                  status = sanitize_status(e.what());
                }
              }
              for (std::size_t c = 0; c < channels; ++c)
                rows.push_back({name, method, rho, balanced, static_cast<int>(c + 1), target[c], snr_out[c], cell_seed, status});
            }
          }
        }
      }
    }
  }

  const fs::path dir(o.out);
  const std::string results = results_csv(rows);
  const auto table = aggregate(parse_results_csv(results));
  Json matrix{{"signals", signals}, {"snr_db", snrs},       {"rho", rhos},       {"noise", o.noise},
              {"offsets", offsets ? Json(*offsets) : Json()}, {"methods", methods}, {"seeds", o.seeds}, {"n", o.n},
              {"master_seed", o.shared.seed}};
  io::Manifest manifest("benchmark", Json{{"matrix", matrix}, {"denoise", io::config_json(base, 0)}});
  manifest.emit(dir, "results.csv", results);
  manifest.emit(dir, "table.txt", aggregate_text(table));
  for (const auto& name : signals) manifest.emit(dir, "table_" + name + ".csv", aggregate_csv(table, name));

  Json agg = Json::array();
  std::map<std::string, std::vector<std::pair<double, double>>> curves;
  for (const auto& a : table) {
    agg.push_back({{"signal", a.signal},
                   {"balanced", a.balanced},
                   {"rho", a.rho},
                   {"input_snr_db", a.input_snr_db},
                   {"method", a.method},
                   {"channel_mean_output_snr_db", a.channel_mean},
                   {"average_output_snr_db", a.average},
                   {"seeds", a.seeds}});
    const std::string curve = "plot_" + a.signal + "_" + (a.balanced ? "balanced" : "unbalanced") + "_rho" +
                              io::format_double(a.rho) + "_" + a.method + ".csv";
    curves[curve].emplace_back(a.input_snr_db, a.average);
  }
  manifest.emit(dir, "aggregate.json", Json{{"manifest", io::Manifest::kFileName}, {"rows", agg}}.dump(2) + "\n");
  for (auto& [file, points] : curves) {
    std::sort(points.begin(), points.end());
    std::string s = "input_snr_db,mean_output_snr_db\n";
    for (const auto& [x, y] : points) s += io::format_double(x) + "," + io::format_double(y) + "\n";
    manifest.emit(dir, file, s);
  }
  manifest.write(dir);

  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  out << aggregate_text(table);
  out << "\n" << cell << " cells, " << rows.size() << " result rows";
  if (failed) out << " (" << failed << " rows failed; see status column)";
  out << " -> " << (dir / "results.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return kExitUsage;
  if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
  if (dynamic_cast<const GeometryError*>(&e)) return kExitGeometry;
  return kExitFailure;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multivariate wavelet denoising with a Gaussianity test on Mahalanobis distances", "mvdenoise"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  std::function<int()> action;

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic clean/noisy/noise triple");
  g->add_option("--signal", gen.signal, "heavydoppler3, bumpsblocks4, blocks, bumps, heavysine, doppler or custom")
      ->capture_default_str();
  g->add_option("--n", gen.n, "Samples per channel (>= 256)")->capture_default_str();
  g->add_option("--snr", gen.snr_db, "Input SNR in dB: one value, or one per channel")->capture_default_str();
  g->add_option("--rho", gen.rho, "Noise equicorrelation")->capture_default_str();
  g->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
  g->add_option("--input", gen.input, "Clean CSV for --signal custom");
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();
  g->callback([&] { action = [&] { return cmd_generate(gen, out); }; });

  DenoiseOptions den;
  auto* d = app.add_subcommand("denoise", "Denoise a CSV signal");
  d->add_option("input", den.input, "Noisy CSV (rows = samples, columns = channels)")->required();
  d->add_option("--clean", den.clean, "Clean reference CSV for SNR reporting");
  d->add_option("--method", den.method, "mgwd or baseline")->check(CLI::IsMember({"mgwd", "baseline"}))->capture_default_str();
  d->add_option("--out", den.out, "Output directory")->capture_default_str();
  add_shared(*d, den.shared);
  d->callback([&] { action = [&] { return cmd_denoise(den, out); }; });

  GofOptions gof;
  auto* t = app.add_subcommand("gof", "Test whether CSV rows are zero-mean Gaussian noise");
  t->add_option("input", gof.input, "CSV sample (rows = observations)")->required();
  t->add_option("--sigma", gof.sigma, "CSV covariance matrix; default is an MCD estimate");
  t->add_flag("--json", gof.json, "Print a JSON object");
  add_shared(*t, gof.shared);
  t->callback([&] { action = [&] { return cmd_gof(gof, out); }; });

  BenchmarkOptions bench;
  auto* b = app.add_subcommand("benchmark", "Run the signal x SNR x rho x seed matrix");
  b->add_option("--signals", bench.signals, "Comma-separated signal names")->capture_default_str();
  b->add_option("--snr", bench.snr_db, "Comma-separated average input SNRs (dB)")->capture_default_str();
  b->add_option("--rho", bench.rho, "Comma-separated noise correlations")->capture_default_str();
  b->add_option("--noise", bench.noise, "balanced, unbalanced or both")
      ->check(CLI::IsMember({"balanced", "unbalanced", "both"}))
      ->capture_default_str();
  b->add_option("--offsets", bench.offsets, "Per-channel dB offsets for unbalanced noise");
  b->add_option("--methods", bench.methods, "Comma-separated: mgwd, baseline")->capture_default_str();
  b->add_option("--seeds", bench.seeds, "Realizations per cell")->capture_default_str();
  b->add_option("--n", bench.n, "Samples per channel")->capture_default_str();
  b->add_option("--out", bench.out, "Output directory")->capture_default_str();
  add_shared(*b, bench.shared);
  b->callback([&] { action = [&] { return cmd_benchmark(bench, out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    err << "mvdenoise: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace mvdenoise::cli

#endif  // MVDENOISE_CLI_HPP_
