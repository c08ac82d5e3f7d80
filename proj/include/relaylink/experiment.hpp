// SPDX-License-Identifier: Apache-2.0
//
// relaylink: BER analysis and simulation of opportunistic decode-and-forward relaying
// Copyright (C) 2026 The relaylink authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relaylink/analytic.hpp"
#include "relaylink/core.hpp"
#include "relaylink/simlink.hpp"

namespace relaylink {

// Parameter sweeps behind the command-line tool: experiment files, the
// analytic and simulated curve tables, and their CSV form.

class ParseError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ExperimentSpec {
  std::vector<SchemeKind> schemes;
  std::vector<int> ks;
  std::vector<double> ds;
  double nu = 2.0;
  double snr_start = 0.0;
  double snr_step = 2.0;
  double snr_stop = 40.0;
  std::uint64_t trials = 10'000'000;
  std::uint64_t seed = 1;
  std::string out;  // empty: standard output
  Sampler sampler = Sampler::Natural;
  std::uint64_t min_errors = 200;

  std::vector<double> snr_points() const {
    std::vector<double> pts;
    for (int i = 0;; ++i) {
      const double v = snr_start + i * snr_step;
      if (v > snr_stop + 1e-9 * std::abs(snr_step)) break;
      pts.push_back(v);
    }
    return pts;
  }
};

/// One `key = value` assignment and where it came from (for messages).
struct SpecEntry {
  std::string key;
  std::string value;
  std::string origin;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
  return parts;
}

inline double parse_double(const std::string& text, const SpecEntry& e) {
  double v = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (text.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(e.origin + ": malformed number '" + text + "' for key '" + e.key + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& text, const SpecEntry& e) {
  // Accept plain integers as well as integral values such as 1e7.
  std::uint64_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (!text.empty() && ec == std::errc() && ptr == text.data() + text.size()) return n;
  const double d = parse_double(text, e);
  if (d < 0.0 || d != std::floor(d) || d > 1.8e19) {
    throw ParseError(e.origin + ": '" + text + "' is not a non-negative integer for key '" + e.key + "'");
  }
  return static_cast<std::uint64_t>(d);
}

inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {"schemes", "k",     "d",   "nu",      "snr",
                                                "trials",  "seed",  "out", "sampler", "min_errors"};
  return keys;
}

}  // namespace detail

/// Parses the line-oriented `key = value` format. Blank lines and lines
/// starting with '#' are skipped.
inline std::vector<SpecEntry> parse_experiment_entries(const std::string& text,
                                                       const std::string& source = "<config>") {
  std::vector<SpecEntry> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::string origin = source + ":" + std::to_string(lineno);
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(origin + ": expected 'key = value'");
    std::string key = detail::trim(std::string_view(t).substr(0, eq));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    const auto& keys = detail::known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError(origin + ": unknown key '" + key + "'");
    }
    if (auto it = seen.find(key); it != seen.end()) {
      throw ParseError(origin + ": key '" + key + "' already set on line " + std::to_string(it->second));
    }
    seen[key] = lineno;
    out.push_back({key, value, origin});
  }
  return out;
}

/// Builds a validated spec; later entries override earlier ones with the
/// same key (command-line flags are appended after file entries).
inline ExperimentSpec build_experiment_spec(const std::vector<SpecEntry>& entries) {
  std::map<std::string, SpecEntry> last;
  for (const auto& e : entries) last[e.key] = e;

  std::vector<std::string> missing;
  for (const char* req : {"schemes", "k", "d"}) {
    if (!last.count(req)) missing.emplace_back(req);
  }
  if (!missing.empty()) {
    std::string msg = "missing required key(s):";
    for (const auto& m : missing) msg += " " + m;
    throw ParseError(msg);
  }

  ExperimentSpec spec;
  for (const auto& [key, e] : last) {
    const std::string& v = e.value;
    if (key == "schemes") {
      for (const auto& item : detail::split_list(v)) {
        try {
          spec.schemes.push_back(parse_scheme(item));
        } catch (const InvalidArgument& err) {
          throw ParseError(e.origin + ": " + err.what());
        }
      }
    } else if (key == "k") {
      for (const auto& item : detail::split_list(v)) {
        const std::uint64_t k = detail::parse_count(item, e);
        if (k < 1 || k > static_cast<std::uint64_t>(RelayCount::kMax)) {
          throw ParseError(e.origin + ": k = " + item + " outside the valid range [1, " +
                           std::to_string(RelayCount::kMax) + "]");
        }
        spec.ks.push_back(static_cast<int>(k));
      }
    } else if (key == "d") {
      for (const auto& item : detail::split_list(v)) {
        const double d = detail::parse_double(item, e);
        if (!(d > 0.0 && d < 1.0)) {
          throw ParseError(e.origin + ": d = " + item + " outside the valid interval (0, 1)");
        }
        spec.ds.push_back(d);
      }
    } else if (key == "nu") {
      spec.nu = detail::parse_double(v, e);
      if (!(spec.nu >= 0.0)) throw ParseError(e.origin + ": nu = " + v + " must be >= 0");
    } else if (key == "snr") {
      const auto parts = [&] {
        std::vector<std::string> p;
        std::string cur;
        std::istringstream in(v);
        while (std::getline(in, cur, ':')) p.push_back(detail::trim(cur));
        return p;
      }();
      if (parts.size() != 3) {
        throw ParseError(e.origin + ": snr must be START:STEP:STOP, got '" + v + "'");
      }
      spec.snr_start = detail::parse_double(parts[0], e);
      spec.snr_step = detail::parse_double(parts[1], e);
      spec.snr_stop = detail::parse_double(parts[2], e);
      if (!(spec.snr_step > 0.0)) throw ParseError(e.origin + ": snr step must be > 0");
      if (spec.snr_stop < spec.snr_start) throw ParseError(e.origin + ": snr stop is below start");
    } else if (key == "trials") {
      spec.trials = detail::parse_count(v, e);
      if (spec.trials < 1) throw ParseError(e.origin + ": trials must be >= 1");
    } else if (key == "seed") {
      spec.seed = detail::parse_count(v, e);
    } else if (key == "out") {
      spec.out = v;
    } else if (key == "sampler") {
      if (v == "natural") {
        spec.sampler = Sampler::Natural;
      } else if (v == "tilted") {
        spec.sampler = Sampler::Tilted;
      } else {
        throw ParseError(e.origin + ": sampler must be 'natural' or 'tilted', got '" + v + "'");
      }
    } else if (key == "min_errors") {
      spec.min_errors = detail::parse_count(v, e);
    }
  }
  auto nonempty = [](bool ok, const char* what) {
    if (!ok) throw ParseError(std::string(what) + " needs at least one value");
  };
  nonempty(!spec.schemes.empty(), "schemes");
  nonempty(!spec.ks.empty(), "k");
  nonempty(!spec.ds.empty(), "d");
  return spec;
}

inline ExperimentSpec parse_experiment_text(const std::string& text,
                                            const std::string& source = "<config>") {
  return build_experiment_spec(parse_experiment_entries(text, source));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ExperimentSpec parse_experiment_file(const std::string& path) {
  return parse_experiment_text(read_text_file(path), path);
}

// ----- curve table ------------------------------------------------------

struct BerCurvePoint {
  double snr_db = 0.0;
  SchemeKind scheme = SchemeKind::FSCR;
  int k = 1;
  double d = 0.5;
  double nu = 2.0;
  double ber_analytic = 0.0;
  double ber_asymptotic = 0.0;
  std::optional<double> ber_sim;
  std::optional<std::uint64_t> sim_trials;
  std::optional<std::uint64_t> sim_errors;
  std::optional<double> ci_low;
  std::optional<double> ci_high;

  bool operator==(const BerCurvePoint&) const = default;
};

inline constexpr const char* kCsvHeader =
    "snr_db,scheme,k,d,nu,ber_analytic,ber_asymptotic,ber_sim,sim_trials,sim_errors,ci_low,ci_high";

/// Probabilities below this floor are written as 0.
inline constexpr double kCsvFloor = 1e-30;

namespace detail {

inline std::string format_probability(double p) {
  if (p < kCsvFloor) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", p);
  return buf;
}

inline std::string format_plain(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <class T>
std::string format_optional(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) {
    return format_probability(*v);
  } else {
    return std::to_string(*v);
  }
}

}  // namespace detail

inline std::string format_csv_row(const BerCurvePoint& p) {
  std::string row;
  row += detail::format_plain(p.snr_db) + ",";
  row += std::string(to_string(p.scheme)) + ",";
  row += std::to_string(p.k) + ",";
  row += detail::format_plain(p.d) + ",";
  row += detail::format_plain(p.nu) + ",";
  row += detail::format_probability(p.ber_analytic) + ",";
  row += detail::format_probability(p.ber_asymptotic) + ",";
  row += detail::format_optional(p.ber_sim) + ",";
  row += detail::format_optional(p.sim_trials) + ",";
  row += detail::format_optional(p.sim_errors) + ",";
  row += detail::format_optional(p.ci_low) + ",";
  row += detail::format_optional(p.ci_high);
  return row;
}

inline std::string write_csv(const std::vector<BerCurvePoint>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : rows) out += format_csv_row(r) + "\n";
  return out;
}

inline std::vector<BerCurvePoint> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kCsvHeader) {
    throw ParseError("CSV header does not match the expected schema");
  }
  std::vector<BerCurvePoint> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ls(line);
    while (std::getline(ls, cur, ',')) f.push_back(cur);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 12) throw ParseError("CSV line " + std::to_string(lineno) + ": expected 12 fields");
    const SpecEntry e{"csv", "", "CSV line " + std::to_string(lineno)};
    BerCurvePoint p;
    p.snr_db = detail::parse_double(f[0], e);
    p.scheme = parse_scheme(f[1]);
    p.k = static_cast<int>(detail::parse_count(f[2], e));
    p.d = detail::parse_double(f[3], e);
    p.nu = detail::parse_double(f[4], e);
    p.ber_analytic = detail::parse_double(f[5], e);
    p.ber_asymptotic = detail::parse_double(f[6], e);
    if (!f[7].empty()) p.ber_sim = detail::parse_double(f[7], e);
    if (!f[8].empty()) p.sim_trials = detail::parse_count(f[8], e);
    if (!f[9].empty()) p.sim_errors = detail::parse_count(f[9], e);
    if (!f[10].empty()) p.ci_low = detail::parse_double(f[10], e);
    if (!f[11].empty()) p.ci_high = detail::parse_double(f[11], e);
    rows.push_back(p);
  }
  return rows;
}

// ----- sweeps -----------------------------------------------------------

struct SweepPoint {
  SchemeKind scheme;
  int k;
  double d;
  double snr_db;
};

/// Sweep order: scheme, then K, then d, then SNR.
inline std::vector<SweepPoint> sweep_points(const ExperimentSpec& spec) {
  std::vector<SweepPoint> pts;
  const auto snrs = spec.snr_points();
  for (auto s : spec.schemes)
    for (int k : spec.ks)
      for (double d : spec.ds)
        for (double snr : snrs) pts.push_back({s, k, d, snr});
  return pts;
}

/// Runs fn(i) for i in [0, n) on `threads` workers; rethrows the first
/// failure.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
        next.store(n);
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline BerCurvePoint analytic_point(const SweepPoint& p, double nu) {
  const AvgSnrTriple snrs = avg_snrs_from_geometry({p.d, nu}, p.snr_db);
  const RelayCount K(p.k);
  BerCurvePoint row;
  row.snr_db = p.snr_db;
  row.scheme = p.scheme;
  row.k = p.k;
  row.d = p.d;
  row.nu = nu;
  row.ber_analytic = ber(p.scheme, snrs, K).p_end_to_end;
  row.ber_asymptotic = asymp(p.scheme, snrs, K);
  return row;
}

inline std::vector<BerCurvePoint> cmd_analytic(const ExperimentSpec& spec, unsigned threads = 1) {
  const auto pts = sweep_points(spec);
  std::vector<BerCurvePoint> rows(pts.size());
  parallel_for(pts.size(), threads, [&](std::size_t i) { rows[i] = analytic_point(pts[i], spec.nu); });
  return rows;
}

/// As cmd_analytic plus a Monte Carlo estimate per point. Point i is seeded
/// with derive_seed(spec.seed, i), so rows do not depend on `threads`.
inline std::vector<BerCurvePoint> cmd_simulate(const ExperimentSpec& spec, unsigned threads = 1) {
  const auto pts = sweep_points(spec);
  std::vector<BerCurvePoint> rows(pts.size());
  const unsigned outer = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(pts.size())));
  const unsigned inner = std::max(1U, threads / outer);
  parallel_for(pts.size(), outer, [&](std::size_t i) {
    BerCurvePoint row = analytic_point(pts[i], spec.nu);
    SimConfig cfg;
    cfg.scheme = pts[i].scheme;
    cfg.K = RelayCount(pts[i].k);
    cfg.variances = variances_from_geometry({pts[i].d, spec.nu});
    cfg.snr_db = pts[i].snr_db;
    cfg.trials = spec.trials;
    cfg.seed = derive_seed(spec.seed, i);
    cfg.min_errors = spec.min_errors;
    cfg.sampler = spec.sampler;
    cfg.threads = inner;
    const BerEstimate est = run_trials(cfg);
    row.ber_sim = est.ber;
    row.sim_trials = est.trials;
    row.sim_errors = est.errors;
    row.ci_low = est.ci95_low;
    row.ci_high = est.ci95_high;
    rows[i] = row;
  });
  return rows;
}

}  // namespace relaylink
