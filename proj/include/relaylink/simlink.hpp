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
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "relaylink/core.hpp"
#include "relaylink/rng.hpp"

namespace relaylink {

// Symbol-level Monte Carlo of the two-phase decode-and-forward link.
// Noise power defaults to N0 = 1 and the symbol energy carries the SNR.

using Complex = std::complex<double>;

struct ChannelDraw {
  Complex h_sd;
  std::vector<Complex> h_sr;
  std::vector<Complex> h_rd;
};

/// Circularly-symmetric complex Gaussian with E|h|^2 = variance.
inline Complex draw_gain(RandomStream& rng, double variance) {
  const double s = std::sqrt(0.5 * variance);
  const double re = rng.normal();
  const double im = rng.normal();
  return {s * re, s * im};
}

inline ChannelDraw draw_channels(RandomStream& rng, const LinkVariances& v, RelayCount K) {
  if (!(v.sd > 0.0 && v.sr > 0.0 && v.rd > 0.0)) throw InvalidArgument("variances must be > 0");
  ChannelDraw d;
  d.h_sd = draw_gain(rng, v.sd);
  d.h_sr.resize(K);
  d.h_rd.resize(K);
  for (int k = 0; k < K; ++k) {
    d.h_sr[k] = draw_gain(rng, v.sr);
    d.h_rd[k] = draw_gain(rng, v.rd);
  }
  return d;
}

struct InstantSnrs {
  double gamma_sd = 0.0;
  std::vector<double> gamma_sr;
  std::vector<double> gamma_rd;

  InstantSnrs() = default;
  InstantSnrs(const ChannelDraw& d, double es, double n0 = 1.0)
      : gamma_sd(es * std::norm(d.h_sd) / n0) {
    gamma_sr.reserve(d.h_sr.size());
    gamma_rd.reserve(d.h_rd.size());
    for (const auto& h : d.h_sr) gamma_sr.push_back(es * std::norm(h) / n0);
    for (const auto& h : d.h_rd) gamma_rd.push_back(es * std::norm(h) / n0);
  }

  int relays() const { return static_cast<int>(gamma_sr.size()); }
  double bottleneck(int k) const { return std::min(gamma_sr[k], gamma_rd[k]); }
};

/// argmax_k min(gamma_sr[k], gamma_rd[k]); the lowest index wins ties.
inline int select_relay(const InstantSnrs& s) {
  if (s.relays() < 1 || s.gamma_sr.size() != s.gamma_rd.size()) {
    throw InvalidArgument("select_relay needs K >= 1 matching hop lists");
  }
  int best = 0;
  double best_min = s.bottleneck(0);
  for (int k = 1; k < s.relays(); ++k) {
    const double m = s.bottleneck(k);
    if (m > best_min) {
      best = k;
      best_min = m;
    }
  }
  return best;
}

/// Derived SNRs of the selected relay and the combiners.
struct SelectedSnrs {
  int relay = 0;
  double gamma_srstar = 0.0;
  double gamma_rstar_d = 0.0;
  double beta = 0.0;       // MRC output
  double gamma_dsc = 0.0;  // SC output

  explicit SelectedSnrs(const InstantSnrs& s)
      : relay(select_relay(s)),
        gamma_srstar(s.gamma_sr[relay]),
        gamma_rstar_d(s.gamma_rd[relay]),
        beta(s.gamma_sd + gamma_rstar_d),
        gamma_dsc(std::max(s.gamma_sd, gamma_rstar_d)) {}
};

// ----- one symbol -------------------------------------------------------

struct SymbolOutcome {
  bool error = false;
  bool relay_error = false;
};

/// Sends one BPSK symbol through broadcast, relay hard decision and
/// retransmission, then detects it at the destination. `es` is the symbol
/// energy and `n0` the complex noise power per receive branch (0 disables
/// noise).
///
/// When `tilt` is given, the relay noise and the destination noise are each
/// drawn from an even mixture of their true law and a copy shifted so that
/// the matched-filter statistic lands on the decision boundary. The
/// likelihood ratio (at most 2 per stage) is multiplied into *tilt.
inline SymbolOutcome simulate_symbol(RandomStream& rng, SchemeKind scheme, double es, double n0,
                                     const ChannelDraw& draw, double* tilt = nullptr) {
  const int K = static_cast<int>(draw.h_sr.size());
  // Selection only needs the ordering of the bottlenecks, so |h|^2 suffices.
  int r = 0;
  double best = std::min(std::norm(draw.h_sr[0]), std::norm(draw.h_rd[0]));
  for (int k = 1; k < K; ++k) {
    const double m = std::min(std::norm(draw.h_sr[k]), std::norm(draw.h_rd[k]));
    if (m > best) {
      best = m;
      r = k;
    }
  }
  const Complex h_sd = draw.h_sd;
  const Complex h_sr = draw.h_sr[r];
  const Complex h_rd = draw.h_rd[r];

  const double s = rng.bit() ? 1.0 : -1.0;
  const double amp = std::sqrt(es);
  auto noise = [&] { return n0 > 0.0 ? draw_gain(rng, n0) : Complex{}; };
  const bool tilting = tilt != nullptr && n0 > 0.0;
  // Shifts listed noise terms by their deltas on half of the draws.
  auto apply_tilt = [&](std::initializer_list<std::pair<Complex*, Complex>> terms) {
    const bool shifted = rng.uniform() < 0.5;
    double log_ratio = 0.0;  // log(shifted density / true density) at the final noise
    for (const auto& [n, delta] : terms) {
      if (shifted) *n += delta;
      log_ratio += (2.0 * (std::conj(delta) * *n).real() - std::norm(delta)) / n0;
    }
    *tilt /= 0.5 + 0.5 * std::exp(log_ratio);
  };

  // Phase 1: broadcast. The direct-link noise is drawn for every scheme so
  // the random stream layout does not depend on the scheme.
  Complex n_d = noise();
  Complex n_r = noise();
  if (tilting) apply_tilt({{&n_r, -s * amp * h_sr}});
  const Complex y_r = amp * h_sr * s + n_r;
  const double s_hat = (std::conj(h_sr) * y_r).real() >= 0.0 ? 1.0 : -1.0;

  // Phase 2: the selected relay forwards its own decision.
  Complex n_d2 = noise();
  const bool direct_branch = std::norm(h_sd) >= std::norm(h_rd);
  if (tilting) {
    switch (scheme) {
      case SchemeKind::FSCR: apply_tilt({{&n_d, -s * amp * h_sd}, {&n_d2, -s * amp * h_rd}}); break;
      case SchemeKind::DSC:
        if (direct_branch) {
          apply_tilt({{&n_d, -s * amp * h_sd}});
        } else {
          apply_tilt({{&n_d2, -s * amp * h_rd}});
        }
        break;
      case SchemeKind::SR: apply_tilt({{&n_d2, -s * amp * h_rd}}); break;
    }
  }
  const Complex y_d = amp * h_sd * s + n_d;
  const Complex y_d2 = amp * h_rd * s_hat + n_d2;

  double metric = 0.0;
  switch (scheme) {
    case SchemeKind::FSCR:
      metric = (std::conj(h_sd) * y_d + std::conj(h_rd) * y_d2).real();
      break;
    case SchemeKind::DSC:
      metric = direct_branch ? (std::conj(h_sd) * y_d).real() : (std::conj(h_rd) * y_d2).real();
      break;
    case SchemeKind::SR:
      metric = (std::conj(h_rd) * y_d2).real();
      break;
  }
  const double decided = metric >= 0.0 ? 1.0 : -1.0;
  return {decided != s, s_hat != s};
}

// ----- tilted channel sampler -------------------------------------------

/// Importance sampler for low BER. The direct-link SNR and the largest
/// bottleneck are drawn from defensive mixtures that put extra mass on weak
/// channels (the bottleneck through Gamma(K) laws, which share its z^(K-1)
/// behavior near the origin); everything else is drawn from its exact
/// conditional law. draw() returns the likelihood ratio of the draw.
class TiltedChannelSampler {
 public:
  TiltedChannelSampler(const AvgSnrTriple& snrs, RelayCount K, double es)
      : snrs_(snrs), bar_(snrs.bottleneck()), k_(K), es_(es) {
    sd_means_ = {snrs.sd, std::min(snrs.sd, 1.0), std::min(snrs.sd, 4.0)};
    gamma_scales_ = {0.0, std::min(bar_ / k_, 1.0), std::min(bar_ / k_, 3.0)};
    log_factorial_ = std::lgamma(static_cast<double>(k_));
    p_sr_min_ = bar_ / snrs.sr;
    q_sr_min_ = std::clamp(p_sr_min_, 0.2, 0.8);
  }

  double draw(RandomStream& rng, ChannelDraw& out) const {
    double weight = 1.0;

    const double g_sd = rng.exponential(sd_means_[pick(rng)]);
    weight *= exp_pdf(g_sd, snrs_.sd) / sd_mixture_pdf(g_sd);

    double z_max;
    if (const int c = pick(rng); c == 0) {
      z_max = -bar_ * std::log1p(-std::pow(rng.uniform(), 1.0 / k_));
    } else {
      z_max = 0.0;
      for (int j = 0; j < k_; ++j) z_max += rng.exponential(gamma_scales_[c]);
    }
    weight *= max_pdf(z_max, bar_, k_) / max_mixture_pdf(z_max);

    const int selected = std::min(static_cast<int>(rng.uniform() * k_), k_ - 1);
    out.h_sd = gain_from_snr(rng, g_sd);
    out.h_sr.resize(k_);
    out.h_rd.resize(k_);
    const double trunc = -std::expm1(-z_max / bar_);
    for (int k = 0; k < k_; ++k) {
      double z = z_max;
      if (k != selected) z = -bar_ * std::log1p(-rng.uniform() * trunc);
      bool sr_is_min;
      const double u = rng.uniform();
      if (k == selected) {
        sr_is_min = u < q_sr_min_;
        weight *= sr_is_min ? p_sr_min_ / q_sr_min_ : (1.0 - p_sr_min_) / (1.0 - q_sr_min_);
      } else {
        sr_is_min = u < p_sr_min_;
      }
      const double other_mean = sr_is_min ? snrs_.rd : snrs_.sr;
      const double g_other = z + rng.exponential(other_mean);
      const double g_sr = sr_is_min ? z : g_other;
      const double g_rd = sr_is_min ? g_other : z;
      out.h_sr[k] = gain_from_snr(rng, g_sr);
      out.h_rd[k] = gain_from_snr(rng, g_rd);
    }
    return weight;
  }

 private:
  static constexpr double kMixWeights[3] = {0.2, 0.4, 0.4};

  static double exp_pdf(double x, double mean) { return std::exp(-x / mean) / mean; }
  static double max_pdf(double z, double mean, int k) {
    return k / mean * std::exp(-z / mean) * std::pow(-std::expm1(-z / mean), k - 1);
  }

  double sd_mixture_pdf(double x) const {
    double f = 0.0;
    for (int j = 0; j < 3; ++j) f += kMixWeights[j] * exp_pdf(x, sd_means_[j]);
    return f;
  }

  double gamma_pdf(double z, double scale) const {
    return std::exp((k_ - 1) * std::log(z / scale) - z / scale - log_factorial_) / scale;
  }

  double max_mixture_pdf(double z) const {
    return kMixWeights[0] * max_pdf(z, bar_, k_) + kMixWeights[1] * gamma_pdf(z, gamma_scales_[1]) +
           kMixWeights[2] * gamma_pdf(z, gamma_scales_[2]);
  }

  static int pick(RandomStream& rng) {
    const double u = rng.uniform();
    return u < kMixWeights[0] ? 0 : (u < kMixWeights[0] + kMixWeights[1] ? 1 : 2);
  }

  Complex gain_from_snr(RandomStream& rng, double gamma) const {
    return std::polar(std::sqrt(gamma / es_), 2.0 * std::numbers::pi * rng.uniform());
  }

  AvgSnrTriple snrs_;
  double bar_;
  int k_;
  double es_;
  std::array<double, 3> sd_means_{};
  std::array<double, 3> gamma_scales_{};
  double log_factorial_ = 0.0;
  double p_sr_min_;
  double q_sr_min_;
};

// ----- many symbols -----------------------------------------------------

enum class Sampler { Natural, Tilted };

struct SimConfig {
  SchemeKind scheme = SchemeKind::FSCR;
  RelayCount K{1};
  LinkVariances variances{};
  double snr_db = 0.0;
  std::uint64_t trials = 10'000'000;
  std::uint64_t seed = 1;
  std::uint64_t min_errors = 200;
  Sampler sampler = Sampler::Natural;
  double n0 = 1.0;
  /// Worker threads; 0 means hardware concurrency. Never changes results.
  unsigned threads = 1;
  std::uint64_t block_size = 1 << 16;

  static LinkVariances variances_for(const NetworkGeometry& g) { return variances_from_geometry(g); }

  void validate() const {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (block_size < 1) throw InvalidArgument("block_size must be >= 1");
    if (!(variances.sd > 0.0 && variances.sr > 0.0 && variances.rd > 0.0)) {
      throw InvalidArgument("variances must be > 0");
    }
    if (!std::isfinite(snr_db)) throw InvalidArgument("snr_db must be finite");
    if (!(n0 >= 0.0)) throw InvalidArgument("n0 must be >= 0");
  }

  double es() const { return db_to_linear(snr_db); }
  AvgSnrTriple avg_snrs() const { return avg_snrs_from_variances(variances, snr_db); }
};

struct BerEstimate {
  std::uint64_t errors = 0;  // raw count of erroneous symbols
  std::uint64_t trials = 0;
  double ber = 0.0;
  double ci95_low = 0.0;
  double ci95_high = 0.0;
  std::uint64_t prop_events = 0;  // selected relay decided wrongly
  std::uint64_t prop_errors = 0;  // ... and the destination erred as well
  /// Estimated probability that the selected relay decides wrongly.
  double relay_error_rate = 0.0;
  /// True when the estimate came from the tilted sampler (weighted mean,
  /// normal-approximation interval) rather than plain counting (Wilson).
  bool weighted = false;
};

/// Wilson score interval at 95%.
inline std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (p + z * z / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

namespace detail {

struct BlockTally {
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t prop_events = 0;
  std::uint64_t prop_errors = 0;
  double w_err = 0.0;
  double w2_err = 0.0;
  double w_relay = 0.0;

  void merge(const BlockTally& o) {
    trials += o.trials;
    errors += o.errors;
    prop_events += o.prop_events;
    prop_errors += o.prop_errors;
    w_err += o.w_err;
    w2_err += o.w2_err;
    w_relay += o.w_relay;
  }
};

inline BlockTally run_block(const SimConfig& cfg, std::uint64_t block, std::uint64_t n) {
  RandomStream rng(cfg.seed, block);
  const double es = cfg.es();
  BlockTally t;
  ChannelDraw draw;
  std::optional<TiltedChannelSampler> tilted;
  if (cfg.sampler == Sampler::Tilted) tilted.emplace(cfg.avg_snrs(), cfg.K, es);
  for (std::uint64_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (tilted) {
      w = tilted->draw(rng, draw);
    } else {
      draw = draw_channels(rng, cfg.variances, cfg.K);
    }
    const SymbolOutcome o =
        simulate_symbol(rng, cfg.scheme, es, cfg.n0, draw, tilted ? &w : nullptr);
    ++t.trials;
    if (o.error) {
      ++t.errors;
      t.w_err += w;
      t.w2_err += w * w;
    }
    if (o.relay_error) {
      ++t.prop_events;
      t.w_relay += w;
      if (o.error) ++t.prop_errors;
    }
  }
  return t;
}

inline BerEstimate finish(const SimConfig& cfg, const BlockTally& t) {
  BerEstimate e;
  e.errors = t.errors;
  e.trials = t.trials;
  e.prop_events = t.prop_events;
  e.prop_errors = t.prop_errors;
  const double n = static_cast<double>(t.trials);
  if (cfg.sampler == Sampler::Natural) {
    e.ber = static_cast<double>(t.errors) / n;
    e.relay_error_rate = static_cast<double>(t.prop_events) / n;
    std::tie(e.ci95_low, e.ci95_high) = wilson_interval(t.errors, t.trials);
  } else {
    e.weighted = true;
    e.ber = t.w_err / n;
    e.relay_error_rate = t.w_relay / n;
    const double var = n > 1.0 ? std::max(0.0, (t.w2_err - n * e.ber * e.ber) / (n - 1.0)) : 0.0;
    const double half = 1.959963984540054 * std::sqrt(var / n);
    e.ci95_low = std::max(0.0, e.ber - half);
    e.ci95_high = std::min(1.0, e.ber + half);
  }
  return e;
}

}  // namespace detail

/// Runs up to cfg.trials symbols in fixed-size blocks, each with its own
/// random stream. Blocks are reduced in index order and the early-stop rule
/// (errors >= min_errors and at least trials/10 symbols) is tested on block
/// prefixes, so the result depends only on the seed and the block size.
/// Early stopping applies to the natural sampler only.
inline BerEstimate run_trials(const SimConfig& cfg) {
  cfg.validate();
  const std::uint64_t nblocks = (cfg.trials + cfg.block_size - 1) / cfg.block_size;
  auto block_len = [&](std::uint64_t b) {
    return std::min(cfg.block_size, cfg.trials - b * cfg.block_size);
  };
  const std::uint64_t min_trials = cfg.trials / 10;
  // Under the tilted sampler errors are common by construction, so the raw
  // count says nothing about precision and the full budget always runs.
  auto should_stop = [&](const detail::BlockTally& t) {
    return cfg.sampler == Sampler::Natural && cfg.min_errors > 0 && t.errors >= cfg.min_errors &&
           t.trials >= min_trials;
  };

  unsigned workers = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, nblocks));

  detail::BlockTally total;
  if (workers <= 1) {
    for (std::uint64_t b = 0; b < nblocks; ++b) {
      total.merge(detail::run_block(cfg, b, block_len(b)));
      if (should_stop(total)) break;
    }
    return detail::finish(cfg, total);
  }

  std::vector<std::optional<detail::BlockTally>> done(nblocks);
  std::mutex mu;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  std::uint64_t prefix = 0;  // blocks merged into `total`, guarded by mu

  auto work = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::uint64_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      detail::BlockTally t = detail::run_block(cfg, b, block_len(b));
      std::lock_guard<std::mutex> lock(mu);
      done[b] = t;
      while (prefix < nblocks && done[prefix] && !stop.load()) {
        total.merge(*done[prefix]);
        ++prefix;
        if (should_stop(total)) stop.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  return detail::finish(cfg, total);
}

// ----- sampling realizations of the SNR statistics ----------------------

/// `n` draws of the selected relay's hop SNR (Es/N0 = 1, so the variances
/// are the average SNRs).
inline std::vector<double> sample_selected_hop_snr(RandomStream& rng, const AvgSnrTriple& snrs,
                                                   RelayCount K, RelayHopRole role, std::size_t n) {
  snrs.validate();
  const LinkVariances v{snrs.sd, snrs.sr, snrs.rd};
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const InstantSnrs s(draw_channels(rng, v, K), 1.0);
    const int r = select_relay(s);
    out.push_back(role == RelayHopRole::RelayToDestination ? s.gamma_rd[r] : s.gamma_sr[r]);
  }
  return out;
}

/// `n` draws of max_k min(gamma_sr[k], gamma_rd[k]).
inline std::vector<double> sample_max_bottleneck(RandomStream& rng, const AvgSnrTriple& snrs,
                                                 RelayCount K, std::size_t n) {
  snrs.validate();
  const LinkVariances v{snrs.sd, snrs.sr, snrs.rd};
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const InstantSnrs s(draw_channels(rng, v, K), 1.0);
    out.push_back(s.bottleneck(select_relay(s)));
  }
  return out;
}

}  // namespace relaylink
