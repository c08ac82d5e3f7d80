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

// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance          all criteria
//   acceptance 4 7      selected criteria
//
// Exit status is nonzero when any selected criterion fails. Tolerances and
// runtime budgets are fixed below.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "relaylink/relaylink.hpp"

using namespace relaylink;

namespace {

constexpr auto kRD = RelayHopRole::RelayToDestination;
constexpr auto kSR = RelayHopRole::SourceToRelay;

struct Outcome {
  bool passed = true;
  std::string detail;
  std::vector<std::string> notes;  // printed under the verdict line
};

// Worst deviation of a family of checks with its location.
struct Worst {
  double value = 0.0;
  std::string where;
  void observe(double v, const std::string& at) {
    if (std::isnan(v) || v > value) {
      value = std::isnan(v) ? INFINITY : v;
      where = at;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string grid_label(int k, double d, double nu, double snr) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "K=%d d=%g nu=%g %gdB", k, d, nu, snr);
  return buf;
}

double quad_bpsk(const std::function<double(double)>& pdf) {
  return oracle::quad_semiinf([&](double x) { return oracle::bpsk_error(x) * pdf(x); }, 1e-13).value;
}

// ----- 1: closed forms against their defining integrals -----

Outcome criterion1() {
  constexpr double kTol = 1e-8;
  std::map<std::string, Worst> worst;
  for (const auto& g : standard_grid()) {
    const auto s = g.snrs();
    const RelayCount K(g.k);
    const std::string at = g.label();
    worst["P_sr*"].observe(std::abs(p_sr_star(s, K) - quad_bpsk([&](double x) { return pdf_selected_hop(x, s, K, kSR); })), at);
    worst["P_r*d"].observe(std::abs(p_rstar_d(s, K) - quad_bpsk([&](double x) { return pdf_selected_hop(x, s, K, kRD); })), at);
    worst["P_mrc"].observe(std::abs(p_mrc(s, K) - quad_bpsk([&](double b) { return pdf_beta(b, s, K); })), at);
    const double dsc = oracle::quad_semiinf(
                           [&](double u) { return std::exp(-u * u) * cdf_dsc(u * u, s, K) / std::sqrt(std::numbers::pi); },
                           1e-13)
                           .value;
    worst["P_DSC"].observe(std::abs(p_dsc(s, K) - dsc), at);
  }
  Outcome o;
  for (const auto& [name, w] : worst) {
    o.passed = o.passed && w.value <= kTol;
    o.notes.push_back(name + ": worst |closed form - quadrature| " + fmt("%.2e", w.value) + " at " + w.where);
  }
  o.detail = "60 grid points x 4 error probabilities, limit " + fmt("%.0e", kTol) + " absolute";
  return o;
}

// ----- 2: densities and distribution functions -----

Outcome criterion2() {
  constexpr double kNorm = 1e-8, kDeriv = 1e-6, kConv = 1e-7, kOrder = 1e-7;
  Worst norm, deriv, conv, order;
  auto fd = [](auto&& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
  };
  for (const auto& g : standard_grid()) {
    const auto s = g.snrs();
    const RelayCount K(g.k);
    const std::string at = g.label();
    const double bar = s.bottleneck();
    auto integral = [](auto&& f, double scale) { return oracle::quad_semiinf(f, 1e-12, scale).value; };
    norm.observe(std::abs(integral([&](double y) { return pdf_gamma_sd(y, s.sd); }, s.sd) - 1), at + " direct");
    norm.observe(std::abs(integral([&](double x) { return pdf_selected_hop(x, s, K, kRD); }, s.rd) - 1), at + " r*d");
    norm.observe(std::abs(integral([&](double x) { return pdf_selected_hop(x, s, K, kSR); }, s.sr) - 1), at + " sr*");
    norm.observe(std::abs(integral([&](double b) { return pdf_beta(b, s, K); }, s.sd + s.rd) - 1), at + " beta");
    norm.observe(std::abs(integral([&](double z) { return pdf_max_bottleneck(z, bar, K); }, bar) - 1), at + " max");
    for (double f : {0.05, 0.3, 1.0, 3.0, 8.0}) {
      for (auto role : {kRD, kSR}) {
        const double scale = role == kRD ? s.rd : s.sr;
        const double x = f * scale;
        const double d = fd([&](double v) { return cdf_selected_hop(v, s, K, role); }, x, 1e-3 * scale);
        deriv.observe(std::abs(d - pdf_selected_hop(x, s, K, role)), at + (role == kRD ? " r*d" : " sr*"));
        order.observe(std::abs(oracle::order_statistics_pdf_numeric(x, s, K, role) - pdf_selected_hop(x, s, K, role)),
                      at + (role == kRD ? " r*d" : " sr*"));
      }
      const double y = f * s.sd;
      deriv.observe(std::abs(fd([&](double v) { return cdf_gamma_sd(v, s.sd); }, y, 1e-3 * s.sd) - pdf_gamma_sd(y, s.sd)),
                    at + " direct");
      const double z = f * bar;
      deriv.observe(std::abs(fd([&](double v) { return cdf_max_bottleneck(v, bar, K); }, z, 1e-3 * bar) -
                             pdf_max_bottleneck(z, bar, K)),
                    at + " max");
      const double beta = f * (s.sd + s.rd);
      const double numeric = oracle::conv_pdf_numeric([&](double v) { return pdf_gamma_sd(v, s.sd); },
                                                      [&](double v) { return pdf_selected_hop(v, s, K, kRD); }, beta);
      conv.observe(std::abs(numeric - pdf_beta(beta, s, K)), at);
    }
  }
  Outcome o;
  o.passed = norm.value <= kNorm && deriv.value <= kDeriv && conv.value <= kConv && order.value <= kOrder;
  o.notes = {
      "normalization: worst " + fmt("%.2e", norm.value) + " (limit " + fmt("%.0e", kNorm) + ") at " + norm.where,
      "CDF derivative vs density: worst " + fmt("%.2e", deriv.value) + " (limit " + fmt("%.0e", kDeriv) + ") at " + deriv.where,
      "MRC density vs convolution: worst " + fmt("%.2e", conv.value) + " (limit " + fmt("%.0e", kConv) + ") at " + conv.where,
      "hop density vs order-statistics integral: worst " + fmt("%.2e", order.value) + " (limit " + fmt("%.0e", kOrder) +
          ") at " + order.where,
  };
  o.detail = "60 grid points";
  return o;
}

// ----- 3: sampled SNRs against their distribution functions -----

Outcome criterion3() {
  constexpr std::size_t kSamples = 1'000'000;
  constexpr double kAlpha = 0.01;
  // Unequal hops so the selection actually shapes the law.
  const auto s = avg_snrs_from_geometry({0.1, 2.0}, 10.0);
  Outcome o;
  for (int k : {1, 2, 4}) {
    const RelayCount K(k);
    RandomStream rng(derive_seed(2026, k), 0);
    auto hop = sample_selected_hop_snr(rng, s, K, kRD, kSamples);
    std::sort(hop.begin(), hop.end());
    auto mx = sample_max_bottleneck(rng, s, K, kSamples);
    std::sort(mx.begin(), mx.end());
    const double crit = oracle::ks_critical_value(kSamples, kAlpha);
    const double d1 = oracle::ks_statistic(hop, [&](double x) { return cdf_selected_hop(x, s, K, kRD); });
    const double d2 = oracle::ks_statistic(mx, [&](double z) { return cdf_max_bottleneck(z, s.bottleneck(), K); });
    o.passed = o.passed && d1 < crit && d2 < crit;
    o.notes.push_back("K=" + std::to_string(k) + ": KS r*d hop " + fmt("%.2e", d1) + ", max bottleneck " +
                      fmt("%.2e", d2) + ", critical " + fmt("%.2e", crit));
  }
  o.detail = "10^6 draws each, 1% level, d=0.1 nu=2 at 10 dB";
  return o;
}

// ----- 4: closed-form BER against simulation -----

Outcome criterion4() {
  constexpr std::uint64_t kSamples = 1'000'000;
  constexpr std::uint64_t kMinErrors = 200;
  constexpr double kRelSr = 0.05, kRelCombined = 0.15, kHalfWidths = 3.0;
  const unsigned threads = std::max(1U, std::thread::hardware_concurrency());
  Outcome o;
  double worst_ratio = 0.0;
  std::string worst_at;
  int points = 0;
  for (SchemeKind sc : kAllSchemes)
    for (int k : {2, 4}) {
      for (int snr = 0; snr <= 20; snr += 2) {
        SimConfig cfg;
        cfg.scheme = sc;
        cfg.K = RelayCount(k);
        cfg.variances = variances_from_geometry({0.1, 2.0});
        cfg.snr_db = snr;
        cfg.trials = kSamples;
        cfg.seed = derive_seed(4, static_cast<std::uint64_t>(points));
        cfg.sampler = Sampler::Tilted;
        cfg.threads = threads;
        const BerEstimate e = run_trials(cfg);
        const double exact = ber(sc, cfg.avg_snrs(), cfg.K).p_end_to_end;
        const double half = 0.5 * (e.ci95_high - e.ci95_low);
        const double band = std::max((sc == SchemeKind::SR ? kRelSr : kRelCombined) * exact, kHalfWidths * half);
        const double dev = std::abs(e.ber - exact);
        const bool ok = dev <= band && e.errors >= kMinErrors;
        const std::string at = std::string(to_string(sc)) + " " + grid_label(k, 0.1, 2.0, snr);
        if (dev / band > worst_ratio) {
          worst_ratio = dev / band;
          worst_at = at;
        }
        char line[200];
        std::snprintf(line, sizeof line, "%s%s: sim %.4e +- %.1e, closed form %.4e, ratio %.3f, %llu error samples",
                      ok ? "" : "OUT ", at.c_str(), e.ber, half, exact, e.ber / exact,
                      static_cast<unsigned long long>(e.errors));
        o.notes.push_back(line);
        o.passed = o.passed && ok;
        ++points;
      }
    }
  o.detail = std::to_string(points) + " points, worst |sim - closed form| / band " + fmt("%.3f", worst_ratio) + " at " +
             worst_at;
  return o;
}

// ----- 5: diversity slopes -----

double slope(SchemeKind sc, int k, double d, double lo, double hi) {
  std::vector<std::pair<double, double>> pts;
  for (double snr = lo; snr <= hi + 1e-9; snr += 1.0) {
    pts.emplace_back(snr, ber(sc, avg_snrs_from_geometry({d, 2.0}, snr), RelayCount(k)).p_end_to_end);
  }
  return oracle::slope_fit(pts);
}

Outcome criterion5() {
  Outcome o;
  auto record = [&](const std::string& what, double v, bool ok, const std::string& want) {
    o.passed = o.passed && ok;
    o.notes.push_back(std::string(ok ? "" : "OUT ") + what + ": slope " + fmt("%.3f", v) + " (want " + want + ")");
  };
  for (int k : {2, 4}) {
    const std::string K = std::to_string(k);
    const double sr = slope(SchemeKind::SR, k, 0.5, 30, 40);
    record("SR K=" + K + " d=0.5 30-40 dB", sr, std::abs(sr - k) <= 0.15, K + " +- 0.15");
    for (SchemeKind sc : {SchemeKind::FSCR, SchemeKind::DSC}) {
      const std::string name(to_string(sc));
      const double mid = slope(sc, k, 0.5, 30, 40);
      record(name + " K=" + K + " d=0.5 30-40 dB", mid, std::abs(mid - k) <= 0.3, K + " +- 0.3");
      const double near = slope(sc, k, 0.1, 10, 25);
      record(name + " K=" + K + " d=0.1 10-25 dB", near, near >= k + 0.5, ">= " + fmt("%.1f", k + 0.5));
    }
  }
  o.detail = "least-squares slope of closed-form BER, 1 dB spacing, nu=2";
  return o;
}

// ----- 6: asymptote convergence -----

Outcome criterion6() {
  Outcome o;
  int cases = 0, bad = 0;
  for (int k : {1, 2, 4})
    for (double d : {0.1, 0.5})
      for (double nu : {2.0, 3.0})
        for (SchemeKind sc : kAllSchemes) {
          double prev = INFINITY;
          std::string gaps;
          bool ok = true;
          for (double snr : {20.0, 30.0, 40.0}) {
            const auto s = avg_snrs_from_geometry({d, nu}, snr);
            const double gap = std::abs(std::log10(asymp(sc, s, RelayCount(k)) / ber(sc, s, RelayCount(k)).p_end_to_end));
            ok = ok && gap < prev;
            prev = gap;
            gaps += fmt(" %.3g", gap);
          }
          ++cases;
          if (!ok) {
            ++bad;
            o.notes.push_back("OUT " + std::string(to_string(sc)) + " " + grid_label(k, d, nu, 0) + ": gaps" + gaps);
          }
        }
  o.passed = bad == 0;
  o.detail = std::to_string(cases - bad) + "/" + std::to_string(cases) +
             " (scheme, K, d, nu) cases with |log10(asymptote/exact)| strictly shrinking over 20, 30, 40 dB";
  return o;
}

// ----- 7: FSCR against DSC -----

double snr_at_ber(SchemeKind sc, int k, double d, double nu, double target) {
  double lo = -20.0, hi = 80.0;
  auto f = [&](double snr) { return ber(sc, avg_snrs_from_geometry({d, nu}, snr), RelayCount(k)).p_end_to_end; };
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome criterion7() {
  Outcome o;
  int order_fail = 0;
  for (const auto& g : standard_grid()) {
    const auto s = g.snrs();
    if (ber_dsc(s, RelayCount(g.k)).p_end_to_end < ber_fscr(s, RelayCount(g.k)).p_end_to_end) {
      ++order_fail;
      o.notes.push_back("OUT DSC below FSCR at " + g.label());
    }
  }
  bool shrinks = true;
  for (int k : {1, 2, 4})
    for (double nu : {2.0, 3.0}) {
      double gap[2];
      int i = 0;
      for (double d : {0.1, 0.5}) {
        gap[i++] = snr_at_ber(SchemeKind::DSC, k, d, nu, 1e-3) - snr_at_ber(SchemeKind::FSCR, k, d, nu, 1e-3);
      }
      const bool ok = gap[1] < gap[0];
      shrinks = shrinks && ok;
      char line[160];
      std::snprintf(line, sizeof line, "%sK=%d nu=%g: DSC-FSCR gap at BER 1e-3 is %.3f dB at d=0.1, %.3f dB at d=0.5",
                    ok ? "" : "OUT ", k, nu, gap[0], gap[1]);
      o.notes.push_back(line);
    }
  o.passed = order_fail == 0 && shrinks;
  o.detail = "DSC >= FSCR at all 60 grid points: " + std::string(order_fail == 0 ? "yes" : "no") +
             "; gap shrinks from d=0.1 to d=0.5: " + (shrinks ? "yes" : "no");
  return o;
}

// ----- 8: determinism under worker counts -----

Outcome criterion8() {
  ExperimentSpec spec = parse_experiment_text(
      "schemes = fscr,dsc,sr\nk = 1,2,4\nd = 0.1,0.5\nnu = 2\nsnr = 0:5:20\ntrials = 200000\nseed = 8\n", "criterion8");
  Outcome o;
  for (Sampler sampler : {Sampler::Natural, Sampler::Tilted}) {
    spec.sampler = sampler;
    if (sampler == Sampler::Tilted) spec.trials = 50'000;
    const std::string base = write_csv(cmd_simulate(spec, 1));
    for (unsigned n : {4U, 16U}) {
      const bool same = write_csv(cmd_simulate(spec, n)) == base;
      o.passed = o.passed && same;
      o.notes.push_back(std::string(sampler == Sampler::Natural ? "natural" : "tilted") + " sampler, " +
                        std::to_string(n) + " workers: " + (same ? "identical to 1 worker" : "DIFFERS from 1 worker"));
    }
    const bool again = write_csv(cmd_simulate(spec, 1)) == base;
    o.passed = o.passed && again;
  }
  const std::string a1 = write_csv(cmd_analytic(spec, 1));
  o.passed = o.passed && a1 == write_csv(cmd_analytic(spec, 16));
  o.detail = "simulate CSV byte-compared at 1, 4 and 16 workers";
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "closed-form/quadrature equivalence", 60, criterion1},
    {2, "PDF/CDF suite", 60, criterion2},
    {3, "sampling consistency", 60, criterion3},
    {4, "closed-form vs simulated BER", 1200, criterion4},
    {5, "diversity slopes", 60, criterion5},
    {6, "asymptote convergence", 60, criterion6},
    {7, "FSCR-DSC gap", 60, criterion7},
    {8, "determinism and parallel invariance", 600, criterion8},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 8) {
      std::fprintf(stderr, "usage: acceptance [criterion 1-8 ...]\n");
      return 2;
    }
    wanted.push_back(id);
  }
  if (wanted.empty()) wanted = {1, 2, 3, 4, 5, 6, 7, 8};

  bool all = true;
  for (int id : wanted) {
    const Criterion& c = kCriteria[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("threw: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_seconds;
    const bool pass = o.passed && in_time;
    all = all && pass;
    std::printf("criterion %d %s: %s (%s; %.1f s of %.0f s budget)\n", c.id, pass ? "PASS" : "FAIL", c.title,
                o.detail.c_str(), secs, c.budget_seconds);
    for (const auto& n : o.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
