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
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "relaylink/analytic.hpp"
#include "relaylink/core.hpp"
#include "relaylink/oracle.hpp"
#include "relaylink/simlink.hpp"
#include "relaylink/stats.hpp"

namespace relaylink {

// Self-check suite behind `relaylink validate`: every closed form against
// an independent numerical route, plus the structural properties (ranges,
// symmetries, monotonicity, limits) on the standard parameter grid.

struct CheckResult {
  std::string name;
  std::string quantity;
  bool passed = false;
  double worst = 0.0;  // largest observed deviation
  double limit = 0.0;  // allowed deviation
  std::string where;   // parameters of the worst case
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  std::vector<std::string> failed_names() const {
    std::vector<std::string> out;
    for (const auto& c : checks) {
      if (!c.passed) out.push_back(c.name);
    }
    return out;
  }

  std::string to_text() const {
    std::string out;
    std::size_t npass = 0;
    for (const auto& c : checks) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "worst %.3g, limit %.3g", c.worst, c.limit);
      out += std::string(c.passed ? "PASS  " : "FAIL  ") + c.name + "  [" + c.quantity + "]  " + buf;
      if (!c.where.empty()) out += "  at " + c.where;
      out += "\n";
      npass += c.passed ? 1 : 0;
    }
    out += std::to_string(npass) + "/" + std::to_string(checks.size()) + " checks passed\n";
    return out;
  }
};

/// The closed forms under test. Replacing one lets a harness confirm that
/// a corrupted formula is caught by the matching check.
struct ClosedForms {
  using Fn = std::function<double(const AvgSnrTriple&, RelayCount)>;
  Fn p_sr_star = [](const AvgSnrTriple& s, RelayCount k) { return relaylink::p_sr_star(s, k); };
  Fn p_rstar_d = [](const AvgSnrTriple& s, RelayCount k) { return relaylink::p_rstar_d(s, k); };
  Fn p_mrc = [](const AvgSnrTriple& s, RelayCount k) { return relaylink::p_mrc(s, k); };
  Fn p_dsc = [](const AvgSnrTriple& s, RelayCount k) { return relaylink::p_dsc(s, k); };
};

/// The acceptance grid shared by the validation suite and the tests.
struct GridPoint {
  int k;
  double d;
  double nu;
  double snr_db;

  AvgSnrTriple snrs() const { return avg_snrs_from_geometry({d, nu}, snr_db); }
  std::string label() const {
    char buf[80];
    std::snprintf(buf, sizeof buf, "K=%d d=%g nu=%g snr=%gdB", k, d, nu, snr_db);
    return buf;
  }
};

inline std::vector<GridPoint> standard_grid() {
  std::vector<GridPoint> g;
  for (int k : {1, 2, 4})
    for (double d : {0.1, 0.5})
      for (double nu : {2.0, 3.0})
        for (double snr : {0.0, 10.0, 20.0, 30.0, 40.0}) g.push_back({k, d, nu, snr});
  return g;
}

namespace detail {

/// Tracks the worst deviation of a check across its cases.
class Tracker {
 public:
  Tracker(std::string name, std::string quantity, double limit)
      : r_{std::move(name), std::move(quantity), true, 0.0, limit, {}} {}

  void observe(double deviation, const std::string& where) {
    if (!(deviation <= r_.worst) || std::isnan(deviation)) {
      if (std::isnan(deviation) || deviation > r_.worst || r_.where.empty()) {
        r_.worst = std::isnan(deviation) ? std::numeric_limits<double>::infinity() : deviation;
        r_.where = where;
      }
    }
    if (!(deviation <= r_.limit)) r_.passed = false;
  }

  /// Boolean property: deviation 0 when it holds, 1 when not.
  void require(bool ok, const std::string& where) { observe(ok ? 0.0 : 1.0, where); }

  CheckResult done() {
    if (r_.passed && r_.worst == 0.0) r_.where.clear();
    return r_;
  }

 private:
  CheckResult r_;
};

inline double rel_dev(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

inline double quad_bpsk_against(const std::function<double(double)>& pdf, double scale = 1.0) {
  return oracle::quad_semiinf([&](double x) { return oracle::bpsk_error(x) * pdf(x); }, 1e-13, scale)
      .value;
}

/// (1/(2 sqrt(pi))) integral z^{-1/2} e^{-z} F(z) dz with z = u^2.
inline double quad_half_power_against(const std::function<double(double)>& cdf) {
  return oracle::quad_semiinf(
             [&](double u) { return std::exp(-u * u) * cdf(u * u) / std::sqrt(std::numbers::pi); },
             1e-13)
      .value;
}

template <class F>
double five_point_derivative(F&& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace detail

struct ValidateOptions {
  /// Samples per Kolmogorov-Smirnov check.
  std::size_t ks_samples = 100'000;
  std::uint64_t seed = 20260101;
};

inline ValidationReport cmd_validate(const ClosedForms& forms = {}, const ValidateOptions& opt = {}) {
  using detail::rel_dev;
  using detail::Tracker;
  ValidationReport rep;
  const auto grid = standard_grid();
  const RelayHopRole kRD = RelayHopRole::RelayToDestination;
  const RelayHopRole kSR = RelayHopRole::SourceToRelay;

  // ----- geometry -----
  {
    Tracker t("bottleneck below both hop means", "bottleneck average", 0.0);
    Tracker m("average SNRs increase with SNR", "linear-network average SNRs", 0.0);
    for (int di = 1; di <= 9; ++di)
      for (double nu : {2.0, 3.0, 4.0}) {
        AvgSnrTriple prev{};
        for (int snr = 0; snr <= 40; ++snr) {
          const auto s = avg_snrs_from_geometry({di / 10.0, nu}, snr);
          const std::string at = "d=" + std::to_string(di / 10.0) + " snr=" + std::to_string(snr);
          t.require(s.bottleneck() < std::min(s.sr, s.rd), at);
          if (snr > 0) m.require(s.sd > prev.sd && s.sr > prev.sr && s.rd > prev.rd, at);
          prev = s;
        }
      }
    rep.checks.push_back(t.done());
    rep.checks.push_back(m.done());
  }

  // ----- densities -----
  {
    Tracker n_sd("direct-link density integrates to 1", "direct-link SNR density", 1e-8);
    Tracker n_rd("relay-destination density integrates to 1", "selected relay-destination SNR density", 1e-8);
    Tracker n_sr("source-relay density integrates to 1", "selected source-relay SNR density", 1e-8);
    Tracker n_b("MRC output density integrates to 1", "MRC output SNR density", 1e-8);
    Tracker dcdf("CDF derivative equals density", "selected hop SNR CDF", 1e-6);
    Tracker dsd("direct-link CDF derivative equals density", "direct-link SNR CDF", 1e-6);
    Tracker conv("MRC density equals numerical convolution", "MRC output SNR density", 1e-7);
    Tracker ord("hop density equals order-statistics integral", "selected hop SNR density", 1e-7);
    Tracker swap("hop density swap symmetry", "selected hop SNR density", 0.0);
    Tracker mean("hop mean equals integral of x times density", "selected hop mean SNR", 1e-6);
    Tracker mean_gt("hop mean exceeds bottleneck mean", "selected hop mean SNR", 0.0);
    Tracker dsc_cdf("selection-combiner CDF limits and monotonicity", "selection-combiner output CDF", 0.0);
    for (const auto& g : grid) {
      if (g.snr_db > 20.0) continue;  // densities are scale-free; three SNRs cover the shapes
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const std::string at = g.label();
      n_sd.observe(std::abs(oracle::quad_semiinf([&](double y) { return pdf_gamma_sd(y, s.sd); }, 1e-12, s.sd).value - 1.0), at);
      n_rd.observe(std::abs(oracle::quad_semiinf([&](double x) { return pdf_selected_hop(x, s, K, kRD); }, 1e-12, s.rd).value - 1.0), at);
      n_sr.observe(std::abs(oracle::quad_semiinf([&](double x) { return pdf_selected_hop(x, s, K, kSR); }, 1e-12, s.sr).value - 1.0), at);
      n_b.observe(std::abs(oracle::quad_semiinf([&](double x) { return pdf_beta(x, s, K); }, 1e-12, s.sd + s.rd).value - 1.0), at);
      const double mean_q = oracle::quad_semiinf([&](double x) { return x * pdf_selected_hop(x, s, K, kRD); }, 1e-9 * s.rd, s.rd).value;
      const double mean_c = mean_selected_hop(s, K, kRD);
      mean.observe(rel_dev(mean_q, mean_c), at);
      mean_gt.require(mean_c > s.bottleneck(), at);
      const double bar = s.bottleneck();
      for (double f : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (RelayHopRole role : {kRD, kSR}) {
          const double scale = role == kRD ? s.rd : s.sr;
          const double x = f * scale;
          const double der = detail::five_point_derivative(
              [&](double z) { return cdf_selected_hop(z, s, K, role); }, x, 1e-3 * scale);
          dcdf.observe(std::abs(der - pdf_selected_hop(x, s, K, role)) * scale, at);
        }
        const double xs = f * s.sd;
        const double der_sd = detail::five_point_derivative([&](double z) { return cdf_gamma_sd(z, s.sd); }, xs, 1e-3 * s.sd);
        dsd.observe(std::abs(der_sd - pdf_gamma_sd(xs, s.sd)) * s.sd, at);

        const double xb = f * bar;
        ord.observe(std::abs(oracle::order_statistics_pdf_numeric(xb, s, K, kRD) - pdf_selected_hop(xb, s, K, kRD)) * bar, at);
        const AvgSnrTriple sw = s.swapped_hops();
        swap.observe(std::abs(pdf_selected_hop(xb, s, K, kSR) - pdf_selected_hop(xb, sw, K, kRD)), at);

        const double beta = f * (s.sd + s.rd);
        const double numeric = oracle::conv_pdf_numeric(
            [&](double y) { return pdf_gamma_sd(y, s.sd); },
            [&](double x) { return pdf_selected_hop(x, s, K, kRD); }, beta);
        conv.observe(std::abs(numeric - pdf_beta(beta, s, K)) * (s.sd + s.rd), at);
      }
      double prev = 0.0;
      bool ok = cdf_dsc(0.0, s, K) == 0.0 && std::abs(cdf_dsc(1e4 * (s.sd + s.rd), s, K) - 1.0) < 1e-12;
      for (int i = 1; i <= 200; ++i) {
        const double v = cdf_dsc(i * 0.05 * (s.sd + s.rd), s, K);
        ok = ok && v >= prev - 1e-15;
        prev = v;
      }
      dsc_cdf.require(ok, at);
    }
    for (Tracker* t : {&n_sd, &n_rd, &n_sr, &n_b, &dcdf, &dsd, &conv, &ord, &swap, &mean, &mean_gt, &dsc_cdf}) {
      rep.checks.push_back(t->done());
    }
  }

  {
    Tracker t("max-bottleneck density: expanded form equals compact form", "max of K bottleneck SNRs", 1e-10);
    for (int k = 1; k <= 8; ++k)
      for (double z : {0.01, 0.3, 1.0, 2.5, 7.0}) {
        const double a = pdf_max_bottleneck(z, 1.0, RelayCount(k));
        const double b = pdf_max_bottleneck_expanded(z, 1.0, RelayCount(k));
        // The expanded sum cancels for small z, so compare in absolute terms.
        t.observe(std::abs(a - b), "K=" + std::to_string(k) + " z=" + std::to_string(z));
      }
    rep.checks.push_back(t.done());
  }

  {
    Tracker t("small-argument approximations match exact forms", "high-SNR density and CDF approximations", 1e-2);
    using P = detail::Precise100;
    for (const auto& g : grid) {
      if (g.snr_db != 20.0) continue;
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const double bar = s.bottleneck();
      const P y(1e-4 * bar);
      const double r1 = static_cast<double>(approx_pdf_srstar<P>(y, s, K) / pdf_selected_hop<P>(y, s, K, kSR));
      const double r2 = static_cast<double>(approx_cdf_rstar_d<P>(y, s, K) / cdf_selected_hop<P>(y, s, K, kRD));
      const double r3 = static_cast<double>(approx_pdf_beta<P>(y, s, K) / pdf_beta<P>(y, s, K));
      const double r4 = static_cast<double>(approx_cdf_sd<P>(y, s.sd) / cdf_gamma_sd<P>(y, s.sd));
      t.observe(std::max({std::abs(r1 - 1), std::abs(r2 - 1), std::abs(r3 - 1), std::abs(r4 - 1)}), g.label());
    }
    rep.checks.push_back(t.done());
  }

  // ----- integral identities -----
  {
    Tracker t("l(alpha) equals its defining integral", "l(alpha) identity", 1e-9);
    for (double a : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const double q = oracle::quad_semiinf([&](double x) { return oracle::bpsk_error(x) * std::exp(-a * x); }, 1e-13, 1.0 / a).value;
      t.observe(std::abs(q - l_of_alpha(a)), "alpha=" + std::to_string(a));
    }
    rep.checks.push_back(t.done());
  }
  {
    Tracker t("Theta_a equals its defining integral", "Theta_a identity", 1e-9);
    for (double a : {0.1, 1.0, 10.0})
      for (double gsd : {0.1, 1.0, 10.0}) {
        const double c = 1.0 + 1.0 / gsd;
        const double q = oracle::quad_semiinf(
            [&](double u) {
              const double z = u * u;
              return std::exp(-z * c) * (-std::expm1(-a * z)) / a / std::sqrt(std::numbers::pi);
            },
            1e-13).value;
        t.observe(std::abs(q - theta_of_a(a, gsd)), "a=" + std::to_string(a) + " gsd=" + std::to_string(gsd));
      }
    rep.checks.push_back(t.done());
  }
  {
    Tracker t("half-integer gamma function", "Gamma(n + 1/2)", 1e-13);
    for (int n = 0; n <= 12; ++n) t.observe(rel_dev(gamma_half_integer(n), std::tgamma(n + 0.5)), "n=" + std::to_string(n));
    rep.checks.push_back(t.done());
  }

  // ----- error probabilities against quadrature -----
  {
    Tracker psr("P_sr* closed form equals quadrature", "source-relay error probability P_sr*", 1e-8);
    Tracker prd("P_r*d closed form equals quadrature", "relay-destination error probability P_r*d", 1e-8);
    Tracker pmrc("P_mrc closed form equals quadrature", "MRC error probability P_mrc", 1e-8);
    Tracker pdsc("P_DSC closed form equals quadrature", "selection-combining error probability P_DSC", 1e-8);
    Tracker i2("0 <= I2 <= I1", "selection-combining subtracted integral I2", 0.0);
    for (const auto& g : grid) {
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const std::string at = g.label();
      psr.observe(std::abs(forms.p_sr_star(s, K) - detail::quad_bpsk_against([&](double x) { return pdf_selected_hop(x, s, K, kSR); })), at);
      prd.observe(std::abs(forms.p_rstar_d(s, K) - detail::quad_bpsk_against([&](double x) { return pdf_selected_hop(x, s, K, kRD); })), at);
      pmrc.observe(std::abs(forms.p_mrc(s, K) - detail::quad_bpsk_against([&](double x) { return pdf_beta(x, s, K); })), at);
      pdsc.observe(std::abs(forms.p_dsc(s, K) - detail::quad_half_power_against([&](double z) { return cdf_dsc(z, s, K); })), at);
      const double v2 = i2_term(s, K);
      i2.require(v2 >= 0.0 && v2 <= p_rstar_d(s, K), at);
    }
    for (Tracker* t : {&psr, &prd, &pmrc, &pdsc, &i2}) rep.checks.push_back(t->done());
  }

  // ----- limits and structural properties of the error probabilities -----
  {
    Tracker t("P_DSC tends to P_r*d as the direct link vanishes", "selection-combining error probability P_DSC", 1e-5);
    for (const auto& g : grid) {
      if (g.snr_db > 20.0) continue;
      auto s = g.snrs();
      s.sd = 1e-6;
      t.observe(std::abs(forms.p_dsc(s, RelayCount(g.k)) - forms.p_rstar_d(s, RelayCount(g.k))), g.label());
    }
    rep.checks.push_back(t.done());
  }
  {
    Tracker t("P_mrc stable under jitter at coincident rates", "MRC error probability P_mrc", 1e-5);
    const std::vector<AvgSnrTriple> singular = {{10, 40, 10}, {10, 40, 40}, {4, 100, 1.0 / 0.81 * 4}};
    for (const auto& s : singular)
      for (int k : {1, 2, 4}) {
        const RelayCount K(k);
        const double base = p_mrc(s, K);
        for (double j : {-1e-7, 1e-7}) {
          AvgSnrTriple t2 = s;
          t2.sd *= 1.0 + j;
          t.observe(rel_dev(base, p_mrc(t2, K)), "sd=" + std::to_string(s.sd) + " K=" + std::to_string(k));
        }
      }
    rep.checks.push_back(t.done());
  }
  {
    Tracker t("MRC beats either branch alone", "MRC error probability P_mrc", 0.0);
    Tracker k_mono("P_r*d decreases with K for symmetric hops", "relay-destination error probability P_r*d", 0.0);
    Tracker srmono("P_sr* nonincreasing in the source-relay SNR", "source-relay error probability P_sr*", 0.0);
    for (const auto& g : grid) {
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const double pm = forms.p_mrc(s, K);
      t.require(pm <= std::min(p_direct(s.sd), forms.p_rstar_d(s, K)) * (1 + 1e-12), g.label());
      double prev = 1.0;
      for (double c : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        AvgSnrTriple s2 = s;
        s2.sr *= c;
        const double v = forms.p_sr_star(s2, K);
        srmono.require(v <= prev * (1 + 1e-12), g.label());
        prev = v;
      }
    }
    for (double snr : {0.0, 10.0, 20.0}) {
      const AvgSnrTriple s = avg_snrs_from_geometry({0.5, 2.0}, snr);
      double prev = 1.0;
      for (int k = 1; k <= 4; ++k) {
        const double v = forms.p_rstar_d(s, RelayCount(k));
        k_mono.require(v < prev, "snr=" + std::to_string(snr) + " K=" + std::to_string(k));
        prev = v;
      }
    }
    rep.checks.push_back(t.done());
    rep.checks.push_back(k_mono.done());
    rep.checks.push_back(srmono.done());
  }
  {
    Tracker scale("P_prop invariant under common SNR scaling", "error-propagation probability P_prop", 1e-12);
    Tracker lim("P_prop limits", "error-propagation probability P_prop", 1e-6);
    for (const auto& g : grid) {
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const double base = p_prop(s, K);
      for (double c : {0.1, 10.0}) scale.observe(rel_dev(base, p_prop(s.scaled(c), K)), g.label());
      AvgSnrTriple hi = s, lo = s;
      hi.sd = 1e12 * s.rd;
      lo.sd = 1e-12 * s.rd;
      lim.observe(std::max(p_prop(hi, K), 1.0 - p_prop(lo, K)), g.label());
    }
    rep.checks.push_back(scale.done());
    rep.checks.push_back(lim.done());
  }

  // ----- end-to-end BER -----
  {
    Tracker range("every probability lies in [0, 1]", "end-to-end BER breakdowns", 0.0);
    Tracker comp("composition law reproduces the end-to-end BER", "end-to-end BER breakdowns", 1e-14);
    Tracker gap("DSC never beats FSCR", "FSCR and DSC end-to-end BER", 0.0);
    Tracker sym("SR BER symmetric under hop swap", "SR end-to-end BER", 1e-12);
    for (const auto& g : grid) {
      const auto s = g.snrs();
      const RelayCount K(g.k);
      const auto f = ber_fscr(s, K);
      const auto d = ber_dsc(s, K);
      const auto r = ber_sr(s, K);
      for (const auto* b : {&f, &d, &r}) {
        bool ok = true;
        for (double v : {b->p_prop, b->p_sr_star, b->p_combiner, b->p_end_to_end}) ok = ok && v >= 0.0 && v <= 1.0;
        range.require(ok, g.label());
      }
      // Rebuild each end-to-end BER from the component closed forms.
      const double psr = forms.p_sr_star(s, K);
      const double pp = p_prop(s, K);
      comp.observe(rel_dev(f.p_end_to_end, pp * psr + (1.0 - psr) * forms.p_mrc(s, K)), g.label());
      comp.observe(rel_dev(d.p_end_to_end, pp * psr + (1.0 - psr) * forms.p_dsc(s, K)), g.label());
      const double prd = forms.p_rstar_d(s, K);
      comp.observe(rel_dev(r.p_end_to_end, psr + prd - psr * prd), g.label());
      gap.require(d.p_combiner >= f.p_combiner && d.p_end_to_end >= f.p_end_to_end, g.label());
      sym.observe(rel_dev(r.p_end_to_end, ber_sr(s.swapped_hops(), K).p_end_to_end), g.label());
    }
    for (Tracker* t : {&range, &comp, &gap, &sym}) rep.checks.push_back(t->done());
  }
  {
    Tracker mono("end-to-end BER nonincreasing in SNR", "end-to-end BER along geometry sweeps", 0.0);
    Tracker conv("asymptote gap shrinks from 20 to 40 dB", "high-SNR asymptotic BER", 0.0);
    Tracker k1("SR asymptote for one relay equals 1/(4 bar)", "SR high-SNR asymptotic BER", 1e-14);
    for (int k : {1, 2, 4})
      for (double d : {0.1, 0.5})
        for (double nu : {2.0, 3.0}) {
          const RelayCount K(k);
          const std::string at = "K=" + std::to_string(k) + " d=" + std::to_string(d) + " nu=" + std::to_string(nu);
          for (SchemeKind sc : kAllSchemes) {
            double prev = 1.0;
            for (int snr = 0; snr <= 40; snr += 2) {
              const double v = ber(sc, avg_snrs_from_geometry({d, nu}, snr), K).p_end_to_end;
              mono.require(v <= prev, at + " " + std::string(to_string(sc)));
              prev = v;
            }
            double last = std::numeric_limits<double>::infinity();
            for (double snr : {20.0, 30.0, 40.0}) {
              const auto s = avg_snrs_from_geometry({d, nu}, snr);
              const double gap = std::abs(std::log10(asymp(sc, s, K) / ber(sc, s, K).p_end_to_end));
              conv.require(gap < last, at + " " + std::string(to_string(sc)));
              last = gap;
            }
          }
          if (k == 1) {
            const auto s = avg_snrs_from_geometry({d, nu}, 20.0);
            k1.observe(rel_dev(asymp_sr(s, K), 0.25 / s.bottleneck()), at);
          }
        }
    rep.checks.push_back(mono.done());
    rep.checks.push_back(conv.done());
    rep.checks.push_back(k1.done());
  }
  {
    Tracker t("SR slope over 30-40 dB equals K", "SR end-to-end BER diversity slope", 0.15);
    for (int k : {1, 2, 4})
      for (double nu : {2.0, 3.0}) {
        std::vector<std::pair<double, double>> pts;
        for (double snr = 30.0; snr <= 40.0; snr += 1.0) {
          pts.emplace_back(snr, ber_sr(avg_snrs_from_geometry({0.5, nu}, snr), RelayCount(k)).p_end_to_end);
        }
        t.observe(std::abs(oracle::slope_fit(pts) - k), "K=" + std::to_string(k) + " nu=" + std::to_string(nu));
      }
    rep.checks.push_back(t.done());
  }

  // ----- sampling -----
  {
    Tracker hop("sampled relay-destination SNR fits its CDF (KS, 1%)", "selected relay-destination SNR CDF", 1.0);
    Tracker mx("sampled max bottleneck fits its CDF (KS, 1%)", "max of K bottleneck SNRs", 1.0);
    Tracker sel("relay selection picks the max-min relay", "relay selection rule", 0.0);
    const AvgSnrTriple s{2.0, 20.0, 5.0};
    for (int k : {1, 2, 4}) {
      const RelayCount K(k);
      RandomStream rng(opt.seed, static_cast<std::uint64_t>(k));
      auto a = sample_selected_hop_snr(rng, s, K, kRD, opt.ks_samples);
      std::sort(a.begin(), a.end());
      const double crit = oracle::ks_critical_value(a.size(), 0.01);
      hop.observe(oracle::ks_statistic(a, [&](double x) { return cdf_selected_hop(x, s, K, kRD); }) / crit, "K=" + std::to_string(k));
      auto b = sample_max_bottleneck(rng, s, K, opt.ks_samples);
      std::sort(b.begin(), b.end());
      mx.observe(oracle::ks_statistic(b, [&](double z) { return cdf_max_bottleneck(z, s.bottleneck(), K); }) / crit, "K=" + std::to_string(k));
      bool ok = true;
      for (int i = 0; i < 2000; ++i) {
        const InstantSnrs is(draw_channels(rng, {s.sd, s.sr, s.rd}, K), 1.0);
        const int r = select_relay(is);
        for (int j = 0; j < k; ++j) ok = ok && is.bottleneck(j) <= is.bottleneck(r);
      }
      sel.require(ok, "K=" + std::to_string(k));
    }
    rep.checks.push_back(hop.done());
    rep.checks.push_back(mx.done());
    rep.checks.push_back(sel.done());
  }
  {
    Tracker t("simulated SR BER matches closed form", "SR end-to-end BER", 1.0);
    SimConfig cfg;
    cfg.scheme = SchemeKind::SR;
    cfg.K = RelayCount(2);
    cfg.variances = variances_from_geometry({0.5, 2.0});
    cfg.snr_db = 10.0;
    cfg.trials = 200'000;
    cfg.seed = opt.seed;
    cfg.min_errors = 0;
    const BerEstimate e = run_trials(cfg);
    const double exact = ber_sr(cfg.avg_snrs(), cfg.K).p_end_to_end;
    const double half = 0.5 * (e.ci95_high - e.ci95_low);
    const double allowed = std::max(0.05 * exact, 3.0 * half);
    t.observe(std::abs(e.ber - exact) / allowed, "K=2 d=0.5 10dB");
    rep.checks.push_back(t.done());
  }
  return rep;
}

}  // namespace relaylink
