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
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relaylink/core.hpp"

namespace relaylink::oracle {

// Numerical cross-checks that never call the closed forms: adaptive
// quadrature, the order-statistics route to the relay-hop density,
// convolution, Kolmogorov-Smirnov distance and log-log slope fitting.

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadratureOptions {
  double tol = 1e-12;  // absolute
  std::size_t max_evaluations = 1'000'000;
  int initial_intervals = 16;
};

namespace detail {

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// 15-point Kronrod rule with its embedded 7-point Gauss rule. Node and
// weight tables come from Boost; the adaptive driver is ours because the
// Boost one works to a relative tolerance and has no evaluation budget.
template <class F>
Panel gk15(F& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = f0 * wk[0];
  double g = f0 * wg[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double s = f(c + h * x[i]) + f(c - h * x[i]);
    k += s * wk[i];
    if (i % 2 == 0) g += s * wg[i / 2];
  }
  const double err = std::max(std::abs(k - g) * std::abs(h),
                              2.0 * std::numeric_limits<double>::epsilon() * std::abs(k * h));
  return {a, b, k * h, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod on [a, b]; bisects the panel with the
/// largest error estimate until the summed estimate is below opts.tol.
template <class F>
QuadratureResult quad_finite(F&& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("quadrature tolerance must be > 0");
  if (!(b >= a)) throw InvalidArgument("quadrature interval must satisfy a <= b");
  if (a == b) return {0.0, 0.0, 0};
  constexpr std::size_t kPerPanel = 15;
  std::priority_queue<detail::Panel> heap;
  const int n0 = std::max(1, opts.initial_intervals);
  std::size_t evals = 0;
  for (int j = 0; j < n0; ++j) {
    const double lo = a + (b - a) * j / n0;
    const double hi = (j + 1 == n0) ? b : a + (b - a) * (j + 1) / n0;
    heap.push(detail::gk15(f, lo, hi));
    evals += kPerPanel;
  }
  auto totals = [&heap] {
    auto copy = heap;
    double v = 0.0, e = 0.0;
    while (!copy.empty()) {
      v += copy.top().value;
      e += copy.top().error;
      copy.pop();
    }
    return std::pair{v, e};
  };
  double err = totals().second;
  while (err > opts.tol) {
    if (evals + 2 * kPerPanel > opts.max_evaluations) {
      throw NonConvergence("quadrature error estimate " + std::to_string(err) +
                           " above tolerance after " + std::to_string(evals) + " evaluations");
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const detail::Panel left = detail::gk15(f, worst.a, mid);
    const detail::Panel right = detail::gk15(f, mid, worst.b);
    evals += 2 * kPerPanel;
    heap.push(left);
    heap.push(right);
    err += left.error + right.error - worst.error;
    // The running sum drifts once errors shrink far below their start.
    if (err <= opts.tol) err = totals().second;
  }
  const auto [value, error] = totals();
  return {value, error, evals};
}

/// Integral over [0, inf) via x = scale * t / (1 - t). `scale` should sit
/// near the width of the integrand's main mass.
template <class F>
QuadratureResult quad_semiinf(F&& f, const QuadratureOptions& opts = {}, double scale = 1.0) {
  if (!(scale > 0.0)) throw InvalidArgument("quad_semiinf scale must be > 0");
  auto mapped = [&](double t) {
    const double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double x = scale * t / one_minus;
    const double v = f(x);
    if (v == 0.0) return 0.0;
    return v * scale / (one_minus * one_minus);
  };
  return quad_finite(mapped, 0.0, 1.0, opts);
}

template <class F>
QuadratureResult quad_semiinf(F&& f, double tol, double scale = 1.0) {
  QuadratureOptions opts;
  opts.tol = tol;
  return quad_semiinf(std::forward<F>(f), opts, scale);
}

/// BPSK error probability at instantaneous SNR x.
inline double bpsk_error(double x) { return 0.5 * std::erfc(std::sqrt(x)); }

// ----- relay-hop density via order statistics ----------------------------

/// Density of the selected relay's hop SNR built from first principles: the
/// selected relay's bottleneck Z is the maximum of K i.i.d. exponentials, and
/// conditioned on Z = z the hop either exceeds z (Z came from the other hop)
/// or equals z (a point mass, giving the boundary term).
inline double order_statistics_pdf_numeric(double x, const AvgSnrTriple& snrs, RelayCount K,
                                    RelayHopRole role = RelayHopRole::RelayToDestination,
                                    double tol = 1e-13) {
  if (!(x >= 0.0)) throw InvalidArgument("x must be >= 0");
  const double target = role == RelayHopRole::RelayToDestination ? snrs.rd : snrs.sr;
  const double other = role == RelayHopRole::RelayToDestination ? snrs.sr : snrs.rd;
  const double bar = target * other / (target + other);
  const int k = K;
  auto log_exp_pdf = [](double v, double mean) { return -v / mean - std::log(mean); };
  auto log_max_pdf = [&](double z) {
    double v = std::log(static_cast<double>(k)) + log_exp_pdf(z, bar);
    if (k > 1) v += (k - 1) * std::log(-std::expm1(-z / bar));
    return v;
  };
  // p_other(z) p_max(z) / p_Z(z), in logs so large z cannot overflow.
  auto ratio = [&](double z) {
    return std::exp(log_exp_pdf(z, other) + log_max_pdf(z) - log_exp_pdf(z, bar));
  };
  const double p_target = std::exp(log_exp_pdf(x, target));
  QuadratureOptions opts;
  opts.tol = tol;
  opts.initial_intervals = 4;
  const double integral = x > 0.0 ? quad_finite(ratio, 0.0, x, opts).value : 0.0;
  const double log_surv_other = -x / other;
  const double boundary =
      std::exp(log_exp_pdf(x, target) + log_surv_other + log_max_pdf(x) - log_exp_pdf(x, bar));
  return p_target * integral + boundary;
}

/// (pdf_a * pdf_b)(beta) = integral_0^beta pdf_a(x) pdf_b(beta - x) dx.
template <class A, class B>
double conv_pdf_numeric(A&& pdf_a, B&& pdf_b, double beta, double tol = 1e-13) {
  if (!(beta >= 0.0)) throw InvalidArgument("beta must be >= 0");
  if (beta == 0.0) return 0.0;
  QuadratureOptions opts;
  opts.tol = tol;
  opts.initial_intervals = 4;
  return quad_finite([&](double x) { return pdf_a(x) * pdf_b(beta - x); }, 0.0, beta, opts).value;
}

// ----- goodness of fit --------------------------------------------------

/// sup_x |F_n(x) - F(x)| for sorted samples.
template <class Cdf>
double ks_statistic(const std::vector<double>& sorted_samples, Cdf&& cdf) {
  if (sorted_samples.empty()) throw InvalidArgument("ks_statistic needs samples");
  if (!std::is_sorted(sorted_samples.begin(), sorted_samples.end())) {
    throw InvalidArgument("ks_statistic needs sorted samples");
  }
  const double n = static_cast<double>(sorted_samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
    const double f = cdf(sorted_samples[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic Kolmogorov critical value at significance `alpha`:
/// sqrt(-ln(alpha/2) / 2) / sqrt(n); 1.628/sqrt(n) at alpha = 0.01.
inline double ks_critical_value(std::size_t n, double alpha = 0.01) {
  if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("bad KS parameters");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// ----- diversity slope --------------------------------------------------

/// Least-squares slope of -log10(ber) against snr_db/10, i.e. decades of BER
/// lost per decade of SNR.
inline double slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw InvalidArgument("slope_fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (const auto& [snr_db, b] : points) {
    if (!(b > 0.0)) throw InvalidArgument("slope_fit needs positive BER values");
    mx += snr_db / 10.0;
    my += -std::log10(b);
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [snr_db, b] : points) {
    const double dx = snr_db / 10.0 - mx;
    sxx += dx * dx;
    sxy += dx * (-std::log10(b) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("slope_fit needs at least two distinct SNR values");
  return sxy / sxx;
}

}  // namespace relaylink::oracle
