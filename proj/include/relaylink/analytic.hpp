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

#include <cmath>
#include <numbers>

#include "relaylink/core.hpp"
#include "relaylink/detail/numerics.hpp"
#include "relaylink/stats.hpp"

namespace relaylink {

// Closed-form BER of the three schemes. Each building block exists in two
// forms: a template `*_in<Real>` that evaluates the expression at a given
// working precision, and a double-valued wrapper that climbs the precision
// ladder until the alternating binomial sums have stopped cancelling.

// ----- integral identities ----------------------------------------------

/// l(a) = integral_0^inf erfc(sqrt(x))/2 * exp(-a x) dx
///      = (1/(2a)) (1 - 1/sqrt(1+a)), rewritten as 1 / (2 s (1+s)) with s = sqrt(1+a).
template <class Real>
Real l_of_alpha_in(const Real& a) {
  const Real s = detail::sqrt_(Real(Real(1) + a));
  return Real(1) / (Real(2) * s * (Real(1) + s));
}

inline double l_of_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("l(alpha) needs alpha > 0");
  return l_of_alpha_in(alpha);
}

/// Theta_a = 1/(2 sqrt(pi)) integral z^{-1/2} exp(-z (1 + 1/gbar_sd)) Psi_a(z) dz
///         = (1/(2a)) (1/sqrt(c) - 1/sqrt(c+a)),  c = 1 + 1/gbar_sd,
/// with the difference of reciprocal roots rationalized.
template <class Real>
Real theta_of_a_in(const Real& a, const Real& c) {
  const Real rc = detail::sqrt_(c);
  const Real rca = detail::sqrt_(Real(c + a));
  return Real(1) / (Real(2) * (rca + rc) * rc * rca);
}

inline double theta_of_a(double a, double gbar_sd) {
  if (!(a > 0.0) || !(gbar_sd > 0.0)) throw InvalidArgument("Theta_a needs a > 0 and gbar_sd > 0");
  return theta_of_a_in(a, 1.0 + 1.0 / gbar_sd);
}

/// Gamma(n + 1/2) for n >= 0 by the recurrence Gamma(x+1) = x Gamma(x).
inline double gamma_half_integer(int n) {
  if (n < 0) throw InvalidArgument("gamma_half_integer needs n >= 0");
  double g = std::sqrt(std::numbers::pi);
  for (int j = 0; j < n; ++j) g *= j + 0.5;
  return g;
}

// ----- single-link error probabilities ----------------------------------

/// Error probability of BPSK over the direct link alone.
inline double p_direct(double gbar_sd) {
  if (!(gbar_sd > 0.0)) throw InvalidArgument("gbar_sd must be > 0");
  return l_of_alpha(1.0 / gbar_sd) / gbar_sd;
}

/// BPSK error probability over the selected relay's hop in `role`.
template <class Real>
Real p_selected_hop_in(const AvgSnrTriple& snrs, RelayCount K, RelayHopRole role) {
  const detail::OrientedHops<Real> h(snrs, role);
  const Real a = Real(1) / h.target;
  const Real la = l_of_alpha_in(a);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real ri(i);
    const Real b = ri / h.bar;
    const Real lb = l_of_alpha_in(b);
    const Real weight = ri * h.bar / (ri * h.target - h.bar);
    acc += Real(c) * (weight * (la - lb) / h.other + ri / h.target * lb);
  });
  return acc.value();
}

template <class Real>
Real p_sr_star_in(const AvgSnrTriple& snrs, RelayCount K) {
  return p_selected_hop_in<Real>(snrs, K, RelayHopRole::SourceToRelay);
}

template <class Real>
Real p_rstar_d_in(const AvgSnrTriple& snrs, RelayCount K) {
  return p_selected_hop_in<Real>(snrs, K, RelayHopRole::RelayToDestination);
}

/// MRC of the direct link and the selected relay's hop, assuming the relay
/// forwarded the correct symbol. `snrs` must already be regularized.
template <class Real>
Real p_mrc_in(const AvgSnrTriple& snrs, RelayCount K) {
  const detail::OrientedHops<Real> h(snrs, RelayHopRole::RelayToDestination);
  const Real u = Real(1) / Real(snrs.sd);
  const Real a = Real(1) / h.target;
  const Real lu = l_of_alpha_in(u);
  // integral of erfc(sqrt(x))/2 against u (e^{-xu} - e^{-xv}) / (v - u)
  auto mixed = [&](const Real& v) { return u * (lu - l_of_alpha_in(v)) / (v - u); };
  const Real m_a = mixed(a);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real ri(i);
    const Real b = ri / h.bar;
    const Real m_b = mixed(b);
    const Real weight = ri * h.bar / (ri * h.target - h.bar);
    acc += Real(c) * (weight * (m_a - m_b) / h.other + ri / h.target * m_b);
  });
  return acc.value();
}

/// The subtracted integral of the selection-combining error probability:
/// 1/(2 sqrt(pi)) integral z^{-1/2} e^{-z} e^{-z/gbar_sd} F_{r*d}(z) dz.
template <class Real>
Real i2_term_in(const AvgSnrTriple& snrs, RelayCount K) {
  const detail::OrientedHops<Real> h(snrs, RelayHopRole::RelayToDestination);
  const Real c0 = Real(1) + Real(1) / Real(snrs.sd);
  const Real a = Real(1) / h.target;
  const Real ta = theta_of_a_in(a, c0);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real ri(i);
    const Real b = ri / h.bar;
    const Real tb = theta_of_a_in(b, c0);
    const Real weight = ri * h.bar / (ri * h.target - h.bar);
    acc += Real(c) * (weight * (ta - tb) / h.other + ri / h.target * tb);
  });
  return acc.value();
}

template <class Real>
Real p_dsc_in(const AvgSnrTriple& snrs, RelayCount K) {
  return p_rstar_d_in<Real>(snrs, K) - i2_term_in<Real>(snrs, K);
}

// ----- double-valued wrappers -------------------------------------------

inline double p_sr_star(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return detail::evaluate_precise(
      [&]<class R>(detail::TypeTag<R>) { return p_sr_star_in<R>(snrs, K); });
}

inline double p_rstar_d(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return detail::evaluate_precise(
      [&]<class R>(detail::TypeTag<R>) { return p_rstar_d_in<R>(snrs, K); });
}

inline double i2_term(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return detail::evaluate_precise(
      [&]<class R>(detail::TypeTag<R>) { return i2_term_in<R>(snrs, K); });
}

inline double p_dsc(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return detail::evaluate_precise(
      [&]<class R>(detail::TypeTag<R>) { return p_dsc_in<R>(snrs, K); });
}

struct MrcResult {
  double value = 0.0;
  bool perturbed = false;
};

inline MrcResult p_mrc_detailed(const AvgSnrTriple& snrs, RelayCount K,
                                SingularityPolicy policy = SingularityPolicy::Perturb) {
  const Regularized r = regularize(snrs, K, policy);
  const double v = detail::evaluate_precise(
      [&]<class R>(detail::TypeTag<R>) { return p_mrc_in<R>(r.snrs, K); });
  return {v, r.perturbed};
}

inline double p_mrc(const AvgSnrTriple& snrs, RelayCount K,
                    SingularityPolicy policy = SingularityPolicy::Perturb) {
  return p_mrc_detailed(snrs, K, policy).value;
}

/// Approximate probability that an erroneous relay decision ends in a
/// destination error: gbar_{r*d} / (gbar_{r*d} + gbar_sd).
inline double p_prop(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  const double m = detail::evaluate_precise([&]<class R>(detail::TypeTag<R>) {
    return mean_selected_hop<R>(snrs, K, RelayHopRole::RelayToDestination);
  });
  return m / (m + snrs.sd);
}

// ----- end-to-end BER ---------------------------------------------------

struct BerBreakdown {
  SchemeKind scheme = SchemeKind::FSCR;
  double p_prop = 0.0;
  double p_sr_star = 0.0;
  /// P_mrc for FSCR, P_DSC for DSC, P_{r*d} for SR.
  double p_combiner = 0.0;
  double p_end_to_end = 0.0;
  /// gbar_sd was nudged off a removable singularity.
  bool perturbed = false;

  /// Applies the scheme's composition law to the stored parts.
  double recompose() const {
    if (scheme == SchemeKind::SR) return p_sr_star + p_combiner - p_sr_star * p_combiner;
    return p_prop * p_sr_star + (1.0 - p_sr_star) * p_combiner;
  }
};

inline BerBreakdown ber_fscr(const AvgSnrTriple& snrs, RelayCount K,
                             SingularityPolicy policy = SingularityPolicy::Perturb) {
  BerBreakdown b;
  b.scheme = SchemeKind::FSCR;
  b.p_prop = p_prop(snrs, K);
  b.p_sr_star = p_sr_star(snrs, K);
  const MrcResult m = p_mrc_detailed(snrs, K, policy);
  b.p_combiner = m.value;
  b.perturbed = m.perturbed;
  b.p_end_to_end = b.recompose();
  return b;
}

inline BerBreakdown ber_dsc(const AvgSnrTriple& snrs, RelayCount K) {
  BerBreakdown b;
  b.scheme = SchemeKind::DSC;
  b.p_prop = p_prop(snrs, K);
  b.p_sr_star = p_sr_star(snrs, K);
  b.p_combiner = p_dsc(snrs, K);
  b.p_end_to_end = b.recompose();
  return b;
}

inline BerBreakdown ber_sr(const AvgSnrTriple& snrs, RelayCount K) {
  BerBreakdown b;
  b.scheme = SchemeKind::SR;
  b.p_prop = p_prop(snrs, K);
  b.p_sr_star = p_sr_star(snrs, K);
  b.p_combiner = p_rstar_d(snrs, K);
  b.p_end_to_end = b.recompose();
  return b;
}

inline BerBreakdown ber(SchemeKind scheme, const AvgSnrTriple& snrs, RelayCount K) {
  switch (scheme) {
    case SchemeKind::FSCR: return ber_fscr(snrs, K);
    case SchemeKind::DSC: return ber_dsc(snrs, K);
    case SchemeKind::SR: return ber_sr(snrs, K);
  }
  throw InvalidArgument("unknown scheme");
}

// ----- high-SNR asymptotes ----------------------------------------------

namespace detail {

inline double selection_power(const AvgSnrTriple& snrs, RelayCount K) {
  return std::pow(1.0 / snrs.bottleneck(), static_cast<int>(K) - 1);
}

inline double relay_error_asymptote(const AvgSnrTriple& snrs, RelayCount K) {
  return gamma_half_integer(K) / (2.0 * std::sqrt(std::numbers::pi)) / snrs.sr *
         selection_power(snrs, K);
}

inline double combined_asymptote(const AvgSnrTriple& snrs, RelayCount K) {
  return gamma_half_integer(static_cast<int>(K) + 1) / (2.0 * std::sqrt(std::numbers::pi)) /
         (snrs.sd * snrs.rd) * selection_power(snrs, K);
}

}  // namespace detail

inline double asymp_fscr(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return p_prop(snrs, K) * detail::relay_error_asymptote(snrs, K) +
         detail::combined_asymptote(snrs, K) / (static_cast<int>(K) + 1);
}

inline double asymp_dsc(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return p_prop(snrs, K) * detail::relay_error_asymptote(snrs, K) +
         detail::combined_asymptote(snrs, K);
}

inline double asymp_sr(const AvgSnrTriple& snrs, RelayCount K) {
  snrs.validate();
  return gamma_half_integer(K) / (2.0 * std::sqrt(std::numbers::pi)) *
         std::pow(1.0 / snrs.bottleneck(), static_cast<int>(K));
}

inline double asymp(SchemeKind scheme, const AvgSnrTriple& snrs, RelayCount K) {
  switch (scheme) {
    case SchemeKind::FSCR: return asymp_fscr(snrs, K);
    case SchemeKind::DSC: return asymp_dsc(snrs, K);
    case SchemeKind::SR: return asymp_sr(snrs, K);
  }
  throw InvalidArgument("unknown scheme");
}

}  // namespace relaylink
