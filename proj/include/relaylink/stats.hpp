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
#include <string>

#include "relaylink/core.hpp"
#include "relaylink/detail/numerics.hpp"

namespace relaylink {

// Statistics of the per-link SNRs. Every function is a template on the
// working scalar so the same expression can run in double or in extended
// precision; the defaults are double.

namespace detail {

/// Mean SNRs of the selected relay's two hops, oriented so that `target` is
/// the hop whose SNR is being described and `other` the opposite hop.
template <class Real>
struct OrientedHops {
  Real target;
  Real other;
  Real bar;  // bottleneck mean, symmetric in the two hops

  OrientedHops(const AvgSnrTriple& s, RelayHopRole role)
      : target(role == RelayHopRole::RelayToDestination ? s.rd : s.sr),
        other(role == RelayHopRole::RelayToDestination ? s.sr : s.rd),
        bar(target * other / (target + other)) {}
};

inline void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0)) throw InvalidArgument(std::string(what) + " must be >= 0");
}

template <class Real>
void require_nonnegative(const Real& v, const char* what) {
  if (!(v >= Real(0))) throw InvalidArgument(std::string(what) + " must be >= 0");
}

/// Psi_a(x) = (1 - exp(-a x)) / a
template <class Real>
Real psi(const Real& a, const Real& x) {
  return one_minus_exp_neg(Real(a * x)) / a;
}

}  // namespace detail

// ----- direct link ------------------------------------------------------

template <class Real = double>
Real pdf_gamma_sd(const Real& y, double gbar_sd) {
  detail::require_nonnegative(y, "y");
  const Real g(gbar_sd);
  return detail::exp_neg(Real(y / g)) / g;
}

template <class Real = double>
Real cdf_gamma_sd(const Real& x, double gbar_sd) {
  detail::require_nonnegative(x, "x");
  return detail::one_minus_exp_neg(Real(x / Real(gbar_sd)));
}

// ----- selected relay's hop ---------------------------------------------

/// Density of the selected relay's relay-destination SNR (role =
/// RelayToDestination) or source-relay SNR (role = SourceToRelay), under
/// max-min relay selection among K relays with i.i.d. Rayleigh hops.
template <class Real = double>
Real pdf_selected_hop(const Real& x, const AvgSnrTriple& snrs, RelayCount K,
                      RelayHopRole role = RelayHopRole::RelayToDestination) {
  detail::require_nonnegative(x, "x");
  const detail::OrientedHops<Real> h(snrs, role);
  const Real a = Real(1) / h.target;
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real b = Real(i) / h.bar;
    // i*bar/(i*T - bar) * (e^{-x/T} - e^{-i x/bar}) == i * a (e^{-xa} - e^{-xb}) / (b - a)
    const Real gated = Real(i) * detail::divided_exp_difference(x, a, b) / h.other;
    const Real boundary = Real(i) / h.target * detail::exp_neg(Real(x * b));
    acc += Real(c) * (gated + boundary);
  });
  return acc.value();
}

template <class Real = double>
Real cdf_selected_hop(const Real& x, const AvgSnrTriple& snrs, RelayCount K,
                      RelayHopRole role = RelayHopRole::RelayToDestination) {
  detail::require_nonnegative(x, "x");
  const detail::OrientedHops<Real> h(snrs, role);
  const Real a = Real(1) / h.target;
  const Real psi_a = detail::psi(a, x);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real b = Real(i) / h.bar;
    const Real psi_b = detail::psi(b, x);
    const Real weight = Real(i) * h.bar / (Real(i) * h.target - h.bar);
    acc += Real(c) * (weight * (psi_a - psi_b) / h.other + Real(i) / h.target * psi_b);
  });
  return acc.value();
}

/// CDF of max(gamma_sd, gamma_{r*d}), the selection-combiner output SNR.
template <class Real = double>
Real cdf_dsc(const Real& x, const AvgSnrTriple& snrs, RelayCount K) {
  return cdf_gamma_sd<Real>(x, snrs.sd) *
         cdf_selected_hop<Real>(x, snrs, K, RelayHopRole::RelayToDestination);
}

template <class Real = double>
Real mean_selected_hop(const AvgSnrTriple& snrs, RelayCount K,
                       RelayHopRole role = RelayHopRole::RelayToDestination) {
  const detail::OrientedHops<Real> h(snrs, role);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real ri(i);
    const Real weight = ri * h.bar / (ri * h.target - h.bar);
    const Real q = h.bar / ri;
    acc += Real(c) * (weight * (h.target * h.target - q * q) / h.other +
                      h.bar * h.bar / (ri * h.target));
  });
  return acc.value();
}

// ----- singular parameter combinations ----------------------------------

enum class SingularityPolicy { Perturb, Throw };

/// Relative distance below which two exponential rates count as coincident.
inline constexpr double kSingularTolerance = 1e-9;
/// Relative nudge applied to gbar_sd when a coincidence is detected.
inline constexpr double kSingularJitter = 1e-7;

inline bool near_singular(const AvgSnrTriple& snrs, RelayCount K) {
  auto close = [](double u, double v) {
    return std::abs(u - v) < kSingularTolerance * std::max(std::abs(u), std::abs(v));
  };
  if (close(snrs.sd, snrs.rd)) return true;
  const double bar = snrs.bottleneck();
  for (int i = 1; i <= K; ++i) {
    if (close(i * snrs.sd, bar)) return true;
  }
  return false;
}

struct Regularized {
  AvgSnrTriple snrs;
  bool perturbed = false;
};

/// Applies the singularity policy for expressions that combine the direct
/// link with the relayed hop (their denominators contain gbar_sd - gbar_rd
/// and i*gbar_sd - bar).
inline Regularized regularize(const AvgSnrTriple& snrs, RelayCount K, SingularityPolicy policy) {
  snrs.validate();
  if (!near_singular(snrs, K)) return {snrs, false};
  if (policy == SingularityPolicy::Throw) {
    throw NearSingularParameters("gbar_sd coincides with gbar_rd or with bar/i for some i <= K");
  }
  AvgSnrTriple out = snrs;
  out.sd *= 1.0 + kSingularJitter;
  return {out, true};
}

/// Density of beta = gamma_sd + gamma_{r*d}, the MRC output SNR.
template <class Real = double>
Real pdf_beta(const Real& beta, const AvgSnrTriple& snrs_in, RelayCount K,
              SingularityPolicy policy = SingularityPolicy::Perturb) {
  detail::require_nonnegative(beta, "beta");
  const AvgSnrTriple snrs = regularize(snrs_in, K, policy).snrs;
  const detail::OrientedHops<Real> h(snrs, RelayHopRole::RelayToDestination);
  const Real u = Real(1) / Real(snrs.sd);
  const Real a = Real(1) / h.target;
  const Real d_ua = detail::divided_exp_difference(beta, u, a);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    const Real ri(i);
    const Real b = ri / h.bar;
    const Real d_ub = detail::divided_exp_difference(beta, u, b);
    const Real weight = ri * a / (b - a);
    acc += Real(c) * (weight * (d_ua - d_ub) / h.other + ri / h.target * d_ub);
  });
  return acc.value();
}

// ----- max of the K bottleneck SNRs -------------------------------------

template <class Real = double>
Real cdf_max_bottleneck(const Real& z, double bar, RelayCount K) {
  detail::require_nonnegative(z, "z");
  using std::pow;
  return Real(pow(detail::one_minus_exp_neg(Real(z / Real(bar))), static_cast<int>(K)));
}

template <class Real = double>
Real pdf_max_bottleneck(const Real& z, double bar, RelayCount K) {
  detail::require_nonnegative(z, "z");
  using std::pow;
  const Real g(bar);
  const Real k(static_cast<int>(K));
  return k / g * detail::exp_neg(Real(z / g)) *
         Real(pow(detail::one_minus_exp_neg(Real(z / g)), static_cast<int>(K) - 1));
}

/// Binomial expansion of pdf_max_bottleneck: sum_i (-1)^(i-1) C(K,i) (i/bar) e^{-i z/bar}.
template <class Real = double>
Real pdf_max_bottleneck_expanded(const Real& z, double bar, RelayCount K) {
  detail::require_nonnegative(z, "z");
  const Real g(bar);
  detail::CompensatedSum<Real> acc;
  detail::for_each_signed_binomial(K, [&](int i, double c) {
    acc += Real(c) * Real(i) / g * detail::exp_neg(Real(Real(i) * z / g));
  });
  return acc.value();
}

// ----- small-argument approximations used by the high-SNR analysis ------

template <class Real = double>
Real approx_pdf_srstar(const Real& y, const AvgSnrTriple& snrs, RelayCount K) {
  detail::require_nonnegative(y, "y");
  using std::pow;
  const Real bar(snrs.bottleneck());
  return Real(static_cast<int>(K)) / Real(snrs.sr) *
         Real(pow(Real(y / bar), static_cast<int>(K) - 1));
}

template <class Real = double>
Real approx_pdf_beta(const Real& beta, const AvgSnrTriple& snrs, RelayCount K) {
  detail::require_nonnegative(beta, "beta");
  using std::pow;
  const Real bar(snrs.bottleneck());
  return beta / (Real(snrs.sd) * Real(snrs.rd)) *
         Real(pow(Real(beta / bar), static_cast<int>(K) - 1));
}

template <class Real = double>
Real approx_cdf_sd(const Real& z, double gbar_sd) {
  detail::require_nonnegative(z, "z");
  return z / Real(gbar_sd);
}

/// Leading small-z term of cdf_selected_hop(role = RelayToDestination):
/// (1/gbar_rd) * (1/bar)^(K-1) * z^K.
template <class Real = double>
Real approx_cdf_rstar_d(const Real& z, const AvgSnrTriple& snrs, RelayCount K) {
  detail::require_nonnegative(z, "z");
  using std::pow;
  const Real bar(snrs.bottleneck());
  return z / Real(snrs.rd) * Real(pow(Real(z / bar), static_cast<int>(K) - 1));
}

}  // namespace relaylink
