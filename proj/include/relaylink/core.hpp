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

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relaylink {

// ----- error types ----------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A closed form was asked to evaluate at a removable singularity
/// (coincident exponential rates) and the caller requested a hard failure.
class NearSingularParameters : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// ----- domain types ---------------------------------------------------------

/// Relay-cluster position on the source-destination line.
/// `d` is the source-to-cluster distance normalized by the source-destination
/// distance, `nu` the path-loss exponent.
struct NetworkGeometry {
  double d = 0.5;
  double nu = 2.0;

  void validate() const {
    if (!(d > 0.0 && d < 1.0)) {
      throw InvalidArgument("d = " + std::to_string(d) + " outside the open interval (0, 1)");
    }
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
      throw InvalidArgument("nu = " + std::to_string(nu) + " must be finite and >= 0");
    }
  }
};

/// Mean channel power of each link (|h|^2 expectations); Es/N0 scales these
/// into average SNRs.
struct LinkVariances {
  double sd = 1.0;
  double sr = 1.0;
  double rd = 1.0;
};

inline double bottleneck_avg(double gbar_sr, double gbar_rd) {
  if (!(gbar_sr > 0.0) || !(gbar_rd > 0.0)) {
    throw InvalidArgument("bottleneck_avg needs positive average SNRs");
  }
  return gbar_sr * gbar_rd / (gbar_sr + gbar_rd);
}

/// Average SNRs (linear) of the direct, source-relay and relay-destination
/// links. Every relay in the cluster shares the same pair (sr, rd).
struct AvgSnrTriple {
  double sd = 1.0;
  double sr = 1.0;
  double rd = 1.0;

  /// Mean of min(gamma_sr, gamma_rd) for one relay.
  double bottleneck() const { return bottleneck_avg(sr, rd); }

  void validate() const {
    auto ok = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!ok(sd) || !ok(sr) || !ok(rd)) {
      throw InvalidArgument("average SNRs must be strictly positive and finite");
    }
  }

  AvgSnrTriple scaled(double c) const { return {sd * c, sr * c, rd * c}; }
  /// Exchanges the roles of the two relay hops.
  AvgSnrTriple swapped_hops() const { return {sd, rd, sr}; }
};

enum class SchemeKind { FSCR, DSC, SR };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::FSCR, SchemeKind::DSC, SchemeKind::SR};

inline std::string_view to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::FSCR: return "fscr";
    case SchemeKind::DSC: return "dsc";
    case SchemeKind::SR: return "sr";
  }
  return "?";
}

inline SchemeKind parse_scheme(std::string_view text) {
  std::string lower(text);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "fscr") return SchemeKind::FSCR;
  if (lower == "dsc") return SchemeKind::DSC;
  if (lower == "sr") return SchemeKind::SR;
  throw InvalidArgument("unknown scheme '" + std::string(text) + "' (expected fscr, dsc or sr)");
}

/// Number of candidate relays. The alternating binomial sums in the closed
/// forms lose accuracy quickly with K, so the count is capped.
class RelayCount {
 public:
  static constexpr int kMax = 20;

  explicit RelayCount(int k) : k_(k) {
    if (k < 1 || k > kMax) {
      throw InvalidArgument("relay count K = " + std::to_string(k) + " outside [1, " +
                            std::to_string(kMax) + "]");
    }
  }

  int value() const { return k_; }
  operator int() const { return k_; }

 private:
  int k_;
};

enum class RelayHopRole { SourceToRelay, RelayToDestination };

// ----- SNR algebra ----------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Path-loss model of the linear network: unit direct link, d^-nu to the
/// cluster and (1-d)^-nu from it.
inline LinkVariances variances_from_geometry(const NetworkGeometry& g) {
  g.validate();
  return {1.0, std::pow(g.d, -g.nu), std::pow(1.0 - g.d, -g.nu)};
}

inline AvgSnrTriple avg_snrs_from_variances(const LinkVariances& v, double snr_db) {
  if (!std::isfinite(snr_db)) throw InvalidArgument("snr_db must be finite");
  const double rho = db_to_linear(snr_db);
  return {rho * v.sd, rho * v.sr, rho * v.rd};
}

inline AvgSnrTriple avg_snrs_from_geometry(const NetworkGeometry& g, double snr_db) {
  return avg_snrs_from_variances(variances_from_geometry(g), snr_db);
}

}  // namespace relaylink
