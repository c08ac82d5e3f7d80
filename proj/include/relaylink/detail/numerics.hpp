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
#include <type_traits>

#include <boost/math/special_functions/expm1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "relaylink/core.hpp"

namespace relaylink::detail {

// Scalar helpers usable with double and boost::multiprecision numbers alike.

template <class Real>
Real exp_neg(const Real& x) {
  if constexpr (std::is_floating_point_v<Real>) {
    // exp(-745) is the last subnormal; past it the term is exactly zero.
    if (x > 745.0) return 0.0;
    return std::exp(-x);
  } else {
    using std::exp;
    return Real(exp(-x));
  }
}

/// 1 - exp(-x) without cancellation for small x.
template <class Real>
Real one_minus_exp_neg(const Real& x) {
  if constexpr (std::is_floating_point_v<Real>) {
    return -std::expm1(-x);
  } else {
    return Real(-boost::math::expm1(Real(-x)));
  }
}

template <class Real>
Real sqrt_(const Real& x) {
  using std::sqrt;
  return Real(sqrt(x));
}

/// Neumaier's variant of Kahan summation.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& v) {
    const Real t = sum_ + v;
    using std::abs;
    if (abs(sum_) >= abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(const Real& v) {
    add(v);
    return *this;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_ = Real(0);
  Real comp_ = Real(0);
};

/// Walks the signed binomial weights (-1)^(i-1) * C(K, i) for i = 1..K with
/// the multiplicative recurrence C(K, i) = C(K, i-1) * (K - i + 1) / i. Exact
/// in double for K <= 20.
template <class Fn>
void for_each_signed_binomial(int K, Fn&& fn) {
  double c = 1.0;
  for (int i = 1; i <= K; ++i) {
    c = c * static_cast<double>(K - i + 1) / static_cast<double>(i);
    const double signed_c = (i % 2 == 1) ? c : -c;
    fn(i, signed_c);
  }
}

/// a * (exp(-x a) - exp(-x b)) / (b - a), finite (a x exp(-x a)) when a == b.
/// Evaluated through expm1 so it stays accurate when the rates nearly agree.
template <class Real>
Real divided_exp_difference(const Real& x, const Real& a, const Real& b) {
  const Real delta = b - a;
  if (delta == Real(0)) return a * x * exp_neg(Real(x * a));
  if (delta > Real(0)) {
    return a * exp_neg(Real(x * a)) * one_minus_exp_neg(Real(x * delta)) / delta;
  }
  return a * exp_neg(Real(x * b)) * one_minus_exp_neg(Real(-x * delta)) / Real(-delta);
}

// ----- precision ladder -------------------------------------------------

namespace mp = boost::multiprecision;
using Precise50 = mp::number<mp::cpp_bin_float<50>, mp::et_off>;
using Precise100 = mp::number<mp::cpp_bin_float<100>, mp::et_off>;
using Precise200 = mp::number<mp::cpp_bin_float<200>, mp::et_off>;
using Precise400 = mp::number<mp::cpp_bin_float<400>, mp::et_off>;

template <class Real>
struct TypeTag {
  using type = Real;
};

inline bool agrees(double a, double b, double rel) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= rel * scale;
}

/// Evaluates `fn(TypeTag<Real>{})` at increasing working precision until two
/// consecutive levels agree to `rel` and returns the finer one as a double.
/// The alternating binomial sums lose roughly K * log10(SNR) digits, so high
/// SNR and large K climb further up the ladder.
template <class Fn>
double evaluate_precise(Fn&& fn, double rel = 1e-14) {
  double prev = static_cast<double>(fn(TypeTag<Precise50>{}));
  double next = static_cast<double>(fn(TypeTag<Precise100>{}));
  if (agrees(prev, next, rel)) return next;
  prev = next;
  next = static_cast<double>(fn(TypeTag<Precise200>{}));
  if (agrees(prev, next, rel)) return next;
  prev = next;
  next = static_cast<double>(fn(TypeTag<Precise400>{}));
  if (agrees(prev, next, rel)) return next;
  throw Error("closed form did not stabilize within 400 decimal digits");
}

}  // namespace relaylink::detail
