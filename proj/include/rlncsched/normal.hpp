// Copyright 2026 The rlncsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RLNCSCHED_NORMAL_HPP
#define RLNCSCHED_NORMAL_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rlncsched::normal {

/// Standard normal density.
[[nodiscard]] inline double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

/// Standard normal cdf, Phi(x).
[[nodiscard]] inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Upper tail, Q(x) = 1 - Phi(x), without cancellation for large x.
[[nodiscard]] inline double q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

namespace detail {

// Acklam's rational approximation to the normal quantile (relative error
// below 1.15e-9 before refinement).
constexpr std::array kCentralNum = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                    1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array kCentralDen = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                    6.680131188771972e+01,  -1.328068155288572e+01};
constexpr std::array kTailNum = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array kTailDen = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

template <std::size_t M>
constexpr double horner(const std::array<double, M>& c, double x) {
    double acc = 0.0;
    for (double v : c) acc = acc * x + v;
    return acc;
}

/// Initial guess for u in (0, 0.5].
inline double acklam_lower(double u) {
    if (u < kLowBreak) {
        const double t = std::sqrt(-2.0 * std::log(u));
        return horner(kTailNum, t) / (horner(kTailDen, t) * t + 1.0);
    }
    const double t = u - 0.5;
    const double r = t * t;
    return horner(kCentralNum, r) * t / (horner(kCentralDen, r) * r + 1.0);
}

}  // namespace detail

/// Inverse of Phi. The rational guess is refined with one Newton step against
/// phi(); the upper half is mirrored so the refinement always runs where
/// phi() has full relative precision.
[[nodiscard]] inline double phi_inv(double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("phi_inv requires u in (0, 1), got " + std::to_string(u));
    if (u > 0.5) return -phi_inv(1.0 - u);
    double x = detail::acklam_lower(u);
    x -= (phi(x) - u) / pdf(x);
    return x;
}

}  // namespace rlncsched::normal

#endif  // RLNCSCHED_NORMAL_HPP
