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

// Gaussian approximations of the LR completion time and the coding-window
// sizing rule derived from them.
//
// A single receiver needs K/p slots on average to collect one batch, with
// standard deviation sqrt(K(1-p))/p. The time for all N receivers to clear a
// batch is approximated by the maximum of N such Gaussians, and a file of b
// batches by b times that. Three evaluations of E[max] are provided:
//
//   integral      E[max] = int_0^inf (1 - F_X(z)^N) dz
//   3-sigma       mu + (n~ - A(N)) sigma, valid only for K > n~^2 (1-p)
//   order-stat    mu + B(N) sigma,  B(N) = Phi^-1(0.5264^(1/N))

#ifndef RLNCSCHED_ANALYTICS_HPP
#define RLNCSCHED_ANALYTICS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rlncsched/model.hpp"
#include "rlncsched/normal.hpp"

namespace rlncsched::analytics {

inline constexpr double kQuadratureTolerance = 1e-10;
/// Coverage target defining n~.
inline constexpr double kCoverage = 0.99;
/// Median-type constant in the order-statistic approximation of E[max Z_i].
inline constexpr double kOrderStatConstant = 0.5264;

/// Adaptive 15-point Gauss-Kronrod quadrature of f over [a, b]; throws
/// NumericalError when the error estimate exceeds `abs_tol`.
template <typename F>
[[nodiscard]] double integrate(F&& f, double a, double b, double abs_tol = kQuadratureTolerance) {
    if (a == b) return 0.0;
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 25, 1e-13, &error);
    if (!std::isfinite(value) || error > abs_tol)
        throw NumericalError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                             "] did not converge (error estimate " + std::to_string(error) + ")");
    return value;
}

/// Smallest positive integer n with erf(n / sqrt 2)^N >= 0.99.
[[nodiscard]] inline int n_tilde(std::size_t n_receivers) {
    if (n_receivers == 0) throw ConfigError("n_receivers must be positive");
    const double target = std::log(kCoverage);
    const double nr = static_cast<double>(n_receivers);
    for (int n = 1;; ++n) {
        // log(erf) via log1p(-erfc) keeps precision when erf is close to 1.
        const double log_erf = std::log1p(-std::erfc(n / std::numbers::sqrt2));
        if (nr * log_erf >= target) return n;
    }
}

/// (1 - u)^N evaluated through log1p, so large N does not amplify the
/// rounding of a cdf value close to 1.
[[nodiscard]] inline double complement_power(double u, double n) {
    if (u >= 1.0) return 0.0;
    return std::exp(n * std::log1p(-u));
}

/// A(N) = int_{-n~}^{n~} (Phi(z) - Phi(-n~))^N dz.
[[nodiscard]] inline double a_exact(std::size_t n_receivers, int n_tilde_value) {
    const double lo = normal::phi(-n_tilde_value);
    const double nr = static_cast<double>(n_receivers);
    return integrate([&](double z) { return complement_power(normal::q(z) + lo, nr); }, -n_tilde_value,
                     n_tilde_value);
}

/// int_0^{n~} Phi(x)^N dx, dropping the left-truncation and Q^N terms of A(N).
[[nodiscard]] inline double a_approx(std::size_t n_receivers, int n_tilde_value) {
    const double nr = static_cast<double>(n_receivers);
    return integrate([&](double x) { return complement_power(normal::q(x), nr); }, 0.0, n_tilde_value);
}

/// int_0^upper Q(x)^N dx, the term a_approx neglects.
[[nodiscard]] inline double q_power_integral(std::size_t n_receivers, double upper) {
    const double nr = static_cast<double>(n_receivers);
    return integrate([&](double x) { return std::pow(normal::q(x), nr); }, 0.0, upper);
}

/// B(N) = Phi^-1(0.5264^(1/N)), approximately E[max of N standard normals].
[[nodiscard]] inline double b_n(std::size_t n_receivers) {
    if (n_receivers == 0) throw ConfigError("n_receivers must be positive");
    return normal::phi_inv(std::pow(kOrderStatConstant, 1.0 / static_cast<double>(n_receivers)));
}

/// Completion-time distribution of one receiver for one batch.
struct NormalParams {
    double mu;     // K/p
    double sigma;  // sqrt(K(1-p))/p

    static NormalParams of(std::size_t window, double p) {
        const double k = static_cast<double>(window);
        return {k / p, std::sqrt(k * (1.0 - p)) / p};
    }
};

/// E[max of N iid N(mu, sigma^2)] restricted to z >= 0, i.e.
/// int_0^inf (1 - Phi((z - mu)/sigma)^N) dz, truncated at mu + 12 sigma.
[[nodiscard]] inline double expected_max_integral(const NormalParams& np, std::size_t n_receivers) {
    if (np.sigma == 0.0) return np.mu;
    const double nr = static_cast<double>(n_receivers);
    // z = mu + sigma u splits into mu + sigma (int_0^12 (1 - Phi^N) - int_{-L}^0 Phi^N)
    // with L = mu/sigma; Phi(-40)^N underflows so the left piece stops there.
    const double left = std::min(np.mu / np.sigma, 40.0);
    const double upper_part = integrate([&](double u) { return -std::expm1(nr * std::log1p(-normal::q(u))); }, 0.0, 12.0);
    const double lower_part = integrate([&](double u) { return std::pow(normal::phi(u), nr); }, -left, 0.0);
    return np.mu + np.sigma * (upper_part - lower_part);
}

struct AnalyticResult {
    std::size_t num_batches = 0;
    NormalParams params{0, 0};
    double e_t_integral = 0;
    std::optional<double> e_t_3sigma;  // unset when K <= n~^2 (1-p)
    double e_t_orderstat = 0;
    int n_tilde = 0;
    double a_n = 0;
    double b_n = 0;
};

/// n~^2 (1-p) < K, the domain of the 3-sigma form.
[[nodiscard]] inline bool three_sigma_valid(std::size_t window, double p, int n_tilde_value) {
    return static_cast<double>(window) > static_cast<double>(n_tilde_value * n_tilde_value) * (1.0 - p);
}

/// All three estimates of E[T_K^F] under LR. Requires K | F.
[[nodiscard]] inline AnalyticResult expected_completion(const ScenarioConfig& config) {
    ScenarioConfig strict = config;
    strict.ragged_allowed = false;
    strict.validate();

    AnalyticResult r;
    const std::size_t n = config.n_receivers;
    r.num_batches = config.file_size / config.window;
    const double b = static_cast<double>(r.num_batches);
    r.params = NormalParams::of(config.window, config.conn_prob);
    r.n_tilde = n_tilde(n);
    r.a_n = a_exact(n, r.n_tilde);
    r.b_n = b_n(n);
    r.e_t_integral = b * expected_max_integral(r.params, n);
    r.e_t_orderstat = b * (r.params.mu + r.params.sigma * r.b_n);
    if (three_sigma_valid(config.window, config.conn_prob, r.n_tilde))
        r.e_t_3sigma = b * (r.params.mu + r.n_tilde * r.params.sigma - r.params.sigma * r.a_n);
    return r;
}

enum class WindowFormula { exact, simplified };

[[nodiscard]] inline std::string_view to_string(WindowFormula f) {
    return f == WindowFormula::exact ? "exact" : "simplified";
}

[[nodiscard]] inline WindowFormula parse_formula(std::string_view name) {
    if (name == "exact") return WindowFormula::exact;
    if (name == "simplified") return WindowFormula::simplified;
    throw ConfigError("unknown formula '" + std::string(name) + "' (expected exact or simplified)");
}

/// Relative delay increase over K = F bounded by epsilon.
struct DelayConstraint {
    double epsilon;
};

/// Relative delay increase over K = F predicted for window K. Decreasing in
/// K and zero at K = F.
class DelayModel {
public:
    DelayModel(std::size_t file_size, std::size_t n_receivers, double p, WindowFormula formula)
        : file_(static_cast<double>(file_size)), formula_(formula) {
        if (file_size == 0) throw ConfigError("file_size must be positive");
        if (!(p > 0.0 && p <= 1.0)) throw ConfigError("conn_prob must lie in (0, 1]");
        if (formula == WindowFormula::exact) {
            n_tilde_ = n_tilde(n_receivers);
            spread_ = std::sqrt(1.0 - p) * (n_tilde_ - a_exact(n_receivers, n_tilde_));
        } else {
            spread_ = std::sqrt(1.0 - p) * b_n(n_receivers);
        }
    }

    [[nodiscard]] double relative_increase(std::size_t window) const {
        const double excess = std::sqrt(file_ / static_cast<double>(window)) - 1.0;
        if (formula_ == WindowFormula::exact) return spread_ / (std::sqrt(file_) + spread_) * excess;
        return excess * spread_ / std::sqrt(file_);
    }

    [[nodiscard]] int n_tilde_value() const { return n_tilde_; }

private:
    double file_;
    WindowFormula formula_;
    int n_tilde_ = 0;
    double spread_ = 0;  // sqrt(1-p)(n~ - A(N)) or sqrt(1-p) B(N)
};

struct MinWindow {
    std::size_t window = 0;
    /// Exact formula only: whether K > n~^2 (1-p) holds at the returned K.
    bool three_sigma_domain = true;

    [[nodiscard]] double percent_of(std::size_t file_size) const {
        return 100.0 * static_cast<double>(window) / static_cast<double>(file_size);
    }
};

/// Smallest K in [1, F] whose predicted delay increase is at most epsilon;
/// with `divisor_only`, the smallest such K dividing F.
[[nodiscard]] inline MinWindow min_window(std::size_t file_size, std::size_t n_receivers, double p,
                                          DelayConstraint constraint, WindowFormula formula,
                                          bool divisor_only = false) {
    if (!(constraint.epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    const DelayModel model(file_size, n_receivers, p, formula);
    const auto ok = [&](std::size_t k) { return model.relative_increase(k) <= constraint.epsilon; };
    if (!ok(file_size)) throw NumericalError("K = F violates the delay constraint");

    std::size_t lo = 1, hi = file_size;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (ok(mid)) hi = mid;
        else lo = mid + 1;
    }
    std::size_t k = lo;
    if (divisor_only)
        while (file_size % k != 0) ++k;

    MinWindow out{k, true};
    if (formula == WindowFormula::exact) out.three_sigma_domain = three_sigma_valid(k, p, model.n_tilde_value());
    return out;
}

/// Real-valued lower bound on K from the simplified rule:
/// K >= F / (1 + eps sqrt(F) / (sqrt(1-p) B(N)))^2.
[[nodiscard]] inline double simplified_window_bound(std::size_t file_size, std::size_t n_receivers, double p,
                                                    DelayConstraint constraint) {
    const double f = static_cast<double>(file_size);
    const double spread = std::sqrt(1.0 - p) * b_n(n_receivers);
    if (spread == 0.0) return 0.0;
    const double d = 1.0 + constraint.epsilon * std::sqrt(f) / spread;
    return f / (d * d);
}

}  // namespace rlncsched::analytics

#endif  // RLNCSCHED_ANALYTICS_HPP
