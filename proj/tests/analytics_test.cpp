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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "rlncsched/analytics.hpp"
#include "support/oracles.hpp"

namespace rlncsched::analytics {
namespace {

std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, int points) {
    std::vector<std::size_t> out;
    for (int i = 0; i < points; ++i) {
        const double x = std::exp(std::log(double(lo)) + (std::log(double(hi)) - std::log(double(lo))) * i / (points - 1));
        const auto n = static_cast<std::size_t>(std::llround(x));
        if (out.empty() || out.back() != n) out.push_back(n);
    }
    return out;
}

TEST(Normal, PhiMatchesLongDouble) {
    for (double x = -8; x <= 8; x += 0.125) EXPECT_NEAR(normal::phi(x), double(oracles::phi_ld(x)), 1e-15);
    EXPECT_DOUBLE_EQ(normal::phi(0), 0.5);
    EXPECT_NEAR(normal::q(1.0), 0.15865525393145707, 1e-15);
}

TEST(Normal, QuantileMatchesBisection) {
    for (double u : {1e-12, 1e-6, 0.001, 0.02425, 0.1, 0.3, 0.5, 0.6, 0.9, 0.97575, 0.999, 1 - 1e-9}) {
        const double ref = oracles::bisect_quantile(u);
        EXPECT_NEAR(normal::phi_inv(u), ref, 1e-9 * std::max(1.0, std::abs(ref))) << u;
    }
}

TEST(Normal, QuantileRoundTrip) {
    // phi(x) is within 1e-9 of 1 beyond x = 6, so only the lower tail and
    // body round-trip to 1e-9.
    for (double x = -8; x <= 3; x += 0.25) EXPECT_NEAR(normal::phi_inv(normal::phi(x)), x, 1e-9);
    EXPECT_THROW((void)normal::phi_inv(0.0), std::domain_error);
    EXPECT_THROW((void)normal::phi_inv(1.0), std::domain_error);
}

TEST(NTilde, FrozenValues) {
    EXPECT_EQ(n_tilde(1), 3);
    EXPECT_EQ(n_tilde(2), 3);
    EXPECT_EQ(n_tilde(10), 4);
    EXPECT_EQ(n_tilde(50), 4);
    EXPECT_EQ(n_tilde(100), 4);
    EXPECT_EQ(n_tilde(1000), 5);
    EXPECT_EQ(n_tilde(5000), 5);
}

TEST(NTilde, MatchesScanAndIsMonotone) {
    int prev = 0;
    for (std::size_t n = 1; n <= 5000; n += (n < 100 ? 1 : 37)) {
        const int v = n_tilde(n);
        EXPECT_EQ(v, oracles::n_tilde_scan(n)) << n;
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(AFunction, MatchesMidpointRule) {
    for (std::size_t n : {1, 2, 5, 50, 1000}) {
        const int nt = n_tilde(n);
        const long double lo = oracles::phi_ld(-nt);
        const double ref_exact = oracles::midpoint(
            [&](long double z) { return std::pow(oracles::phi_ld(z) - lo, static_cast<long double>(n)); }, -nt, nt,
            1000000);
        const double ref_approx = oracles::midpoint(
            [&](long double z) { return std::pow(oracles::phi_ld(z), static_cast<long double>(n)); }, 0, nt, 1000000);
        EXPECT_NEAR(a_exact(n, nt), ref_exact, 1e-8) << n;
        EXPECT_NEAR(a_approx(n, nt), ref_approx, 1e-8) << n;
    }
    EXPECT_NEAR(a_exact(50, 4), 1.748500, 1e-6);
}

TEST(AFunction, ApproximationGapIsSmall) {
    double sum = 0, mx = 0;
    const auto grid = log_grid(2, 5000, 40);
    for (std::size_t n : grid) {
        const int nt = n_tilde(n);
        const double exact = a_exact(n, nt);
        const double rel = std::abs(a_approx(n, nt) - exact) / exact;
        sum += rel;
        mx = std::max(mx, rel);
    }
    EXPECT_LE(sum / grid.size(), 0.005);
    EXPECT_LE(mx, 0.05);
}

TEST(QIntegral, FrozenValues) {
    EXPECT_NEAR(q_power_integral(2, 5), 0.1168, 1e-3);
    EXPECT_NEAR(q_power_integral(4, 5), 0.0164, 1e-3);
    EXPECT_NEAR(q_power_integral(6, 5), 0.0029, 1e-3);
    for (std::size_t n : {2, 4, 6}) {
        const double ref = oracles::midpoint(
            [&](long double x) { return std::pow(1 - oracles::phi_ld(x), static_cast<long double>(n)); }, 0, 5, 200000);
        EXPECT_NEAR(q_power_integral(n, 5), ref, 1e-9);
    }
}

TEST(BFunction, FrozenValuesAndMonotone) {
    EXPECT_NEAR(b_n(1), 0.0662234, 1e-6);
    EXPECT_NEAR(b_n(50), 2.2336859, 1e-6);
    EXPECT_NEAR(b_n(50), oracles::bisect_quantile(std::pow(0.5264, 1.0 / 50)), 1e-9);
    double prev = -1;
    for (std::size_t n = 1; n <= 5000; n = n * 3 / 2 + 1) {
        EXPECT_GT(b_n(n), prev);
        prev = b_n(n);
    }
    EXPECT_THROW((void)b_n(0), ConfigError);
}

TEST(ExpectedCompletion, LosslessChannelGivesF) {
    const auto r = expected_completion({20, 1000, 50, 1.0, false});
    EXPECT_DOUBLE_EQ(r.e_t_integral, 1000.0);
    EXPECT_DOUBLE_EQ(r.e_t_orderstat, 1000.0);
    ASSERT_TRUE(r.e_t_3sigma.has_value());
    EXPECT_DOUBLE_EQ(*r.e_t_3sigma, 1000.0);
}

TEST(ExpectedCompletion, IntegralMatchesMidpoint) {
    const ScenarioConfig c{50, 2000, 100, 0.8, false};
    const auto np = NormalParams::of(100, 0.8);
    const double ref = oracles::midpoint(
        [&](long double z) {
            return 1 - std::pow(oracles::phi_ld((z - np.mu) / np.sigma), 50.0L);
        },
        0, np.mu + 12 * np.sigma, 2000000);
    EXPECT_NEAR(expected_completion(c).e_t_integral, 20 * ref, 1e-5);
}

TEST(ExpectedCompletion, FormsAgree) {
    for (std::size_t n : {10, 50, 100})
        for (double p : {0.3, 0.5, 0.8})
            for (std::size_t k : {50, 100, 200, 500}) {
                const auto r = expected_completion({n, 2000, k, p, false});
                EXPECT_LE(std::abs(r.e_t_integral - r.e_t_orderstat) / r.e_t_integral, 0.01);
                if (r.e_t_3sigma) { EXPECT_LE(std::abs(*r.e_t_3sigma - r.e_t_orderstat) / r.e_t_orderstat, 0.02); }
            }
}

TEST(ExpectedCompletion, ThreeSigmaDomain) {
    EXPECT_TRUE(three_sigma_valid(4, 0.8, 4));   // 4 > 3.2
    EXPECT_FALSE(three_sigma_valid(3, 0.8, 4));  // 3 < 3.2
    EXPECT_FALSE(expected_completion({50, 30, 3, 0.8, false}).e_t_3sigma.has_value());
}

TEST(ExpectedCompletion, NormalizedDelayFallsWithK) {
    double prev = 1e300;
    for (std::size_t k : {1, 2, 4, 5, 8, 10, 20, 25, 40, 50, 100, 200, 250, 500, 1000}) {
        const auto r = expected_completion({50, 1000, k, 0.6, false});
        EXPECT_LE(r.e_t_orderstat, prev + 1e-9) << k;
        prev = r.e_t_orderstat;
    }
}

TEST(ExpectedCompletion, RejectsRaggedWindow) {
    EXPECT_THROW((void)expected_completion({10, 100, 7, 0.5, false}), ConfigError);
    EXPECT_THROW((void)expected_completion({10, 100, 7, 0.5, true}), ConfigError);
}

TEST(MinWindow, TableValues) {
    const double exact_pct[] = {3.3, 1.52, 0.83, 47.3, 34.12, 24.93};
    const double simple_pct[] = {3.35, 1.54, 0.83, 47.75, 34.3, 24.98};
    int i = 0;
    for (double eps : {0.10, 0.01})
        for (std::size_t f : {2000, 5000, 10000}) {
            EXPECT_NEAR(min_window(f, 50, 0.8, {eps}, WindowFormula::exact).percent_of(f), exact_pct[i], 0.05);
            EXPECT_NEAR(min_window(f, 50, 0.8, {eps}, WindowFormula::simplified).percent_of(f), simple_pct[i], 0.05);
            ++i;
        }
}

TEST(MinWindow, LooseConstraintGivesOne) {
    EXPECT_EQ(min_window(1000, 50, 0.8, {10.0}, WindowFormula::simplified).window, 1u);
    EXPECT_EQ(min_window(1000, 50, 0.8, {10.0}, WindowFormula::exact).window, 1u);
}

TEST(MinWindow, IsSmallestSatisfyingWindow) {
    for (auto formula : {WindowFormula::exact, WindowFormula::simplified})
        for (double eps : {0.005, 0.02, 0.1}) {
            const DelayModel model(3000, 20, 0.5, formula);
            const auto k = min_window(3000, 20, 0.5, {eps}, formula).window;
            EXPECT_LE(model.relative_increase(k), eps);
            if (k > 1) { EXPECT_GT(model.relative_increase(k - 1), eps); }
        }
}

TEST(MinWindow, MonotoneInParameters) {
    for (auto formula : {WindowFormula::exact, WindowFormula::simplified}) {
        std::size_t prev = 0;
        for (double eps : {0.2, 0.1, 0.05, 0.02, 0.01, 0.005}) {
            const auto k = min_window(5000, 50, 0.8, {eps}, formula).window;
            EXPECT_GE(k, prev);
            prev = k;
        }
        prev = 0;
        for (std::size_t n : {2, 10, 50, 200, 1000}) {
            const auto k = min_window(5000, n, 0.8, {0.02}, formula).window;
            EXPECT_GE(k, prev);
            prev = k;
        }
        prev = 1u << 30;
        for (double p : {0.2, 0.5, 0.8, 0.95}) {
            const auto k = min_window(5000, 50, p, {0.02}, formula).window;
            EXPECT_LE(k, prev);
            prev = k;
        }
    }
}

TEST(MinWindow, MatchesClosedFormBound) {
    for (std::size_t f : {2000, 5000, 10000})
        for (double eps : {0.1, 0.01}) {
            const double bound = simplified_window_bound(f, 50, 0.8, {eps});
            EXPECT_EQ(min_window(f, 50, 0.8, {eps}, WindowFormula::simplified).window,
                      static_cast<std::size_t>(std::ceil(bound - 1e-9)));
        }
}

TEST(MinWindow, DivisorOnly) {
    const auto r = min_window(2000, 50, 0.8, {0.1}, WindowFormula::exact, true);
    EXPECT_EQ(2000 % r.window, 0u);
    EXPECT_GE(r.window, min_window(2000, 50, 0.8, {0.1}, WindowFormula::exact).window);
    EXPECT_EQ(r.window, 80u);  // first divisor of 2000 at or above 66
}

TEST(MinWindow, RejectsBadInput) {
    EXPECT_THROW((void)min_window(1000, 50, 0.8, {0.0}, WindowFormula::exact), ConfigError);
    EXPECT_THROW((void)min_window(1000, 50, 0.0, {0.1}, WindowFormula::exact), ConfigError);
    EXPECT_THROW((void)parse_formula("approx"), ConfigError);
}

}  // namespace
}  // namespace rlncsched::analytics
