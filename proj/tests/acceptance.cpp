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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rlncsched/analytics.hpp"
#include "rlncsched/cli.hpp"
#include "rlncsched/oracle.hpp"
#include "rlncsched/simulator.hpp"

namespace {

using namespace rlncsched;

struct Outcome {
    bool ok;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

Outcome lr_certification() {
    std::size_t configs = 0, failed = 0;
    double worst = 0;
    std::string witness;
    for (std::size_t n : {2, 3})
        for (std::size_t f : {2, 4, 6})
            for (std::size_t k : {1, 2})
                for (double p : {0.3, 0.5, 0.8}) {
                    const ScenarioConfig c{n, f, k, p, false};
                    const auto r = oracle::certify_lr_optimality(c);
                    ++configs;
                    if (!r.pass()) {
                        ++failed;
                        witness += " (N=" + std::to_string(n) + ",F=" + std::to_string(f) + ",K=" +
                                   std::to_string(k) + ",p=" + fmt(p) + " gap " + fmt(r.max_gap) + ")";
                    }
                    worst = std::max(worst, r.max_gap);
                }
    return {failed == 0, std::to_string(configs - failed) + "/" + std::to_string(configs) +
                             " configs with V^LR = V* within 1e-9; max gap " + fmt(worst) +
                             (failed ? "; failing:" + witness : "")};
}

Outcome table1() {
    const double exact_pct[] = {3.3, 1.52, 0.83, 47.3, 34.12, 24.93};
    const double simple_pct[] = {3.35, 1.54, 0.83, 47.75, 34.3, 24.98};
    const auto t = cli::cmd_table1(cli::ExperimentSpec{});
    double worst = 0;
    std::size_t i = 0;
    for (const auto& row : t.rows) {
        const double ref = row[t.column("formula")] == "exact" ? exact_pct[i / 2] : simple_pct[i / 2];
        worst = std::max(worst, std::abs(row[t.column("percent")].get<double>() - ref));
        ++i;
    }
    return {t.rows.size() == 12 && worst <= 0.05, "12 entries, max deviation " + fmt(worst) + " points (tol 0.05)"};
}

Outcome q_integrals() {
    const double ref[] = {0.1168, 0.0164, 0.0029};
    double worst = 0;
    std::string vals;
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = analytics::q_power_integral(2 * (i + 1), 5.0);
        worst = std::max(worst, std::abs(v - ref[i]));
        vals += " " + fmt(v, 5);
    }
    return {worst <= 1e-3, "N=2,4,6:" + vals + "; max deviation " + fmt(worst) + " (tol 1e-3)"};
}

Outcome a_gap() {
    double sum = 0, mx = 0;
    std::size_t count = 0, last = 0;
    for (int i = 0; i < 40; ++i) {
        const auto n = static_cast<std::size_t>(std::llround(std::exp(std::log(2.0) + (std::log(5000.0) - std::log(2.0)) * i / 39)));
        if (n == last) continue;
        last = n;
        const int nt = analytics::n_tilde(n);
        const double exact = analytics::a_exact(n, nt);
        const double rel = std::abs(analytics::a_approx(n, nt) - exact) / exact;
        sum += rel;
        mx = std::max(mx, rel);
        ++count;
    }
    const double mean = sum / static_cast<double>(count);
    return {mean <= 0.005 && mx <= 0.05, std::to_string(count) + " values of N in [2, 5000]: mean " +
                                             fmt(100 * mean) + "%, max " + fmt(100 * mx) + "% (tol 0.5%, 5%)"};
}

Outcome analytic_vs_sim() {
    const std::size_t n = 50, f = 2000;
    const double p = 0.8;
    double sum = 0, mx = 0;
    std::size_t count = 0;
    for (std::size_t k = 50; k <= f; ++k) {
        if (f % k) continue;
        ReplicationPlan plan{7, 200, {n, f, k, p, false}, PolicyKind::lr};
        const double sim = run_batch(plan).t_max.mean / (f / p);
        const double ana = analytics::expected_completion(plan.scenario).e_t_orderstat / (f / p);
        const double rel = std::abs(sim - ana) / sim;
        sum += rel;
        mx = std::max(mx, rel);
        ++count;
    }
    const double mean = sum / static_cast<double>(count);
    return {mean <= 0.01 && mx <= 0.02, std::to_string(count) + " divisors K >= 50: mean " + fmt(100 * mean) +
                                            "%, max " + fmt(100 * mx) + "% (tol 1%, 2%)"};
}

Outcome throughput() {
    const ScenarioConfig a{50, 10000, 200, 0.4, false};
    const ScenarioConfig b{100, 10000, 125, 0.8, false};
    const double ta = measure_throughput({3, 30, a, PolicyKind::lr});
    const double tb = measure_throughput({3, 30, b, PolicyKind::lr});
    return {std::abs(ta - 0.9) <= 0.03 && std::abs(tb - 0.9) <= 0.03,
            "N=50,p=0.4,K=200: " + fmt(ta) + "; N=100,p=0.8,K=125: " + fmt(tb) + " (target 0.9 +/- 0.03)"};
}

struct DominanceRun {
    std::size_t k;
    PairedResult vs_rs, vs_mg;
};

const std::vector<DominanceRun>& dominance_runs() {
    static const std::vector<DominanceRun> runs = [] {
        std::vector<DominanceRun> out;
        for (std::size_t k : {20, 60, 180}) {
            const ScenarioConfig c{10, 3000, k, 0.5, 3000 % k != 0};
            out.push_back({k, paired_comparison(c, PolicyKind::lr, PolicyKind::rs, 200, 21),
                           paired_comparison(c, PolicyKind::lr, PolicyKind::mg, 200, 21)});
        }
        return out;
    }();
    return runs;
}

Outcome dominance() {
    bool ok = true;
    std::string detail;
    for (const auto& r : dominance_runs()) {
        const double lr = r.vs_rs.a.t_max.mean;
        const double rs = r.vs_rs.b.t_max.mean, mg = r.vs_mg.b.t_max.mean;
        const double below_rs = 1 - lr / rs, below_mg = 1 - lr / mg;
        const bool small_k = static_cast<double>(r.k) <= 0.06 * 3000;
        ok = ok && lr < rs && lr < mg && r.vs_rs.p_value < 0.01 && r.vs_mg.p_value < 0.01;
        if (small_k) ok = ok && below_rs >= 0.5 && below_mg >= 0.5;
        ok = ok && r.vs_rs.a.t_var.mean <= r.vs_rs.b.t_var.mean && r.vs_rs.a.t_var.mean <= r.vs_mg.b.t_var.mean;
        detail += " K=" + std::to_string(r.k) + ": LR " + fmt(lr, 5) + " vs RS " + fmt(rs, 5) + " (-" +
                  fmt(100 * below_rs, 3) + "%) MG " + fmt(mg, 5) + " (-" + fmt(100 * below_mg, 3) +
                  "%), var LR/RS/MG " + fmt(r.vs_rs.a.t_var.mean) + "/" + fmt(r.vs_rs.b.t_var.mean) + "/" +
                  fmt(r.vs_mg.b.t_var.mean) + ";";
    }
    return {ok, "F=3000,N=10,p=0.5, 200 paired reps:" + detail};
}

Outcome fairness() {
    double worst = 0;
    for (const auto& r : dominance_runs()) {
        const auto& lr = r.vs_rs.a;
        worst = std::max(worst, (lr.t_max.mean - lr.t_mean.mean) / lr.t_mean.mean);
    }
    return {worst <= 0.05, "max (t_max - t_mean)/t_mean under LR = " + fmt(100 * worst) + "% (tol 5%)"};
}

Outcome feedback_gap() {
    const std::vector<std::size_t> ks = {10, 20, 25, 40, 50, 80, 100, 125, 200, 250, 400, 500};
    const auto mean_gap = [&](std::size_t n) {
        double sum = 0;
        for (std::size_t k : ks) {
            const auto r = paired_comparison({n, 2000, k, 0.8, false}, PolicyKind::lr_ack, PolicyKind::lr, 200, 13);
            sum += (r.a.t_max.mean - r.b.t_max.mean) / r.b.t_max.mean;
        }
        return sum / static_cast<double>(ks.size());
    };
    const double g10 = mean_gap(10), g50 = mean_gap(50), g100 = mean_gap(100);
    return {g50 <= 0.10 && g10 > g100, "F=2000,p=0.8, 12 windows: mean gap N=10 " + fmt(100 * g10) + "%, N=50 " +
                                           fmt(100 * g50) + "%, N=100 " + fmt(100 * g100) +
                                           "% (tol 10% at N=50, decreasing from N=10 to N=100)"};
}

Outcome codec_checks() {
    bool ok = true;
    std::string detail;
    for (const auto& c : cli::codec_selftest(10000, 100000, 32, 1)) {
        ok = ok && c.ok;
        detail += " " + c.name + " " + (c.ok ? "ok" : "FAILED") + " (" + c.detail + ");";
    }
    return {ok, detail};
}

Outcome degenerate() {
    bool ok = true;
    std::size_t runs = 0;
    for (PolicyKind kind : kAllPolicies)
        for (std::size_t k : {1, 7, 20, 50, 100}) {
            ReplicationPlan plan{5, 20, {8, 100, k, 1.0, true}, kind};
            for (const auto& r : run_batch(plan).runs) {
                ok = ok && r.t_max == 100.0;
                ++runs;
            }
        }
    std::size_t trajectories = 0;
    for (std::size_t n : {2, 5, 10})
        for (double p : {0.3, 0.7}) {
            const ReplicationPlan base{9, 50, {n, 40, 40, p, false}, PolicyKind::lr};
            const auto ref = run_batch(base);
            for (PolicyKind kind : {PolicyKind::rs, PolicyKind::mg}) {
                auto plan = base;
                plan.policy = kind;
                const auto other = run_batch(plan);
                for (std::size_t i = 0; i < ref.runs.size(); ++i) {
                    ok = ok && other.runs[i].per_receiver_t == ref.runs[i].per_receiver_t;
                    ++trajectories;
                }
            }
        }
    return {ok, std::to_string(runs) + " lossless runs with t_max = F; " + std::to_string(trajectories) +
                    " paired K=F trajectories identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"LR optimality certificate", lr_certification},
        {"minimum window table", table1},
        {"Q power integrals", q_integrals},
        {"A(N) approximation", a_gap},
        {"analytic vs simulated completion", analytic_vs_sim},
        {"LR throughput", throughput},
        {"policy dominance at small K", dominance},
        {"LR fairness", fairness},
        {"ACK-only feedback gap", feedback_gap},
        {"codec correctness", codec_checks},
        {"degenerate exactness", degenerate},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s [%.1fs]\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.ok;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
