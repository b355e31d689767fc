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

// Exact expected completion times by backward induction.
//
// Receivers are exchangeable, so states are sorted count vectors. Every
// transition either leaves the state unchanged or strictly increases the
// total count, so one sweep in order of decreasing total solves the whole
// table; the self-loop is folded in as
//
//   V(s) = (1 + sum_{C, progress} P(C) V(next)) / (1 - P(no progress)).

#ifndef RLNCSCHED_ORACLE_HPP
#define RLNCSCHED_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rlncsched/model.hpp"
#include "rlncsched/policies.hpp"

namespace rlncsched::oracle {

inline constexpr std::uint64_t kDefaultCap = 10'000'000;
inline constexpr double kCertifyTolerance = 1e-9;

class StateSpaceCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Received counts sorted ascending.
using CanonicalState = std::vector<Count>;

[[nodiscard]] inline CanonicalState canonical(std::vector<Count> counts) {
    std::sort(counts.begin(), counts.end());
    return counts;
}

/// Expected remaining slots for every canonical state.
class ValueTable {
public:
    [[nodiscard]] double at(const std::vector<Count>& counts) const {
        const auto it = index_.find(key(canonical(counts)));
        if (it == index_.end()) throw std::out_of_range("state not in value table");
        return values_[it->second];
    }
    [[nodiscard]] double initial() const { return at(std::vector<Count>(n_, 0)); }
    [[nodiscard]] const std::vector<CanonicalState>& states() const { return states_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return states_.size(); }

private:
    friend class Solver;

    [[nodiscard]] std::uint64_t key(const CanonicalState& s) const {
        std::uint64_t k = 0;
        for (Count x : s) k = k * radix_ + x;
        return k;
    }

    std::size_t n_ = 0;
    std::uint64_t radix_ = 1;
    std::vector<CanonicalState> states_;
    std::vector<double> values_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

/// What drives the decision at each (state, connectivity) pair.
struct DecisionRule {
    std::optional<PolicyKind> policy;  // nullopt: minimize over useful batches

    static DecisionRule optimal() { return {}; }
    static DecisionRule follow(PolicyKind k) { return {k}; }
};

class Solver {
public:
    explicit Solver(const ScenarioConfig& config, std::uint64_t cap = kDefaultCap) : cfg_(config) {
        cfg_.validate();
        const std::size_t n = cfg_.n_receivers;
        if (n > 30) throw StateSpaceCapExceeded("too many receivers for exact enumeration");
        const std::uint64_t fanout = std::uint64_t{1} << n;
        // multiset count C(F + N, N), checked against the cap as it grows
        double states = 1.0;
        for (std::size_t i = 1; i <= n; ++i)
            states = states * static_cast<double>(cfg_.file_size + i) / static_cast<double>(i);
        if (states * static_cast<double>(fanout) > static_cast<double>(cap))
            throw StateSpaceCapExceeded("state space " + std::to_string(static_cast<std::uint64_t>(states)) +
                                        " x " + std::to_string(fanout) + " connectivity vectors exceeds cap " +
                                        std::to_string(cap));
        if (std::pow(static_cast<double>(cfg_.file_size + 1), static_cast<double>(n)) > 1.8e19)
            throw StateSpaceCapExceeded("state key does not fit in 64 bits");

        conn_prob_.resize(fanout);
        conns_.resize(fanout);
        for (std::uint64_t c = 0; c < fanout; ++c) {
            conns_[c] = ConnectivityVector::all(n, false);
            std::size_t on = 0;
            for (std::size_t i = 0; i < n; ++i) {
                conns_[c].bits[i] = static_cast<std::uint8_t>((c >> i) & 1U);
                on += conns_[c].bits[i];
            }
            conn_prob_[c] = std::pow(cfg_.conn_prob, static_cast<double>(on)) *
                            std::pow(1.0 - cfg_.conn_prob, static_cast<double>(n - on));
        }
    }

    [[nodiscard]] ValueTable solve(const DecisionRule& rule) const {
        ValueTable t = skeleton();
        for (std::size_t idx = 0; idx < t.states_.size(); ++idx) {
            const CanonicalState& s = t.states_[idx];
            if (s.front() >= cfg_.file_size) continue;  // terminal: 0
            const SystemState state{s, 0};
            double self = 0.0;
            double acc = 0.0;
            for (std::size_t c = 0; c < conns_.size(); ++c) {
                const double pc = conn_prob_[c];
                if (pc == 0.0) continue;
                const ConnectivityVector& conn = conns_[c];
                if (!rule.policy) {
                    const auto useful = useful_batches(state, conn, cfg_);
                    if (useful.empty()) {
                        self += pc;
                        continue;
                    }
                    double best = std::numeric_limits<double>::infinity();
                    for (BatchIndex b : useful)
                        best = std::min(best, lookup(t, step(state, conn, PolicyDecision::batch(b), cfg_).received));
                    acc += pc * best;
                    continue;
                }
                for (const auto& [decision, weight] : policy_decisions(*rule.policy, state, conn)) {
                    SystemState next = step(state, conn, decision, cfg_);
                    if (next.received == s) self += pc * weight;
                    else acc += pc * weight * lookup(t, std::move(next.received));
                }
            }
            t.values_[idx] = (1.0 + acc) / (1.0 - self);
        }
        return t;
    }

    /// States reachable from the empty state when the scheduler may pick any
    /// useful batch (or idle when none exists).
    [[nodiscard]] std::vector<CanonicalState> reachable() const {
        ValueTable t = skeleton();
        std::vector<bool> seen(t.size(), false);
        std::deque<CanonicalState> queue{CanonicalState(cfg_.n_receivers, 0)};
        seen[t.index_.at(t.key(queue.front()))] = true;
        std::vector<CanonicalState> out;
        while (!queue.empty()) {
            CanonicalState s = std::move(queue.front());
            queue.pop_front();
            const SystemState state{s, 0};
            for (std::size_t c = 0; c < conns_.size(); ++c) {
                if (conn_prob_[c] == 0.0) continue;
                for (BatchIndex b : useful_batches(state, conns_[c], cfg_)) {
                    CanonicalState next = canonical(step(state, conns_[c], PolicyDecision::batch(b), cfg_).received);
                    const std::size_t j = t.index_.at(t.key(next));
                    if (!seen[j]) {
                        seen[j] = true;
                        queue.push_back(std::move(next));
                    }
                }
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    [[nodiscard]] const ScenarioConfig& config() const { return cfg_; }

private:
    /// Enumerates canonical states in order of decreasing total count.
    [[nodiscard]] ValueTable skeleton() const {
        ValueTable t;
        t.n_ = cfg_.n_receivers;
        t.radix_ = cfg_.file_size + 1;
        CanonicalState cur(cfg_.n_receivers, 0);
        enumerate(t.states_, cur, 0, 0);
        std::stable_sort(t.states_.begin(), t.states_.end(), [](const CanonicalState& a, const CanonicalState& b) {
            return std::accumulate(a.begin(), a.end(), std::uint64_t{0}) >
                   std::accumulate(b.begin(), b.end(), std::uint64_t{0});
        });
        t.values_.assign(t.states_.size(), 0.0);
        for (std::size_t i = 0; i < t.states_.size(); ++i) t.index_.emplace(t.key(t.states_[i]), i);
        return t;
    }

    void enumerate(std::vector<CanonicalState>& out, CanonicalState& cur, std::size_t pos, Count min) const {
        if (pos == cur.size()) {
            out.push_back(cur);
            return;
        }
        for (Count x = min; x <= cfg_.file_size; ++x) {
            cur[pos] = x;
            enumerate(out, cur, pos + 1, x);
        }
    }

    [[nodiscard]] static double lookup(const ValueTable& t, std::vector<Count> counts) {
        return t.values_[t.index_.at(t.key(canonical(std::move(counts))))];
    }

    /// The policy's decision law at (state, conn); RS contributes one entry
    /// per batch with its exact selection probability.
    [[nodiscard]] std::vector<std::pair<PolicyDecision, double>> policy_decisions(
        PolicyKind kind, const SystemState& state, const ConnectivityVector& conn) const {
        switch (kind) {
            case PolicyKind::lr: return {{decide_lr(state, conn, cfg_), 1.0}};
            case PolicyKind::mg: return {{decide_mg(state, conn, cfg_), 1.0}};
            case PolicyKind::lr_ack: return {{decide_lr_ack(state, cfg_), 1.0}};
            case PolicyKind::rs: {
                std::vector<std::pair<PolicyDecision, double>> out;
                for (const auto& [b, w] : rs_distribution(state, conn, cfg_))
                    out.emplace_back(PolicyDecision::batch(b), w);
                if (out.empty()) out.emplace_back(PolicyDecision::idle(), 1.0);
                return out;
            }
        }
        return {};
    }

    ScenarioConfig cfg_;
    std::vector<ConnectivityVector> conns_;
    std::vector<double> conn_prob_;
};

/// V*: expected remaining slots under the best feasible scheduler.
[[nodiscard]] inline ValueTable optimal_value(const ScenarioConfig& config, std::uint64_t cap = kDefaultCap) {
    return Solver(config, cap).solve(DecisionRule::optimal());
}

/// V^pi: expected remaining slots under `policy`.
[[nodiscard]] inline ValueTable policy_value(const ScenarioConfig& config, PolicyKind policy,
                                             std::uint64_t cap = kDefaultCap) {
    return Solver(config, cap).solve(DecisionRule::follow(policy));
}

struct CertificationReport {
    PolicyKind policy = PolicyKind::lr;
    double v_star = 0;    // V*(empty state)
    double v_policy = 0;  // V^pi(empty state)
    double max_gap = 0;   // max over reachable states of V^pi - V*
    double min_gap = 0;   // min over reachable states; negative beyond rounding would contradict optimality
    std::size_t states = 0;

    [[nodiscard]] bool pass() const { return max_gap <= kCertifyTolerance; }
};

/// Compares `policy` to the optimum on every reachable state.
[[nodiscard]] inline CertificationReport certify(const ScenarioConfig& config, PolicyKind policy,
                                                 std::uint64_t cap = kDefaultCap) {
    const Solver solver(config, cap);
    const ValueTable best = solver.solve(DecisionRule::optimal());
    const ValueTable pol = solver.solve(DecisionRule::follow(policy));
    CertificationReport r;
    r.policy = policy;
    r.v_star = best.initial();
    r.v_policy = pol.initial();
    r.max_gap = -std::numeric_limits<double>::infinity();
    r.min_gap = std::numeric_limits<double>::infinity();
    for (const auto& s : solver.reachable()) {
        const double gap = pol.at(s) - best.at(s);
        r.max_gap = std::max(r.max_gap, gap);
        r.min_gap = std::min(r.min_gap, gap);
        ++r.states;
    }
    return r;
}

[[nodiscard]] inline CertificationReport certify_lr_optimality(const ScenarioConfig& config,
                                                               std::uint64_t cap = kDefaultCap) {
    return certify(config, PolicyKind::lr, cap);
}

}  // namespace rlncsched::oracle

#endif  // RLNCSCHED_ORACLE_HPP
