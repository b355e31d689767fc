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

#ifndef RLNCSCHED_POLICIES_HPP
#define RLNCSCHED_POLICIES_HPP

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rlncsched/model.hpp"
#include "rlncsched/rng.hpp"

namespace rlncsched {

/// Scheduling policies.
///   lr     - least received: useful batch with the smallest ID
///   rs     - random selection: batch i with probability Ni/Nc
///   mg     - maximum gain: useful batch with the most connected receivers
///   lr_ack - least received under ACK-only feedback: smallest batch ID over
///            all unfinished receivers, connected or not
enum class PolicyKind { lr, rs, mg, lr_ack };

inline constexpr std::array kAllPolicies = {PolicyKind::lr, PolicyKind::rs, PolicyKind::mg, PolicyKind::lr_ack};

[[nodiscard]] inline std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::lr: return "lr";
        case PolicyKind::rs: return "rs";
        case PolicyKind::mg: return "mg";
        case PolicyKind::lr_ack: return "lr-ack";
    }
    return "?";
}

[[nodiscard]] inline PolicyKind parse_policy(std::string_view name) {
    for (PolicyKind k : kAllPolicies)
        if (to_string(k) == name) return k;
    throw ConfigError("unknown policy '" + std::string(name) + "' (expected lr, rs, mg or lr-ack)");
}

enum class FeedbackMode { full, batch_only };

[[nodiscard]] constexpr FeedbackMode required_feedback(PolicyKind kind) {
    return kind == PolicyKind::lr_ack ? FeedbackMode::batch_only : FeedbackMode::full;
}

/// Feasible policies never idle while some connected receiver is unfinished.
[[nodiscard]] constexpr bool is_feasible(PolicyKind kind) { return kind != PolicyKind::lr_ack; }

/// What the base station observes in a slot. A batch-only view carries no
/// connectivity at all.
class FeedbackView {
public:
    static FeedbackView full(const SystemState& state, const ConnectivityVector& conn) {
        return FeedbackView(state, &conn);
    }
    static FeedbackView batch_only(const SystemState& state) { return FeedbackView(state, nullptr); }

    [[nodiscard]] FeedbackMode mode() const { return conn_ ? FeedbackMode::full : FeedbackMode::batch_only; }
    [[nodiscard]] const SystemState& state() const { return *state_; }
    [[nodiscard]] const ConnectivityVector& connectivity() const {
        if (!conn_) throw std::logic_error("connectivity is not observable under batch-only feedback");
        return *conn_;
    }

private:
    FeedbackView(const SystemState& s, const ConnectivityVector* c) : state_(&s), conn_(c) {}

    const SystemState* state_;
    const ConnectivityVector* conn_;
};

[[nodiscard]] inline PolicyDecision decide_lr(const SystemState& state, const ConnectivityVector& conn,
                                              const ScenarioConfig& config) {
    BatchIndex best = std::numeric_limits<BatchIndex>::max();
    for (std::size_t i = 0; i < state.received.size(); ++i) {
        const Count x = state.received[i];
        if (conn[i] && x < config.file_size) best = std::min<BatchIndex>(best, x / config.window + 1);
    }
    return best == std::numeric_limits<BatchIndex>::max() ? PolicyDecision::idle() : PolicyDecision::batch(best);
}

/// Batch IDs of connected unfinished receivers, sorted.
[[nodiscard]] inline std::vector<BatchIndex> connected_batch_ids(const SystemState& state,
                                                                 const ConnectivityVector& conn,
                                                                 const ScenarioConfig& config) {
    std::vector<BatchIndex> ids;
    ids.reserve(state.received.size());
    for (std::size_t i = 0; i < state.received.size(); ++i) {
        const Count x = state.received[i];
        if (conn[i] && x < config.file_size) ids.push_back(x / config.window + 1);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

/// Exact RS selection law: (batch, Ni/Nc) pairs in ascending batch order.
[[nodiscard]] inline std::vector<std::pair<BatchIndex, double>> rs_distribution(const SystemState& state,
                                                                               const ConnectivityVector& conn,
                                                                               const ScenarioConfig& config) {
    const auto ids = connected_batch_ids(state, conn, config);
    std::vector<std::pair<BatchIndex, double>> law;
    const double nc = static_cast<double>(ids.size());
    for (std::size_t lo = 0; lo < ids.size();) {
        std::size_t hi = lo;
        while (hi < ids.size() && ids[hi] == ids[lo]) ++hi;
        law.emplace_back(ids[lo], static_cast<double>(hi - lo) / nc);
        lo = hi;
    }
    return law;
}

/// Picks a uniformly random connected unfinished receiver and encodes its
/// batch, which selects batch i with probability Ni/Nc.
[[nodiscard]] inline PolicyDecision decide_rs(const SystemState& state, const ConnectivityVector& conn,
                                              const ScenarioConfig& config, Engine& rng) {
    std::size_t nc = 0;
    for (std::size_t i = 0; i < state.received.size(); ++i)
        if (conn[i] && state.received[i] < config.file_size) ++nc;
    if (nc == 0) return PolicyDecision::idle();
    std::size_t pick = uniform_below(rng, nc);
    for (std::size_t i = 0; i < state.received.size(); ++i) {
        const Count x = state.received[i];
        if (conn[i] && x < config.file_size && pick-- == 0) return PolicyDecision::batch(x / config.window + 1);
    }
    return PolicyDecision::idle();  // unreachable
}

/// Ties go to the smallest batch index.
[[nodiscard]] inline PolicyDecision decide_mg(const SystemState& state, const ConnectivityVector& conn,
                                              const ScenarioConfig& config) {
    const auto ids = connected_batch_ids(state, conn, config);
    if (ids.empty()) return PolicyDecision::idle();
    BatchIndex best = ids.front();
    std::size_t best_count = 0;
    for (std::size_t lo = 0; lo < ids.size();) {
        std::size_t hi = lo;
        while (hi < ids.size() && ids[hi] == ids[lo]) ++hi;
        if (hi - lo > best_count) {
            best_count = hi - lo;
            best = ids[lo];
        }
        lo = hi;
    }
    return PolicyDecision::batch(best);
}

/// May pick a batch whose receivers are all OFF this slot.
[[nodiscard]] inline PolicyDecision decide_lr_ack(const SystemState& state, const ScenarioConfig& config) {
    BatchIndex best = std::numeric_limits<BatchIndex>::max();
    for (const Count x : state.received)
        if (x < config.file_size) best = std::min<BatchIndex>(best, x / config.window + 1);
    return best == std::numeric_limits<BatchIndex>::max() ? PolicyDecision::idle() : PolicyDecision::batch(best);
}

/// Dispatches on `kind`, handing each policy only the feedback it is entitled
/// to. `rng` is only touched by RS.
[[nodiscard]] inline PolicyDecision decide(PolicyKind kind, const FeedbackView& view, const ScenarioConfig& config,
                                           Engine& rng) {
    if (view.mode() != required_feedback(kind))
        throw std::logic_error("policy " + std::string(to_string(kind)) + " given the wrong feedback view");
    switch (kind) {
        case PolicyKind::lr: return decide_lr(view.state(), view.connectivity(), config);
        case PolicyKind::rs: return decide_rs(view.state(), view.connectivity(), config, rng);
        case PolicyKind::mg: return decide_mg(view.state(), view.connectivity(), config);
        case PolicyKind::lr_ack: return decide_lr_ack(view.state(), config);
    }
    return PolicyDecision::idle();
}

[[nodiscard]] inline PolicyDecision decide(PolicyKind kind, const SystemState& state, const ConnectivityVector& conn,
                                           const ScenarioConfig& config, Engine& rng) {
    const FeedbackView view = required_feedback(kind) == FeedbackMode::full ? FeedbackView::full(state, conn)
                                                                           : FeedbackView::batch_only(state);
    return decide(kind, view, config, rng);
}

}  // namespace rlncsched

#endif  // RLNCSCHED_POLICIES_HPP
