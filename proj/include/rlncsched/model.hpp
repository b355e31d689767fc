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

#ifndef RLNCSCHED_MODEL_HPP
#define RLNCSCHED_MODEL_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlncsched {

/// Raised when a scenario violates one of its invariants. The message names
/// the violated invariant.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Count = std::uint32_t;
using BatchIndex = std::size_t;  // 1-based

/// A broadcast scenario: N receivers, a file of F packets coded in windows
/// of K packets, each receiver connected with probability p per slot.
struct ScenarioConfig {
    std::size_t n_receivers = 1;
    std::size_t file_size = 1;
    std::size_t window = 1;
    double conn_prob = 1.0;
    bool ragged_allowed = false;

    /// Number of batches, ceil(F/K).
    [[nodiscard]] std::size_t num_batches() const { return (file_size + window - 1) / window; }

    /// Packets in batch `b` (1-based). Only the last batch can be short.
    [[nodiscard]] std::size_t batch_size(BatchIndex b) const {
        return b < num_batches() ? window : file_size - (num_batches() - 1) * window;
    }

    [[nodiscard]] bool divisible() const { return file_size % window == 0; }

    void validate() const {
        if (n_receivers == 0) throw ConfigError("n_receivers must be positive");
        if (file_size == 0) throw ConfigError("file_size must be positive");
        if (window == 0) throw ConfigError("window must be positive");
        if (window > file_size) throw ConfigError("window must not exceed file_size (K <= F)");
        if (!(conn_prob > 0.0 && conn_prob <= 1.0))
            throw ConfigError("conn_prob must lie in (0, 1]");
        if (!ragged_allowed && !divisible())
            throw ConfigError("file_size must be a multiple of window (F mod K = 0) unless ragged batches are enabled");
        if (file_size > std::size_t{UINT32_MAX}) throw ConfigError("file_size too large");
    }
};

/// Per-receiver received-packet counts and the current slot.
struct SystemState {
    std::vector<Count> received;
    std::uint64_t slot = 0;

    static SystemState empty(std::size_t n_receivers) { return {std::vector<Count>(n_receivers, 0), 0}; }

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// ON/OFF state of every receiver's channel in one slot.
struct ConnectivityVector {
    std::vector<std::uint8_t> bits;

    static ConnectivityVector all(std::size_t n, bool on) { return {std::vector<std::uint8_t>(n, on ? 1 : 0)}; }

    [[nodiscard]] std::size_t size() const { return bits.size(); }
    [[nodiscard]] bool operator[](std::size_t i) const { return bits[i] != 0; }
    [[nodiscard]] std::size_t count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }
};

/// The batch encoded in a slot, or no transmission.
class PolicyDecision {
public:
    static PolicyDecision idle() { return PolicyDecision{}; }
    static PolicyDecision batch(BatchIndex b) { return PolicyDecision{b}; }

    [[nodiscard]] bool is_idle() const { return !batch_.has_value(); }
    [[nodiscard]] BatchIndex batch() const { return batch_.value(); }

    friend bool operator==(const PolicyDecision&, const PolicyDecision&) = default;

    [[nodiscard]] std::string to_string() const {
        return is_idle() ? std::string("Idle") : "Batch(" + std::to_string(*batch_) + ")";
    }

private:
    PolicyDecision() = default;
    explicit PolicyDecision(BatchIndex b) : batch_(b) {}

    std::optional<BatchIndex> batch_;
};

/// Batch a receiver holding `received` packets is waiting for, or nullopt once
/// it holds the whole file.
[[nodiscard]] inline std::optional<BatchIndex> batch_id_of(Count received, const ScenarioConfig& config) {
    if (received >= config.file_size) return std::nullopt;
    return received / config.window + 1;
}

[[nodiscard]] inline std::optional<BatchIndex> batch_id(const SystemState& state, std::size_t receiver,
                                                        const ScenarioConfig& config) {
    return batch_id_of(state.received.at(receiver), config);
}

inline void check_decision(const PolicyDecision& decision, const ScenarioConfig& config) {
    if (!decision.is_idle() && (decision.batch() == 0 || decision.batch() > config.num_batches()))
        throw ConfigError("decision " + decision.to_string() + " exceeds num_batches " +
                          std::to_string(config.num_batches()));
}

/// In-place slot transition. Returns the number of receivers that gained a
/// packet.
inline std::size_t apply_step(SystemState& state, const ConnectivityVector& conn, const PolicyDecision& decision,
                              const ScenarioConfig& config) {
    check_decision(decision, config);
    std::size_t delivered = 0;
    if (!decision.is_idle()) {
        const BatchIndex chosen = decision.batch();
        for (std::size_t i = 0; i < state.received.size(); ++i) {
            Count& x = state.received[i];
            if (conn[i] && x < config.file_size && x / config.window + 1 == chosen) {
                ++x;
                ++delivered;
            }
        }
    }
    ++state.slot;
    return delivered;
}

/// Pure slot transition: receivers that are ON and waiting for the encoded
/// batch gain one packet; everyone else is unchanged.
[[nodiscard]] inline SystemState step(SystemState state, const ConnectivityVector& conn,
                                      const PolicyDecision& decision, const ScenarioConfig& config) {
    apply_step(state, conn, decision, config);
    return state;
}

/// Batches that at least one connected, unfinished receiver is waiting for.
/// Sorted ascending.
[[nodiscard]] inline std::vector<BatchIndex> useful_batches(const SystemState& state, const ConnectivityVector& conn,
                                                            const ScenarioConfig& config) {
    std::vector<BatchIndex> out;
    for (std::size_t i = 0; i < state.received.size(); ++i) {
        if (!conn[i]) continue;
        if (auto b = batch_id_of(state.received[i], config)) out.push_back(*b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

[[nodiscard]] inline bool all_finished(const SystemState& state, const ScenarioConfig& config) {
    return std::all_of(state.received.begin(), state.received.end(),
                       [&](Count x) { return x >= config.file_size; });
}

}  // namespace rlncsched

#endif  // RLNCSCHED_MODEL_HPP
