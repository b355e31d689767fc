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

#ifndef RLNCSCHED_SIMULATOR_HPP
#define RLNCSCHED_SIMULATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/math/distributions/binomial.hpp>

#include "rlncsched/codec.hpp"
#include "rlncsched/model.hpp"
#include "rlncsched/policies.hpp"
#include "rlncsched/rng.hpp"

namespace rlncsched {

class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ideal: any K packets of a batch decode it. GF256: packets are real random
/// combinations and only innovative ones count.
enum class CodingMode { ideal, gf256 };

[[nodiscard]] inline std::string_view to_string(CodingMode mode) {
    return mode == CodingMode::ideal ? "ideal" : "gf256";
}

[[nodiscard]] inline CodingMode parse_coding(std::string_view name) {
    if (name == "ideal") return CodingMode::ideal;
    if (name == "gf256") return CodingMode::gf256;
    throw ConfigError("unknown coding mode '" + std::string(name) + "' (expected ideal or gf256)");
}

inline constexpr std::uint64_t kSlotHorizon = 1'000'000'000ULL;

struct ReplicationPlan {
    std::uint64_t base_seed = 1;
    std::size_t replications = 1;
    ScenarioConfig scenario;
    PolicyKind policy = PolicyKind::lr;
    CodingMode coding = CodingMode::ideal;
    /// GF256 mode only: bytes of payload carried per packet. Zero tracks
    /// coefficients alone; nonzero also checks every decoded batch.
    std::size_t payload_bytes = 0;
    /// Per-slot invariant checks (feasibility, unit increments). Test use.
    bool audit = false;
    /// Worker threads for run_batch; 0 picks hardware concurrency.
    std::size_t workers = 0;

    void validate() const {
        scenario.validate();
        if (replications == 0) throw ConfigError("replications must be at least 1");
    }
};

struct RunMetrics {
    double t_max = 0;   // slots until every receiver holds the file
    double t_mean = 0;  // mean of per-receiver completion slots
    double t_var = 0;   // population variance of per-receiver completion slots
    std::vector<std::uint64_t> per_receiver_t;
    double throughput_norm = 0;  // delivered / (N p T_min), up to T_min = min_i T_i
};

namespace detail {

/// Deterministic source payload for (seed, batch, packet) used to verify GF256
/// decoding inside the simulator.
inline codec::Bytes source_payload(std::uint64_t seed, BatchIndex batch, std::size_t packet, std::size_t len) {
    Engine rng{stream_key(seed ^ (batch * 0x100000001b3ULL), packet, Substream::coding)};
    codec::Bytes out(len);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng());
    return out;
}

}  // namespace detail

/// Simulates replication `index` of `plan` from the empty state until every
/// receiver holds the file.
[[nodiscard]] inline RunMetrics run_replication(const ReplicationPlan& plan, std::size_t index) {
    plan.validate();
    if (index >= plan.replications)
        throw ConfigError("replication index " + std::to_string(index) + " out of range");

    const ScenarioConfig& cfg = plan.scenario;
    const std::size_t n = cfg.n_receivers;
    Engine channel = make_stream(plan.base_seed, index, Substream::channel);
    Engine policy_rng = make_stream(plan.base_seed, index, Substream::policy);
    Engine coding_rng = make_stream(plan.base_seed, index, Substream::coding);
    const BernoulliThreshold on(cfg.conn_prob);

    SystemState state = SystemState::empty(n);
    ConnectivityVector conn = ConnectivityVector::all(n, false);
    RunMetrics m;
    m.per_receiver_t.assign(n, 0);
    std::size_t finished = 0;
    std::uint64_t delivered_total = 0;
    std::uint64_t first_finish_slot = 0;
    std::uint64_t delivered_at_first_finish = 0;

    const bool gf = plan.coding == CodingMode::gf256;
    std::vector<codec::DecoderState> decoders;
    std::vector<codec::Bytes> sources;
    BatchIndex sources_batch = 0;
    if (gf) {
        decoders.reserve(n);
        for (std::size_t i = 0; i < n; ++i) decoders.emplace_back(1, cfg.batch_size(1));
    }
    std::vector<Count> before;

    while (finished < n) {
        if (state.slot >= kSlotHorizon)
            throw SimulationError("replication " + std::to_string(index) + " exceeded the slot horizon");
        for (auto& bit : conn.bits) bit = on(channel) ? 1 : 0;

        const PolicyDecision decision = decide(plan.policy, state, conn, cfg, policy_rng);
        if (plan.audit) {
            if (is_feasible(plan.policy) && decision.is_idle() && !useful_batches(state, conn, cfg).empty())
                throw SimulationError("feasible policy idled while a useful batch existed");
            before = state.received;
        }

        std::size_t delivered = 0;
        if (!gf) {
            delivered = apply_step(state, conn, decision, cfg);
        } else {
            check_decision(decision, cfg);
            if (!decision.is_idle()) {
                const BatchIndex b = decision.batch();
                const std::size_t bsize = cfg.batch_size(b);
                codec::EncodedPacket pkt;
                if (plan.payload_bytes > 0) {
                    if (sources_batch != b) {
                        sources.clear();
                        for (std::size_t j = 0; j < bsize; ++j)
                            sources.push_back(detail::source_payload(plan.base_seed, b, j, plan.payload_bytes));
                        sources_batch = b;
                    }
                    pkt = codec::encode(b, sources, coding_rng);
                } else {
                    pkt = codec::EncodedPacket{b, codec::random_coefficients(bsize, coding_rng), {}};
                }
                for (std::size_t i = 0; i < n; ++i) {
                    Count& x = state.received[i];
                    if (!conn[i] || x >= cfg.file_size || x / cfg.window + 1 != b) continue;
                    if (decoders[i].absorb(pkt) != codec::AbsorbResult::innovative) continue;
                    ++x;
                    ++delivered;
                    if (decoders[i].decodable()) {
                        if (plan.payload_bytes > 0 && decoders[i].decode() != sources)
                            throw SimulationError("GF(256) decode mismatch");
                        if (b < cfg.num_batches()) decoders[i] = codec::DecoderState(b + 1, cfg.batch_size(b + 1));
                    }
                }
            }
            ++state.slot;
        }

        if (plan.audit) {
            std::size_t inc = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const Count d = state.received[i] - before[i];
                if (d > 1 || (d == 1 && !conn[i])) throw SimulationError("illegal per-slot increment");
                inc += d;
            }
            if (inc > conn.count()) throw SimulationError("increments exceed connected receivers");
        }

        delivered_total += delivered;
        if (delivered == 0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            if (m.per_receiver_t[i] == 0 && state.received[i] == cfg.file_size) {
                m.per_receiver_t[i] = state.slot;
                if (finished++ == 0) {
                    first_finish_slot = state.slot;
                    delivered_at_first_finish = delivered_total;
                }
            }
        }
    }

    double sum = 0, sum_sq = 0, mx = 0;
    for (const auto t : m.per_receiver_t) {
        const double d = static_cast<double>(t);
        sum += d;
        mx = std::max(mx, d);
    }
    m.t_max = mx;
    m.t_mean = sum / static_cast<double>(n);
    for (const auto t : m.per_receiver_t) sum_sq += (static_cast<double>(t) - m.t_mean) * (static_cast<double>(t) - m.t_mean);
    m.t_var = sum_sq / static_cast<double>(n);
    m.throughput_norm = static_cast<double>(delivered_at_first_finish) /
                        (static_cast<double>(n) * cfg.conn_prob * static_cast<double>(first_finish_slot));
    return m;
}

/// Sample statistics of one metric across replications.
struct Summary {
    double mean = 0;
    double variance = 0;  // unbiased; 0 for a single replication
    double std_error = 0;
    [[nodiscard]] double ci95() const { return 1.959963984540054 * std_error; }

    static Summary of(const std::vector<double>& xs) {
        Summary s;
        if (xs.empty()) return s;
        for (double x : xs) s.mean += x;
        s.mean /= static_cast<double>(xs.size());
        if (xs.size() > 1) {
            for (double x : xs) s.variance += (x - s.mean) * (x - s.mean);
            s.variance /= static_cast<double>(xs.size() - 1);
            s.std_error = std::sqrt(s.variance / static_cast<double>(xs.size()));
        }
        return s;
    }
};

struct BatchResult {
    std::vector<RunMetrics> runs;  // in replication order
    Summary t_max;
    Summary t_mean;
    Summary t_var;
    Summary throughput;
};

namespace detail {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += workers) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// Runs every replication of `plan`, possibly concurrently, and aggregates in
/// index order.
[[nodiscard]] inline BatchResult run_batch(const ReplicationPlan& plan) {
    plan.validate();
    BatchResult out;
    out.runs.resize(plan.replications);
    detail::parallel_for(plan.replications, plan.workers,
                         [&](std::size_t i) { out.runs[i] = run_replication(plan, i); });
    std::vector<double> tmax, tmean, tvar, thr;
    for (const auto& r : out.runs) {
        tmax.push_back(r.t_max);
        tmean.push_back(r.t_mean);
        tvar.push_back(r.t_var);
        thr.push_back(r.throughput_norm);
    }
    out.t_max = Summary::of(tmax);
    out.t_mean = Summary::of(tmean);
    out.t_var = Summary::of(tvar);
    out.throughput = Summary::of(thr);
    return out;
}

/// Mean normalized throughput over the plan's replications.
[[nodiscard]] inline double measure_throughput(const ReplicationPlan& plan) { return run_batch(plan).throughput.mean; }

struct PairedResult {
    double mean_difference = 0;  // mean of T^A - T^B
    double p_value = 1;          // one-sided sign test for T^A < T^B
    std::size_t a_wins = 0;
    std::size_t b_wins = 0;
    std::size_t ties = 0;
    BatchResult a;
    BatchResult b;
};

/// One-sided sign test: P(X >= successes) for X ~ Binomial(trials, 1/2).
[[nodiscard]] inline double sign_test_p_value(std::size_t successes, std::size_t trials) {
    if (trials == 0 || successes == 0) return 1.0;
    const boost::math::binomial_distribution<double> dist(static_cast<double>(trials), 0.5);
    return boost::math::cdf(boost::math::complement(dist, static_cast<double>(successes - 1)));
}

/// Runs two policies on common channel realizations: replication i of both
/// arms consumes the same channel stream.
[[nodiscard]] inline PairedResult paired_comparison(const ScenarioConfig& scenario, PolicyKind a, PolicyKind b,
                                                    std::size_t replications, std::uint64_t seed,
                                                    CodingMode coding = CodingMode::ideal, std::size_t workers = 0) {
    ReplicationPlan plan{seed, replications, scenario, a, coding, 0, false, workers};
    PairedResult out;
    out.a = run_batch(plan);
    plan.policy = b;
    out.b = run_batch(plan);
    double sum = 0;
    for (std::size_t i = 0; i < replications; ++i) {
        const double d = out.a.runs[i].t_max - out.b.runs[i].t_max;
        sum += d;
        if (d < 0) ++out.a_wins;
        else if (d > 0) ++out.b_wins;
        else ++out.ties;
    }
    out.mean_difference = sum / static_cast<double>(replications);
    out.p_value = sign_test_p_value(out.a_wins, out.a_wins + out.b_wins);
    return out;
}

}  // namespace rlncsched

#endif  // RLNCSCHED_SIMULATOR_HPP
