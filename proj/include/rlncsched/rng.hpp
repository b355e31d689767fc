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

#ifndef RLNCSCHED_RNG_HPP
#define RLNCSCHED_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace rlncsched {

/// Substreams of one replication. Channel draws never share a generator with
/// policy or coding draws, so two policies run on the same (seed, index) see
/// identical ON/OFF realizations.
enum class Substream : std::uint64_t { channel = 1, policy = 2, coding = 3 };

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed for the (base_seed, replication, substream) stream.
constexpr std::uint64_t stream_key(std::uint64_t base_seed, std::uint64_t replication, Substream tag) {
    std::uint64_t h = detail::splitmix64(base_seed);
    h = detail::splitmix64(h ^ replication);
    return detail::splitmix64(h ^ static_cast<std::uint64_t>(tag));
}

using Engine = std::mt19937_64;

inline Engine make_stream(std::uint64_t base_seed, std::uint64_t replication, Substream tag) {
    return Engine{stream_key(base_seed, replication, tag)};
}

/// Bernoulli(p) on raw 64-bit draws; p = 1 never consumes a different number
/// of draws than p < 1.
class BernoulliThreshold {
public:
    explicit BernoulliThreshold(double p)
        : always_(p >= 1.0),
          threshold_(p >= 1.0 ? 0 : static_cast<std::uint64_t>(p * 18446744073709551616.0)) {}

    bool operator()(Engine& rng) const {
        const std::uint64_t r = rng();
        return always_ || r < threshold_;
    }

private:
    bool always_;
    std::uint64_t threshold_;
};

/// Uniform integer in [0, n) via the multiply-shift reduction.
inline std::uint64_t uniform_below(Engine& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

}  // namespace rlncsched

#endif  // RLNCSCHED_RNG_HPP
