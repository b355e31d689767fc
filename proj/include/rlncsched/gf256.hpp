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

#ifndef RLNCSCHED_GF256_HPP
#define RLNCSCHED_GF256_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace rlncsched::gf256 {

/// x^8 + x^4 + x^3 + x + 1
inline constexpr unsigned kPolynomial = 0x11B;
/// 0x03 generates the multiplicative group under kPolynomial.
inline constexpr std::uint8_t kGenerator = 0x03;

namespace detail {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<std::uint8_t, 256> log{};
    std::array<std::uint8_t, 256 * 256> mul{};
};

constexpr std::uint8_t xtime_mul3(std::uint8_t x) {
    unsigned v = static_cast<unsigned>(x) ^ (static_cast<unsigned>(x) << 1);
    if (v & 0x100) v ^= kPolynomial;
    return static_cast<std::uint8_t>(v);
}

constexpr Tables build_tables() {
    Tables t{};
    std::uint8_t x = 1;
    for (unsigned i = 0; i < 255; ++i) {
        t.exp[i] = x;
        t.exp[i + 255] = x;
        t.log[x] = static_cast<std::uint8_t>(i);
        x = xtime_mul3(x);
    }
    t.exp[510] = t.exp[0];
    t.exp[511] = t.exp[1];
    for (unsigned a = 1; a < 256; ++a)
        for (unsigned b = 1; b < 256; ++b) t.mul[a * 256 + b] = t.exp[t.log[a] + t.log[b]];
    return t;
}

inline const Tables& tables() {
    static constexpr Tables t = build_tables();
    return t;
}

}  // namespace detail

[[nodiscard]] inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

[[nodiscard]] inline std::uint8_t mul(std::uint8_t a, std::uint8_t b) { return detail::tables().mul[a * 256u + b]; }

[[nodiscard]] inline std::uint8_t exp(unsigned i) { return detail::tables().exp[i % 255]; }

[[nodiscard]] inline std::uint8_t log(std::uint8_t a) {
    if (a == 0) throw std::domain_error("gf256::log(0)");
    return detail::tables().log[a];
}

[[nodiscard]] inline std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw std::domain_error("gf256::inv(0)");
    const auto& t = detail::tables();
    return t.exp[255 - t.log[a]];
}

/// dst += factor * src, element-wise.
inline void axpy(std::span<std::uint8_t> dst, std::span<const std::uint8_t> src, std::uint8_t factor) {
    if (factor == 0) return;
    const std::uint8_t* row = &detail::tables().mul[factor * 256u];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= row[src[i]];
}

/// v *= factor, element-wise.
inline void scale(std::span<std::uint8_t> v, std::uint8_t factor) {
    const std::uint8_t* row = &detail::tables().mul[factor * 256u];
    for (auto& x : v) x = row[x];
}

}  // namespace rlncsched::gf256

#endif  // RLNCSCHED_GF256_HPP
