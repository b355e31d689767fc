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

#ifndef RLNCSCHED_CODEC_HPP
#define RLNCSCHED_CODEC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlncsched/gf256.hpp"
#include "rlncsched/model.hpp"
#include "rlncsched/rng.hpp"

namespace rlncsched::codec {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kDefaultPayloadBytes = 1024;

class CodecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A random linear combination of the source packets of one batch.
struct EncodedPacket {
    BatchIndex batch = 1;
    Bytes coefficients;  // one per source packet in the batch
    Bytes payload;
};

/// Combines `sources` with the given coefficients.
[[nodiscard]] inline EncodedPacket encode_with(BatchIndex batch, Bytes coefficients, std::span<const Bytes> sources) {
    if (coefficients.size() != sources.size())
        throw CodecError("coefficient count " + std::to_string(coefficients.size()) + " != batch size " +
                         std::to_string(sources.size()));
    const std::size_t len = sources.empty() ? 0 : sources.front().size();
    for (const auto& s : sources)
        if (s.size() != len) throw CodecError("source payloads have unequal lengths");
    EncodedPacket pkt{batch, std::move(coefficients), Bytes(len, 0)};
    for (std::size_t j = 0; j < sources.size(); ++j) gf256::axpy(pkt.payload, sources[j], pkt.coefficients[j]);
    return pkt;
}

/// Draws `count` coefficients uniformly from GF(256).
[[nodiscard]] inline Bytes random_coefficients(std::size_t count, Engine& rng) {
    Bytes c(count);
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < count; ++j) {
        if (j % 8 == 0) bits = rng();
        c[j] = static_cast<std::uint8_t>(bits >> (8 * (j % 8)));
    }
    return c;
}

[[nodiscard]] inline EncodedPacket encode(BatchIndex batch, std::span<const Bytes> sources, Engine& rng) {
    return encode_with(batch, random_coefficients(sources.size(), rng), sources);
}

enum class AbsorbResult { innovative, redundant };

/// Incremental Gauss-Jordan decoder for one batch. Stored rows are kept in
/// reduced row echelon form, one per pivot column, with payloads undergoing
/// the same row operations as their coefficients.
class DecoderState {
public:
    DecoderState(BatchIndex batch, std::size_t batch_size)
        : batch_(batch), size_(batch_size), rows_(batch_size), has_pivot_(batch_size, false) {}

    [[nodiscard]] BatchIndex batch() const { return batch_; }
    [[nodiscard]] std::size_t batch_size() const { return size_; }
    [[nodiscard]] std::size_t rank() const { return rank_; }
    [[nodiscard]] bool decodable() const { return rank_ == size_; }

    AbsorbResult absorb(const EncodedPacket& pkt) {
        if (pkt.batch != batch_)
            throw CodecError("packet for batch " + std::to_string(pkt.batch) + " offered to decoder of batch " +
                             std::to_string(batch_));
        if (pkt.coefficients.size() != size_) throw CodecError("coefficient vector length != batch size");
        if (rank_ > 0 && pkt.payload.size() != payload_len_) throw CodecError("payload length mismatch");
        if (decodable()) return AbsorbResult::redundant;

        Row row{pkt.coefficients, pkt.payload};
        for (std::size_t c = 0; c < size_; ++c) {
            if (has_pivot_[c] && row.coeffs[c] != 0) subtract(row, rows_[c], row.coeffs[c]);
        }
        std::size_t lead = 0;
        while (lead < size_ && row.coeffs[lead] == 0) ++lead;
        if (lead == size_) return AbsorbResult::redundant;

        const std::uint8_t norm = gf256::inv(row.coeffs[lead]);
        gf256::scale(row.coeffs, norm);
        gf256::scale(row.payload, norm);
        for (std::size_t c = 0; c < size_; ++c) {
            if (has_pivot_[c] && rows_[c].coeffs[lead] != 0) subtract(rows_[c], row, rows_[c].coeffs[lead]);
        }
        payload_len_ = row.payload.size();
        rows_[lead] = std::move(row);
        has_pivot_[lead] = true;
        ++rank_;
        return AbsorbResult::innovative;
    }

    /// Source payloads in order. Requires full rank.
    [[nodiscard]] std::vector<Bytes> decode() const {
        if (!decodable())
            throw CodecError("cannot decode batch " + std::to_string(batch_) + ": rank " + std::to_string(rank_) +
                             " < " + std::to_string(size_));
        std::vector<Bytes> out;
        out.reserve(size_);
        for (const auto& r : rows_) out.push_back(r.payload);
        return out;
    }

private:
    struct Row {
        Bytes coeffs;
        Bytes payload;
    };

    static void subtract(Row& dst, const Row& src, std::uint8_t factor) {
        gf256::axpy(dst.coeffs, src.coeffs, factor);
        gf256::axpy(dst.payload, src.payload, factor);
    }

    BatchIndex batch_;
    std::size_t size_;
    std::size_t rank_ = 0;
    std::size_t payload_len_ = 0;
    std::vector<Row> rows_;
    std::vector<bool> has_pivot_;
};

/// Probability that `k` uniformly random vectors over GF(q) span GF(q)^k.
[[nodiscard]] inline double full_rank_probability(std::size_t k, double q = 256.0) {
    double prob = 1.0;
    double qi = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        qi /= q;
        prob *= 1.0 - qi;
    }
    return prob;
}

}  // namespace rlncsched::codec

#endif  // RLNCSCHED_CODEC_HPP
