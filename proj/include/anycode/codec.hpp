#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anycode/channel.hpp"
#include "anycode/rng.hpp"

namespace anycode {

/// Rateless random codebook for one message block: symbol (i, j, t) is an
/// iid uniform value of `symbol_bits` bits, regenerated identically on both
/// sides from the shared common-randomness key.
class Codebook {
public:
    Codebook(uint64_t common_key, uint32_t block_index, uint32_t message_count,
             int symbol_bits)
        : key_(common_key),
          block_(block_index),
          message_count_(message_count),
          symbol_bits_(symbol_bits) {
        if (symbol_bits < 1 || symbol_bits > 31)
            throw std::invalid_argument("Codebook: symbol_bits out of range");
        if (message_count < 1)
            throw std::invalid_argument("Codebook: message_count must be >= 1");
    }

    uint32_t block_index() const { return block_; }
    uint32_t message_count() const { return message_count_; }
    int symbol_bits() const { return symbol_bits_; }

    uint32_t symbol(uint32_t j, uint64_t t) const {
        return static_cast<uint32_t>(keyed_value(key_, block_, j, t) >>
                                     (64 - symbol_bits_));
    }

    Packet encode_symbol(uint32_t j, uint64_t t) const {
        if (j >= message_count_)
            throw std::out_of_range("encode_symbol: message index out of range");
        return Packet::of(symbol(j, t), symbol_bits_);
    }

private:
    uint64_t key_;
    uint32_t block_;
    uint32_t message_count_;
    int symbol_bits_;
};

/// Surviving message indices for the block under decode. Shrinks
/// monotonically; the transmitted message is always a member.
class CandidateSet {
public:
    static CandidateSet full(uint32_t message_count) {
        CandidateSet cs;
        cs.members_.resize(message_count);
        for (uint32_t j = 0; j < message_count; ++j) cs.members_[j] = j;
        return cs;
    }

    size_t size() const { return members_.size(); }
    const std::vector<uint32_t>& members() const { return members_; }
    uint32_t sole_member() const {
        if (members_.size() != 1)
            throw std::logic_error("CandidateSet: not a singleton");
        return members_[0];
    }

    /// Drops every candidate whose codeword symbol at time t disagrees with
    /// the received payload. Erasures carry no information and leave the set
    /// unchanged.
    void eliminate(const Codebook& cb, uint64_t t, const Packet& y) {
        if (y.is_erased()) return;
        const uint32_t payload = static_cast<uint32_t>(y.payload);
        size_t kept = 0;
        for (size_t idx = 0; idx < members_.size(); ++idx) {
            if (cb.symbol(members_[idx], t) == payload)
                members_[kept++] = members_[idx];
        }
        members_.resize(kept);
        if (members_.empty())
            throw std::logic_error(
                "CandidateSet: eliminated every candidate (protocol corruption)");
    }

private:
    std::vector<uint32_t> members_;
};

enum class DecodeStatus { Undecided, ListReady, Unique };

/// Unique iff a single survivor remains; ListReady once at most `ell`
/// remain; Undecided otherwise. An empty set means the protocol already
/// corrupted itself and is rejected upstream.
inline DecodeStatus decode_status(const CandidateSet& cs, int ell) {
    if (ell < 1) throw std::invalid_argument("decode_status: ell must be >= 1");
    if (cs.size() == 0)
        throw std::logic_error("decode_status: empty candidate set");
    if (cs.size() == 1) return DecodeStatus::Unique;
    if (cs.size() <= static_cast<size_t>(ell)) return DecodeStatus::ListReady;
    return DecodeStatus::Undecided;
}

/// New-block detector: once block i is pinned to a sole codeword j_hat, a
/// received symbol that is neither erased nor equal to that codeword's
/// symbol proves the encoder has moved on.
inline bool detect_new_block(const Codebook& cb, uint32_t j_hat, uint64_t t,
                             const Packet& y) {
    if (y.is_erased()) return false;
    return static_cast<uint32_t>(y.payload) != cb.symbol(j_hat, t);
}

}  // namespace anycode
