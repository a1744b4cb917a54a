#include "anycode/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace anycode {

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::NoList: return "nolist";
        case Scheme::List: return "list";
        case Scheme::Arq: return "arq";
    }
    return "?";
}

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::BlockArrived: return "arrive";
        case EventKind::EncoderStarted: return "enc_start";
        case EventKind::Detected: return "detect";
        case EventKind::Committed: return "commit";
        case EventKind::EncoderAdvanced: return "enc_advance";
        case EventKind::RoundAdvanced: return "round";
        case EventKind::PacketAccepted: return "accept";
    }
    return "?";
}

ServiceTimeSample measure_service_components(const BlockStats& b) {
    if (!b.complete)
        throw std::invalid_argument("measure_service_components: block incomplete");
    ServiceTimeSample s{};
    s.block = b.block;
    if (b.block == 1 || !b.detected) {
        s.t1 = 0;
        s.t2 = b.commit_use - b.start_use;
    } else {
        s.t1 = b.detect_use - b.start_use;
        s.t2 = b.commit_use - b.detect_use;
    }
    s.t3 = b.advance_use - b.commit_use;
    return s;
}

std::vector<ServiceTimeSample> measure_service_components(
    const std::vector<BlockStats>& blocks) {
    std::vector<ServiceTimeSample> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks)
        if (b.complete) out.push_back(measure_service_components(b));
    return out;
}

// --------------------------------------------------------------------------

SessionBase::SessionBase(const SystemConfig& cfg, double rate, bool record_events)
    : cfg_(cfg),
      rate_(rate),
      src_(cfg.seed),
      fwd_noise_(src_.stream("forward-noise")),
      fb_noise_(src_.stream("feedback-noise")),
      fwd_ch_{cfg.forward()},
      fb_ch_{cfg.feedback()},
      msg_(src_),
      record_events_(record_events) {
    cfg_.ensure_valid();
    if (!(rate > 0.0)) throw std::invalid_argument("session: rate must be > 0");
}

void SessionBase::run_cycles(uint64_t count) {
    for (uint64_t i = 0; i < count; ++i) run_cycle();
}

void SessionBase::record(int phase, EventKind kind, uint32_t id, int64_t aux) {
    if (record_events_) events_.push_back({cycle_, phase, kind, id, aux});
}

void SessionBase::violate(const std::string& msg) const {
    throw ProtocolViolation(cycle_, msg);
}

std::string format_trace(const std::vector<ProtocolEvent>& events) {
    std::string out;
    char buf[128];
    for (const auto& e : events) {
        std::snprintf(buf, sizeof buf, "%llu %d %s %u %lld\n",
                      static_cast<unsigned long long>(e.cycle), e.phase,
                      event_kind_name(e.kind), e.id,
                      static_cast<long long>(e.aux));
        out += buf;
    }
    return out;
}

// --------------------------------------------------------------------------
// No-list scheme

NoListSession::NoListSession(const SystemConfig& cfg, double rate,
                             bool record_events)
    : SessionBase(cfg, rate, record_events), cs_(CandidateSet::full(1)) {
    block_bits_ = cfg_.block_bits(rate);
    if (block_bits_ < 1)
        throw std::invalid_argument("nolist: block bit count rounds to zero; "
                                    "increase n*c or the rate");
    if (block_bits_ > 20)
        throw std::invalid_argument("nolist: block bit count exceeds the 2^20 "
                                    "candidate cap; decrease n*c or the rate");
    message_count_ = 1u << block_bits_;
    codebook_key_ = src_.derive_key("codebook");
    // Both sides agree block 0 is decoded with value 0; its codeword is what
    // the encoder extends until block 1 arrives.
    emit_cb_ = make_codebook(0);
    prev_cb_ = make_codebook(0);
    prev_value_ = 0;
}

Codebook NoListSession::make_codebook(uint32_t block) const {
    return Codebook(codebook_key_, block, block == 0 ? 1 : message_count_,
                    cfg_.c_f);
}

BlockStats& NoListSession::stats_for(uint32_t block) {
    while (stats_.size() < block) {
        BlockStats b{};
        b.block = static_cast<uint32_t>(stats_.size()) + 1;
        b.arrival_cycle = static_cast<uint64_t>(b.block) * cfg_.n * cfg_.c;
        stats_.push_back(b);
    }
    return stats_[block - 1];
}

void NoListSession::run_cycle() {
    const uint64_t nc = static_cast<uint64_t>(cfg_.n) * cfg_.c;
    latched_ack_bit_ = static_cast<int>((dec_block_ - 1) & 1u);

    // Deterministic arrivals: block b is assembled at cycle b*n*c.
    if (cycle_ > 0 && cycle_ % nc == 0) {
        ++arrived_blocks_;
        record(-1, EventKind::BlockArrived,
               static_cast<uint32_t>(arrived_blocks_));
    }
    queue_depth_ =
        arrived_blocks_ >= enc_block_ ? arrived_blocks_ - enc_block_ + 1 : 0;

    // Switch the transmitted codeword once the serving block has arrived.
    if (emit_block_ != enc_block_ && arrived_blocks_ >= enc_block_) {
        emit_block_ = enc_block_;
        emit_value_ = msg_.block_value(emit_block_, block_bits_);
        emit_cb_ = make_codebook(emit_block_);
        BlockStats& st = stats_for(emit_block_);
        st.started = true;
        st.start_use = cycle_ * cfg_.k_f;
        record(0, EventKind::EncoderStarted, emit_block_);
    }

    // Forward phase.
    for (int u = 0; u < cfg_.k_f; ++u) {
        const uint64_t t_use = cycle_ * cfg_.k_f + u;
        const Packet x = emit_cb_->encode_symbol(emit_value_, t_use);
        const Packet y = fwd_ch_.transmit(x, fwd_noise_);
        process_forward(t_use, y, u);
    }

    // Feedback phase: the mod-2 number of the last decoded block.
    const int ack_bit = cfg_.feedback_lag
                            ? latched_ack_bit_
                            : static_cast<int>((dec_block_ - 1) & 1u);
    bool advanced = false;
    for (int u = 0; u < cfg_.k_b; ++u) {
        const Packet x = Packet::of(static_cast<uint32_t>(ack_bit), cfg_.c_b);
        const Packet y = fb_ch_.transmit(x, fb_noise_);
        if (y.is_erased() || advanced) continue;
        const int bit = y.payload & 1;
        if (bit == static_cast<int>(enc_block_ & 1u) &&
            emit_block_ == enc_block_) {
            // Current block acknowledged; effective from the next cycle.
            BlockStats& st = stats_for(enc_block_);
            st.complete = true;
            st.advance_use = (cycle_ + 1) * cfg_.k_f;
            record(cfg_.k_f + u, EventKind::EncoderAdvanced, enc_block_);
            ++enc_block_;
            advanced = true;
        }
    }

    if (!(dec_block_ == enc_block_ || dec_block_ == enc_block_ + 1))
        violate("pointer gap: decoder " + std::to_string(dec_block_) +
                " encoder " + std::to_string(enc_block_));
    ++cycle_;
}

void NoListSession::process_forward(uint64_t t_use, const Packet& y, int phase) {
    if (!eliminating_) {
        // Watching for a symbol incompatible with the previous block's sole
        // codeword; only such a symbol proves the next block has begun.
        if (!detect_new_block(*prev_cb_, prev_value_, t_use, y)) return;
        BlockStats& st = stats_for(dec_block_);
        st.detected = true;
        st.detect_use = t_use;
        record(phase, EventKind::Detected, dec_block_);
        cur_cb_ = make_codebook(dec_block_);
        cs_ = CandidateSet::full(message_count_);
        eliminating_ = true;
        // The detecting symbol is a valid draw from the new codebook.
        cs_.eliminate(*cur_cb_, t_use, y);
        if (cs_.size() == 1) commit_current(t_use, phase);
        return;
    }
    cs_.eliminate(*cur_cb_, t_use, y);
    if (cs_.size() == 1) commit_current(t_use, phase);
}

void NoListSession::commit_current(uint64_t t_use, int phase) {
    const uint32_t decoded = cs_.sole_member();
    const uint32_t truth = msg_.block_value(dec_block_, block_bits_);
    if (decoded != truth)
        violate("committed value mismatch at block " + std::to_string(dec_block_));
    BlockStats& st = stats_for(dec_block_);
    st.committed = true;
    st.commit_use = t_use;
    record(phase, EventKind::Committed, dec_block_, static_cast<int64_t>(decoded));
    ++committed_;
    prev_cb_ = cur_cb_;
    prev_value_ = decoded;
    ++dec_block_;
    eliminating_ = false;
}

// --------------------------------------------------------------------------
// List scheme

RoundPlan RoundPlan::make(int block_bits, int ell) {
    if (block_bits < 1) throw std::invalid_argument("RoundPlan: block_bits < 1");
    if (ell < 2) throw std::invalid_argument("RoundPlan: ell must be >= 2");
    RoundPlan p{};
    p.block_bits = block_bits;
    p.ell = ell;
    p.pairs = ell * (ell - 1) / 2;
    p.pos_bits =
        block_bits > 1 ? static_cast<int>(std::ceil(std::log2(block_bits))) : 0;
    p.rounds = 1 + p.pairs * (1 + p.pos_bits);
    return p;
}

RoundPlan::Kind RoundPlan::kind(int q) const {
    if (q == 1) return Kind::ListDecode;
    if (q <= 1 + pairs * pos_bits) return Kind::PositionBit;
    return Kind::Value;
}

int RoundPlan::pair_slot(int q) const {
    if (kind(q) == Kind::PositionBit) return (q - 2) / pos_bits;
    return q - 2 - pairs * pos_bits;
}

int RoundPlan::bit_index(int q) const { return (q - 2) % pos_bits; }

std::vector<int> ListSession::distinguishing_positions(
    const std::vector<uint32_t>& list, int pairs) {
    std::vector<int> pos;
    for (size_t a = 0; a < list.size(); ++a) {
        for (size_t b = a + 1; b < list.size(); ++b) {
            const uint32_t diff = list[a] ^ list[b];
            // Lowest-index differing bit of the lexicographic pair.
            pos.push_back(diff == 0 ? 0 : __builtin_ctz(diff));
        }
    }
    pos.resize(pairs, 0);  // pad when the list came in short
    return pos;
}

ListSession::ListSession(const SystemConfig& cfg, double rate, bool record_events)
    : SessionBase(cfg, rate, record_events),
      plan_(RoundPlan::make(cfg.block_bits(rate), cfg.ell)),
      cs_(CandidateSet::full(1)) {
    if (cfg_.c_f < 2 || cfg_.c_b < 2)
        throw std::invalid_argument("list scheme requires C_f >= 2 and C_b >= 2");
    if (plan_.block_bits > 20)
        throw std::invalid_argument("list: block bit count exceeds the 2^20 "
                                    "candidate cap; decrease n*c or the rate");
    message_count_ = 1u << plan_.block_bits;
    codebook_key_ = src_.derive_key("codebook");
    enc_positions_.assign(plan_.pairs, 0);
    cs_ = CandidateSet::full(message_count_);
    dec_cb_.emplace(codebook_key_, 1, message_count_, cfg_.c_f - 1);
}

BlockStats& ListSession::stats_for(uint32_t block) {
    while (stats_.size() < block) {
        BlockStats b{};
        b.block = static_cast<uint32_t>(stats_.size()) + 1;
        b.arrival_cycle = static_cast<uint64_t>(b.block) * cfg_.n * cfg_.c;
        stats_.push_back(b);
    }
    return stats_[block - 1];
}

void ListSession::check_counters() const {
    const int64_t diff =
        static_cast<int64_t>(enc_round_) - static_cast<int64_t>(dec_round_);
    if (diff > 1 || diff < -1)
        const_cast<ListSession*>(this)->violate(
            "round counter desync: encoder " + std::to_string(enc_round_) +
            " decoder " + std::to_string(dec_round_));
}

void ListSession::run_cycle() {
    const uint64_t nc = static_cast<uint64_t>(cfg_.n) * cfg_.c;
    {
        const int q = within_round(dec_round_);
        latched_tag_ = static_cast<int>(dec_round_ & 1u);
        if (plan_.kind(q) == RoundPlan::Kind::PositionBit) {
            latched_payload_ = (dec_positions_[plan_.pair_slot(q)] >>
                                (plan_.pos_bits - 1 - plan_.bit_index(q))) &
                               1;
        } else {
            latched_payload_ = dec_done_ ? 1 : 0;
        }
    }

    if (cycle_ > 0 && cycle_ % nc == 0) {
        ++arrived_blocks_;
        record(-1, EventKind::BlockArrived,
               static_cast<uint32_t>(arrived_blocks_));
    }

    // Go live on the serving block's round 1 once its data has arrived.
    if (!enc_live_ && within_round(enc_round_) == 1 &&
        arrived_blocks_ >= block_of_round(enc_round_)) {
        const uint32_t blk = block_of_round(enc_round_);
        enc_value_ = msg_.block_value(blk, plan_.block_bits);
        enc_cb_.emplace(codebook_key_, blk, message_count_, cfg_.c_f - 1);
        enc_live_ = true;
        BlockStats& st = stats_for(blk);
        st.started = true;
        st.start_use = cycle_ * cfg_.k_f;
        record(0, EventKind::EncoderStarted, blk);
    }

    // Forward phase. Header bit is the encoder's round counter mod 2; it
    // stays on the previous parity while round 1 has no data to send, which
    // the decoder ignores.
    for (int u = 0; u < cfg_.k_f; ++u) {
        const uint64_t t_use = cycle_ * cfg_.k_f + u;
        const int q = within_round(enc_round_);
        int tag;
        uint32_t payload = 0;
        if (plan_.kind(q) == RoundPlan::Kind::ListDecode) {
            if (enc_live_) {
                tag = static_cast<int>(enc_round_ & 1u);
                payload = enc_cb_->symbol(enc_value_, t_use);
            } else {
                tag = static_cast<int>((enc_round_ - 1) & 1u);
            }
        } else if (plan_.kind(q) == RoundPlan::Kind::PositionBit) {
            tag = static_cast<int>(enc_round_ & 1u);
            payload = enc_done_ ? 1u : 0u;
        } else {
            tag = static_cast<int>(enc_round_ & 1u);
            const int slot = plan_.pair_slot(q);
            const uint32_t pos = enc_positions_[slot];
            if (pos >= static_cast<uint32_t>(plan_.block_bits))
                violate("reconstructed bit position out of range");
            payload = (enc_value_ >> pos) & 1u;
        }
        const uint32_t word =
            (static_cast<uint32_t>(tag) << (cfg_.c_f - 1)) | payload;
        const Packet y = fwd_ch_.transmit(Packet::of(word, cfg_.c_f), fwd_noise_);
        if (!y.is_erased()) process_forward(t_use, y, u);
    }

    // Feedback phase.
    int tag, pbit;
    if (cfg_.feedback_lag) {
        tag = latched_tag_;
        pbit = latched_payload_;
    } else {
        const int q = within_round(dec_round_);
        tag = static_cast<int>(dec_round_ & 1u);
        if (plan_.kind(q) == RoundPlan::Kind::PositionBit) {
            pbit = (dec_positions_[plan_.pair_slot(q)] >>
                    (plan_.pos_bits - 1 - plan_.bit_index(q))) &
                   1;
        } else {
            pbit = dec_done_ ? 1 : 0;
        }
    }
    for (int u = 0; u < cfg_.k_b; ++u) {
        const uint32_t word = (static_cast<uint32_t>(tag) << (cfg_.c_b - 1)) |
                              static_cast<uint32_t>(pbit);
        const Packet y = fb_ch_.transmit(Packet::of(word, cfg_.c_b), fb_noise_);
        if (!y.is_erased()) process_feedback(y, cfg_.k_f + u);
    }

    check_counters();
    ++cycle_;
}

void ListSession::decoder_freeze_list(uint64_t t_use, int phase) {
    dec_list_ = cs_.members();
    dec_positions_ = distinguishing_positions(dec_list_, plan_.pairs);
    dec_filtered_ = dec_list_;
    dec_done_ = true;
    if (dec_filtered_.size() == 1)
        decoder_commit(t_use, phase, dec_filtered_[0]);
}

void ListSession::decoder_commit(uint64_t t_use, int phase, uint32_t value) {
    const uint32_t blk = block_of_round(dec_round_);
    const uint32_t truth = msg_.block_value(blk, plan_.block_bits);
    if (value != truth)
        violate("list commit mismatch at block " + std::to_string(blk));
    dec_committed_current_ = true;
    BlockStats& st = stats_for(blk);
    st.committed = true;
    st.commit_use = t_use;
    record(phase, EventKind::Committed, blk, static_cast<int64_t>(value));
    ++committed_;
}

void ListSession::decoder_advance(int phase) {
    const int q = within_round(dec_round_);
    record(phase, EventKind::RoundAdvanced, block_of_round(dec_round_), q);
    if (q == plan_.rounds) {
        if (!dec_committed_current_)
            violate("block finished without a unique list survivor");
        const uint32_t next = block_of_round(dec_round_) + 1;
        cs_ = CandidateSet::full(message_count_);
        dec_cb_.emplace(codebook_key_, next, message_count_, cfg_.c_f - 1);
        dec_list_.clear();
        dec_positions_.clear();
        dec_filtered_.clear();
        dec_committed_current_ = false;
    }
    ++dec_round_;
    dec_done_ = false;
}

// Forward packets drive the decoder: round-1 and value-round content when
// the header matches its round, and the encoder's parity flip as the
// advance signal once the decoder has reported a round done.
void ListSession::process_forward(uint64_t t_use, const Packet& y, int phase) {
    for (int hop = 0; hop < 4; ++hop) {
        const int q = within_round(dec_round_);
        const auto kind = plan_.kind(q);
        const int hdr = (y.payload >> (cfg_.c_f - 1)) & 1;
        const uint32_t payload =
            static_cast<uint32_t>(y.payload) & ((1u << (cfg_.c_f - 1)) - 1);
        const int my_tag = static_cast<int>(dec_round_ & 1u);

        if (kind == RoundPlan::Kind::PositionBit) {
            // Decoder leads: advance when the follower reports done on the
            // matching parity.
            if (hdr != my_tag) return;  // stale
            if ((payload & 1u) == 0) return;
            decoder_advance(phase);
            continue;  // leader of the next position round, or value follower
        }
        // List-decode and value rounds: decoder follows.
        if (hdr != my_tag) {
            if (hdr == static_cast<int>((dec_round_ + 1) & 1u) && dec_done_) {
                // hdr equals both (r+1) and (r-1) mod 2; with the round done
                // it can only be the encoder moving on.
                decoder_advance(phase);
                continue;  // the flip packet may already carry content
            }
            return;  // stale packet from the previous round
        }
        if (dec_done_) return;  // repeated content after completion
        if (kind == RoundPlan::Kind::ListDecode) {
            cs_.eliminate(*dec_cb_, t_use, Packet::of(payload, cfg_.c_f - 1));
            if (decode_status(cs_, plan_.ell) != DecodeStatus::Undecided)
                decoder_freeze_list(t_use, phase);
            return;
        }
        // Value round content.
        const int slot = plan_.pair_slot(q);
        const int pos = dec_positions_[slot];
        const int v = static_cast<int>(payload & 1u);
        size_t kept = 0;
        for (uint32_t cand : dec_filtered_)
            if (static_cast<int>((cand >> pos) & 1u) == v)
                dec_filtered_[kept++] = cand;
        dec_filtered_.resize(kept);
        if (dec_filtered_.empty())
            violate("value filtering removed every list member");
        dec_done_ = true;
        if (dec_filtered_.size() == 1 && !dec_committed_current_)
            decoder_commit(t_use, phase, dec_filtered_[0]);
        return;
    }
    violate("decoder packet cascade did not terminate");
}

void ListSession::encoder_advance(int phase) {
    const int q = within_round(enc_round_);
    const uint32_t blk = block_of_round(enc_round_);
    record(phase, EventKind::RoundAdvanced, blk, -q);
    if (q == plan_.rounds) {
        // Service of this block is complete.
        BlockStats& st = stats_for(blk);
        st.complete = true;
        st.advance_use = (cycle_ + 1) * cfg_.k_f;
        record(phase, EventKind::EncoderAdvanced, blk);
        enc_live_ = false;
        enc_positions_.assign(plan_.pairs, 0);
    }
    ++enc_round_;
    enc_done_ = false;
}

// Feedback packets drive the encoder: done reports while it leads, position
// bits while it follows, and the decoder's parity flip as its own advance
// signal in position rounds.
void ListSession::process_feedback(const Packet& y, int phase) {
    for (int hop = 0; hop < 4; ++hop) {
        const int q = within_round(enc_round_);
        const auto kind = plan_.kind(q);
        const int hdr = (y.payload >> (cfg_.c_b - 1)) & 1;
        const int pbit = y.payload & 1;
        const int my_tag = static_cast<int>(enc_round_ & 1u);

        if (kind != RoundPlan::Kind::PositionBit) {
            // Encoder leads list-decode and value rounds.
            if (hdr != my_tag) return;  // stale
            if (pbit == 0) return;
            if (kind == RoundPlan::Kind::ListDecode && !enc_live_)
                violate("done report for a round that never went live");
            encoder_advance(phase);
            return;  // the reporter cannot be past this round yet
        }
        // Position round: encoder follows.
        if (hdr != my_tag) {
            if (hdr == static_cast<int>((enc_round_ + 1) & 1u) && enc_done_) {
                encoder_advance(phase);
                continue;  // flip packet may carry the next position bit
            }
            return;  // stale
        }
        if (enc_done_) return;  // repeated bit
        const int slot = plan_.pair_slot(q);
        const int bit = plan_.bit_index(q);
        enc_positions_[slot] |= static_cast<uint32_t>(pbit)
                                << (plan_.pos_bits - 1 - bit);
        enc_done_ = true;
        return;
    }
    violate("encoder packet cascade did not terminate");
}

// --------------------------------------------------------------------------
// ARQ baseline

ArqSession::ArqSession(const SystemConfig& cfg, double rate, bool record_events)
    : SessionBase(cfg, rate, record_events) {
    if (cfg_.c_f < 2)
        throw std::invalid_argument(
            "arq: C_f >= 2 required (1 sequence bit + payload)");
}

uint64_t ArqSession::bits_arrived(uint64_t t) const {
    return static_cast<uint64_t>(
        std::floor(rate_ * cfg_.k_f * cfg_.c_f * static_cast<double>(t) + 1e-9));
}

uint64_t ArqSession::packet_available_cycle(uint64_t p) const {
    const uint64_t need = (p + 1) * static_cast<uint64_t>(payload_bits());
    const double per_cycle = rate_ * cfg_.k_f * cfg_.c_f;
    uint64_t t = static_cast<uint64_t>(
        std::ceil(static_cast<double>(need) / per_cycle - 1e-9));
    while (bits_arrived(t) < need) ++t;
    while (t > 0 && bits_arrived(t - 1) >= need) --t;
    return t;
}

uint32_t ArqSession::packet_payload(uint64_t p) const {
    uint32_t v = 0;
    const uint64_t base = p * static_cast<uint64_t>(payload_bits());
    for (int q = 0; q < payload_bits(); ++q)
        v |= static_cast<uint32_t>(msg_.bit(base + q + 1))
             << (payload_bits() - 1 - q);
    return v;
}

void ArqSession::run_cycle() {
    latched_ack_ = received_this_cycle_ ? 1 : 0;

    if (!pending_ &&
        bits_arrived(cycle_) >=
            (next_packet_ + 1) * static_cast<uint64_t>(payload_bits())) {
        pending_ = true;
        pending_payload_ = packet_payload(next_packet_);
        pending_seq_ = 1 - last_sent_seq_;
    }
    const int seq = pending_ ? pending_seq_ : last_sent_seq_;
    const uint32_t payload = pending_ ? pending_payload_ : last_sent_payload_;

    received_this_cycle_ = false;
    for (int u = 0; u < cfg_.k_f; ++u) {
        const uint64_t t_use = cycle_ * cfg_.k_f + u;
        const uint32_t word =
            (static_cast<uint32_t>(seq) << payload_bits()) | payload;
        const Packet y = fwd_ch_.transmit(Packet::of(word, cfg_.c_f), fwd_noise_);
        if (y.is_erased()) continue;
        received_this_cycle_ = true;
        const int rseq = (y.payload >> payload_bits()) & 1;
        if (rseq == rx_last_seq_) continue;  // duplicate, filtered by sequence bit
        const uint32_t rpayload =
            static_cast<uint32_t>(y.payload) & ((1u << payload_bits()) - 1);
        const uint64_t idx = commits_.size();
        if (rpayload != packet_payload(idx))
            violate("arq accepted payload mismatch at packet " +
                    std::to_string(idx));
        commits_.push_back(t_use);
        record(u, EventKind::PacketAccepted, static_cast<uint32_t>(idx));
        rx_last_seq_ = rseq;
    }

    // Feedback carries a 1-bit reception indicator for this cycle's forward
    // packet. An erasure in either direction forces a retransmission, so the
    // per-cycle advance probability is (1-beta_f)(1-beta_b).
    const int ack =
        cfg_.feedback_lag ? latched_ack_ : (received_this_cycle_ ? 1 : 0);
    for (int u = 0; u < cfg_.k_b; ++u) {
        const Packet y = fb_ch_.transmit(
            Packet::of(static_cast<uint32_t>(ack), cfg_.c_b), fb_noise_);
        if (y.is_erased()) continue;
        const int bit = y.payload & 1;
        if (pending_ && bit == 1) {
            pending_ = false;
            last_sent_seq_ = pending_seq_;
            last_sent_payload_ = pending_payload_;
            advances_.push_back(cycle_);
            ++next_packet_;
        }
    }
    ++cycle_;
}

std::unique_ptr<SessionBase> make_session(Scheme scheme, const SystemConfig& cfg,
                                          double rate, bool record_events) {
    switch (scheme) {
        case Scheme::NoList:
            return std::make_unique<NoListSession>(cfg, rate, record_events);
        case Scheme::List:
            return std::make_unique<ListSession>(cfg, rate, record_events);
        case Scheme::Arq:
            return std::make_unique<ArqSession>(cfg, rate, record_events);
    }
    throw std::logic_error("make_session: unreachable");
}

}  // namespace anycode
