#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anycode/channel.hpp"
#include "anycode/codec.hpp"
#include "anycode/rng.hpp"

namespace anycode {

enum class Scheme { NoList, List, Arq };

const char* scheme_name(Scheme s);

/// Thrown when a protocol invariant that must never fire does: a committed
/// value disagreeing with the truth, a pointer gap out of range, or a round
/// counter desync.
struct ProtocolViolation : std::runtime_error {
    uint64_t cycle;
    explicit ProtocolViolation(uint64_t cycle_, const std::string& msg)
        : std::runtime_error("cycle " + std::to_string(cycle_) + ": " + msg),
          cycle(cycle_) {}
};

enum class EventKind {
    BlockArrived,
    EncoderStarted,
    Detected,
    Committed,
    EncoderAdvanced,
    RoundAdvanced,
    PacketAccepted,
};

const char* event_kind_name(EventKind k);

/// One protocol event. `phase` is the use index within the cycle (forward
/// uses first, then feedback uses), -1 for cycle-boundary events.
struct ProtocolEvent {
    uint64_t cycle;
    int phase;
    EventKind kind;
    uint32_t id;
    int64_t aux;
};

/// Per-block service bookkeeping, in global forward-use coordinates except
/// arrival_cycle.
struct BlockStats {
    uint32_t block = 0;
    uint64_t arrival_cycle = 0;
    uint64_t start_use = 0;
    uint64_t detect_use = 0;
    uint64_t commit_use = 0;
    uint64_t advance_use = 0;
    bool started = false;
    bool detected = false;
    bool committed = false;
    bool complete = false;  // encoder advanced past the block
};

/// Service-time decomposition of one fully served block, in forward channel
/// uses. T1 ends at the decoder's new-block detection, T2 at unique
/// decoding, T3 at the encoder's advance. Block 1 reports T1 = 0 and folds
/// its bootstrap wait into T2, so tail fits exclude it.
struct ServiceTimeSample {
    uint32_t block;
    uint64_t t1, t2, t3;
    uint64_t total() const { return t1 + t2 + t3; }
};

ServiceTimeSample measure_service_components(const BlockStats& b);
std::vector<ServiceTimeSample> measure_service_components(
    const std::vector<BlockStats>& blocks);

/// Deterministic message source: iid fair-coin bits B_1, B_2, ... shared by
/// encoder and checker. Block b of size B bits covers global bits
/// (b-1)B+1 .. bB, packed LSB-first into the block value.
class MessageSource {
public:
    explicit MessageSource(const SeededRandomSource& src)
        : key_(src.derive_key("message")) {}

    int bit(uint64_t index) const {
        return static_cast<int>(keyed_value(key_, index, 0, 0) >> 63);
    }

    uint32_t block_value(uint32_t block, int block_bits) const {
        uint32_t v = 0;
        const uint64_t base = static_cast<uint64_t>(block - 1) * block_bits;
        for (int p = 0; p < block_bits; ++p)
            v |= static_cast<uint32_t>(bit(base + p + 1)) << p;
        return v;
    }

private:
    uint64_t key_;
};

// --------------------------------------------------------------------------

/// Common plumbing of one simulated session: channels, streams, clock,
/// deterministic block arrivals (one block per n*c cycles), events.
class SessionBase {
public:
    SessionBase(const SystemConfig& cfg, double rate, bool record_events);
    virtual ~SessionBase() = default;

    virtual void run_cycle() = 0;
    void run_cycles(uint64_t count);

    uint64_t cycle() const { return cycle_; }
    const SystemConfig& config() const { return cfg_; }
    double rate() const { return rate_; }
    const std::vector<ProtocolEvent>& events() const { return events_; }
    const MessageSource& message() const { return msg_; }

protected:
    void record(int phase, EventKind kind, uint32_t id, int64_t aux = 0);
    [[noreturn]] void violate(const std::string& msg) const;

    SystemConfig cfg_;
    double rate_;
    SeededRandomSource src_;
    RandomStream fwd_noise_;
    RandomStream fb_noise_;
    ErasureChannel fwd_ch_;
    ErasureChannel fb_ch_;
    MessageSource msg_;
    uint64_t cycle_ = 0;
    bool record_events_;
    std::vector<ProtocolEvent> events_;
};

/// The no-list scheme: rateless random codewords, elimination decoding,
/// implicit sequencing through codeword incompatibility, and a 1-bit mod-2
/// acknowledgement on the feedback link.
class NoListSession : public SessionBase {
public:
    NoListSession(const SystemConfig& cfg, double rate, bool record_events = false);

    void run_cycle() override;

    int block_bits() const { return block_bits_; }
    const std::vector<BlockStats>& blocks() const { return stats_; }
    uint64_t committed_blocks() const { return committed_; }
    uint32_t encoder_block() const { return enc_block_; }
    uint32_t decoder_block() const { return dec_block_; }
    uint64_t queue_depth() const { return queue_depth_; }

private:
    void process_forward(uint64_t t_use, const Packet& y, int phase);
    void commit_current(uint64_t t_use, int phase);
    BlockStats& stats_for(uint32_t block);
    Codebook make_codebook(uint32_t block) const;

    int block_bits_;
    uint32_t message_count_;
    uint64_t codebook_key_;

    // Encoder side.
    uint32_t enc_block_ = 1;   // block awaiting service completion
    uint32_t emit_block_ = 0;  // block whose codeword is on the air
    uint32_t emit_value_ = 0;
    std::optional<Codebook> emit_cb_;
    uint64_t arrived_blocks_ = 0;
    uint64_t queue_depth_ = 0;

    // Decoder side.
    uint32_t dec_block_ = 1;  // block under decode
    bool eliminating_ = false;
    std::optional<Codebook> prev_cb_;  // sole codeword of block dec_block_-1
    uint32_t prev_value_ = 0;
    std::optional<Codebook> cur_cb_;
    CandidateSet cs_;
    uint64_t committed_ = 0;
    int latched_ack_bit_ = 0;

    std::vector<BlockStats> stats_;
};

/// Static round plan of the list scheme: 1 list-decode round, then
/// P*ceil(log2 B) feedback-led bit-position rounds, then P forward-led
/// bit-value rounds, with P = ell(ell-1)/2.
struct RoundPlan {
    int block_bits;
    int ell;
    int pairs;     // ell(ell-1)/2
    int pos_bits;  // ceil(log2 block_bits)
    int rounds;    // m = 1 + pairs*(1 + pos_bits)

    static RoundPlan make(int block_bits, int ell);

    enum class Kind { ListDecode, PositionBit, Value };
    // q is the 1-based round index within a block.
    Kind kind(int q) const;
    int pair_slot(int q) const;
    int bit_index(int q) const;  // MSB-first within the position index
};

/// The list scheme: round-1 list decoding over C_f-1 payload bits, then
/// interactive repetition rounds that name and resolve the distinguishing
/// bit positions. One bit of every packet in both directions carries the
/// round number modulo 2.
///
/// Rounds are two-phase: the round's follower reports completion in its own
/// payload bit (its payload is otherwise idle), the leader advances first on
/// seeing that report, and the follower advances when the leader's header
/// parity flips. With mod-2 headers this is the only ordering in which every
/// received packet has an unambiguous reading.
class ListSession : public SessionBase {
public:
    ListSession(const SystemConfig& cfg, double rate, bool record_events = false);

    void run_cycle() override;

    int block_bits() const { return plan_.block_bits; }
    const RoundPlan& plan() const { return plan_; }
    const std::vector<BlockStats>& blocks() const { return stats_; }
    uint64_t committed_blocks() const { return committed_; }
    uint64_t encoder_round() const { return enc_round_; }
    uint64_t decoder_round() const { return dec_round_; }

    /// Lowest-index differing bit for each lexicographic pair of list
    /// members, padded with position 0 up to `pairs` entries.
    static std::vector<int> distinguishing_positions(
        const std::vector<uint32_t>& list, int pairs);

private:
    void process_forward(uint64_t t_use, const Packet& y, int phase);
    void process_feedback(const Packet& y, int phase);
    void decoder_freeze_list(uint64_t t_use, int phase);
    void decoder_commit(uint64_t t_use, int phase, uint32_t value);
    void decoder_advance(int phase);
    void encoder_advance(int phase);
    void check_counters() const;
    BlockStats& stats_for(uint32_t block);

    uint32_t block_of_round(uint64_t r) const {
        return static_cast<uint32_t>((r - 1) / plan_.rounds + 1);
    }
    int within_round(uint64_t r) const {
        return static_cast<int>((r - 1) % plan_.rounds + 1);
    }
    // The forward link leads list-decode and value rounds; the feedback link
    // leads position rounds.
    bool encoder_leads(int q) const {
        return plan_.kind(q) != RoundPlan::Kind::PositionBit;
    }

    RoundPlan plan_;
    uint32_t message_count_;
    uint64_t codebook_key_;

    // Encoder side.
    uint64_t enc_round_ = 1;
    bool enc_live_ = false;   // block data available, codeword on the air
    bool enc_done_ = false;   // follower sub-state in position rounds
    uint32_t enc_value_ = 0;
    std::optional<Codebook> enc_cb_;
    std::vector<uint32_t> enc_positions_;  // reconstructed from position bits
    uint64_t arrived_blocks_ = 0;

    // Decoder side.
    uint64_t dec_round_ = 1;
    bool dec_done_ = false;  // follower sub-state in list/value rounds
    CandidateSet cs_;
    std::optional<Codebook> dec_cb_;
    std::vector<uint32_t> dec_list_;
    std::vector<int> dec_positions_;
    std::vector<uint32_t> dec_filtered_;
    bool dec_committed_current_ = false;
    int latched_tag_ = 0;
    int latched_payload_ = 0;
    uint64_t committed_ = 0;

    std::vector<BlockStats> stats_;
};

/// Stop-and-wait ARQ baseline: (C_f-1)-bit payloads with a 1-bit sequence
/// number, feedback echoing the last accepted sequence bit. Every forward
/// use of a cycle repeats the pending packet; the receiver filters
/// duplicates by sequence bit.
class ArqSession : public SessionBase {
public:
    ArqSession(const SystemConfig& cfg, double rate, bool record_events = false);

    void run_cycle() override;

    int payload_bits() const { return cfg_.c_f - 1; }
    /// Commit use (global forward use) of each accepted packet, in order.
    const std::vector<uint64_t>& packet_commits() const { return commits_; }
    /// Cycle at which the encoder learned of each acceptance and moved on.
    const std::vector<uint64_t>& packet_advances() const { return advances_; }
    uint64_t accepted_packets() const { return commits_.size(); }
    uint64_t pending_packet_index() const { return next_packet_; }

    /// Cycle at which packet p (0-based) has fully arrived at the encoder.
    uint64_t packet_available_cycle(uint64_t p) const;
    uint32_t packet_payload(uint64_t p) const;

private:
    uint64_t bits_arrived(uint64_t t) const;

    uint64_t next_packet_ = 0;  // next packet index to load
    bool pending_ = false;
    uint32_t pending_payload_ = 0;
    int pending_seq_ = 0;
    int last_sent_seq_ = 0;
    uint32_t last_sent_payload_ = 0;
    int rx_last_seq_ = 0;
    bool received_this_cycle_ = false;
    int latched_ack_ = 0;
    std::vector<uint64_t> commits_;
    std::vector<uint64_t> advances_;
};

std::unique_ptr<SessionBase> make_session(Scheme scheme, const SystemConfig& cfg,
                                          double rate, bool record_events = false);

/// Serializes events as newline-delimited decimal records:
/// cycle phase kind block aux
std::string format_trace(const std::vector<ProtocolEvent>& events);

}  // namespace anycode
