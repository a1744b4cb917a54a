#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "anycode/rng.hpp"

namespace anycode {

/// Parameters of one packet-erasure channel direction: erasure probability
/// beta and packet size in bits.
struct ErasureParams {
    double beta;
    int c_bits;

    ErasureParams(double beta_, int c_bits_) : beta(beta_), c_bits(c_bits_) {
        if (!(beta >= 0.0 && beta <= 1.0))
            throw std::invalid_argument("ErasureParams: beta must be in [0,1]");
        if (c_bits < 1 || c_bits > 32)
            throw std::invalid_argument("ErasureParams: c_bits must be in [1,32]");
    }
};

/// A C-bit packet or the distinguished erasure mark.
struct Packet {
    int32_t payload;  // -1 means erased
    int width;

    static Packet erased(int width) { return Packet{-1, width}; }
    static Packet of(uint32_t value, int width) {
        if (width < 1 || width > 31)
            throw std::invalid_argument("Packet: width out of range");
        if (value >= (1u << width))
            throw std::invalid_argument("Packet: payload does not fit width");
        return Packet{static_cast<int32_t>(value), width};
    }
    bool is_erased() const { return payload < 0; }
};

/// The six-tuple of the ratio problem plus simulation knobs.
struct SystemConfig {
    int k_f = 1;
    int k_b = 1;
    int c_f = 1;
    int c_b = 1;
    double beta_f = 0.0;
    double beta_b = 0.0;
    int n = 1;
    int c = 1;
    int ell = 1;
    uint64_t seed = 0;
    // When true, feedback emitted in cycle t reflects decoder state as of the
    // end of cycle t-1 instead of the same cycle's forward phase.
    bool feedback_lag = false;

    std::vector<std::string> validate() const {
        std::vector<std::string> errs;
        if (k_f < 1) errs.push_back("k_f must be >= 1");
        if (k_b < 1) errs.push_back("k_b must be >= 1");
        if (c_f < 1 || c_f > 31) errs.push_back("c_f must be in [1,31]");
        if (c_b < 1 || c_b > 31) errs.push_back("c_b must be in [1,31]");
        if (!(beta_f >= 0.0 && beta_f <= 1.0)) errs.push_back("beta_f must be in [0,1]");
        if (!(beta_b >= 0.0 && beta_b <= 1.0)) errs.push_back("beta_b must be in [0,1]");
        if (n < 1) errs.push_back("n must be >= 1");
        if (c < 1) errs.push_back("c must be >= 1");
        if (ell < 1) errs.push_back("ell must be >= 1");
        return errs;
    }
    void ensure_valid() const {
        auto errs = validate();
        if (!errs.empty()) {
            std::string msg = "invalid SystemConfig:";
            for (const auto& e : errs) msg += " " + e + ";";
            throw std::invalid_argument(msg);
        }
    }

    /// Message block size in bits for nominal rate R (packets of c_f bits per
    /// forward use): floor(n*c*k_f*R*c_f). Simulation caps this at 20 bits so
    /// the candidate space stays enumerable.
    int block_bits(double rate) const {
        double raw = static_cast<double>(n) * c * k_f * rate * c_f;
        return static_cast<int>(raw + 1e-9);
    }

    ErasureParams forward() const { return ErasureParams(beta_f, c_f); }
    ErasureParams feedback() const { return ErasureParams(beta_b, c_b); }
};

/// Cycle phase: k_f forward uses, then k_b feedback uses, then the cycle
/// index increments.
struct CycleClock {
    enum class Dir { Forward, Feedback };
    uint64_t cycle = 0;
    Dir dir = Dir::Forward;
    int use = 1;  // 1..k_f or 1..k_b within the phase

    void advance(const SystemConfig& cfg) {
        if (dir == Dir::Forward) {
            if (use < cfg.k_f) {
                ++use;
            } else {
                dir = Dir::Feedback;
                use = 1;
            }
        } else {
            if (use < cfg.k_b) {
                ++use;
            } else {
                dir = Dir::Forward;
                use = 1;
                ++cycle;
            }
        }
    }
};

/// Memoryless packet-erasure channel: delivers the packet intact with
/// probability 1-beta, else emits the erasure mark. Draws exactly one
/// uniform variate per transmission regardless of beta.
struct ErasureChannel {
    ErasureParams params;

    Packet transmit(const Packet& x, RandomStream& noise) const {
        if (x.is_erased())
            throw std::invalid_argument("transmit: input packet is already erased");
        if (x.width != params.c_bits)
            throw std::invalid_argument("transmit: packet width does not match channel");
        const double u = noise.next_unit();
        if (u < params.beta) return Packet::erased(params.c_bits);
        return x;
    }
};

}  // namespace anycode
