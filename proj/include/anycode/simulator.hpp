#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anycode/channel.hpp"
#include "anycode/protocol.hpp"

namespace anycode {

/// One simulation campaign: scheme, config, nominal rate, horizon, delay
/// grid (in cycles; deadlines add d*k_f forward uses), and trial count.
/// Per-trial seeds derive from config.seed by counter.
struct TrialSpec {
    SystemConfig config;
    Scheme scheme = Scheme::NoList;
    double rate = 0.0;
    uint64_t horizon_cycles = 0;
    std::vector<int> delays;
    int trials = 0;

    void ensure_valid() const;
};

/// Compact per-trial outcome. Block records cover NoList/List; ARQ commits
/// are per accepted packet.
struct TrialTrace {
    int trial_id = 0;
    std::vector<BlockStats> blocks;
    std::vector<uint64_t> packet_commits;
    uint64_t committed = 0;
    uint64_t final_encoder_pos = 0;
    uint64_t final_decoder_pos = 0;
    std::string event_text;  // only when events were recorded
};

struct TraceCollection {
    TrialSpec spec;
    std::vector<TrialTrace> trials;
};

TraceCollection run_trials(const TrialSpec& spec, bool record_events = false);

/// Least-squares fit of the log empirical CCDF of a nonnegative integer
/// sample. The first three support points are dropped (constant offsets
/// contaminate small t) as is every point with fewer than 10 tail hits.
/// ccdf_max further restricts the fit to the genuine tail; variables that
/// plateau near 1 before decaying (a union over many survivors) need it.
struct TailEstimate {
    bool ok = false;
    double slope = 0.0;      // decay rate per unit of t, positive
    double intercept = 0.0;  // log CCDF at t = 0 per the fit
    double std_error = 0.0;  // standard error of the slope
    int64_t t_lo = 0;
    int64_t t_hi = 0;
    size_t samples = 0;
    int points = 0;
    std::string note;
};

TailEstimate fit_tail(const std::vector<uint64_t>& samples,
                      double ccdf_max = 1.0);

/// Per-delay bit error estimates. eps_max follows the definition (maximum
/// over bit positions with enough observations); eps_pooled pools positions
/// with deadlines inside the horizon at every grid delay, which is what the
/// slope fits use.
struct DelayErrorRow {
    int delay = 0;
    double eps_max = 0.0;
    double eps_pooled = 0.0;
    uint64_t pooled_errors = 0;
    uint64_t pooled_observations = 0;
    double pooled_std_error = 0.0;
};

struct DelayErrorCurve {
    std::vector<DelayErrorRow> rows;
    uint64_t positions_measured = 0;
    uint64_t positions_excluded = 0;  // deadline beyond the horizon
    int trials = 0;
};

DelayErrorCurve bit_error_vs_delay(const TraceCollection& traces);

/// Service-time tail domination report against
/// exp(-t c k_f (min(E0(C_f,rho), (k_b/k_f)(-ln beta_b)) - eps)).
struct ServiceBoundReport {
    double rho = 0.0;
    double lambda = 0.0;      // min of the two analytic arms, per forward use
    double eps = 0.0;         // slack subtracted from lambda
    double t_tilde = 0.0;     // (R / C~(rho)) n, in c*k_f blocks
    double offset_uses = 0.0; // ceil(t_tilde) * c * k_f
    double k_offset = 0.0;    // smallest additional K making the bound hold
    TailEstimate fitted;      // tail fit of the raw T samples
    bool dominated = false;
};

ServiceBoundReport validate_service_bound(const std::vector<uint64_t>& samples,
                                          const SystemConfig& cfg, double rate,
                                          double rho, double eps_fraction = 0.1);

/// Monte-Carlo and analytic replay of the Pascal tail lemma.
struct PascalCheckReport {
    bool feasible = false;
    double eps_prime_max = 0.0;
    double epsilon = 0.0;
    double t_check = 0.0;
    bool dominated = false;       // empirical CCDF below the bound at every t
    double worst_margin = 0.0;    // max over grid of empirical / bound
    bool divergence_ok = false;   // appendix divergence inequality on a grid
    bool bernoulli_ok = false;    // Pascal CCDF matches the Bernoulli identity
    std::string note;
};

PascalCheckReport pascal_empirical_check(int m, double gamma, double eps_prime,
                                         size_t samples, uint64_t seed);

/// Pearson chi-square statistic for independence of two categorical
/// samples binned by quartile, with the 0.999 critical value for the
/// resulting degrees of freedom.
struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double critical_999 = 0.0;
    bool independent = false;
};

ChiSquareResult chi_square_independence(const std::vector<uint64_t>& a,
                                        const std::vector<uint64_t>& b,
                                        int bins = 4);

}  // namespace anycode
