#pragma once

#include <string>
#include <vector>

#include "anycode/exponents.hpp"
#include "anycode/simulator.hpp"

namespace anycode {

inline constexpr const char* kVersion = "0.1.0";

/// Config-file problems, reported exhaustively rather than first-only.
struct ConfigError : std::runtime_error {
    std::vector<std::string> errors;
    explicit ConfigError(std::vector<std::string> errs)
        : std::runtime_error(join(errs)), errors(std::move(errs)) {}
    static std::string join(const std::vector<std::string>& errs) {
        std::string s = "invalid configuration:";
        for (const auto& e : errs) s += "\n  - " + e;
        return s;
    }
};

/// Declarative run description parsed from a flat key = value document.
struct RunConfig {
    SystemConfig system;
    Scheme scheme = Scheme::NoList;
    double rate = 0.0;
    std::vector<int> delays;
    int trials = 0;
    uint64_t horizon = 0;
    std::string out_summary;
    std::string out_trace;

    TrialSpec to_trial_spec() const;
};

/// Parses the key = value format ('#' comments, blank lines allowed).
/// Unknown keys are rejected; every problem is listed in the exception.
RunConfig parse_run_config(const std::string& text);

/// "lo:hi:step" or a comma-separated list of increasing integers.
std::vector<int> parse_delay_grid(const std::string& text);

/// Formats a curve table as CSV with a #-prefixed metadata block echoing
/// the configuration, so the figure is reproducible from the file alone.
/// Output bytes depend only on the inputs.
std::string curve_table_csv(const CurveTable& table, const SweepOptions& opt,
                            const RateGrid& grid);

std::string delay_curve_csv(const DelayErrorCurve& curve, const RunConfig& cfg);

struct TailRow {
    std::string component;
    TailEstimate fit;
    double analytic = 0.0;
    std::string analytic_kind;  // "exact" or "lower-bound"
};

struct TailsReport {
    std::vector<TailRow> rows;
    std::string ccdf_csv;
    std::string summary_csv;
};

/// Runs the no-list scheme per the config, decomposes service times, fits
/// the component tails and compares them with the analytic exponents.
TailsReport run_tails(const RunConfig& cfg);

/// Text report for the Pascal lemma check; pass == domination everywhere.
struct PascalCliReport {
    bool pass = false;
    bool feasible = false;
    std::string text;
};

PascalCliReport run_pascal_check(int m, double gamma, double eps_prime,
                                 size_t samples, uint64_t seed);

Scheme scheme_from_string(const std::string& s);
Scenario scenario_from_string(const std::string& s);

/// Multi-trial trace serialization: one event per line,
/// "trial cycle phase kind id aux", all decimal ASCII.
std::string collection_trace_text(const TraceCollection& traces);

}  // namespace anycode
