#include "anycode/cli_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace anycode {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

Scheme scheme_from_string(const std::string& s) {
    if (s == "nolist") return Scheme::NoList;
    if (s == "list") return Scheme::List;
    if (s == "arq") return Scheme::Arq;
    throw std::invalid_argument("unknown scheme '" + s +
                                "' (expected nolist|list|arq)");
}

Scenario scenario_from_string(const std::string& s) {
    if (s == "fig3") return Scenario::Fig3;
    if (s == "fig4") return Scenario::Fig4;
    if (s == "fig5") return Scenario::Fig5;
    if (s == "fig6") return Scenario::Fig6;
    if (s == "custom") return Scenario::Custom;
    throw std::invalid_argument("unknown scenario '" + s +
                                "' (expected fig3|fig4|fig5|fig6|custom)");
}

std::vector<int> parse_delay_grid(const std::string& text) {
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        int lo, hi, step;
        if (std::sscanf(text.c_str(), "%d:%d:%d", &lo, &hi, &step) != 3 ||
            step <= 0 || hi < lo || lo < 0)
            throw std::invalid_argument("bad delay grid '" + text +
                                        "' (expected lo:hi:step)");
        for (int d = lo; d <= hi; d += step) out.push_back(d);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty())
        throw std::invalid_argument("bad delay grid '" + text + "'");
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1])
            throw std::invalid_argument("delay grid must be increasing");
    return out;
}

TrialSpec RunConfig::to_trial_spec() const {
    TrialSpec spec;
    spec.config = system;
    spec.scheme = scheme;
    spec.rate = rate;
    spec.horizon_cycles = horizon;
    spec.delays = delays;
    spec.trials = trials;
    return spec;
}

RunConfig parse_run_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::vector<std::string> errs;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back("line " + std::to_string(lineno) +
                           ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (kv.count(key))
            errs.push_back("duplicate key '" + key + "'");
        kv[key] = val;
    }

    RunConfig cfg;
    auto take = [&](const char* key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_int = [&](const char* key, int def, int& out) {
        const std::string v = take(key);
        out = def;
        if (v.empty()) return;
        try {
            out = std::stoi(v);
        } catch (...) {
            errs.push_back(std::string(key) + ": not an integer ('" + v + "')");
        }
    };
    auto take_u64 = [&](const char* key, uint64_t def, uint64_t& out) {
        const std::string v = take(key);
        out = def;
        if (v.empty()) return;
        try {
            out = std::stoull(v);
        } catch (...) {
            errs.push_back(std::string(key) + ": not an integer ('" + v + "')");
        }
    };
    auto take_double = [&](const char* key, double def, double& out) {
        const std::string v = take(key);
        out = def;
        if (v.empty()) return;
        try {
            out = std::stod(v);
        } catch (...) {
            errs.push_back(std::string(key) + ": not a number ('" + v + "')");
        }
    };

    take_int("kf", 1, cfg.system.k_f);
    take_int("kb", 1, cfg.system.k_b);
    take_int("cf", 1, cfg.system.c_f);
    take_int("cb", 1, cfg.system.c_b);
    take_double("beta_f", 0.0, cfg.system.beta_f);
    take_double("beta_b", 0.0, cfg.system.beta_b);
    take_int("n", 1, cfg.system.n);
    take_int("c", 1, cfg.system.c);
    take_int("ell", 1, cfg.system.ell);
    take_u64("seed", 0, cfg.system.seed);
    int lag = 0;
    take_int("feedback_lag", 0, lag);
    cfg.system.feedback_lag = lag != 0;
    take_double("rate", 0.0, cfg.rate);
    take_int("trials", 0, cfg.trials);
    take_u64("horizon", 0, cfg.horizon);

    const std::string scheme_s = take("scheme");
    if (scheme_s.empty()) {
        errs.push_back("scheme: required (nolist|list|arq)");
    } else {
        try {
            cfg.scheme = scheme_from_string(scheme_s);
        } catch (const std::exception& e) {
            errs.push_back(e.what());
        }
    }
    const std::string delays_s = take("delays");
    if (!delays_s.empty()) {
        try {
            cfg.delays = parse_delay_grid(delays_s);
        } catch (const std::exception& e) {
            errs.push_back(e.what());
        }
    }
    cfg.out_summary = take("out_summary");
    cfg.out_trace = take("out_trace");

    for (const auto& [key, val] : kv)
        errs.push_back("unknown key '" + key + "'");

    for (const auto& e : cfg.system.validate()) errs.push_back(e);
    if (!(cfg.rate > 0.0)) errs.push_back("rate: must be > 0");
    if (cfg.horizon < 1) errs.push_back("horizon: must be >= 1 cycle");
    if (cfg.trials < 0) errs.push_back("trials: must be >= 0");

    // Scheme preconditions surfaced at parse time.
    if (errs.empty()) {
        if (cfg.scheme == Scheme::List) {
            if (cfg.system.c_f < 2 || cfg.system.c_b < 2)
                errs.push_back(
                    "scheme=list requires cf >= 2 and cb >= 2 (one bit per "
                    "packet carries the round number)");
            if (cfg.system.ell < 2)
                errs.push_back("scheme=list requires ell >= 2");
        }
        if (cfg.scheme == Scheme::Arq && cfg.system.c_f < 2)
            errs.push_back("scheme=arq requires cf >= 2 (sequence bit + payload)");
        if (cfg.scheme != Scheme::Arq) {
            const int bb = cfg.system.block_bits(cfg.rate);
            if (bb < 1)
                errs.push_back("block bit count n*c*kf*rate*cf rounds to zero");
            if (bb > 20)
                errs.push_back("block bit count exceeds the 2^20 candidate cap");
        }
    }
    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

namespace {

void append_meta(std::string& out, const SweepOptions& opt, const RateGrid& grid,
                 const char* name, Units units) {
    out += "# anycode ";
    out += kVersion;
    out += "\n# table = ";
    out += name;
    out += "\n# beta_f = " + fmt(opt.beta_f) + " beta_b = " + fmt(opt.beta_b);
    out += "\n# c_f = " + std::to_string(opt.c_f) +
           " c_b = " + std::to_string(opt.c_b);
    out += "\n# k_f = " + std::to_string(opt.k_f) +
           " k_b = " + std::to_string(opt.k_b);
    out += "\n# grid = " + fmt(grid.lo) + ":" + fmt(grid.hi) + ":" + fmt(grid.step);
    out += "\n# rate_units = ";
    out += units_name(units);
    out += "\n";
}

}  // namespace

std::string curve_table_csv(const CurveTable& table, const SweepOptions& opt,
                            const RateGrid& grid) {
    std::string out;
    append_meta(out, opt, grid, table.name.c_str(), table.grid_units);
    for (size_t i = 0; i < table.columns.size(); ++i) {
        out += table.columns[i];
        out += ",";
    }
    out += "units\n";
    for (const auto& row : table.rows) {
        for (double v : row) {
            out += fmt(v);
            out += ",";
        }
        out += units_name(table.grid_units);
        out += "\n";
    }
    return out;
}

std::string delay_curve_csv(const DelayErrorCurve& curve, const RunConfig& cfg) {
    std::string out = "# anycode ";
    out += kVersion;
    out += "\n# scheme = ";
    out += scheme_name(cfg.scheme);
    out += "\n# rate = " + fmt(cfg.rate);
    out += "\n# seed = " + std::to_string(cfg.system.seed);
    out += "\n# trials = " + std::to_string(cfg.trials) +
           " horizon = " + std::to_string(cfg.horizon);
    out += "\n# config: kf=" + std::to_string(cfg.system.k_f) +
           " kb=" + std::to_string(cfg.system.k_b) +
           " cf=" + std::to_string(cfg.system.c_f) +
           " cb=" + std::to_string(cfg.system.c_b) +
           " beta_f=" + fmt(cfg.system.beta_f) +
           " beta_b=" + fmt(cfg.system.beta_b) + " n=" +
           std::to_string(cfg.system.n) + " c=" + std::to_string(cfg.system.c) +
           " ell=" + std::to_string(cfg.system.ell);
    out += "\n# positions_measured = " + std::to_string(curve.positions_measured) +
           " positions_excluded = " + std::to_string(curve.positions_excluded);
    out += "\n# delays are cycles; a deadline adds delay*k_f forward uses\n";
    out += "delay,eps_max,eps_pooled,errors,observations,stderr,trials,units\n";
    for (const auto& r : curve.rows) {
        out += std::to_string(r.delay) + "," + fmt(r.eps_max) + "," +
               fmt(r.eps_pooled) + "," + std::to_string(r.pooled_errors) + "," +
               std::to_string(r.pooled_observations) + "," +
               fmt(r.pooled_std_error) + "," + std::to_string(curve.trials) +
               ",forward\n";
    }
    return out;
}

std::string collection_trace_text(const TraceCollection& traces) {
    std::string out;
    for (const auto& tr : traces.trials) {
        std::stringstream ss(tr.event_text);
        std::string line;
        while (std::getline(ss, line)) {
            out += std::to_string(tr.trial_id);
            out += " ";
            out += line;
            out += "\n";
        }
    }
    return out;
}

TailsReport run_tails(const RunConfig& cfg) {
    if (cfg.scheme != Scheme::NoList)
        throw ConfigError({"tails requires scheme=nolist (the T1/T2/T3 "
                           "decomposition is defined for it)"});
    TrialSpec spec = cfg.to_trial_spec();
    if (spec.delays.empty()) spec.delays = {0};
    TraceCollection traces = run_trials(spec);

    std::vector<uint64_t> t1, t2, t3, total;
    for (const auto& tr : traces.trials) {
        for (const auto& s : measure_service_components(tr.blocks)) {
            if (s.block > 1) {
                t1.push_back(s.t1);
                t2.push_back(s.t2);
            }
            t3.push_back(s.t3);
            total.push_back(s.total());
        }
    }

    const SystemConfig& sc = cfg.system;
    TailsReport rep;
    const double e0_1 = gallager_e0(sc.c_f, 1.0, sc.beta_f);
    // Operating rho: where the parametric rate meets the nominal rate,
    // capped at 1. Gives a lower bound for the T2 slope at small block sizes.
    double rho_star = 1.0;
    {
        const double kln2 = 0.6931471805599453;
        auto rate_of = [&](double rho) {
            return gallager_e0(sc.c_f, rho, sc.beta_f) / (rho * sc.c_f * kln2);
        };
        if (rate_of(1.0) < cfg.rate) {
            double lo = 1e-9, hi = 1.0;
            for (int i = 0; i < 100; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (rate_of(mid) >= cfg.rate)
                    lo = mid;
                else
                    hi = mid;
            }
            rho_star = lo;
        }
    }
    const double fb_arm =
        sc.beta_b > 0.0 ? static_cast<double>(sc.k_b) / sc.k_f *
                              (-std::log(sc.beta_b))
                        : std::numeric_limits<double>::infinity();

    rep.rows.push_back({"T1", fit_tail(t1), e0_1, "exact"});
    // T2 is a union over the block's surviving impostors; its CCDF plateaus
    // before the single-survivor decay takes over, so fit the genuine tail.
    rep.rows.push_back(
        {"T2", fit_tail(t2, 0.05), gallager_e0(sc.c_f, rho_star, sc.beta_f),
         "lower-bound"});
    rep.rows.push_back({"T3", fit_tail(t3), fb_arm, "exact"});
    rep.rows.push_back(
        {"T", fit_tail(total, 0.05),
         std::min(fb_arm, gallager_e0(sc.c_f, rho_star, sc.beta_f)),
         "lower-bound"});

    // CCDF table.
    std::string ccdf = "# anycode ";
    ccdf += kVersion;
    ccdf += "\n# component tails in forward channel uses; block 1 excluded "
            "from T1/T2\ncomponent,t,ccdf,units\n";
    auto append_ccdf = [&](const char* name, std::vector<uint64_t> v) {
        if (v.empty()) return;
        std::sort(v.begin(), v.end());
        const double n = static_cast<double>(v.size());
        size_t i = 0;
        while (i < v.size()) {
            size_t j = i;
            while (j < v.size() && v[j] == v[i]) ++j;
            const double c = static_cast<double>(v.size() - j) / n;
            if (c > 0)
                ccdf += std::string(name) + "," + std::to_string(v[i]) + "," +
                        fmt(c) + ",forward\n";
            i = j;
        }
    };
    append_ccdf("T1", t1);
    append_ccdf("T2", t2);
    append_ccdf("T3", t3);
    append_ccdf("T", total);
    rep.ccdf_csv = ccdf;

    std::string sum = "# anycode ";
    sum += kVersion;
    sum += "\n# fitted slope vs analytic exponent, per forward use\n";
    sum += "component,fitted_slope,std_error,analytic,analytic_kind,ratio,"
           "samples,fit_lo,fit_hi,units\n";
    for (const auto& row : rep.rows) {
        sum += row.component + ",";
        if (row.fit.ok) {
            sum += fmt(row.fit.slope) + "," + fmt(row.fit.std_error) + ",";
        } else {
            sum += "na,na,";
        }
        if (std::isfinite(row.analytic))
            sum += fmt(row.analytic);
        else
            sum += "inf";
        sum += "," + row.analytic_kind + ",";
        if (row.fit.ok && std::isfinite(row.analytic) && row.analytic > 0)
            sum += fmt(row.fit.slope / row.analytic);
        else
            sum += "na";
        sum += "," + std::to_string(row.fit.samples) + ",";
        if (row.fit.ok)
            sum += std::to_string(row.fit.t_lo) + "," +
                   std::to_string(row.fit.t_hi);
        else
            sum += "na,na";
        sum += ",forward\n";
    }
    rep.summary_csv = sum;
    return rep;
}

PascalCliReport run_pascal_check(int m, double gamma, double eps_prime,
                                 size_t samples, uint64_t seed) {
    PascalCliReport out;
    const PascalCheckReport rep =
        pascal_empirical_check(m, gamma, eps_prime, samples, seed);
    out.feasible = rep.feasible;
    std::string t = "pascal-check m=" + std::to_string(m) +
                    " gamma=" + fmt(gamma) + " eps_prime=" + fmt(eps_prime) +
                    " samples=" + std::to_string(samples) + "\n";
    if (!rep.feasible) {
        t += "INFEASIBLE: feasible eps_prime range is (0, " +
             fmt(rep.eps_prime_max) + ")\n";
        out.pass = false;
        out.text = t;
        return out;
    }
    t += "epsilon = " + fmt(rep.epsilon) + ", t_check = " + fmt(rep.t_check) +
         "\n";
    t += std::string("domination: ") + (rep.dominated ? "PASS" : "FAIL") +
         " (worst empirical/bound = " + fmt(rep.worst_margin) + ")\n";
    t += std::string("divergence inequality: ") +
         (rep.divergence_ok ? "PASS" : "FAIL") + "\n";
    t += std::string("bernoulli reinterpretation: ") +
         (rep.bernoulli_ok ? "PASS" : "FAIL") + "\n";
    out.pass = rep.dominated && rep.divergence_ok && rep.bernoulli_ok;
    out.text = t;
    return out;
}

}  // namespace anycode
