// Command-line front end: curve generation, simulation runs, service-time
// tail analysis and the Pascal bound check. Exit codes: 0 success,
// 1 protocol invariant violation, 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "anycode/cli_support.hpp"

namespace fs = std::filesystem;
using namespace anycode;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

int cmd_curves(const std::string& scenario_s, const std::string& out_dir,
               const std::string& grid_s, SweepOptions opt,
               const std::string& eta_list_s) {
    const Scenario scenario = scenario_from_string(scenario_s);
    RateGrid grid;
    if (std::sscanf(grid_s.c_str(), "%lf:%lf:%lf", &grid.lo, &grid.hi,
                    &grid.step) != 3)
        throw ConfigError({"bad --grid '" + grid_s + "' (expected lo:hi:step)"});
    if (!eta_list_s.empty()) {
        opt.eta_list.clear();
        std::stringstream ss(eta_list_s);
        std::string tok;
        while (std::getline(ss, tok, ',')) opt.eta_list.push_back(std::stod(tok));
    }
    const CurveTable table = sweep_curves(scenario, grid, opt);
    const fs::path path = fs::path(out_dir) / (table.name + ".csv");
    write_file(path, curve_table_csv(table, opt, grid));
    std::cout << "wrote " << path.string() << " (" << table.rows.size()
              << " rows, " << table.columns.size() << " columns)\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 uint64_t seed_override, bool has_seed, int trials_override) {
    RunConfig cfg = parse_run_config(read_file(config_path));
    if (has_seed) cfg.system.seed = seed_override;
    if (trials_override >= 0) cfg.trials = trials_override;
    const bool want_trace = !cfg.out_trace.empty();
    const TraceCollection traces = run_trials(cfg.to_trial_spec(), want_trace);
    if (cfg.delays.empty())
        throw ConfigError({"delays: required for simulate"});
    const DelayErrorCurve curve = bit_error_vs_delay(traces);
    const std::string csv = delay_curve_csv(curve, cfg);

    fs::path summary = cfg.out_summary.empty()
                           ? fs::path(out_dir) / "summary.csv"
                           : fs::path(cfg.out_summary);
    write_file(summary, csv);
    std::cout << "wrote " << summary.string() << "\n";
    if (want_trace) {
        write_file(cfg.out_trace, collection_trace_text(traces));
        std::cout << "wrote " << cfg.out_trace << "\n";
    }
    uint64_t committed = 0;
    for (const auto& t : traces.trials) committed += t.committed;
    std::cout << "trials = " << traces.trials.size()
              << ", committed units = " << committed << "\n";
    return 0;
}

int cmd_tails(const std::string& config_path, const std::string& out_dir,
              uint64_t seed_override, bool has_seed, int trials_override) {
    RunConfig cfg = parse_run_config(read_file(config_path));
    if (has_seed) cfg.system.seed = seed_override;
    if (trials_override >= 0) cfg.trials = trials_override;
    const TailsReport rep = run_tails(cfg);
    write_file(fs::path(out_dir) / "tails_ccdf.csv", rep.ccdf_csv);
    write_file(fs::path(out_dir) / "tails_summary.csv", rep.summary_csv);
    std::cout << "wrote " << (fs::path(out_dir) / "tails_ccdf.csv").string()
              << "\n";
    std::cout << "wrote "
              << (fs::path(out_dir) / "tails_summary.csv").string() << "\n";
    for (const auto& row : rep.rows) {
        std::cout << row.component << ": ";
        if (row.fit.ok)
            std::cout << "slope " << row.fit.slope << " vs analytic "
                      << row.analytic << " (" << row.analytic_kind << ")\n";
        else
            std::cout << "fit n/a (" << row.fit.note << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-delay streaming over erasure channels with unreliable "
                 "feedback: curves, simulation, tails, bound checks"};
    app.require_subcommand(1);

    // curves
    auto* curves = app.add_subcommand("curves", "emit figure curve tables");
    std::string scenario = "fig3";
    std::string out_dir = ".";
    std::string grid_s = "0:0.74:0.005";
    std::string eta_list_s;
    SweepOptions opt;
    curves->add_option("--scenario", scenario, "fig3|fig4|fig5|fig6|custom");
    curves->add_option("--out", out_dir, "output directory");
    curves->add_option("--grid", grid_s, "rate grid LO:HI:STEP");
    curves->add_option("--beta-f", opt.beta_f, "forward erasure probability");
    curves->add_option("--beta-b", opt.beta_b, "feedback erasure probability");
    curves->add_option("--cf", opt.c_f, "forward packet bits");
    curves->add_option("--cb", opt.c_b, "feedback packet bits");
    curves->add_option("--kf", opt.k_f, "forward uses per cycle");
    curves->add_option("--kb", opt.k_b, "feedback uses per cycle");
    curves->add_option("--eta-list", eta_list_s,
                       "comma-separated eta_f values for fig5/custom");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run trials and measure "
                                                    "bit error vs delay");
    std::string sim_config;
    std::string sim_out = ".";
    uint64_t seed_override = 0;
    int trials_override = -1;
    simulate->add_option("--config", sim_config, "flat key=value config file")
        ->required();
    simulate->add_option("--out", sim_out, "output directory");
    auto* sim_seed = simulate->add_option("--seed", seed_override, "seed override");
    simulate->add_option("--trials", trials_override, "trial count override");

    // tails
    auto* tails = app.add_subcommand("tails", "service-time component tails");
    std::string tails_config;
    std::string tails_out = ".";
    uint64_t tails_seed = 0;
    int tails_trials = -1;
    tails->add_option("--config", tails_config, "flat key=value config file")
        ->required();
    tails->add_option("--out", tails_out, "output directory");
    auto* tails_seed_opt = tails->add_option("--seed", tails_seed, "seed override");
    tails->add_option("--trials", tails_trials, "trial count override");

    // pascal-check
    auto* pascal = app.add_subcommand("pascal-check",
                                      "Pascal tail bound domination check");
    int m = 1;
    double gamma = 0.5, eps_prime = 0.1;
    uint64_t samples = 100000, pseed = 1;
    pascal->add_option("--m", m, "number of interactive exchange pairs");
    pascal->add_option("--gamma", gamma, "geometric exponent")->required();
    pascal->add_option("--eps-prime", eps_prime, "exponent slack")->required();
    pascal->add_option("--samples", samples, "Monte-Carlo sample count");
    pascal->add_option("--seed", pseed, "sampling seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curves->parsed())
            return cmd_curves(scenario, out_dir, grid_s, opt, eta_list_s);
        if (simulate->parsed())
            return cmd_simulate(sim_config, sim_out, seed_override,
                                sim_seed->count() > 0, trials_override);
        if (tails->parsed())
            return cmd_tails(tails_config, tails_out, tails_seed,
                             tails_seed_opt->count() > 0, tails_trials);
        if (pascal->parsed()) {
            if (m < 1 || !(gamma > 0.0)) {
                std::cerr << "pascal-check: need m >= 1 and gamma > 0\n";
                return 2;
            }
            const PascalCliReport rep =
                run_pascal_check(m, gamma, eps_prime, samples, pseed);
            std::cout << rep.text;
            if (!rep.feasible) return 2;
            return rep.pass ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ProtocolViolation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
