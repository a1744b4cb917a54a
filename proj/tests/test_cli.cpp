#include <doctest.h>

#include <algorithm>

#include "anycode/cli_support.hpp"

using namespace anycode;

namespace {

const char* kMinimalConfig =
    "# minimal nolist run\n"
    "scheme = nolist\n"
    "kf = 1\nkb = 1\ncf = 2\ncb = 1\n"
    "beta_f = 0.25\nbeta_b = 0.25\n"
    "n = 10\nc = 2\nell = 1\nseed = 1\n"
    "rate = 0.2\ndelays = 0:20:2\ntrials = 10\nhorizon = 1000\n";

}  // namespace

TEST_CASE("run config parsing") {
    SUBCASE("minimal config") {
        const RunConfig cfg = parse_run_config(kMinimalConfig);
        CHECK(cfg.scheme == Scheme::NoList);
        CHECK(cfg.system.c_f == 2);
        CHECK(cfg.rate == doctest::Approx(0.2));
        CHECK(cfg.delays.size() == 11);
        CHECK(cfg.trials == 10);
    }

    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(
            parse_run_config(std::string(kMinimalConfig) + "bogus = 1\n"),
            ConfigError);
    }

    SUBCASE("every problem is listed, not just the first") {
        try {
            parse_run_config("scheme = warp\nkf = 0\nrate = -1\nbogus = 1\n"
                             "horizon = 0\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(e.errors.size() >= 4);
            const std::string all = e.what();
            CHECK(all.find("scheme") != std::string::npos);
            CHECK(all.find("k_f") != std::string::npos);
            CHECK(all.find("rate") != std::string::npos);
            CHECK(all.find("bogus") != std::string::npos);
        }
    }

    SUBCASE("list scheme precondition surfaced at parse time") {
        std::string cfg = kMinimalConfig;
        const size_t pos = cfg.find("scheme = nolist");
        cfg.replace(pos, 15, "scheme = list  ");
        // cf = 2 is fine but cb = 1 and ell = 1 are not.
        try {
            parse_run_config(cfg);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string all = e.what();
            CHECK(all.find("cb >= 2") != std::string::npos);
            CHECK(all.find("ell >= 2") != std::string::npos);
        }
    }

    SUBCASE("delay grids") {
        CHECK(parse_delay_grid("0:10:5") == std::vector<int>{0, 5, 10});
        CHECK(parse_delay_grid("1,3,9") == std::vector<int>{1, 3, 9});
        CHECK_THROWS_AS(parse_delay_grid("5,3"), std::invalid_argument);
        CHECK_THROWS_AS(parse_delay_grid("abc"), std::invalid_argument);
    }
}

TEST_CASE("csv outputs are byte stable and carry metadata plus units") {
    RateGrid grid{0.0, 0.7, 0.05};
    SweepOptions opt;
    const CurveTable t1 = sweep_curves(Scenario::Fig3, grid, opt);
    const CurveTable t2 = sweep_curves(Scenario::Fig3, grid, opt);
    const std::string a = curve_table_csv(t1, opt, grid);
    const std::string b = curve_table_csv(t2, opt, grid);
    CHECK(a == b);
    CHECK(a.rfind("# anycode", 0) == 0);
    CHECK(a.find("rate_units = forward") != std::string::npos);
    CHECK(a.find(",units\n") != std::string::npos);
    CHECK(a.find(",forward\n") != std::string::npos);

    const RunConfig cfg = parse_run_config(kMinimalConfig);
    const TraceCollection traces = run_trials(cfg.to_trial_spec());
    const DelayErrorCurve curve = bit_error_vs_delay(traces);
    const std::string c1 = delay_curve_csv(curve, cfg);
    const std::string c2 =
        delay_curve_csv(bit_error_vs_delay(run_trials(cfg.to_trial_spec())), cfg);
    CHECK(c1 == c2);
    CHECK(c1.find("# seed = 1") != std::string::npos);
    CHECK(c1.find("delay,eps_max,eps_pooled") != std::string::npos);
}

TEST_CASE("tails report") {
    RunConfig cfg = parse_run_config(kMinimalConfig);
    cfg.trials = 300;
    cfg.horizon = 4000;

    const TailsReport rep = run_tails(cfg);
    REQUIRE(rep.rows.size() == 4);
    CHECK(rep.rows[0].component == "T1");
    CHECK(rep.rows[0].analytic == doctest::Approx(0.8266786).epsilon(1e-5));
    CHECK(rep.rows[2].component == "T3");
    CHECK(rep.rows[2].analytic == doctest::Approx(-std::log(0.25)));
    REQUIRE(rep.rows[0].fit.ok);
    CHECK(rep.rows[0].fit.slope ==
          doctest::Approx(rep.rows[0].analytic).epsilon(0.08));
    // T2's analytic value is only a lower bound at desk-scale block sizes;
    // its fit runs on the genuine tail past the union plateau.
    CHECK(rep.rows[1].analytic_kind == "lower-bound");
    REQUIRE(rep.rows[1].fit.ok);
    CHECK(rep.rows[1].fit.slope > rep.rows[1].analytic * 0.85);
    CHECK(rep.summary_csv.find("component,fitted_slope") != std::string::npos);
    CHECK(rep.ccdf_csv.find("T1,") != std::string::npos);

    // Lossless runs have no tails to fit: columns turn not-applicable.
    RunConfig ll = cfg;
    ll.system.beta_f = 0.0;
    ll.system.beta_b = 0.0;
    ll.trials = 10;
    const TailsReport lrep = run_tails(ll);
    CHECK(!lrep.rows[2].fit.ok);  // T3 constant at one cycle
    CHECK(lrep.summary_csv.find("na") != std::string::npos);

    // Tails are defined through the no-list service decomposition.
    RunConfig arq = cfg;
    arq.scheme = Scheme::Arq;
    CHECK_THROWS_AS(run_tails(arq), ConfigError);
}

TEST_CASE("pascal cli wrapper") {
    const PascalCliReport ok = run_pascal_check(1, 0.5, 0.1, 100000, 9);
    CHECK(ok.feasible);
    CHECK(ok.pass);
    CHECK(ok.text.find("PASS") != std::string::npos);

    const PascalCliReport bad = run_pascal_check(5, 0.5, 0.999, 1000, 9);
    CHECK(!bad.feasible);
    CHECK(bad.text.find("feasible eps_prime range") != std::string::npos);
}
