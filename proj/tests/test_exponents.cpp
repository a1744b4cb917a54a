#include <doctest.h>

#include <cmath>

#include "anycode/exponents.hpp"

using namespace anycode;

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Brute-force rho sweep, the optimizer's oracle.
double brute_force_fec(double rate, const ErasureParams& p, double rho_max) {
    double best = 0.0;
    for (double rho = 0.0; rho <= rho_max; rho += 1e-5) {
        const double v = gallager_e0(p, rho) - rho * rate * p.c_bits * kLn2;
        if (v > best) best = v;
    }
    return best;
}

}  // namespace

TEST_CASE("gallager_e0 golden values") {
    // -ln(0.25 + 0.75/16) = ln(64/19)
    CHECK(gallager_e0(4, 1.0, 0.25) == doctest::Approx(1.2144441).epsilon(1e-6));
    // -ln(0.625)
    CHECK(gallager_e0(1, 1.0, 0.25) == doctest::Approx(0.4700036).epsilon(1e-6));
    CHECK(gallager_e0(2, 1.0, 0.25) == doctest::Approx(0.8266786).epsilon(1e-6));
    CHECK(gallager_e0(4, 0.0, 0.9) == 0.0);
    // beta = 0 collapses to rho C ln 2.
    CHECK(gallager_e0(4, 1.0, 0.0) == doctest::Approx(4.0 * kLn2));
    // beta = 1: total outage, zero exponent.
    CHECK(gallager_e0(4, 1.0, 1.0) == doctest::Approx(0.0));
}

TEST_CASE("gallager_e0 monotone and concave in rho, E0/rho nonincreasing") {
    const ErasureParams p(0.3, 3);
    double prev = -1.0, prev_ratio = 1e100, prev_diff = 1e100;
    for (int i = 1; i <= 400; ++i) {
        const double rho = i * 0.01;
        const double v = gallager_e0(p, rho);
        CHECK(v > prev);
        const double diff = v - gallager_e0(p, rho - 0.01);
        CHECK(diff <= prev_diff + 1e-12);  // concavity
        const double ratio = v / rho;
        CHECK(ratio <= prev_ratio + 1e-12);
        prev = v;
        prev_diff = diff;
        prev_ratio = ratio;
    }
}

TEST_CASE("focusing bound golden values and limits") {
    // ln2 / (ln2 + ln 1.5) = log_3 2
    CHECK(focusing_bound_rate(kLn2, 0.25) ==
          doctest::Approx(0.6309298).epsilon(1e-6));
    // alpha -> 0 limit is capacity.
    CHECK(focusing_bound_rate(1e-8, 0.25) == doctest::Approx(0.75).epsilon(1e-6));
    // alpha near -ln beta: the denominator diverges (logarithmically), so
    // the rate collapses toward zero.
    CHECK(focusing_bound_rate(-std::log(0.25) - 1e-9, 0.25) < 0.07);
    CHECK(focusing_bound_rate(-std::log(0.25) - 1e-12, 0.25) <
          focusing_bound_rate(-std::log(0.25) - 1e-6, 0.25));
    CHECK_THROWS_AS(focusing_bound_rate(-std::log(0.25) + 0.01, 0.25),
                    std::domain_error);

    // Strictly decreasing in alpha.
    double prev = 2.0;
    for (double a = 0.01; a < 1.386; a += 0.01) {
        const double r = focusing_bound_rate(a, 0.25);
        CHECK(r < prev);
        prev = r;
    }

    // Inverse round-trips.
    for (double a : {0.1, 0.5, 1.0, 1.3}) {
        const double r = focusing_bound_rate(a, 0.25);
        CHECK(focusing_bound_alpha(r, 0.25) == doctest::Approx(a).epsilon(1e-9));
    }
    CHECK(focusing_bound_alpha(0.0, 0.25) == doctest::Approx(-std::log(0.25)));
    CHECK(focusing_bound_alpha(0.75, 0.25) == 0.0);
}

TEST_CASE("theorem 1 region") {
    SystemConfig cfg;
    cfg.k_f = 1;
    cfg.k_b = 1;
    cfg.c_f = 4;
    cfg.c_b = 1;
    cfg.beta_f = 0.25;
    cfg.beta_b = 0.25;

    const RegionPoint p = theorem1_region(cfg, 1.0);
    CHECK(p.exponent == doctest::Approx(1.2144441).epsilon(1e-6));
    CHECK(p.rate == doctest::Approx(1.2144441 / (4 * kLn2)).epsilon(1e-6));
    CHECK(p.rate_units == Units::ForwardOnly);

    // rho = 0: zero-exponent capacity endpoint, computed in closed form.
    const RegionPoint p0 = theorem1_region(cfg, 0.0);
    CHECK(p0.rate == doctest::Approx(0.75));
    CHECK(p0.exponent == 0.0);

    // beta_b = 0.5 saturates the exponent at -ln 0.5 for large C_f.
    SystemConfig sat = cfg;
    sat.beta_b = 0.5;
    sat.c_f = 30;
    const RegionPoint ps = theorem1_region(sat, 1.0);
    CHECK(ps.exponent == doctest::Approx(kLn2).epsilon(1e-6));
}

TEST_CASE("theorem 1 lies on the focusing bound where the forward arm binds") {
    SystemConfig cfg;
    cfg.c_f = 4;
    cfg.c_b = 1;
    cfg.beta_f = 0.25;
    cfg.beta_b = 0.25;
    for (int i = 1; i <= 100; ++i) {
        const double rho = i / 100.0;
        const RegionPoint p = theorem1_region(cfg, rho);
        const double fb_arm = -std::log(cfg.beta_b);
        const double e0 = gallager_e0(cfg.c_f, rho, cfg.beta_f);
        if (e0 < fb_arm) {
            // Equality with the focusing bound, an algebraic identity.
            CHECK(p.rate ==
                  doctest::Approx(focusing_bound_rate(p.exponent, cfg.beta_f))
                      .epsilon(1e-12));
        } else {
            CHECK(p.rate <= focusing_bound_rate(p.exponent, cfg.beta_f) + 1e-12);
        }
    }
}

TEST_CASE("theorem 2 region") {
    SystemConfig cfg;
    cfg.c_f = 2;
    cfg.c_b = 2;
    cfg.beta_f = 0.25;
    cfg.beta_b = 0.25;
    // E0(1,1) = -ln 0.625; rate divides by rho * C_f * ln2 with C_f = 2.
    const RegionPoint p = theorem2_region(cfg, 1.0);
    CHECK(p.exponent == doctest::Approx(0.4700036).epsilon(1e-6));
    CHECK(p.rate == doctest::Approx(0.4700036 / (2 * kLn2)).epsilon(1e-5));
    CHECK(p.rate == doctest::Approx(0.3390).epsilon(1e-3));

    // rho -> 0 limit: capacity scaled by (C_f-1)/C_f.
    SystemConfig c4 = cfg;
    c4.c_f = 4;
    const RegionPoint p0 = theorem2_region(c4, 0.0);
    CHECK(p0.rate == doctest::Approx(0.75 * 3.0 / 4.0));
    CHECK(p0.exponent == 0.0);

    // Exponent approaches -ln beta_f = -ln beta_b from below as rho grows.
    const RegionPoint pl = theorem2_region(c4, 50.0);
    CHECK(pl.exponent == doctest::Approx(-std::log(0.25)).epsilon(1e-6));
    CHECK(pl.exponent <= -std::log(0.25));
    CHECK(theorem2_region(c4, 3.0).exponent < -std::log(0.25));

    SystemConfig bad = cfg;
    bad.c_f = 1;
    CHECK_THROWS_AS(theorem2_region(bad, 1.0), std::domain_error);
    bad = cfg;
    bad.c_b = 1;
    CHECK_THROWS_AS(theorem2_region(bad, 1.0), std::domain_error);
}

TEST_CASE("random coding and sphere packing exponents") {
    const ErasureParams p(0.25, 4);
    // R = 0 maximizer is rho = 1.
    CHECK(random_coding_exponent(0.0, p) ==
          doctest::Approx(1.2144441).epsilon(1e-6));
    // Capacity endpoint.
    CHECK(random_coding_exponent(0.75, p) == 0.0);
    CHECK(sphere_packing_exponent(0.75, p) == doctest::Approx(0.0).epsilon(1e-9));
    // R -> 0 supremum of E_sp.
    CHECK(sphere_packing_exponent(0.0, p) == doctest::Approx(-std::log(0.25)));
    CHECK(sphere_packing_exponent(1e-4, p) ==
          doctest::Approx(-std::log(0.25)).epsilon(1e-2));

    // Optimizer against the brute-force rho grid.
    CHECK(random_coding_exponent(0.4, p) ==
          doctest::Approx(brute_force_fec(0.4, p, 1.0)).epsilon(1e-6));
    CHECK(sphere_packing_exponent(0.5, p) ==
          doctest::Approx(brute_force_fec(0.5, p, 64.0)).epsilon(1e-6));

    // E_r <= E_sp pointwise.
    for (double r = 0.01; r < 0.75; r += 0.02)
        CHECK(random_coding_exponent(r, p) <= sphere_packing_exponent(r, p) + 1e-9);

    // Lossless channel at rate 0: infinite indicator.
    CHECK(std::isinf(sphere_packing_exponent(0.0, ErasureParams(0.0, 4))));
}

TEST_CASE("fec C_f -> infinity limit") {
    CHECK(fec_exponent_inf(0.0, 0.25) == doctest::Approx(-std::log(0.25)));
    CHECK(fec_exponent_inf(0.75, 0.25) == 0.0);
    // Matches a large finite C_f within discretization.
    const ErasureParams big(0.25, 24);
    for (double r : {0.1, 0.3, 0.5, 0.7})
        CHECK(fec_exponent_inf(r, 0.25) ==
              doctest::Approx(sphere_packing_exponent(r, big)).epsilon(1e-3));
}

TEST_CASE("arq bound") {
    SystemConfig cfg;
    cfg.c_f = 4;
    cfg.c_b = 1;
    cfg.beta_f = 0.25;
    cfg.beta_b = 0.25;
    // alpha -> 0 ceiling: (1-bf)(1-bb) scaled by (C_f-1)/C_f.
    CHECK(arq_bound_rate(1e-8, cfg) ==
          doctest::Approx(0.75 * 0.5625).epsilon(1e-6));
    CHECK(arq_bound_rate_inf_cf(1e-8, 0.25, 0.25) ==
          doctest::Approx(0.5625).epsilon(1e-6));
    CHECK(arq_rate_ceiling(0.25, 0.25, 0) == doctest::Approx(0.5625));
    CHECK(arq_rate_ceiling(0.25, 0.25, 4) == doctest::Approx(0.421875));

    // beta_b = 0 reduces to the perfect-feedback form with erasure beta_f.
    SystemConfig pf = cfg;
    pf.beta_b = 0.0;
    const double a = 0.3;
    const double direct = 0.75 * a /
                          (a + std::log((1.0 - 0.25) /
                                        (1.0 - std::exp(a) * 0.25)));
    CHECK(arq_bound_rate(a, pf) == doctest::Approx(direct).epsilon(1e-12));

    // Both stated and natural alpha limits are exposed.
    const ArqAlphaLimits lim = arq_alpha_limits(0.25, 0.25);
    CHECK(lim.stated == doctest::Approx(-std::log(0.5625)));
    CHECK(lim.natural == doctest::Approx(-std::log(0.4375)));
    CHECK(lim.stated < lim.natural);
    CHECK_THROWS_AS(arq_bound_rate(lim.natural + 0.01, cfg), std::domain_error);
    // The formula is finite on (stated, natural) as well.
    CHECK(arq_bound_rate(0.5 * (lim.stated + lim.natural), cfg) > 0.0);
}

TEST_CASE("balanced exponent") {
    // Harmonic combination of -ln 0.25 and E0(4,1).
    const double arms = 1.0 / (1.0 / -std::log(0.25) +
                               1.0 / gallager_e0(4, 1.0, 0.25));
    CHECK(balanced_e0(4, 1.0, 0.25) == doctest::Approx(arms).epsilon(1e-12));
    CHECK(balanced_e0(4, 1.0, 0.25) == doctest::Approx(0.6473453).epsilon(1e-5));

    // Strictly below both arms.
    for (double rho : {0.2, 0.5, 1.0})
        for (double beta : {0.1, 0.25, 0.6}) {
            const double v = balanced_e0(4, rho, beta);
            CHECK(v < -std::log(beta));
            CHECK(v < gallager_e0(4, rho, beta));
        }

    // Equal arms give exactly half the common value: beta chosen so that
    // -ln beta = E0(C, rho, beta) by construction at rho -> infinity is not
    // available; instead verify the identity algebraically at a synthetic
    // point via the harmonic formula itself.
    const double common = 0.8;
    CHECK(1.0 / (1.0 / common + 1.0 / common) == doctest::Approx(common / 2));

    CHECK(balanced_e0(4, 1e-12, 0.25) == doctest::Approx(0.0).epsilon(1e-9));
    // beta = 0: the outage arm is infinite, E0 comes back alone.
    CHECK(balanced_e0(4, 1.0, 0.0) == doctest::Approx(4 * kLn2));
}

TEST_CASE("optimal split") {
    const double eta = optimal_split(4, 1.0, 0.25, 0.25);
    CHECK(eta == doctest::Approx(0.5330389).epsilon(1e-5));
    // At the split the two arms agree to 1e-12.
    const double e0 = gallager_e0(4, 1.0, 0.25);
    CHECK(eta * e0 ==
          doctest::Approx((1.0 - eta) * -std::log(0.25)).epsilon(1e-12));
    // Feedback nearly free in reliability: everything goes forward.
    CHECK(optimal_split(4, 1.0, 0.25, 1e-12) > 0.95);
    // Symmetric arms: exactly one half.
    const double beta_b_sym = std::exp(-e0);
    CHECK(optimal_split(4, 1.0, 0.25, beta_b_sym) == doctest::Approx(0.5));
}

TEST_CASE("theorem 3 regions") {
    // NoList ceiling at rho = 1 equals the balanced exponent.
    const RegionPoint nl =
        theorem3_region(4, 2, 0.25, 0.25, 1.0, Theorem3Variant::NoList);
    CHECK(nl.exponent == doctest::Approx(0.6473453).epsilon(1e-5));
    CHECK(nl.rate == doctest::Approx(nl.exponent / (4 * kLn2)).epsilon(1e-12));
    CHECK(nl.rate_units == Units::TotalUses);
    CHECK(nl.exponent_units == Units::TotalUses);

    // rho -> 0: rate tends to the forward capacity (the split tends to all
    // forward), exponent 0.
    const RegionPoint nl0 =
        theorem3_region(4, 2, 0.25, 0.25, 0.0, Theorem3Variant::NoList);
    CHECK(nl0.rate == doctest::Approx(0.75));
    CHECK(nl0.exponent == 0.0);

    // List uses C_f - 1 in E0'; at matched rho <= 1 its exponent arm is lower.
    const RegionPoint li =
        theorem3_region(4, 2, 0.25, 0.25, 1.0, Theorem3Variant::List);
    CHECK(li.exponent < nl.exponent);
    CHECK_THROWS_AS(theorem3_region(1, 2, 0.25, 0.25, 1.0, Theorem3Variant::List),
                    std::domain_error);
    CHECK_THROWS_AS(
        theorem3_region(4, 2, 0.25, 0.25, 1.5, Theorem3Variant::NoList),
        std::domain_error);

    // Mixed: rate unconverted (weighted units), exponent balanced (total).
    const RegionPoint mx =
        theorem3_region(4, 2, 0.25, 0.25, 1.0, Theorem3Variant::MixedRbar);
    CHECK(mx.rate ==
          doctest::Approx(gallager_e0(4, 1.0, 0.25) / (4 * kLn2)).epsilon(1e-12));
    CHECK(mx.exponent == doctest::Approx(nl.exponent).epsilon(1e-12));
    CHECK(mx.rate_units == Units::WeightedUses);
    CHECK(mx.exponent_units == Units::TotalUses);

    const RegionPoint mb =
        theorem3_region(4, 2, 0.25, 0.25, 1.0, Theorem3Variant::MixedBoth);
    CHECK(mb.exponent == doctest::Approx(gallager_e0(4, 1.0, 0.25)));
    CHECK(mb.exponent_units == Units::WeightedUses);
}

TEST_CASE("unit conversions") {
    SystemConfig cfg;
    cfg.k_f = 6;
    cfg.k_b = 1;
    cfg.c_f = 4;
    cfg.c_b = 2;
    cfg.beta_f = 0.25;
    cfg.beta_b = 0.25;

    const RegionPoint p = RegionPoint::make(0.7, 1.1, Units::ForwardOnly);
    const RegionPoint tot = convert_units(p, cfg, Units::TotalUses);
    // k_f=6, k_b=1: a fraction 1/7 of uses is feedback.
    CHECK(tot.rate == doctest::Approx(0.7 * 6.0 / 7.0).epsilon(1e-12));
    CHECK(tot.exponent == doctest::Approx(1.1 * 6.0 / 7.0).epsilon(1e-12));

    const RegionPoint w = convert_units(p, cfg, Units::WeightedUses);
    CHECK(w.rate == doctest::Approx(0.7 * 24.0 / 26.0).epsilon(1e-12));

    // Round-trips are exact.
    const RegionPoint back = convert_units(tot, cfg, Units::ForwardOnly);
    CHECK(back.rate == doctest::Approx(p.rate).epsilon(1e-15));
    CHECK(back.exponent == doctest::Approx(p.exponent).epsilon(1e-15));
    const RegionPoint back2 =
        convert_units(convert_units(w, cfg, Units::TotalUses), cfg,
                      Units::ForwardOnly);
    CHECK(back2.rate == doctest::Approx(p.rate).epsilon(1e-15));

    // Symmetric weights: R' = Rbar = R/2.
    SystemConfig sym = cfg;
    sym.k_f = 1;
    sym.k_b = 1;
    sym.c_b = 4;
    const RegionPoint h = convert_units(p, sym, Units::TotalUses);
    const RegionPoint hw = convert_units(p, sym, Units::WeightedUses);
    CHECK(h.rate == doctest::Approx(0.35));
    CHECK(hw.rate == doctest::Approx(0.35));

    // Definition requires k_b >= 1.
    SystemConfig bad = cfg;
    bad.k_b = 0;
    CHECK_THROWS_AS(convert_units(p, bad, Units::TotalUses),
                    std::invalid_argument);
}

TEST_CASE("pascal tail bound") {
    const PascalBound b = pascal_tail_bound(5, 0.5, 0.1);
    CHECK(b.t_check == doctest::Approx(9.0 / b.epsilon));
    // The defining inequality holds strictly at the chosen epsilon.
    CHECK((1.0 - b.epsilon) * 0.5 -
              b.epsilon * (2.0 * std::log(1.0 / b.epsilon) + 3.0) >
          (1.0 - 0.1) * 0.5);

    // m = 1: the exact geometric tail is below the bound for all integer t.
    const PascalBound b1 = pascal_tail_bound(1, 0.5, 0.1);
    for (int t = 0; t <= 50; ++t) {
        const double threshold = b1.t_check + t;
        const double exact = std::exp(-0.5 * std::floor(threshold));
        CHECK(exact <= b1.bound(t) * (1.0 + 1e-12));
    }

    // eps_prime -> 0 forces epsilon down and the offset up.
    const PascalBound small = pascal_tail_bound(5, 0.5, 0.01);
    CHECK(small.epsilon < b.epsilon);
    CHECK(small.t_check > b.t_check);

    // Infeasible request reports the feasible range.
    CHECK_THROWS_AS(pascal_tail_bound(5, 0.5, 0.999), std::domain_error);
    const PascalFeasibility f = pascal_feasibility(0.5, 0.999);
    CHECK(!f.feasible);
    CHECK(f.eps_prime_max == doctest::Approx(1.0 - std::exp(-0.5)));
    // gamma = 0.2 admits 0.1 but not 0.2.
    CHECK(pascal_feasibility(0.2, 0.1).feasible);
    CHECK(!pascal_feasibility(0.2, 0.2).feasible);
}

TEST_CASE("sweep curves shapes") {
    RateGrid grid{0.0, 0.74, 0.01};
    SweepOptions opt;

    SUBCASE("fig3 ordering and rate-0 row") {
        const CurveTable t = sweep_curves(Scenario::Fig3, grid, opt);
        const int rf = t.column_index("focusing");
        const int r1 = t.column_index("thm1");
        const int ra = t.column_index("arq");
        REQUIRE(rf > 0);
        REQUIRE(r1 > 0);
        REQUIRE(ra > 0);
        for (const auto& row : t.rows) {
            CHECK(row[rf] >= row[r1] - 1e-12);
            CHECK(row[r1] >= row[ra] - 1e-12);
        }
        // rate-0 row: the focusing column is -ln beta_f.
        CHECK(t.rows.front()[rf] == doctest::Approx(-std::log(0.25)));
    }

    SUBCASE("fig3 thm1 saturation with beta_b = 0.5") {
        SweepOptions sat = opt;
        sat.beta_b = 0.5;
        const CurveTable t = sweep_curves(Scenario::Fig3, grid, sat);
        const int r1 = t.column_index("thm1");
        double peak = 0.0;
        for (const auto& row : t.rows) peak = std::max(peak, row[r1]);
        CHECK(peak == doctest::Approx(kLn2).epsilon(1e-6));
        // Flat over a range of low rates.
        CHECK(t.rows[5][r1] == doctest::Approx(t.rows[20][r1]).epsilon(1e-12));
    }

    SUBCASE("fig4 exactly one crossover") {
        const CurveTable t = sweep_curves(Scenario::Fig4, grid, opt);
        const int r1 = t.column_index("thm1");
        const int r2 = t.column_index("thm2");
        const int re = t.column_index("switch_envelope");
        int changes = 0;
        int prev_sign = 0;
        for (const auto& row : t.rows) {
            if (row[r1] == 0.0 && row[r2] == 0.0) continue;
            CHECK(row[re] == doctest::Approx(std::max(row[r1], row[r2])));
            const double d = row[r2] - row[r1];
            const int sign = d > 1e-12 ? 1 : (d < -1e-12 ? -1 : 0);
            if (sign != 0 && prev_sign != 0 && sign != prev_sign) ++changes;
            if (sign != 0) prev_sign = sign;
        }
        CHECK(changes == 1);
    }

    SUBCASE("fig5 envelope dominates every member") {
        const CurveTable t = sweep_curves(Scenario::Fig5, grid, opt);
        const int re = t.column_index("envelope");
        REQUIRE(re > 0);
        std::vector<int> members;
        for (size_t c = 0; c < t.columns.size(); ++c)
            if (t.columns[c].rfind("eta_", 0) == 0 ||
                t.columns[c] == "balanced")
                members.push_back(static_cast<int>(c));
        CHECK(members.size() == opt.eta_list.size() + 1);
        for (const auto& row : t.rows)
            for (int c : members) CHECK(row[re] >= row[c] - 1e-12);
    }

    SUBCASE("fig6 includes the mixed-units curve") {
        const CurveTable t = sweep_curves(Scenario::Fig6, grid, opt);
        CHECK(t.column_index("mixed_rbar_dprime") > 0);
        CHECK(t.grid_units == Units::WeightedUses);
        // The mixed curve prices rate in weighted units, so it sits at or
        // above the fully-converted balanced curve.
        const int rm = t.column_index("mixed_rbar_dprime");
        const int rb = t.column_index("balanced_rprime");
        for (const auto& row : t.rows) CHECK(row[rm] >= row[rb] - 1e-12);
    }

    SUBCASE("grid validation") {
        RateGrid bad{0.0, 0.8, 0.01};
        CHECK_THROWS_AS(sweep_curves(Scenario::Fig3, bad, opt),
                        std::invalid_argument);
    }
}
