#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "anycode/exponents.hpp"

namespace anycode {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// Largest rho (capped at rho_cap, or grown unboundedly when rho_cap <= 0)
// whose parametric rate still covers `rate`. rate_of is decreasing in rho.
double rho_for_rate(const std::function<double(double)>& rate_of, double rate,
                    double rho_cap) {
    double hi = rho_cap > 0.0 ? rho_cap : 1.0;
    if (rho_cap <= 0.0) {
        while (rate_of(hi) > rate && hi < 1e9) hi *= 2.0;
    } else if (rate_of(hi) >= rate) {
        return hi;
    }
    double lo = 1e-12;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (rate_of(mid) >= rate)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct Curve {
    std::string name;
    std::function<double(double)> at;  // exponent at grid rate
};

CurveTable assemble(const std::string& name, Units units,
                    const std::vector<double>& grid,
                    const std::vector<Curve>& curves) {
    CurveTable t;
    t.name = name;
    t.grid_units = units;
    t.columns.push_back("rate");
    for (const auto& c : curves) t.columns.push_back(c.name);
    for (double r : grid) {
        std::vector<double> row;
        row.push_back(r);
        for (const auto& c : curves) row.push_back(c.at(r));
        t.rows.push_back(std::move(row));
    }
    return t;
}

// Theorem 1 envelope at finite C_f: best exponent over rho in [0,1] whose
// parametric rate still covers R.
double thm1_envelope(double rate, int c_f, double beta_f, double fb_arm) {
    if (rate >= 1.0 - beta_f) return 0.0;
    auto rate_of = [&](double rho) {
        return gallager_e0(c_f, rho, beta_f) / (rho * c_f * kLn2);
    };
    const double rho = rho_for_rate(rate_of, rate, 1.0);
    return std::min(fb_arm, gallager_e0(c_f, rho, beta_f));
}

// Theorem 2 envelope: rho unbounded, E0 at C_f-1, rate denominator keeps C_f.
double thm2_envelope(double rate, int c_f, double beta_f, double fb_arm) {
    if (rate >= (1.0 - beta_f) * (c_f - 1) / c_f) return 0.0;
    auto rate_of = [&](double rho) {
        return gallager_e0(c_f - 1, rho, beta_f) / (rho * c_f * kLn2);
    };
    const double rho = rho_for_rate(rate_of, rate, 0.0);
    return std::min(fb_arm, gallager_e0(c_f - 1, rho, beta_f));
}

// Theorem 1 scheme at a fixed use split eta_f, in total-use units.
double fixed_eta_curve(double rate_total, double eta_f, int c_f, double beta_f,
                       double beta_b) {
    if (eta_f <= 0.0 || eta_f > 1.0) throw std::domain_error("eta_f out of (0,1]");
    const double fwd_rate = rate_total / eta_f;
    if (fwd_rate >= 1.0 - beta_f) return 0.0;
    auto rate_of = [&](double rho) {
        return gallager_e0(c_f, rho, beta_f) / (rho * c_f * kLn2);
    };
    const double rho = rho_for_rate(rate_of, fwd_rate, 1.0);
    const double fb_arm = -(1.0 - eta_f) * std::log(beta_b);
    return std::min(fb_arm, eta_f * gallager_e0(c_f, rho, beta_f));
}

// Theorem 3 balanced (NoList) curve in total-use units.
double balanced_curve(double rate_total, int c_f, double beta_f, double beta_b) {
    if (rate_total >= 1.0 - beta_f) return 0.0;
    auto rate_of = [&](double rho) {
        const double e0 = gallager_e0(c_f, rho, beta_f);
        const double arm = -std::log(beta_b);
        const double e0p = 1.0 / (1.0 / arm + 1.0 / e0);
        return e0p / (rho * c_f * kLn2);
    };
    const double rho = rho_for_rate(rate_of, rate_total, 1.0);
    const double e0 = gallager_e0(c_f, rho, beta_f);
    return 1.0 / (1.0 / -std::log(beta_b) + 1.0 / e0);
}

// Theorem 3 mixed tradeoff: rate in weighted units stays unconverted, the
// exponent is the balanced one in total-use units.
double mixed_rbar_curve(double rate_bar, int c_f, double beta_f, double beta_b) {
    if (rate_bar >= 1.0 - beta_f) return 0.0;
    auto rate_of = [&](double rho) {
        return gallager_e0(c_f, rho, beta_f) / (rho * c_f * kLn2);
    };
    const double rho = rho_for_rate(rate_of, rate_bar, 1.0);
    const double e0 = gallager_e0(c_f, rho, beta_f);
    return 1.0 / (1.0 / -std::log(beta_b) + 1.0 / e0);
}

std::vector<Curve> shared_resource_family(const SweepOptions& opt) {
    std::vector<Curve> curves;
    curves.push_back({"focusing", [opt](double r) {
                          return r > 0 ? focusing_bound_alpha(r, opt.beta_f)
                                       : -std::log(opt.beta_f);
                      }});
    SystemConfig arq_cfg;
    arq_cfg.c_f = opt.c_f;
    arq_cfg.c_b = opt.c_b;
    arq_cfg.beta_f = opt.beta_f;
    arq_cfg.beta_b = opt.beta_b;
    curves.push_back({"arq_split", [arq_cfg](double r) {
                          return 0.5 * arq_bound_alpha(r / 0.5, arq_cfg);
                      }});
    curves.push_back({"fec", [opt](double r) {
                          return sphere_packing_exponent(
                              r, ErasureParams(opt.beta_f, opt.c_f));
                      }});
    std::vector<std::function<double(double)>> family;
    for (double eta : opt.eta_list) {
        auto fn = [opt, eta](double r) {
            return fixed_eta_curve(r, eta, opt.c_f, opt.beta_f, opt.beta_b);
        };
        family.push_back(fn);
        char buf[32];
        std::snprintf(buf, sizeof buf, "eta_%.3f", eta);
        curves.push_back({buf, fn});
    }
    auto balanced = [opt](double r) {
        return balanced_curve(r, opt.c_f, opt.beta_f, opt.beta_b);
    };
    family.push_back(balanced);
    curves.push_back({"balanced", balanced});
    curves.push_back({"envelope", [family](double r) {
                          double best = 0.0;
                          for (const auto& f : family) best = std::max(best, f(r));
                          return best;
                      }});
    return curves;
}

}  // namespace

CurveTable sweep_curves(Scenario scenario, const RateGrid& grid,
                        const SweepOptions& opt) {
    const std::vector<double> pts = grid.points();
    const double cap = 1.0 - opt.beta_f;
    for (double r : pts)
        if (r < 0.0 || r >= cap)
            throw std::invalid_argument("sweep_curves: grid must lie in [0, capacity)");

    const double fb_arm =
        static_cast<double>(opt.k_b) / opt.k_f * -std::log(opt.beta_b);

    switch (scenario) {
        case Scenario::Fig3: {
            // C_f -> infinity limit; E_r and E_sp coincide there.
            std::vector<Curve> curves;
            curves.push_back({"focusing", [opt](double r) {
                                  return r > 0 ? focusing_bound_alpha(r, opt.beta_f)
                                               : -std::log(opt.beta_f);
                              }});
            curves.push_back({"thm1", [opt, fb_arm](double r) {
                                  const double f =
                                      r > 0 ? focusing_bound_alpha(r, opt.beta_f)
                                            : -std::log(opt.beta_f);
                                  return std::min(fb_arm, f);
                              }});
            curves.push_back({"arq", [opt](double r) {
                                  return arq_bound_alpha_inf_cf(r, opt.beta_f,
                                                                opt.beta_b);
                              }});
            curves.push_back({"fec_sp", [opt](double r) {
                                  return fec_exponent_inf(r, opt.beta_f);
                              }});
            curves.push_back({"fec_r", [opt](double r) {
                                  return fec_exponent_inf(r, opt.beta_f);
                              }});
            return assemble("fig3", Units::ForwardOnly, pts, curves);
        }
        case Scenario::Fig4: {
            std::vector<Curve> curves;
            curves.push_back({"focusing", [opt](double r) {
                                  return r > 0 ? focusing_bound_alpha(r, opt.beta_f)
                                               : -std::log(opt.beta_f);
                              }});
            auto thm1 = [opt, fb_arm](double r) {
                return thm1_envelope(r, opt.c_f, opt.beta_f, fb_arm);
            };
            auto thm2 = [opt, fb_arm](double r) {
                return thm2_envelope(r, opt.c_f, opt.beta_f, fb_arm);
            };
            curves.push_back({"thm1", thm1});
            curves.push_back({"thm2", thm2});
            curves.push_back({"switch_envelope", [thm1, thm2](double r) {
                                  return std::max(thm1(r), thm2(r));
                              }});
            return assemble("fig4", Units::ForwardOnly, pts, curves);
        }
        case Scenario::Fig5:
        case Scenario::Custom: {
            return assemble(scenario == Scenario::Fig5 ? "fig5" : "custom",
                            Units::TotalUses, pts, shared_resource_family(opt));
        }
        case Scenario::Fig6: {
            std::vector<Curve> curves;
            curves.push_back({"focusing_R", [opt](double r) {
                                  return r > 0 ? focusing_bound_alpha(r, opt.beta_f)
                                               : -std::log(opt.beta_f);
                              }});
            curves.push_back({"mixed_rbar_dprime", [opt](double r) {
                                  return mixed_rbar_curve(r, opt.c_f, opt.beta_f,
                                                          opt.beta_b);
                              }});
            curves.push_back({"balanced_rprime", [opt](double r) {
                                  return balanced_curve(r, opt.c_f, opt.beta_f,
                                                        opt.beta_b);
                              }});
            curves.push_back({"fec_R", [opt](double r) {
                                  return sphere_packing_exponent(
                                      r, ErasureParams(opt.beta_f, opt.c_f));
                              }});
            return assemble("fig6", Units::WeightedUses, pts, curves);
        }
    }
    throw std::logic_error("sweep_curves: unreachable");
}

}  // namespace anycode
