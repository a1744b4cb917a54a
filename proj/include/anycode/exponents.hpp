#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "anycode/channel.hpp"

namespace anycode {

/// Unit system for rates and exponents. Forward-only counts forward channel
/// uses as free-feedback tradition does; total counts every channel use;
/// weighted counts channel uses weighted by packet bit size.
enum class Units { ForwardOnly, TotalUses, WeightedUses };

const char* units_name(Units u);

/// One (rate, exponent) point of an achievable region. Rate and exponent
/// normally share a unit system; the mixed-tradeoff region of Theorem 3
/// prices rate in weighted uses while the exponent stays in total uses, so
/// the two tags are stored separately.
struct RegionPoint {
    double rate = 0.0;
    double exponent = 0.0;
    Units rate_units = Units::ForwardOnly;
    Units exponent_units = Units::ForwardOnly;

    static RegionPoint make(double rate, double exponent, Units both) {
        return RegionPoint{rate, exponent, both, both};
    }
};

/// Fractions of channel uses (eta) and of weighted channel-use bits (xi)
/// allocated to each direction.
struct SplitRatios {
    double eta_f, eta_b;
    double xi_f, xi_b;

    static SplitRatios from_config(const SystemConfig& cfg);
};

// --------------------------------------------------------------------------
// Gallager function and bounds

/// E0(C, rho) = -ln(beta + 2^(-rho C) (1-beta)), in nats per channel use.
/// Zero at rho=0, strictly increasing and concave in rho, supremum -ln beta.
double gallager_e0(const ErasureParams& params, double rho);
double gallager_e0(int c_bits, double rho, double beta);

/// C_f -> infinity form of E0 parametrized by s = rho*C_f.
double gallager_e0_inf(double s, double beta);

/// Uncertainty-focusing bound: the rate (in C_f-bit packets per forward use)
/// below which fixed-delay exponent alpha is achievable with perfect
/// feedback. Valid for 0 < alpha < -ln(beta_f); strictly decreasing with
/// limit 1-beta_f as alpha -> 0.
double focusing_bound_rate(double alpha, double beta_f);

/// Inverse of the focusing bound: the exponent at a given rate. Returns
/// -ln(beta_f) at rate 0 and 0 at or above capacity.
double focusing_bound_alpha(double rate, double beta_f);

/// Theorem 1 parametric region point at a given rho in [0,1]:
/// exponent min(-(k_b/k_f) ln beta_b, E0(C_f, rho)), rate E0/(rho C_f ln 2).
/// Units are forward-only. rho = 0 returns the zero-exponent capacity
/// endpoint in closed form.
RegionPoint theorem1_region(const SystemConfig& cfg, double rho);

/// Theorem 2 (list-decoding) parametric region point, rho in [0, inf).
/// Requires C_f >= 2 and C_b >= 2; one forward bit is spent on the round
/// header so E0 is evaluated at C_f - 1.
RegionPoint theorem2_region(const SystemConfig& cfg, double rho);

/// Random-coding exponent E_r(R) = max_{rho in [0,1]} E0(C,rho) - rho R C ln2.
/// R in packets of C bits per use; result in nats per use. Zero at and above
/// capacity 1-beta.
double random_coding_exponent(double rate, const ErasureParams& params);

/// Sphere-packing exponent: same objective with rho in [0, inf). Returns
/// +infinity only for rate = 0 on a lossless channel.
double sphere_packing_exponent(double rate, const ErasureParams& params);

/// C_f -> infinity limit of the forward-error-correction exponent (E_r and
/// E_sp coincide in that limit).
double fec_exponent_inf(double rate, double beta);

/// Pure-ARQ (repeat until success, 1-bit sequence numbers) achievable rate
/// at exponent alpha. The natural domain is 0 < alpha <
/// -ln(1-(1-beta_f)(1-beta_b)); see arq_alpha_limits for the range the
/// source text states.
double arq_bound_rate(double alpha, const SystemConfig& cfg);
double arq_bound_rate_inf_cf(double alpha, double beta_f, double beta_b);

struct ArqAlphaLimits {
    double stated;   // -ln((1-beta_f)(1-beta_b))
    double natural;  // -ln(1-(1-beta_f)(1-beta_b)); formula pole
};
ArqAlphaLimits arq_alpha_limits(double beta_f, double beta_b);

/// ARQ long-run rate ceiling (alpha -> 0 limit). c_f <= 0 selects the
/// infinite-packet limit, dropping the (C_f-1)/C_f header factor.
double arq_rate_ceiling(double beta_f, double beta_b, int c_f);

/// Inverse of the ARQ rate bound: exponent at a given rate (0 above the
/// ceiling, the natural alpha limit at rate 0).
double arq_bound_alpha(double rate, const SystemConfig& cfg);
double arq_bound_alpha_inf_cf(double rate, double beta_f, double beta_b);

/// Balanced exponent: harmonic combination ((-ln beta)^-1 + E0(C,rho)^-1)^-1.
/// Always strictly below both arms; beta = 0 degenerates to E0 itself.
/// The outage arm and E0 share the single beta parameter; region evaluation
/// for asymmetric channels combines the arms explicitly (see
/// theorem3_region).
double balanced_e0(int c_f, double rho, double beta);

/// Split of channel uses that equalizes the forward coding exponent with the
/// feedback outage exponent: eta_f* = (-ln beta_b) / (E0(C_f,rho) - ln beta_b).
double optimal_split(int c_f, double rho, double beta_f, double beta_b);

enum class Theorem3Variant { NoList, List, MixedRbar, MixedBoth };

/// Theorem 3 region point for the chosen variant at parameter rho.
/// NoList/MixedRbar/MixedBoth take rho in [0,1]; List takes rho in [0,inf)
/// and needs C_f, C_b >= 2. The exponent's outage arm uses beta_b, matching
/// the equalizing-split derivation.
RegionPoint theorem3_region(int c_f, int c_b, double beta_f, double beta_b,
                            double rho, Theorem3Variant variant);

/// Exact algebraic conversion of a region point between unit systems.
/// Converting there and back is the identity.
RegionPoint convert_units(const RegionPoint& point, const SystemConfig& cfg,
                          Units target);

// --------------------------------------------------------------------------
// Pascal (negative binomial) tail bound

/// The computable form of the Pascal tail lemma: for iid geometrics with
/// P(T' > t) = exp(-gamma t), the sum of 2m-1 of them satisfies
/// P(sum > t + t_check) < exp(-gamma (1-eps_prime) (t + t_check)) for all
/// t > 0, with t_check = (2m-1)/epsilon for a small epsilon found from
/// (gamma, eps_prime).
struct PascalBound {
    int m;
    double gamma;
    double eps_prime;
    double epsilon;  // slack found by bisection
    double t_check;  // (2m-1)/epsilon

    double bound(double t) const {
        return std::exp(-gamma * (1.0 - eps_prime) * (t + t_check));
    }
};

struct PascalFeasibility {
    bool feasible;
    double eps_prime_max;  // requested eps_prime must lie in (0, this)
};

/// Feasibility of (gamma, eps_prime): the virtual Bernoulli process behind
/// the bound has success probability 1 - exp(-gamma), which caps the usable
/// exponent slack.
PascalFeasibility pascal_feasibility(double gamma, double eps_prime);

/// Computes the (t_check, bound) pair. Throws std::domain_error naming the
/// feasible eps_prime range when the request is infeasible.
PascalBound pascal_tail_bound(int m, double gamma, double eps_prime);

// --------------------------------------------------------------------------
// Curve sweeps (figure reproduction)

enum class Scenario { Fig3, Fig4, Fig5, Fig6, Custom };

struct RateGrid {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    std::vector<double> points() const;
};

struct SweepOptions {
    double beta_f = 0.25;
    double beta_b = 0.25;
    int c_f = 4;
    int c_b = 2;
    int k_f = 1;
    int k_b = 1;
    std::vector<double> eta_list = {0.5, 0.6, 0.7, 0.8, 0.9};
};

/// One curve table: a shared rate grid in `grid_units` plus one exponent
/// column per named curve. Column 0 is the rate.
struct CurveTable {
    std::string name;
    Units grid_units = Units::ForwardOnly;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& col) const;
};

/// Emits every curve the corresponding figure plots, over the given rate
/// grid. Envelope columns are pointwise maxima over the swept family.
CurveTable sweep_curves(Scenario scenario, const RateGrid& grid,
                        const SweepOptions& opt);

}  // namespace anycode
