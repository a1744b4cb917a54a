#include "anycode/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace anycode {

namespace {

constexpr double kLn2 = 0.6931471805599453;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest x in [lo, hi] with pred(x) true, for pred true on a prefix.
// Here used through decreasing objectives only.
double bisect_decreasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, int iters = 200) {
    // f decreasing, f(lo) >= target >= f(hi); returns x with f(x) ~= target.
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double neg_log(double p) { return p > 0.0 ? -std::log(p) : kInf; }

// Golden-section maximization of a unimodal objective on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-9) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return std::max(f(0.5 * (a + b)), std::max(fc, fd));
}

// rho maximizing E0(C,rho) - rho R C ln2 over [0,1] grid + refinement,
// per the usual two-stage scheme: coarse 1e-3 grid, golden section after.
double optimize_rho(const ErasureParams& p, double rate, double rho_hi) {
    auto objective = [&](double rho) {
        return gallager_e0(p, rho) - rho * rate * p.c_bits * kLn2;
    };
    // Coarse grid to bracket the maximum (objective is concave in rho).
    const double step = 1e-3 * std::max(1.0, rho_hi);
    double best_rho = 0.0, best = 0.0;
    for (double rho = 0.0; rho <= rho_hi + 1e-12; rho += step) {
        const double v = objective(std::min(rho, rho_hi));
        if (v > best) {
            best = v;
            best_rho = std::min(rho, rho_hi);
        }
    }
    const double lo = std::max(0.0, best_rho - step);
    const double hi = std::min(rho_hi, best_rho + step);
    return std::max(0.0, golden_max(objective, lo, hi));
}

}  // namespace

const char* units_name(Units u) {
    switch (u) {
        case Units::ForwardOnly: return "forward";
        case Units::TotalUses: return "total";
        case Units::WeightedUses: return "weighted";
    }
    return "?";
}

SplitRatios SplitRatios::from_config(const SystemConfig& cfg) {
    cfg.ensure_valid();
    SplitRatios s{};
    const double k = cfg.k_f + cfg.k_b;
    s.eta_f = cfg.k_f / k;
    s.eta_b = cfg.k_b / k;
    const double w = static_cast<double>(cfg.k_f) * cfg.c_f +
                     static_cast<double>(cfg.k_b) * cfg.c_b;
    s.xi_f = static_cast<double>(cfg.k_f) * cfg.c_f / w;
    s.xi_b = static_cast<double>(cfg.k_b) * cfg.c_b / w;
    return s;
}

double gallager_e0(const ErasureParams& params, double rho) {
    if (rho < 0.0) throw std::domain_error("gallager_e0: rho must be >= 0");
    if (rho == 0.0) return 0.0;
    const double arg =
        params.beta + std::exp2(-rho * params.c_bits) * (1.0 - params.beta);
    return -std::log(arg);
}

double gallager_e0(int c_bits, double rho, double beta) {
    return gallager_e0(ErasureParams(beta, c_bits), rho);
}

double gallager_e0_inf(double s, double beta) {
    if (s < 0.0) throw std::domain_error("gallager_e0_inf: s must be >= 0");
    if (s == 0.0) return 0.0;
    return -std::log(beta + std::exp2(-s) * (1.0 - beta));
}

double focusing_bound_rate(double alpha, double beta_f) {
    if (beta_f < 0.0 || beta_f >= 1.0)
        throw std::domain_error("focusing_bound_rate: beta_f must be in [0,1)");
    if (beta_f == 0.0) {
        // Lossless channel: every exponent is reachable below rate 1.
        if (alpha <= 0.0) throw std::domain_error("focusing_bound_rate: alpha must be > 0");
        return 1.0;
    }
    const double alpha_max = -std::log(beta_f);
    if (!(alpha > 0.0 && alpha < alpha_max))
        throw std::domain_error(
            "focusing_bound_rate: alpha must be in (0, -ln beta_f)");
    const double denom =
        alpha + std::log((1.0 - beta_f) / (1.0 - std::exp(alpha) * beta_f));
    return alpha / denom;
}

double focusing_bound_alpha(double rate, double beta_f) {
    if (beta_f == 0.0) return rate < 1.0 ? kInf : 0.0;
    const double cap = 1.0 - beta_f;
    const double alpha_max = -std::log(beta_f);
    if (rate <= 0.0) return alpha_max;
    if (rate >= cap) return 0.0;
    auto f = [&](double a) { return focusing_bound_rate(a, beta_f); };
    return bisect_decreasing(f, rate, 1e-12, alpha_max - 1e-12);
}

RegionPoint theorem1_region(const SystemConfig& cfg, double rho) {
    cfg.ensure_valid();
    if (rho < 0.0 || rho > 1.0)
        throw std::domain_error("theorem1_region: rho must be in [0,1]");
    if (rho == 0.0)
        return RegionPoint::make(1.0 - cfg.beta_f, 0.0, Units::ForwardOnly);
    const double e0 = gallager_e0(cfg.c_f, rho, cfg.beta_f);
    const double fb_arm =
        static_cast<double>(cfg.k_b) / cfg.k_f * neg_log(cfg.beta_b);
    const double rate = e0 / (rho * cfg.c_f * kLn2);
    return RegionPoint::make(rate, std::min(fb_arm, e0), Units::ForwardOnly);
}

RegionPoint theorem2_region(const SystemConfig& cfg, double rho) {
    cfg.ensure_valid();
    if (cfg.c_f < 2 || cfg.c_b < 2)
        throw std::domain_error("theorem2_region: requires C_f >= 2 and C_b >= 2");
    if (rho < 0.0) throw std::domain_error("theorem2_region: rho must be >= 0");
    const double frac = static_cast<double>(cfg.c_f - 1) / cfg.c_f;
    if (rho == 0.0)
        return RegionPoint::make((1.0 - cfg.beta_f) * frac, 0.0, Units::ForwardOnly);
    const double e0 = gallager_e0(cfg.c_f - 1, rho, cfg.beta_f);
    const double fb_arm =
        static_cast<double>(cfg.k_b) / cfg.k_f * neg_log(cfg.beta_b);
    const double rate = e0 / (rho * cfg.c_f * kLn2);
    return RegionPoint::make(rate, std::min(fb_arm, e0), Units::ForwardOnly);
}

double random_coding_exponent(double rate, const ErasureParams& params) {
    if (rate < 0.0) throw std::domain_error("random_coding_exponent: rate must be >= 0");
    const double cap = 1.0 - params.beta;
    if (rate >= cap) return 0.0;
    if (rate == 0.0) return gallager_e0(params, 1.0);
    return optimize_rho(params, rate, 1.0);
}

double sphere_packing_exponent(double rate, const ErasureParams& params) {
    if (rate < 0.0) throw std::domain_error("sphere_packing_exponent: rate must be >= 0");
    const double cap = 1.0 - params.beta;
    if (rate >= cap) return 0.0;
    if (rate == 0.0) {
        // Supremum over rho of E0 alone.
        return params.beta > 0.0 ? -std::log(params.beta) : kInf;
    }
    auto objective = [&](double rho) {
        return gallager_e0(params, rho) - rho * rate * params.c_bits * kLn2;
    };
    // Double the bracket until the objective is past its peak; E0 is bounded
    // by -ln beta so the linear term eventually wins for rate > 0.
    double hi = 1.0;
    while (objective(hi * 2.0) > objective(hi) && hi < 1e9) hi *= 2.0;
    return optimize_rho(params, rate, hi * 2.0);
}

double fec_exponent_inf(double rate, double beta) {
    if (rate < 0.0) throw std::domain_error("fec_exponent_inf: rate must be >= 0");
    const double cap = 1.0 - beta;
    if (rate >= cap) return 0.0;
    if (rate == 0.0) return neg_log(beta);
    // Stationary point in the s = rho*C parametrization:
    // 2^-s (1-beta) = rate*beta/(1-rate).
    const double value = std::log((1.0 - rate) / beta) -
                         rate * std::log((1.0 - rate) * (1.0 - beta) / (rate * beta));
    return std::max(0.0, value);
}

ArqAlphaLimits arq_alpha_limits(double beta_f, double beta_b) {
    const double s = (1.0 - beta_f) * (1.0 - beta_b);
    return ArqAlphaLimits{neg_log(s), neg_log(1.0 - s)};
}

namespace {
double arq_rate_core(double alpha, double beta_f, double beta_b) {
    const double s = (1.0 - beta_f) * (1.0 - beta_b);
    if (s <= 0.0) return 0.0;
    const double natural = neg_log(1.0 - s);
    if (!(alpha > 0.0 && alpha < natural))
        throw std::domain_error(
            "arq_bound_rate: alpha outside (0, -ln(1-(1-beta_f)(1-beta_b)))");
    const double denom = alpha + std::log(s / (1.0 - std::exp(alpha) * (1.0 - s)));
    return alpha / denom;
}
}  // namespace

double arq_bound_rate(double alpha, const SystemConfig& cfg) {
    cfg.ensure_valid();
    const double frac = static_cast<double>(cfg.c_f - 1) / cfg.c_f;
    return frac * arq_rate_core(alpha, cfg.beta_f, cfg.beta_b);
}

double arq_bound_rate_inf_cf(double alpha, double beta_f, double beta_b) {
    return arq_rate_core(alpha, beta_f, beta_b);
}

double arq_rate_ceiling(double beta_f, double beta_b, int c_f) {
    const double s = (1.0 - beta_f) * (1.0 - beta_b);
    if (c_f <= 0) return s;
    return s * (c_f - 1) / c_f;
}

namespace {
double arq_alpha_core(double rate, double beta_f, double beta_b, double frac) {
    const double s = (1.0 - beta_f) * (1.0 - beta_b);
    const double natural = neg_log(1.0 - s);
    if (rate <= 0.0) return natural;
    if (rate >= frac * s) return 0.0;
    auto f = [&](double a) { return frac * arq_rate_core(a, beta_f, beta_b); };
    return bisect_decreasing(f, rate, 1e-12, natural - 1e-12);
}
}  // namespace

double arq_bound_alpha(double rate, const SystemConfig& cfg) {
    cfg.ensure_valid();
    return arq_alpha_core(rate, cfg.beta_f, cfg.beta_b,
                          static_cast<double>(cfg.c_f - 1) / cfg.c_f);
}

double arq_bound_alpha_inf_cf(double rate, double beta_f, double beta_b) {
    return arq_alpha_core(rate, beta_f, beta_b, 1.0);
}

double balanced_e0(int c_f, double rho, double beta) {
    if (rho <= 0.0) return 0.0;
    const double e0 = gallager_e0(c_f, rho, beta);
    if (beta <= 0.0) return e0;  // outage arm infinite
    const double arm = -std::log(beta);
    return 1.0 / (1.0 / arm + 1.0 / e0);
}

double optimal_split(int c_f, double rho, double beta_f, double beta_b) {
    if (!(beta_b > 0.0 && beta_b < 1.0))
        throw std::domain_error("optimal_split: beta_b must be in (0,1)");
    if (rho <= 0.0) throw std::domain_error("optimal_split: rho must be > 0");
    const double arm = -std::log(beta_b);
    const double e0 = gallager_e0(c_f, rho, beta_f);
    return arm / (e0 + arm);
}

RegionPoint theorem3_region(int c_f, int c_b, double beta_f, double beta_b,
                            double rho, Theorem3Variant variant) {
    if (c_f < 1 || c_b < 1)
        throw std::domain_error("theorem3_region: packet sizes must be >= 1");
    if (!(beta_f > 0.0 && beta_f < 1.0) || !(beta_b > 0.0 && beta_b < 1.0))
        throw std::domain_error("theorem3_region: betas must be in (0,1)");
    const bool list = variant == Theorem3Variant::List;
    if (list && (c_f < 2 || c_b < 2))
        throw std::domain_error("theorem3_region: List variant requires C_f, C_b >= 2");
    if (rho < 0.0 || (!list && rho > 1.0))
        throw std::domain_error("theorem3_region: rho out of range for variant");

    const double fb_arm = -std::log(beta_b);
    auto harmonic = [&](double e0) { return 1.0 / (1.0 / fb_arm + 1.0 / e0); };

    switch (variant) {
        case Theorem3Variant::NoList: {
            if (rho == 0.0)
                return RegionPoint::make(1.0 - beta_f, 0.0, Units::TotalUses);
            const double e0p = harmonic(gallager_e0(c_f, rho, beta_f));
            return RegionPoint::make(e0p / (rho * c_f * kLn2), e0p, Units::TotalUses);
        }
        case Theorem3Variant::List: {
            const double frac = static_cast<double>(c_f - 1) / c_f;
            if (rho == 0.0)
                return RegionPoint::make((1.0 - beta_f) * frac, 0.0, Units::TotalUses);
            const double e0p = harmonic(gallager_e0(c_f - 1, rho, beta_f));
            return RegionPoint::make(e0p / (rho * c_f * kLn2), e0p, Units::TotalUses);
        }
        case Theorem3Variant::MixedRbar: {
            if (rho == 0.0)
                return RegionPoint{1.0 - beta_f, 0.0, Units::WeightedUses,
                                   Units::TotalUses};
            const double e0 = gallager_e0(c_f, rho, beta_f);
            return RegionPoint{e0 / (rho * c_f * kLn2), harmonic(e0),
                               Units::WeightedUses, Units::TotalUses};
        }
        case Theorem3Variant::MixedBoth: {
            if (rho == 0.0)
                return RegionPoint::make(1.0 - beta_f, 0.0, Units::WeightedUses);
            const double e0 = gallager_e0(c_f, rho, beta_f);
            return RegionPoint::make(e0 / (rho * c_f * kLn2), e0,
                                     Units::WeightedUses);
        }
    }
    throw std::logic_error("theorem3_region: unreachable");
}

RegionPoint convert_units(const RegionPoint& point, const SystemConfig& cfg,
                          Units target) {
    cfg.ensure_valid();
    const SplitRatios s = SplitRatios::from_config(cfg);
    auto factor = [&](Units u) {
        switch (u) {
            case Units::ForwardOnly: return 1.0;
            case Units::TotalUses: return s.eta_f;
            case Units::WeightedUses: return s.xi_f;
        }
        return 1.0;
    };
    RegionPoint out = point;
    out.rate = point.rate / factor(point.rate_units) * factor(target);
    out.exponent = point.exponent / factor(point.exponent_units) * factor(target);
    out.rate_units = target;
    out.exponent_units = target;
    return out;
}

PascalFeasibility pascal_feasibility(double gamma, double eps_prime) {
    if (gamma <= 0.0) throw std::domain_error("pascal: gamma must be > 0");
    // The Bernoulli reinterpretation bounds the lower tail of a process with
    // success probability 1 - exp(-gamma); the slack cannot exceed it.
    const double cap = 1.0 - std::exp(-gamma);
    return PascalFeasibility{eps_prime > 0.0 && eps_prime < cap, cap};
}

PascalBound pascal_tail_bound(int m, double gamma, double eps_prime) {
    if (m < 1) throw std::domain_error("pascal_tail_bound: m must be >= 1");
    const PascalFeasibility feas = pascal_feasibility(gamma, eps_prime);
    if (!feas.feasible)
        throw std::domain_error(
            "pascal_tail_bound: infeasible eps_prime; feasible range is (0, " +
            std::to_string(feas.eps_prime_max) + ")");
    // Find the largest epsilon with
    //   (1-eps) gamma - eps (2 ln(1/eps) + 3) > (1-eps') gamma,
    // i.e. g(eps) = eps' gamma - eps gamma - 2 eps ln(1/eps) - 3 eps > 0.
    // g decreases from eps' gamma at 0+, so bisect for its root.
    auto g = [&](double eps) {
        return eps_prime * gamma - eps * gamma - 2.0 * eps * std::log(1.0 / eps) -
               3.0 * eps;
    };
    double lo = 1e-12;
    double hi = std::min(eps_prime, feas.eps_prime_max);
    double eps;
    if (g(hi) > 0.0) {
        eps = hi;
    } else {
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        // Back off from the root so the strict inequality survives any
        // rearrangement of the same expression.
        eps = lo * (1.0 - 1e-9);
    }
    PascalBound b{};
    b.m = m;
    b.gamma = gamma;
    b.eps_prime = eps_prime;
    b.epsilon = eps;
    b.t_check = (2.0 * m - 1.0) / eps;
    return b;
}

std::vector<double> RateGrid::points() const {
    if (!(step > 0.0) || hi < lo)
        throw std::invalid_argument("RateGrid: need step > 0 and hi >= lo");
    std::vector<double> out;
    for (double r = lo; r <= hi + 1e-12; r += step) out.push_back(std::min(r, hi));
    if (out.empty()) out.push_back(lo);
    return out;
}

int CurveTable::column_index(const std::string& col) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == col) return static_cast<int>(i);
    return -1;
}

}  // namespace anycode
