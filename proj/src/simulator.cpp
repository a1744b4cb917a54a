#include "anycode/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "anycode/exponents.hpp"

namespace anycode {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

void TrialSpec::ensure_valid() const {
    config.ensure_valid();
    if (!(rate > 0.0)) throw std::invalid_argument("TrialSpec: rate must be > 0");
    if (horizon_cycles < 1)
        throw std::invalid_argument("TrialSpec: horizon must be >= 1 cycle");
    if (trials < 0) throw std::invalid_argument("TrialSpec: trials must be >= 0");
    int prev = -1;
    for (int d : delays) {
        if (d < 0 || d <= prev)
            throw std::invalid_argument("TrialSpec: delays must be increasing and >= 0");
        prev = d;
    }
}

namespace {

TrialTrace run_one_trial(const TrialSpec& spec, int trial, bool record_events) {
    SystemConfig cfg = spec.config;
    cfg.seed = SeededRandomSource::trial_seed(spec.config.seed,
                                              static_cast<uint64_t>(trial));
    TrialTrace out;
    out.trial_id = trial;
    try {
        auto session = make_session(spec.scheme, cfg, spec.rate, record_events);
        session->run_cycles(spec.horizon_cycles);
        if (auto* s = dynamic_cast<NoListSession*>(session.get())) {
            out.blocks = s->blocks();
            out.committed = s->committed_blocks();
            out.final_encoder_pos = s->encoder_block();
            out.final_decoder_pos = s->decoder_block();
        } else if (auto* s = dynamic_cast<ListSession*>(session.get())) {
            out.blocks = s->blocks();
            out.committed = s->committed_blocks();
            out.final_encoder_pos = s->encoder_round();
            out.final_decoder_pos = s->decoder_round();
        } else if (auto* s = dynamic_cast<ArqSession*>(session.get())) {
            out.packet_commits = s->packet_commits();
            out.committed = s->accepted_packets();
            out.final_encoder_pos = s->pending_packet_index();
            out.final_decoder_pos = s->accepted_packets();
        }
        if (record_events) out.event_text = format_trace(session->events());
    } catch (const ProtocolViolation& v) {
        throw std::runtime_error("trial " + std::to_string(trial) +
                                 ": " + v.what());
    }
    return out;
}

}  // namespace

TraceCollection run_trials(const TrialSpec& spec, bool record_events) {
    spec.ensure_valid();
    TraceCollection out;
    out.spec = spec;
    out.trials.resize(spec.trials);
    if (spec.trials == 0) return out;

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        std::min<unsigned>(hw, static_cast<unsigned>(spec.trials));
    if (workers <= 1) {
        for (int t = 0; t < spec.trials; ++t)
            out.trials[t] = run_one_trial(spec, t, record_events);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::string> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int t = static_cast<int>(w); t < spec.trials;
                     t += static_cast<int>(workers))
                    out.trials[t] = run_one_trial(spec, t, record_events);
            } catch (const std::exception& e) {
                errors[w] = e.what();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    return out;
}

TailEstimate fit_tail(const std::vector<uint64_t>& samples, double ccdf_max) {
    TailEstimate est;
    est.samples = samples.size();
    if (samples.size() < 100) {
        est.note = "too few samples";
        return est;
    }
    std::vector<uint64_t> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    if (sorted.front() == sorted.back()) {
        est.note = "constant sample, no tail";
        return est;
    }

    // Empirical CCDF at each distinct support value: P(X > t).
    std::vector<std::pair<int64_t, double>> pts;
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double ccdf = static_cast<double>(sorted.size() - j) / n;
        if (j < sorted.size()) pts.push_back({static_cast<int64_t>(sorted[i]), ccdf});
        i = j;
    }
    // Drop the first three support points and anything with < 10 tail hits.
    // Weight each point by the inverse variance of its log CCDF,
    // var(log p^) ~ (1-p)/(n p); unweighted least squares lets the noisy
    // far-tail points swing the slope.
    struct Pt {
        double x, y, w;
    };
    std::vector<Pt> xy;
    for (size_t k = 0; k < pts.size(); ++k) {
        if (k < 3) continue;
        if (pts[k].second > ccdf_max) continue;
        if (pts[k].second * n < 10.0) break;
        const double p = pts[k].second;
        xy.push_back({static_cast<double>(pts[k].first), std::log(p),
                      n * p / (1.0 - p + 1e-12)});
    }
    if (xy.size() < 3) {
        est.note = "insufficient tail mass in the fit range";
        return est;
    }
    double sw = 0, sx = 0, sy = 0;
    for (const Pt& p : xy) {
        sw += p.w;
        sx += p.w * p.x;
        sy += p.w * p.y;
    }
    const double xbar = sx / sw, ybar = sy / sw;
    double sxx = 0, sxy = 0;
    for (const Pt& p : xy) {
        sxx += p.w * (p.x - xbar) * (p.x - xbar);
        sxy += p.w * (p.x - xbar) * (p.y - ybar);
    }
    const double slope = sxy / sxx;
    const double icept = ybar - slope * xbar;
    double chi2 = 0;
    for (const Pt& p : xy) {
        const double r = p.y - (icept + slope * p.x);
        chi2 += p.w * r * r;
    }
    const double m = static_cast<double>(xy.size());
    const double scale = m > 2 ? std::max(1.0, chi2 / (m - 2.0)) : 1.0;
    est.ok = true;
    est.slope = -slope;
    est.intercept = icept;
    est.std_error = std::sqrt(scale / sxx);
    est.t_lo = static_cast<int64_t>(xy.front().x);
    est.t_hi = static_cast<int64_t>(xy.back().x);
    est.points = static_cast<int>(xy.size());
    return est;
}

namespace {

// First cycle t with floor(rate*k_f*c_f*t) >= bit index (1-based).
uint64_t bit_arrival_cycle(uint64_t bit, double bits_per_cycle) {
    uint64_t t = static_cast<uint64_t>(
        std::ceil(static_cast<double>(bit) / bits_per_cycle - 1e-9));
    auto arrived = [&](uint64_t tt) {
        return static_cast<uint64_t>(
            std::floor(bits_per_cycle * static_cast<double>(tt) + 1e-9));
    };
    while (arrived(t) < bit) ++t;
    while (t > 0 && arrived(t - 1) >= bit) --t;
    return t;
}

}  // namespace

DelayErrorCurve bit_error_vs_delay(const TraceCollection& traces) {
    const TrialSpec& spec = traces.spec;
    spec.ensure_valid();
    if (spec.delays.empty())
        throw std::invalid_argument("bit_error_vs_delay: empty delay grid");
    const SystemConfig& cfg = spec.config;
    const double bits_per_cycle =
        spec.rate * cfg.k_f * cfg.c_f;
    const uint64_t horizon_use = spec.horizon_cycles * cfg.k_f;
    const int dmax = spec.delays.back();

    // Fixed population: bit positions whose deadline fits the horizon at
    // every delay in the grid.
    uint64_t max_bits = static_cast<uint64_t>(
        std::floor(bits_per_cycle * static_cast<double>(spec.horizon_cycles)));
    std::vector<uint64_t> arrival(max_bits + 1, 0);
    uint64_t n_positions = 0, n_excluded = 0;
    for (uint64_t b = 1; b <= max_bits; ++b) {
        arrival[b] = bit_arrival_cycle(b, bits_per_cycle);
        if ((arrival[b] + static_cast<uint64_t>(dmax)) * cfg.k_f <= horizon_use)
            ++n_positions;
        else
            ++n_excluded;
    }

    // Per-bit commit use for one trial.
    int block_bits = 0;
    if (spec.scheme != Scheme::Arq) block_bits = cfg.block_bits(spec.rate);
    const int payload_bits = cfg.c_f - 1;

    const size_t nd = spec.delays.size();
    std::vector<std::vector<uint32_t>> err(nd,
                                           std::vector<uint32_t>(max_bits + 1, 0));
    std::vector<uint32_t> obs(max_bits + 1, 0);

    for (const TrialTrace& tr : traces.trials) {
        // commit_use[b]: forward use by which bit b was known, or UINT64_MAX.
        std::vector<uint64_t> commit(max_bits + 1, UINT64_MAX);
        if (spec.scheme == Scheme::Arq) {
            for (size_t p = 0; p < tr.packet_commits.size(); ++p) {
                const uint64_t lo = p * static_cast<uint64_t>(payload_bits) + 1;
                const uint64_t hi = lo + payload_bits - 1;
                for (uint64_t b = lo; b <= hi && b <= max_bits; ++b)
                    commit[b] = tr.packet_commits[p];
            }
        } else {
            for (const BlockStats& bs : tr.blocks) {
                if (!bs.committed) continue;
                const uint64_t lo =
                    static_cast<uint64_t>(bs.block - 1) * block_bits + 1;
                const uint64_t hi = lo + block_bits - 1;
                for (uint64_t b = lo; b <= hi && b <= max_bits; ++b)
                    commit[b] = bs.commit_use;
            }
        }
        for (uint64_t b = 1; b <= max_bits; ++b) {
            if ((arrival[b] + static_cast<uint64_t>(dmax)) * cfg.k_f > horizon_use)
                continue;
            ++obs[b];
            for (size_t di = 0; di < nd; ++di) {
                const uint64_t deadline =
                    (arrival[b] + static_cast<uint64_t>(spec.delays[di])) *
                    cfg.k_f;
                // An uncommitted bit at its deadline counts as an error.
                if (commit[b] == UINT64_MAX || commit[b] > deadline)
                    ++err[di][b];
            }
        }
    }

    DelayErrorCurve curve;
    curve.positions_measured = n_positions;
    curve.positions_excluded = n_excluded;
    curve.trials = spec.trials;
    for (size_t di = 0; di < nd; ++di) {
        DelayErrorRow row;
        row.delay = spec.delays[di];
        uint64_t tot_err = 0, tot_obs = 0;
        double worst = 0.0;
        for (uint64_t b = 1; b <= max_bits; ++b) {
            if (obs[b] == 0) continue;
            tot_err += err[di][b];
            tot_obs += obs[b];
            if (obs[b] >= 100)
                worst = std::max(worst,
                                 static_cast<double>(err[di][b]) / obs[b]);
        }
        row.eps_max = worst;
        row.pooled_errors = tot_err;
        row.pooled_observations = tot_obs;
        row.eps_pooled =
            tot_obs ? static_cast<double>(tot_err) / tot_obs : 0.0;
        row.pooled_std_error =
            tot_obs ? std::sqrt(row.eps_pooled * (1.0 - row.eps_pooled) /
                                static_cast<double>(tot_obs))
                    : 0.0;
        curve.rows.push_back(row);
    }
    return curve;
}

ServiceBoundReport validate_service_bound(const std::vector<uint64_t>& samples,
                                          const SystemConfig& cfg, double rate,
                                          double rho, double eps_fraction) {
    if (!(rho > 0.0 && rho <= 1.0))
        throw std::invalid_argument("validate_service_bound: rho in (0,1]");
    if (samples.empty())
        throw std::invalid_argument("validate_service_bound: no samples");
    ServiceBoundReport rep;
    rep.rho = rho;
    const double e0 = gallager_e0(cfg.c_f, rho, cfg.beta_f);
    const double fb_arm = cfg.beta_b > 0.0
                              ? static_cast<double>(cfg.k_b) / cfg.k_f *
                                    (-std::log(cfg.beta_b))
                              : std::numeric_limits<double>::infinity();
    rep.lambda = std::min(e0, fb_arm);
    rep.eps = eps_fraction * rep.lambda;
    const double c_tilde = e0 / (rho * cfg.c_f * kLn2);
    rep.t_tilde = rate / c_tilde * cfg.n;
    rep.offset_uses = std::ceil(rep.t_tilde) * cfg.c * cfg.k_f;

    // Smallest K such that every sample threshold obeys the bound: for each
    // support point s with tail probability p, K >= s - offset - (-ln p)/rate.
    std::vector<uint64_t> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double decay = rep.lambda - rep.eps;
    double k_needed = 0.0;
    for (size_t i = 0; i < sorted.size(); ++i) {
        const double tail = static_cast<double>(sorted.size() - i) / n;
        // P(T > s-) >= tail at s = sorted[i]; require the bound just below s.
        const double s = static_cast<double>(sorted[i]);
        const double need = s - rep.offset_uses - (-std::log(tail)) / decay;
        k_needed = std::max(k_needed, need);
    }
    rep.k_offset = k_needed;
    rep.dominated = std::isfinite(k_needed);
    // Report the slope of the genuine tail; the sum of three components
    // bends well past its mean before the dominant exponent takes over.
    rep.fitted = fit_tail(samples, 0.05);
    return rep;
}

PascalCheckReport pascal_empirical_check(int m, double gamma, double eps_prime,
                                         size_t samples, uint64_t seed) {
    PascalCheckReport rep;
    const PascalFeasibility feas = pascal_feasibility(gamma, eps_prime);
    rep.eps_prime_max = feas.eps_prime_max;
    if (!feas.feasible) {
        rep.feasible = false;
        rep.note = "infeasible eps_prime; feasible range is (0, " +
                   std::to_string(feas.eps_prime_max) + ")";
        return rep;
    }
    rep.feasible = true;
    const PascalBound bound = pascal_tail_bound(m, gamma, eps_prime);
    rep.epsilon = bound.epsilon;
    rep.t_check = bound.t_check;

    // Sample sums of 2m-1 geometrics with P(T' > t) = exp(-gamma t).
    RandomStream rng(mix64(seed ^ 0x5ca1ab1e));
    const int terms = 2 * m - 1;
    std::vector<uint64_t> sums(samples);
    for (size_t i = 0; i < samples; ++i) {
        uint64_t s = 0;
        for (int k = 0; k < terms; ++k) {
            double u = rng.next_unit();
            if (u <= 0.0) u = 0x1.0p-53;
            s += static_cast<uint64_t>(std::ceil(std::log(u) / -gamma));
        }
        sums[i] = s;
    }
    std::sort(sums.begin(), sums.end());

    // Domination on an integer grid of t offsets beyond t_check. An empty
    // empirical tail trivially sits below the bound, which is positive even
    // where exp() underflows; compare log masses where both are nonzero.
    rep.dominated = true;
    rep.worst_margin = 0.0;
    for (int t = 0; t <= 100; ++t) {
        const double threshold = bound.t_check + t;
        const auto it = std::upper_bound(sums.begin(), sums.end(),
                                         static_cast<uint64_t>(threshold));
        const double emp =
            static_cast<double>(sums.end() - it) / static_cast<double>(samples);
        if (emp == 0.0) continue;
        const double log_bound =
            -bound.gamma * (1.0 - bound.eps_prime) * (threshold);
        if (std::log(emp) >= log_bound) rep.dominated = false;
        rep.worst_margin =
            std::max(rep.worst_margin, std::exp(std::log(emp) - log_bound));
    }

    // Appendix chain, part 1: the divergence lower bound
    // D(1-e || exp(-gamma)) >= (1-e)gamma - e(ln(1/e) + 2(1-e)) on an e-grid.
    rep.divergence_ok = true;
    const double q = std::exp(-gamma);
    for (int i = 1; i <= 1000; ++i) {
        const double e = 0.75 * i / 1000.0;
        const double p = 1.0 - e;
        const double d = p * std::log(p / q) + e * std::log(e / (1.0 - q));
        const double lower = p * gamma - e * (std::log(1.0 / e) + 2.0 * p);
        if (d < lower - 1e-12) rep.divergence_ok = false;
    }

    // Appendix chain, part 2: the Pascal sum's CCDF equals the probability
    // that a Bernoulli(1 - exp(-gamma)) process has fewer than 2m-1
    // successes, checked at a few thresholds against the exact binomial sum.
    rep.bernoulli_ok = true;
    const double mean = terms / (1.0 - q);
    for (int probe = 0; probe < 3; ++probe) {
        const uint64_t nslots =
            static_cast<uint64_t>(mean * (1.0 + 0.5 * probe)) + terms;
        double cdf = 0.0;  // P(successes < 2m-1) in nslots slots
        for (int k = 0; k < terms; ++k) {
            const double logc = std::lgamma(static_cast<double>(nslots) + 1.0) -
                                std::lgamma(static_cast<double>(k) + 1.0) -
                                std::lgamma(static_cast<double>(nslots - k) + 1.0);
            cdf += std::exp(logc + k * std::log(1.0 - q) +
                            static_cast<double>(nslots - k) * std::log(q));
        }
        const auto it = std::upper_bound(sums.begin(), sums.end(), nslots);
        const double emp =
            static_cast<double>(sums.end() - it) / static_cast<double>(samples);
        const double sigma =
            std::sqrt(std::max(cdf * (1.0 - cdf), 1e-12) /
                      static_cast<double>(samples));
        if (std::abs(emp - cdf) > 5.0 * sigma + 1e-9) rep.bernoulli_ok = false;
    }
    return rep;
}

ChiSquareResult chi_square_independence(const std::vector<uint64_t>& a,
                                        const std::vector<uint64_t>& b,
                                        int bins) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("chi_square_independence: size mismatch");
    if (bins < 2) throw std::invalid_argument("chi_square_independence: bins >= 2");

    auto edges = [&](const std::vector<uint64_t>& v) {
        std::vector<uint64_t> s(v);
        std::sort(s.begin(), s.end());
        std::vector<uint64_t> e;
        for (int k = 1; k < bins; ++k)
            e.push_back(s[s.size() * k / bins]);
        return e;
    };
    auto bin_of = [&](uint64_t x, const std::vector<uint64_t>& e) {
        int k = 0;
        while (k < static_cast<int>(e.size()) && x >= e[k]) ++k;
        return k;
    };
    const auto ea = edges(a), eb = edges(b);
    std::vector<std::vector<double>> counts(bins, std::vector<double>(bins, 0));
    for (size_t i = 0; i < a.size(); ++i)
        counts[bin_of(a[i], ea)][bin_of(b[i], eb)] += 1.0;

    std::vector<double> ra(bins, 0), cb(bins, 0);
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j) {
            ra[i] += counts[i][j];
            cb[j] += counts[i][j];
        }
    const double n = static_cast<double>(a.size());
    double stat = 0.0;
    int dof = 0;
    for (int i = 0; i < bins; ++i) {
        if (ra[i] == 0) continue;
        for (int j = 0; j < bins; ++j) {
            if (cb[j] == 0) continue;
            const double expct = ra[i] * cb[j] / n;
            if (expct < 1e-9) continue;
            const double d = counts[i][j] - expct;
            stat += d * d / expct;
        }
    }
    int rows_used = 0, cols_used = 0;
    for (int i = 0; i < bins; ++i) rows_used += ra[i] > 0 ? 1 : 0;
    for (int j = 0; j < bins; ++j) cols_used += cb[j] > 0 ? 1 : 0;
    dof = std::max(1, (rows_used - 1) * (cols_used - 1));

    // chi-square 0.999 quantiles for the dof values that occur here.
    static const std::map<int, double> crit{{1, 10.828}, {2, 13.816},
                                            {3, 16.266}, {4, 18.467},
                                            {6, 22.458}, {9, 27.877}};
    ChiSquareResult res;
    res.statistic = stat;
    res.dof = dof;
    auto it = crit.lower_bound(dof);
    res.critical_999 = it != crit.end() ? it->second : 27.877 + 3.0 * (dof - 9);
    res.independent = stat < res.critical_999;
    return res;
}

}  // namespace anycode
