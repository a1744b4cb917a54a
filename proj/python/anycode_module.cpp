#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anycode/cli_support.hpp"
#include "anycode/exponents.hpp"
#include "anycode/simulator.hpp"

namespace py = pybind11;
using namespace anycode;

namespace {

SystemConfig config_from_kwargs(int k_f, int k_b, int c_f, int c_b,
                                double beta_f, double beta_b, int n, int c,
                                int ell, uint64_t seed, bool feedback_lag) {
    SystemConfig cfg;
    cfg.k_f = k_f;
    cfg.k_b = k_b;
    cfg.c_f = c_f;
    cfg.c_b = c_b;
    cfg.beta_f = beta_f;
    cfg.beta_b = beta_b;
    cfg.n = n;
    cfg.c = c;
    cfg.ell = ell;
    cfg.seed = seed;
    cfg.feedback_lag = feedback_lag;
    cfg.ensure_valid();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "fixed-delay streaming over erasure channels with unreliable "
              "feedback: exponents, regions, bounds and the scheme simulator";

    py::enum_<Units>(m, "Units")
        .value("FORWARD", Units::ForwardOnly)
        .value("TOTAL", Units::TotalUses)
        .value("WEIGHTED", Units::WeightedUses);

    py::enum_<Scheme>(m, "Scheme")
        .value("NOLIST", Scheme::NoList)
        .value("LIST", Scheme::List)
        .value("ARQ", Scheme::Arq);

    py::enum_<Theorem3Variant>(m, "Theorem3Variant")
        .value("NOLIST", Theorem3Variant::NoList)
        .value("LIST", Theorem3Variant::List)
        .value("MIXED_RBAR", Theorem3Variant::MixedRbar)
        .value("MIXED_BOTH", Theorem3Variant::MixedBoth);

    py::enum_<Scenario>(m, "Scenario")
        .value("FIG3", Scenario::Fig3)
        .value("FIG4", Scenario::Fig4)
        .value("FIG5", Scenario::Fig5)
        .value("FIG6", Scenario::Fig6)
        .value("CUSTOM", Scenario::Custom);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init(&config_from_kwargs), py::arg("k_f") = 1,
             py::arg("k_b") = 1, py::arg("c_f") = 1, py::arg("c_b") = 1,
             py::arg("beta_f") = 0.0, py::arg("beta_b") = 0.0, py::arg("n") = 1,
             py::arg("c") = 1, py::arg("ell") = 1, py::arg("seed") = 0,
             py::arg("feedback_lag") = false)
        .def_readwrite("k_f", &SystemConfig::k_f)
        .def_readwrite("k_b", &SystemConfig::k_b)
        .def_readwrite("c_f", &SystemConfig::c_f)
        .def_readwrite("c_b", &SystemConfig::c_b)
        .def_readwrite("beta_f", &SystemConfig::beta_f)
        .def_readwrite("beta_b", &SystemConfig::beta_b)
        .def_readwrite("n", &SystemConfig::n)
        .def_readwrite("c", &SystemConfig::c)
        .def_readwrite("ell", &SystemConfig::ell)
        .def_readwrite("seed", &SystemConfig::seed)
        .def_readwrite("feedback_lag", &SystemConfig::feedback_lag)
        .def("block_bits", &SystemConfig::block_bits, py::arg("rate"));

    py::class_<RegionPoint>(m, "RegionPoint")
        .def_readonly("rate", &RegionPoint::rate)
        .def_readonly("exponent", &RegionPoint::exponent)
        .def_readonly("rate_units", &RegionPoint::rate_units)
        .def_readonly("exponent_units", &RegionPoint::exponent_units)
        .def("__repr__", [](const RegionPoint& p) {
            return "RegionPoint(rate=" + std::to_string(p.rate) +
                   ", exponent=" + std::to_string(p.exponent) + ")";
        });

    m.def(
        "gallager_e0",
        [](int c_bits, double rho, double beta) {
            return gallager_e0(c_bits, rho, beta);
        },
        py::arg("c_bits"), py::arg("rho"), py::arg("beta"),
        "E0(C, rho) = -ln(beta + 2^(-rho C)(1-beta)) in nats per use");
    m.def("focusing_bound_rate", &focusing_bound_rate, py::arg("alpha"),
          py::arg("beta_f"));
    m.def("focusing_bound_alpha", &focusing_bound_alpha, py::arg("rate"),
          py::arg("beta_f"));
    m.def("theorem1_region", &theorem1_region, py::arg("config"),
          py::arg("rho"));
    m.def("theorem2_region", &theorem2_region, py::arg("config"),
          py::arg("rho"));
    m.def("theorem3_region", &theorem3_region, py::arg("c_f"), py::arg("c_b"),
          py::arg("beta_f"), py::arg("beta_b"), py::arg("rho"),
          py::arg("variant"));
    m.def(
        "random_coding_exponent",
        [](double rate, double beta, int c_bits) {
            return random_coding_exponent(rate, ErasureParams(beta, c_bits));
        },
        py::arg("rate"), py::arg("beta"), py::arg("c_bits"));
    m.def(
        "sphere_packing_exponent",
        [](double rate, double beta, int c_bits) {
            return sphere_packing_exponent(rate, ErasureParams(beta, c_bits));
        },
        py::arg("rate"), py::arg("beta"), py::arg("c_bits"));
    m.def("arq_bound_rate", &arq_bound_rate, py::arg("alpha"), py::arg("config"));
    m.def("arq_bound_rate_inf_cf", &arq_bound_rate_inf_cf, py::arg("alpha"),
          py::arg("beta_f"), py::arg("beta_b"));
    m.def("arq_rate_ceiling", &arq_rate_ceiling, py::arg("beta_f"),
          py::arg("beta_b"), py::arg("c_f") = 0);
    m.def("balanced_e0", &balanced_e0, py::arg("c_f"), py::arg("rho"),
          py::arg("beta"));
    m.def("optimal_split", &optimal_split, py::arg("c_f"), py::arg("rho"),
          py::arg("beta_f"), py::arg("beta_b"));
    m.def("convert_units", &convert_units, py::arg("point"), py::arg("config"),
          py::arg("target"));

    py::class_<PascalBound>(m, "PascalBound")
        .def_readonly("m", &PascalBound::m)
        .def_readonly("gamma", &PascalBound::gamma)
        .def_readonly("eps_prime", &PascalBound::eps_prime)
        .def_readonly("epsilon", &PascalBound::epsilon)
        .def_readonly("t_check", &PascalBound::t_check)
        .def("bound", &PascalBound::bound, py::arg("t"));
    m.def("pascal_tail_bound", &pascal_tail_bound, py::arg("m"),
          py::arg("gamma"), py::arg("eps_prime"));

    py::class_<CurveTable>(m, "CurveTable")
        .def_readonly("name", &CurveTable::name)
        .def_readonly("columns", &CurveTable::columns)
        .def_readonly("rows", &CurveTable::rows)
        .def_readonly("grid_units", &CurveTable::grid_units);
    m.def(
        "sweep_curves",
        [](const std::string& scenario, double lo, double hi, double step,
           double beta_f, double beta_b, int c_f, int c_b,
           std::vector<double> eta_list) {
            SweepOptions opt;
            opt.beta_f = beta_f;
            opt.beta_b = beta_b;
            opt.c_f = c_f;
            opt.c_b = c_b;
            if (!eta_list.empty()) opt.eta_list = std::move(eta_list);
            return sweep_curves(scenario_from_string(scenario),
                                RateGrid{lo, hi, step}, opt);
        },
        py::arg("scenario"), py::arg("lo"), py::arg("hi"), py::arg("step"),
        py::arg("beta_f") = 0.25, py::arg("beta_b") = 0.25, py::arg("c_f") = 4,
        py::arg("c_b") = 2, py::arg("eta_list") = std::vector<double>{});

    py::class_<TailEstimate>(m, "TailEstimate")
        .def_readonly("ok", &TailEstimate::ok)
        .def_readonly("slope", &TailEstimate::slope)
        .def_readonly("std_error", &TailEstimate::std_error)
        .def_readonly("samples", &TailEstimate::samples)
        .def_readonly("note", &TailEstimate::note);
    m.def("fit_tail", &fit_tail, py::arg("samples"),
          py::arg("ccdf_max") = 1.0);

    py::class_<DelayErrorRow>(m, "DelayErrorRow")
        .def_readonly("delay", &DelayErrorRow::delay)
        .def_readonly("eps_max", &DelayErrorRow::eps_max)
        .def_readonly("eps_pooled", &DelayErrorRow::eps_pooled)
        .def_readonly("errors", &DelayErrorRow::pooled_errors)
        .def_readonly("observations", &DelayErrorRow::pooled_observations);

    m.def(
        "simulate",
        [](const SystemConfig& config, const std::string& scheme, double rate,
           uint64_t horizon, int trials, std::vector<int> delays) {
            TrialSpec spec;
            spec.config = config;
            spec.scheme = scheme_from_string(scheme);
            spec.rate = rate;
            spec.horizon_cycles = horizon;
            spec.trials = trials;
            spec.delays = std::move(delays);
            const TraceCollection traces = run_trials(spec);
            const DelayErrorCurve curve = bit_error_vs_delay(traces);
            uint64_t committed = 0;
            for (const auto& t : traces.trials) committed += t.committed;
            py::dict out;
            out["rows"] = curve.rows;
            out["committed"] = committed;
            out["positions_measured"] = curve.positions_measured;
            out["positions_excluded"] = curve.positions_excluded;
            return out;
        },
        py::arg("config"), py::arg("scheme"), py::arg("rate"),
        py::arg("horizon"), py::arg("trials"), py::arg("delays"),
        "Runs seeded trials and measures the bit error probability at each "
        "delay; raises RuntimeError on any protocol invariant violation.");

    m.def(
        "service_tails",
        [](const SystemConfig& config, double rate, uint64_t horizon,
           int trials) {
            TrialSpec spec;
            spec.config = config;
            spec.scheme = Scheme::NoList;
            spec.rate = rate;
            spec.horizon_cycles = horizon;
            spec.trials = trials;
            spec.delays = {0};
            const TraceCollection traces = run_trials(spec);
            std::vector<uint64_t> t1, t2, t3;
            for (const auto& t : traces.trials)
                for (const auto& s : measure_service_components(t.blocks)) {
                    if (s.block > 1) {
                        t1.push_back(s.t1);
                        t2.push_back(s.t2);
                    }
                    t3.push_back(s.t3);
                }
            py::dict out;
            out["t1"] = fit_tail(t1);
            out["t2"] = fit_tail(t2);
            out["t3"] = fit_tail(t3);
            out["blocks"] = t3.size();
            return out;
        },
        py::arg("config"), py::arg("rate"), py::arg("horizon"),
        py::arg("trials"));

    py::class_<PascalCheckReport>(m, "PascalCheckReport")
        .def_readonly("feasible", &PascalCheckReport::feasible)
        .def_readonly("eps_prime_max", &PascalCheckReport::eps_prime_max)
        .def_readonly("epsilon", &PascalCheckReport::epsilon)
        .def_readonly("t_check", &PascalCheckReport::t_check)
        .def_readonly("dominated", &PascalCheckReport::dominated)
        .def_readonly("divergence_ok", &PascalCheckReport::divergence_ok)
        .def_readonly("bernoulli_ok", &PascalCheckReport::bernoulli_ok);
    m.def("pascal_empirical_check", &pascal_empirical_check, py::arg("m"),
          py::arg("gamma"), py::arg("eps_prime"), py::arg("samples"),
          py::arg("seed") = 1);

    m.attr("__version__") = kVersion;
}
