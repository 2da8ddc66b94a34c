#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "acdyn/analysis.hpp"
#include "acdyn/integrate.hpp"
#include "acdyn/investment.hpp"
#include "acdyn/models.hpp"
#include "acdyn/stochastic.hpp"

namespace py = pybind11;
using namespace acdyn;

namespace {

IntegrationOptions make_options(double t_end, double rel_tol, double abs_tol,
                                double sample_interval, double equilibrium_eps,
                                double fixed_step) {
    IntegrationOptions opts;
    opts.t_end = t_end;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.sample_interval = sample_interval;
    opts.equilibrium_eps = equilibrium_eps;
    opts.fixed_step = fixed_step;
    opts.validate();
    return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Active-defense contagion dynamics: models, analysis, certification";

    py::class_<SisParams>(m, "SisParams")
        .def(py::init<double, double>(), py::arg("beta"), py::arg("alpha"))
        .def_readonly("beta", &SisParams::beta)
        .def_readonly("alpha", &SisParams::alpha);

    py::class_<AsisParams>(m, "AsisParams")
        .def(py::init<double, double, double, double>(), py::arg("beta"), py::arg("beta_a"),
             py::arg("alpha"), py::arg("x_a"))
        .def_readonly("beta", &AsisParams::beta)
        .def_readonly("beta_a", &AsisParams::beta_a)
        .def_readonly("alpha", &AsisParams::alpha)
        .def_readonly("x_a", &AsisParams::x_a);

    py::class_<AsisState>(m, "AsisState")
        .def(py::init([](double i_a, double i_r) { return AsisState{i_a, i_r}; }),
             py::arg("i_a"), py::arg("i_r"))
        .def_readonly("i_a", &AsisState::i_a)
        .def_readonly("i_r", &AsisState::i_r)
        .def("total", &AsisState::total);

    py::class_<AsirParams>(m, "AsirParams")
        .def(py::init<double, double, double>(), py::arg("beta"), py::arg("beta_a"),
             py::arg("alpha"))
        .def_readonly("beta", &AsirParams::beta)
        .def_readonly("beta_a", &AsirParams::beta_a)
        .def_readonly("alpha", &AsirParams::alpha);

    py::class_<AsirState>(m, "AsirState")
        .def(py::init([](double s_a, double s_r, double i_a, double i_r, double r) {
                 return AsirState{s_a, s_r, i_a, i_r, r};
             }),
             py::arg("s_a"), py::arg("s_r"), py::arg("i_a"), py::arg("i_r"), py::arg("r") = 0.0)
        .def_readonly("s_a", &AsirState::s_a)
        .def_readonly("s_r", &AsirState::s_r)
        .def_readonly("i_a", &AsirState::i_a)
        .def_readonly("i_r", &AsirState::i_r)
        .def_readonly("r", &AsirState::r)
        .def("total_infected", &AsirState::total_infected);

    m.def("sis_field", &sis_field, py::arg("params"), py::arg("i"));
    m.def(
        "asis_field",
        [](const AsisParams& p, const AsisState& s) {
            const AsisRates r = asis_field(p, s);
            return py::make_tuple(r.di_a, r.di_r);
        },
        py::arg("params"), py::arg("state"));
    m.def(
        "asir_field",
        [](const AsirParams& p, const AsirState& s) {
            const AsirRates r = asir_field(p, s);
            return py::make_tuple(r.ds_a, r.ds_r, r.di_a, r.di_r, r.dr);
        },
        py::arg("params"), py::arg("state"));

    py::class_<IntegrationOptions>(m, "IntegrationOptions")
        .def(py::init(&make_options), py::arg("t_end"), py::arg("rel_tol") = 1e-8,
             py::arg("abs_tol") = 1e-10, py::arg("sample_interval") = 0.0,
             py::arg("equilibrium_eps") = 1e-10, py::arg("fixed_step") = 0.0)
        .def_readonly("t_end", &IntegrationOptions::t_end)
        .def_readonly("rel_tol", &IntegrationOptions::rel_tol)
        .def_readonly("abs_tol", &IntegrationOptions::abs_tol)
        .def_readonly("sample_interval", &IntegrationOptions::sample_interval)
        .def_readonly("equilibrium_eps", &IntegrationOptions::equilibrium_eps);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states)
        .def_readonly("converged", &Trajectory::converged)
        .def_readonly("final_state", &Trajectory::final_state)
        .def_readonly("peak_infected", &Trajectory::peak_infected)
        .def_readonly("peak_time", &Trajectory::peak_time)
        .def("final_time", &Trajectory::final_time);

    m.def(
        "simulate_sis",
        [](const SisParams& p, double i0, const IntegrationOptions& opts) {
            const std::vector<double> s0 = {i0};
            return integrate(sis_vector_field(p), s0, opts);
        },
        py::arg("params"), py::arg("i0"), py::arg("options"));
    m.def(
        "simulate_asis",
        [](const AsisParams& p, const AsisState& s, const IntegrationOptions& opts) {
            const std::vector<double> s0 = {s.i_a, s.i_r};
            return integrate(asis_vector_field(p), s0, opts);
        },
        py::arg("params"), py::arg("state"), py::arg("options"));
    m.def(
        "simulate_asir",
        [](const AsirParams& p, const AsirState& s, const IntegrationOptions& opts) {
            const std::vector<double> s0 = {s.s_a, s.s_r, s.i_a, s.i_r, s.r};
            return integrate(asir_vector_field(p), s0, opts);
        },
        py::arg("params"), py::arg("state"), py::arg("options"));

    py::class_<SpectralInfo>(m, "SpectralInfo")
        .def_readonly("lambda_plus", &SpectralInfo::lambda_plus)
        .def_readonly("lambda_minus", &SpectralInfo::lambda_minus);

    py::enum_<Regime>(m, "Regime")
        .value("IFE_GAS", Regime::kIfeGas)
        .value("ENDEMIC", Regime::kEndemic);

    py::class_<RegimeReport>(m, "RegimeReport")
        .def_readonly("spectral", &RegimeReport::spectral)
        .def_readonly("regime", &RegimeReport::regime)
        .def_readonly("endemic", &RegimeReport::endemic)
        .def_readonly("endemic_fraction", &RegimeReport::endemic_fraction)
        .def_readonly("limiting_infected", &RegimeReport::limiting_infected)
        .def_readonly("sis_reduction", &RegimeReport::sis_reduction);

    m.def("spectral", &spectral, py::arg("params"));
    m.def("classify", &classify, py::arg("params"));

    py::class_<Mat2>(m, "Mat2")
        .def_readonly("a11", &Mat2::a11)
        .def_readonly("a12", &Mat2::a12)
        .def_readonly("a21", &Mat2::a21)
        .def_readonly("a22", &Mat2::a22)
        .def("trace", &Mat2::trace)
        .def("det", &Mat2::det)
        .def("real_eigenvalues", &Mat2::real_eigenvalues);

    m.def("jacobian", &jacobian, py::arg("params"), py::arg("state"));
    m.def("nullcline_a", &nullcline_a, py::arg("params"), py::arg("i_a"));
    m.def("nullcline_r", &nullcline_r, py::arg("params"), py::arg("i_r"));
    m.def("nullcline_r_inverse", &nullcline_r_inverse, py::arg("params"), py::arg("i_a"));
    m.def("nullcline_r_inverse_slope", &nullcline_r_inverse_slope, py::arg("params"),
          py::arg("i_a"));

    m.def("lyapunov_ife", &lyapunov_ife, py::arg("params"), py::arg("state"));
    m.def("lyapunov_ife_rate", &lyapunov_ife_rate, py::arg("params"), py::arg("state"));

    py::enum_<VrRegion>(m, "VrRegion")
        .value("A_BELOW", VrRegion::kALess)
        .value("A_ABOVE", VrRegion::kAGeq)
        .value("R_BELOW", VrRegion::kRLess)
        .value("R_ABOVE", VrRegion::kRGeq);

    py::class_<VrValue>(m, "VrValue")
        .def_readonly("value", &VrValue::value)
        .def_readonly("region", &VrValue::region);

    m.def("lyapunov_endemic", &lyapunov_endemic, py::arg("params"), py::arg("state"),
          py::arg("R"));
    m.def("lyapunov_endemic_rate", &lyapunov_endemic_rate, py::arg("params"), py::arg("state"),
          py::arg("R"));

    py::class_<AdmissibleR>(m, "AdmissibleR")
        .def_readonly("has_window", &AdmissibleR::has_window)
        .def_readonly("lower", &AdmissibleR::lower)
        .def_readonly("upper", &AdmissibleR::upper)
        .def_readonly("upper_slope", &AdmissibleR::upper_slope)
        .def_readonly("upper_ratio", &AdmissibleR::upper_ratio)
        .def_readonly("choice", &AdmissibleR::choice);

    m.def("admissible_R", &admissible_R, py::arg("params"));

    py::class_<LyapunovCertificate>(m, "LyapunovCertificate")
        .def_readonly("R", &LyapunovCertificate::R)
        .def_readonly("samples_checked", &LyapunovCertificate::samples_checked)
        .def_readonly("max_violation", &LyapunovCertificate::max_violation)
        .def_readonly("certified", &LyapunovCertificate::certified);

    m.def("certify_ife", &certify_ife, py::arg("params"), py::arg("grid") = 200,
          py::arg("exclusion") = 1e-9);
    m.def("certify_endemic", &certify_endemic, py::arg("params"), py::arg("R"),
          py::arg("grid") = 200, py::arg("exclusion") = 1e-9);

    py::class_<RegionSignReport>(m, "RegionSignReport")
        .def_readonly("min_fa_below", &RegionSignReport::min_fa_below)
        .def_readonly("max_fa_above", &RegionSignReport::max_fa_above)
        .def_readonly("min_fr_below", &RegionSignReport::min_fr_below)
        .def_readonly("max_fr_above", &RegionSignReport::max_fr_above)
        .def_readonly("samples_checked", &RegionSignReport::samples_checked)
        .def_readonly("holds", &RegionSignReport::holds);

    m.def("check_region_signs", &check_region_signs, py::arg("params"), py::arg("R"),
          py::arg("grid") = 200, py::arg("exclusion") = 1e-9);

    m.def("limiting_infected", &limiting_infected, py::arg("beta"), py::arg("beta_a"),
          py::arg("alpha"), py::arg("x_a"));

    py::class_<AsirPeakReport> peak(m, "AsirPeakReport");
    py::enum_<AsirPeakReport::Case>(peak, "Case")
        .value("FORMULA", AsirPeakReport::Case::kFormula)
        .value("MONOTONE", AsirPeakReport::Case::kMonotone);
    peak.def_readonly("case_", &AsirPeakReport::peak_case)
        .def_readonly("i_pk", &AsirPeakReport::i_pk)
        .def_readonly("threshold_rhs", &AsirPeakReport::threshold_rhs);

    m.def("asir_peak", &asir_peak, py::arg("params"), py::arg("s_a0"), py::arg("i_0"));
    m.def("asir_infected_at", &asir_infected_at, py::arg("params"), py::arg("s_a0"),
          py::arg("i_0"), py::arg("s_a"));

    py::class_<ReturnFunction>(m, "ReturnFunction")
        .def("value", [](const ReturnFunction& f, double x) { return f.value(x); })
        .def("derivative", [](const ReturnFunction& f, double x) { return f.derivative(x); })
        .def_readonly("saturating", &ReturnFunction::saturating)
        .def_readonly("saturation", &ReturnFunction::saturation);

    m.def("linear_return", &linear_return, py::arg("c"));
    m.def("linear_fraction_return", &linear_fraction_return, py::arg("c"));
    m.def("hyperbolic_return", &hyperbolic_return, py::arg("c"), py::arg("scale") = 1.0);
    m.def("saturating_return", &saturating_return, py::arg("hat_value"),
          py::arg("hat_derivative"),
          py::arg("t") = std::numeric_limits<double>::quiet_NaN(), py::arg("cap") = 1e12);

    py::class_<InvestmentProblem>(m, "InvestmentProblem")
        .def(py::init<ReturnFunction, ReturnFunction, double, double, double>(), py::arg("h"),
             py::arg("g"), py::arg("budget"), py::arg("beta"), py::arg("alpha"))
        .def_readonly("budget", &InvestmentProblem::budget)
        .def_readonly("beta", &InvestmentProblem::beta)
        .def_readonly("alpha", &InvestmentProblem::alpha);

    py::class_<InvestmentSolution> sol(m, "InvestmentSolution");
    py::enum_<InvestmentSolution::Case>(sol, "Case")
        .value("INTERIOR_FOC", InvestmentSolution::Case::kInteriorFoc)
        .value("SATURATION", InvestmentSolution::Case::kSaturation);
    sol.def_readonly("a_star", &InvestmentSolution::a_star)
        .def_readonly("b_star", &InvestmentSolution::b_star)
        .def_readonly("foc_residual", &InvestmentSolution::foc_residual)
        .def_readonly("predicted_limit", &InvestmentSolution::predicted_limit)
        .def_readonly("eradication_feasible", &InvestmentSolution::eradication_feasible)
        .def_readonly("case_", &InvestmentSolution::allocation_case);

    py::class_<EradicationCheck>(m, "EradicationCheck")
        .def_readonly("feasible", &EradicationCheck::feasible)
        .def_readonly("best_product", &EradicationCheck::best_product)
        .def_readonly("a_at_best", &EradicationCheck::a_at_best);

    m.def("foc_residual", &foc_residual, py::arg("problem"), py::arg("a"));
    m.def("eradication_check", &eradication_check, py::arg("problem"));
    m.def("solve", &solve, py::arg("problem"));

    py::class_<PopulationConfig>(m, "PopulationConfig")
        .def(py::init([](std::int64_t population, const AsisParams& params,
                         std::int64_t infected_active, std::int64_t infected_reactive,
                         std::uint64_t seed, double t_end, int replicates) {
                 PopulationConfig cfg{population, params,  infected_active,
                                      infected_reactive,   seed,   t_end,
                                      replicates};
                 cfg.validate();
                 return cfg;
             }),
             py::arg("population"), py::arg("params"), py::arg("infected_active"),
             py::arg("infected_reactive"), py::arg("seed"), py::arg("t_end"),
             py::arg("replicates") = 1)
        .def_readonly("population", &PopulationConfig::population)
        .def_readonly("seed", &PopulationConfig::seed)
        .def_readonly("t_end", &PopulationConfig::t_end)
        .def_readonly("replicates", &PopulationConfig::replicates)
        .def("active_count", &PopulationConfig::active_count);

    py::class_<EventPath>(m, "EventPath")
        .def_readonly("times", &EventPath::times)
        .def_readonly("infected_active", &EventPath::infected_active)
        .def_readonly("infected_reactive", &EventPath::infected_reactive);

    py::class_<EnsembleSummary>(m, "EnsembleSummary")
        .def_readonly("times", &EnsembleSummary::times)
        .def_readonly("mean_ia", &EnsembleSummary::mean_ia)
        .def_readonly("mean_ir", &EnsembleSummary::mean_ir)
        .def_readonly("sd_ia", &EnsembleSummary::sd_ia)
        .def_readonly("sd_ir", &EnsembleSummary::sd_ir)
        .def_readonly("extinction_fraction", &EnsembleSummary::extinction_fraction)
        .def_readonly("realized_active_fraction", &EnsembleSummary::realized_active_fraction)
        .def_readonly("replicates", &EnsembleSummary::replicates);

    m.def("simulate_ctmc", &simulate_ctmc, py::arg("config"), py::arg("workers") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("summarize", &summarize, py::arg("config"), py::arg("ensemble"),
          py::arg("grid_points") = 201);
    m.def("simulate_summary", &simulate_summary, py::arg("config"), py::arg("grid_points") = 201,
          py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
}
