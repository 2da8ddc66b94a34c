#include "acdyn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>

#include "acdyn/analysis.hpp"
#include "acdyn/detail/parallel.hpp"
#include "acdyn/investment.hpp"
#include "acdyn/stochastic.hpp"

namespace acdyn {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

const json& require_field(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object()) throw ConfigError(path, "must be a JSON object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "required field is missing");
    return *it;
}

double as_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(field, "must be finite");
    return x;
}

double get_number(const json& obj, const std::string& path, const std::string& key) {
    return as_number(require_field(obj, path, key), join(path, key));
}

double get_number_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    return as_number(obj.at(key), join(path, key));
}

int get_int_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
    return v.get<std::string>();
}

void check(bool ok, const std::string& field, const std::string& message) {
    if (!ok) throw ConfigError(field, message);
}

// 12 significant digits for CSV cells.
std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string model_name(ModelKind m) {
    switch (m) {
        case ModelKind::kSis: return "sis";
        case ModelKind::kAsis: return "asis";
        case ModelKind::kAsir: return "asir";
    }
    return "?";
}

IntegrationOptions parse_integration(const json& block, const std::string& path) {
    IntegrationOptions opts;
    opts.t_end = get_number(block, path, "t_end");
    check(opts.t_end > 0.0, join(path, "t_end"), "must be > 0");
    opts.rel_tol = get_number_or(block, path, "rel_tol", opts.rel_tol);
    check(opts.rel_tol > 0.0, join(path, "rel_tol"), "must be > 0");
    opts.abs_tol = get_number_or(block, path, "abs_tol", opts.abs_tol);
    check(opts.abs_tol > 0.0, join(path, "abs_tol"), "must be > 0");
    opts.sample_interval = get_number_or(block, path, "sample_interval", 0.0);
    check(opts.sample_interval <= opts.t_end, join(path, "sample_interval"),
          "must be <= t_end");
    opts.equilibrium_eps = get_number_or(block, path, "equilibrium_eps", opts.equilibrium_eps);
    check(opts.equilibrium_eps > 0.0, join(path, "equilibrium_eps"), "must be > 0");
    opts.fixed_step = get_number_or(block, path, "fixed_step", 0.0);
    check(opts.fixed_step >= 0.0, join(path, "fixed_step"), "must be >= 0");
    return opts;
}

const AsisParams& require_asis(const Scenario& sc, const char* cmd) {
    if (sc.model != ModelKind::kAsis || !sc.asis)
        throw ConfigError("model", std::string(cmd) + " requires model \"asis\"");
    return *sc.asis;
}

const IntegrationOptions& require_integration(const Scenario& sc, const char* cmd) {
    if (!sc.integration)
        throw ConfigError("integration", std::string("required for ") + cmd);
    return *sc.integration;
}

std::pair<double, double> ambient_rates(const Scenario& sc) {
    switch (sc.model) {
        case ModelKind::kSis: return {sc.sis->beta, sc.sis->alpha};
        case ModelKind::kAsis: return {sc.asis->beta, sc.asis->alpha};
        case ModelKind::kAsir: return {sc.asir->beta, sc.asir->alpha};
    }
    throw std::logic_error("ambient_rates: unreachable");
}

InvestmentProblem build_problem(const InvestmentConfig& cfg, double beta, double alpha) {
    if (cfg.family == "linear") {
        return {linear_fraction_return(cfg.c1), linear_return(cfg.c2), cfg.budget, beta, alpha};
    }
    const double c1 = cfg.c1;
    ReturnFunction h = saturating_return([c1](double a) { return a / (a + c1); },
                                         [c1](double a) { return c1 / ((a + c1) * (a + c1)); },
                                         std::numeric_limits<double>::infinity());
    return {std::move(h), hyperbolic_return(cfg.c2, cfg.beta_bar), cfg.budget, beta, alpha};
}

}  // namespace

Scenario parse_scenario(const json& doc) {
    if (!doc.is_object()) throw ConfigError("scenario", "document must be a JSON object");
    Scenario sc;

    const std::string model = get_string(doc, "", "model");
    if (model == "sis")
        sc.model = ModelKind::kSis;
    else if (model == "asis")
        sc.model = ModelKind::kAsis;
    else if (model == "asir")
        sc.model = ModelKind::kAsir;
    else
        throw ConfigError("model", "must be one of \"sis\", \"asis\", \"asir\"");

    const json& params = require_field(doc, "", "params");
    const json& initial = require_field(doc, "", "initial");
    switch (sc.model) {
        case ModelKind::kSis: {
            const double beta = get_number(params, "params", "beta");
            const double alpha = get_number(params, "params", "alpha");
            check(beta > 0.0, "params.beta", "must be > 0");
            check(alpha > 0.0, "params.alpha", "must be > 0");
            sc.sis = SisParams(beta, alpha);
            const double i = get_number(initial, "initial", "i");
            check(i >= 0.0 && i <= 1.0, "initial.i", "must be in [0, 1]");
            sc.initial = {i};
            break;
        }
        case ModelKind::kAsis: {
            const double beta = get_number(params, "params", "beta");
            const double beta_a = get_number(params, "params", "beta_a");
            const double alpha = get_number(params, "params", "alpha");
            const double x_a = get_number(params, "params", "x_a");
            check(beta >= 0.0, "params.beta", "must be >= 0");
            check(beta_a >= 0.0, "params.beta_a", "must be >= 0");
            check(alpha > 0.0, "params.alpha", "must be > 0");
            check(x_a >= 0.0 && x_a <= 1.0, "params.x_a", "must be in [0, 1]");
            sc.asis = AsisParams(beta, beta_a, alpha, x_a);
            const double i_a = get_number(initial, "initial", "i_a");
            const double i_r = get_number(initial, "initial", "i_r");
            check(i_a >= 0.0 && i_a <= x_a, "initial.i_a", "must be in [0, x_a]");
            check(i_r >= 0.0 && i_r <= 1.0 - x_a, "initial.i_r", "must be in [0, 1 - x_a]");
            sc.initial = {i_a, i_r};
            break;
        }
        case ModelKind::kAsir: {
            const double beta = get_number(params, "params", "beta");
            const double beta_a = get_number(params, "params", "beta_a");
            const double alpha = get_number(params, "params", "alpha");
            check(beta >= 0.0, "params.beta", "must be >= 0");
            check(beta_a >= 0.0, "params.beta_a", "must be >= 0");
            check(alpha > 0.0, "params.alpha", "must be > 0");
            sc.asir = AsirParams(beta, beta_a, alpha);
            const double s_a = get_number(initial, "initial", "s_a");
            const double s_r = get_number(initial, "initial", "s_r");
            const double i_a = get_number(initial, "initial", "i_a");
            const double i_r = get_number(initial, "initial", "i_r");
            const double r = get_number_or(initial, "initial", "r", 0.0);
            for (auto [v, name] : {std::pair{s_a, "s_a"}, {s_r, "s_r"}, {i_a, "i_a"},
                                   {i_r, "i_r"}, {r, "r"}}) {
                check(v >= 0.0 && v <= 1.0, std::string("initial.") + name,
                      "must be in [0, 1]");
            }
            check(std::abs(s_a + s_r + i_a + i_r + r - 1.0) <= 1e-9, "initial",
                  "components must sum to 1");
            sc.initial = {s_a, s_r, i_a, i_r, r};
            break;
        }
    }

    if (doc.contains("integration"))
        sc.integration = parse_integration(doc.at("integration"), "integration");

    if (doc.contains("analysis")) {
        const json& an = doc.at("analysis");
        if (!an.is_object()) throw ConfigError("analysis", "must be a JSON object");
        AnalysisRequest req;
        if (an.contains("nullclines")) {
            NullclineRequest nc;
            nc.count = get_int_or(an.at("nullclines"), "analysis.nullclines", "count", 200);
            check(nc.count >= 2, "analysis.nullclines.count", "must be >= 2");
            req.nullclines = nc;
        }
        if (an.contains("lyapunov")) {
            const json& ly = an.at("lyapunov");
            LyapunovRequest lr;
            lr.grid = get_int_or(ly, "analysis.lyapunov", "grid", 200);
            check(lr.grid >= 2, "analysis.lyapunov.grid", "must be >= 2");
            if (ly.is_object() && ly.contains("R")) {
                lr.weight = as_number(ly.at("R"), "analysis.lyapunov.R");
                check(*lr.weight > 0.0, "analysis.lyapunov.R", "must be > 0");
            }
            req.lyapunov = lr;
        }
        if (an.contains("phase_grid")) {
            PhaseGridRequest pg;
            pg.count = get_int_or(an.at("phase_grid"), "analysis.phase_grid", "count", 25);
            check(pg.count >= 2, "analysis.phase_grid.count", "must be >= 2");
            req.phase_grid = pg;
        }
        sc.analysis = req;
    }

    if (doc.contains("investment")) {
        const json& inv = doc.at("investment");
        InvestmentConfig cfg;
        cfg.family = get_string(inv, "investment", "family");
        check(cfg.family == "linear" || cfg.family == "hyperbolic", "investment.family",
              "must be \"linear\" or \"hyperbolic\"");
        cfg.c1 = get_number(inv, "investment", "c1");
        cfg.c2 = get_number(inv, "investment", "c2");
        check(cfg.c1 > 0.0, "investment.c1", "must be > 0");
        check(cfg.c2 > 0.0, "investment.c2", "must be > 0");
        if (cfg.family == "hyperbolic") {
            cfg.beta_bar = get_number(inv, "investment", "beta_bar");
            check(cfg.beta_bar > 0.0, "investment.beta_bar", "must be > 0");
        }
        cfg.budget = get_number(inv, "investment", "M");
        check(cfg.budget > 0.0, "investment.M", "must be > 0");
        sc.investment = cfg;
    }

    if (doc.contains("stochastic")) {
        const json& st = doc.at("stochastic");
        StochasticConfig cfg;
        const json& n = require_field(st, "stochastic", "N");
        if (!n.is_number_integer()) throw ConfigError("stochastic.N", "must be an integer");
        cfg.population = n.get<std::int64_t>();
        check(cfg.population >= 1, "stochastic.N", "must be >= 1");
        cfg.replicates = get_int_or(st, "stochastic", "replicates", 1);
        check(cfg.replicates >= 1, "stochastic.replicates", "must be >= 1");
        if (st.contains("seed")) {
            const json& s = st.at("seed");
            if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
                throw ConfigError("stochastic.seed", "must be a non-negative integer");
            cfg.seed = s.get<std::uint64_t>();
        }
        if (st.contains("t_end")) {
            cfg.t_end = as_number(st.at("t_end"), "stochastic.t_end");
            check(*cfg.t_end > 0.0, "stochastic.t_end", "must be > 0");
        }
        cfg.grid_points = get_int_or(st, "stochastic", "grid_points", 201);
        check(cfg.grid_points >= 2, "stochastic.grid_points", "must be >= 2");
        for (auto [key, slot] :
             {std::pair{"initial_infected_active", &cfg.initial_infected_active},
              {"initial_infected_reactive", &cfg.initial_infected_reactive}}) {
            if (st.contains(key)) {
                const json& v = st.at(key);
                if (!v.is_number_integer())
                    throw ConfigError(join("stochastic", key), "must be an integer");
                *slot = v.get<std::int64_t>();
                check(**slot >= 0, join("stochastic", key), "must be >= 0");
            }
        }
        sc.stochastic = cfg;
    }

    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        SweepConfig cfg;
        cfg.parameter = get_string(sw, "sweep", "parameter");
        static const std::set<std::string> kParams = {"beta", "beta_a", "alpha",
                                                      "x_a",  "M",      "s_a0"};
        check(kParams.count(cfg.parameter) > 0, "sweep.parameter",
              "must be one of beta, beta_a, alpha, x_a, M, s_a0");
        cfg.min = get_number(sw, "sweep", "min");
        cfg.max = get_number(sw, "sweep", "max");
        check(cfg.min < cfg.max, "sweep.min", "must be < sweep.max");
        const json& cnt = require_field(sw, "sweep", "count");
        if (!cnt.is_number_integer()) throw ConfigError("sweep.count", "must be an integer");
        cfg.count = cnt.get<int>();
        check(cfg.count >= 2, "sweep.count", "must be >= 2");
        const json& outs = require_field(sw, "sweep", "outputs");
        if (!outs.is_array() || outs.empty())
            throw ConfigError("sweep.outputs", "must be a non-empty array of output names");
        static const std::set<std::string> kOutputs = {"lambda_plus", "regime", "f",
                                                       "L",           "a_star", "i_pk"};
        for (const json& o : outs) {
            if (!o.is_string() || kOutputs.count(o.get<std::string>()) == 0)
                throw ConfigError("sweep.outputs",
                                  "entries must be one of lambda_plus, regime, f, L, a_star, "
                                  "i_pk");
            cfg.outputs.push_back(o.get<std::string>());
        }

        // Domain and applicability checks up front, so every grid point is valid.
        const bool needs_asis =
            std::any_of(cfg.outputs.begin(), cfg.outputs.end(), [](const std::string& o) {
                return o == "lambda_plus" || o == "regime" || o == "f" || o == "L";
            });
        const bool needs_peak = std::count(cfg.outputs.begin(), cfg.outputs.end(), "i_pk") > 0;
        const bool needs_invest = std::count(cfg.outputs.begin(), cfg.outputs.end(), "a_star") > 0;
        if (needs_asis && sc.model != ModelKind::kAsis)
            throw ConfigError("sweep.outputs", "threshold outputs require model \"asis\"");
        if (needs_peak && sc.model != ModelKind::kAsir)
            throw ConfigError("sweep.outputs", "i_pk requires model \"asir\"");
        if (needs_invest && !sc.investment)
            throw ConfigError("sweep.outputs", "a_star requires an investment block");

        if (cfg.parameter == "beta" || cfg.parameter == "beta_a")
            check(cfg.min >= 0.0, "sweep.min", "rate must be >= 0");
        if (cfg.parameter == "beta_a")
            check(sc.model != ModelKind::kSis, "sweep.parameter",
                  "beta_a requires model \"asis\" or \"asir\"");
        if (cfg.parameter == "alpha") check(cfg.min > 0.0, "sweep.min", "alpha must be > 0");
        if (cfg.parameter == "x_a") {
            check(sc.model == ModelKind::kAsis, "sweep.parameter", "x_a requires model \"asis\"");
            check(cfg.min >= 0.0 && cfg.max <= 1.0, "sweep.min", "x_a must stay in [0, 1]");
        }
        if (cfg.parameter == "M") {
            check(static_cast<bool>(sc.investment), "sweep.parameter",
                  "M requires an investment block");
            check(cfg.min > 0.0, "sweep.min", "M must be > 0");
        }
        if (cfg.parameter == "s_a0") {
            check(sc.model == ModelKind::kAsir, "sweep.parameter", "s_a0 requires model \"asir\"");
            const double i_0 = sc.initial[2] + sc.initial[3];
            check(cfg.min >= 0.0 && cfg.max <= 1.0 - i_0 + 1e-12, "sweep.max",
                  "s_a0 must stay in [0, 1 - i_0]");
        }
        if (needs_invest && (cfg.parameter == "beta" || cfg.parameter == "alpha")) {
            const auto [beta, alpha] = ambient_rates(sc);
            if (cfg.parameter == "beta")
                check(cfg.min > alpha, "sweep.min", "a_star requires beta > alpha");
            else
                check(cfg.max < beta, "sweep.max", "a_star requires alpha < beta");
        }
        sc.sweep = cfg;
    }

    return sc;
}

// --- simulate ------------------------------------------------------------

namespace {

struct ModelRun {
    VectorField field;
    std::vector<std::string> columns;  // state columns, without t and i
};

ModelRun make_run(const Scenario& sc) {
    switch (sc.model) {
        case ModelKind::kSis: return {sis_vector_field(*sc.sis), {}};
        case ModelKind::kAsis: return {asis_vector_field(*sc.asis), {"i_a", "i_r"}};
        case ModelKind::kAsir:
            return {asir_vector_field(*sc.asir), {"s_a", "s_r", "i_a", "i_r", "r"}};
    }
    throw std::logic_error("make_run: unreachable");
}

std::string trajectory_csv(const ModelRun& run, const Trajectory& traj) {
    std::string csv = "t";
    for (const auto& c : run.columns) csv += "," + c;
    csv += ",i\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        csv += num12(traj.times[k]);
        for (double v : traj.states[k]) csv += "," + num12(v);
        csv += "," + num12(run.field.infected(std::span<const double>(traj.states[k])));
        csv += "\n";
    }
    return csv;
}

ojson state_json(const ModelRun& run, const std::vector<double>& state) {
    ojson out;
    if (run.columns.empty()) {
        out["i"] = state[0];
        return out;
    }
    for (std::size_t k = 0; k < run.columns.size(); ++k) out[run.columns[k]] = state[k];
    return out;
}

}  // namespace

CommandResult run_simulate(const Scenario& sc) {
    const IntegrationOptions& opts = require_integration(sc, "simulate");
    const ModelRun run = make_run(sc);
    const Trajectory traj = integrate(run.field, sc.initial, opts);

    ojson summary;
    summary["model"] = model_name(sc.model);
    summary["final_time"] = traj.final_time();
    summary["final_state"] = state_json(run, traj.final_state);
    summary["final_infected"] = run.field.infected(std::span<const double>(traj.final_state));
    summary["converged"] = traj.converged;
    summary["peak"] = ojson{{"value", traj.peak_infected}, {"time", traj.peak_time}};
    summary["samples"] = traj.times.size();

    CommandResult res;
    res.files.push_back({"trajectory.csv", trajectory_csv(run, traj)});
    res.files.push_back({"summary.json", summary.dump(2) + "\n"});
    return res;
}

// --- analyze ---------------------------------------------------------------

CommandResult run_analyze(const Scenario& sc) {
    const AsisParams& p = require_asis(sc, "analyze");
    const RegimeReport rep = classify(p);

    ojson regime;
    regime["lambda_plus"] = rep.spectral.lambda_plus;
    regime["lambda_minus"] = rep.spectral.lambda_minus;
    regime["regime"] = rep.regime == Regime::kEndemic ? "ENDEMIC" : "IFE_GAS";
    if (rep.endemic) {
        regime["endemic_equilibrium"] =
            ojson{{"i_a", rep.endemic->i_a}, {"i_r", rep.endemic->i_r}};
        regime["endemic_fraction"] = *rep.endemic_fraction;
    }
    regime["limiting_infected"] = rep.limiting_infected;
    regime["basic_reproduction"] = p.beta / p.alpha;
    regime["threshold_rhs"] = 1.0 + p.beta_a * p.x_a / p.alpha;
    regime["sis_reduction"] = rep.sis_reduction;

    CommandResult res;
    res.files.push_back({"regime.json", regime.dump(2) + "\n"});

    const bool interior = p.x_a > 0.0 && p.x_a < 1.0;
    if (sc.analysis && sc.analysis->nullclines) {
        check(interior, "analysis.nullclines",
              "x_a in {0, 1} leaves no planar nullclines; use the SIS reduction");
        check(p.beta > 0.0, "analysis.nullclines", "requires beta > 0");
        const int count = sc.analysis->nullclines->count;
        std::string csv = "i_a,I_a,Ihat_r\n";
        for (int k = 0; k < count; ++k) {
            // Uniform over [0, x_a), leaving out the singular endpoint of I_a.
            const double i_a = p.x_a * k / count;
            csv += num12(i_a) + "," + num12(nullcline_a(p, i_a)) + "," +
                   num12(nullcline_r_inverse(p, i_a)) + "\n";
        }
        res.files.push_back({"nullclines.csv", csv});
    }

    if (sc.analysis && sc.analysis->phase_grid) {
        const int count = sc.analysis->phase_grid->count;
        std::string csv = "i_a,i_r,di_a,di_r\n";
        for (int ka = 0; ka < count; ++ka) {
            const double i_a = p.x_a * ka / (count - 1);
            for (int kr = 0; kr < count; ++kr) {
                const double i_r = (1.0 - p.x_a) * kr / (count - 1);
                const AsisRates rates = asis_rates(p, i_a, i_r);
                csv += num12(i_a) + "," + num12(i_r) + "," + num12(rates.di_a) + "," +
                       num12(rates.di_r) + "\n";
            }
        }
        res.files.push_back({"phase_grid.csv", csv});
    }

    if (sc.analysis && sc.analysis->lyapunov) {
        check(interior, "analysis.lyapunov",
              "x_a in {0, 1} degenerates the planar state space; use the SIS reduction");
        const LyapunovRequest& req = *sc.analysis->lyapunov;
        ojson ly;
        if (rep.regime == Regime::kEndemic) {
            const AdmissibleR window = admissible_R(p);
            const double R = req.weight.value_or(window.choice);
            const LyapunovCertificate cert = certify_endemic(p, R, req.grid);
            const RegionSignReport signs = check_region_signs(p, R, req.grid);
            ly["kind"] = "ENDEMIC";
            ly["R"] = R;
            if (window.has_window) {
                ly["window"] = ojson{{"lower", window.lower},
                                     {"upper", window.upper},
                                     {"upper_slope", window.upper_slope},
                                     {"upper_ratio", window.upper_ratio}};
            }
            ly["samples_checked"] = cert.samples_checked;
            ly["max_violation"] = cert.max_violation;
            ly["certified"] = cert.certified;
            ly["region_signs"] = ojson{{"min_fa_below", signs.min_fa_below},
                                       {"max_fa_above", signs.max_fa_above},
                                       {"min_fr_below", signs.min_fr_below},
                                       {"max_fr_above", signs.max_fr_above},
                                       {"holds", signs.holds}};
        } else {
            check(!req.weight.has_value(), "analysis.lyapunov.R",
                  "the weight applies to the endemic certificate only");
            const LyapunovCertificate cert = certify_ife(p, req.grid);
            ly["kind"] = "IFE";
            ly["samples_checked"] = cert.samples_checked;
            ly["max_violation"] = cert.max_violation;
            ly["certified"] = cert.certified;
        }
        res.files.push_back({"lyapunov.json", ly.dump(2) + "\n"});
    }
    return res;
}

// --- optimize ---------------------------------------------------------------

CommandResult run_optimize(const Scenario& sc) {
    if (!sc.investment) throw ConfigError("investment", "required for optimize");
    const auto [beta, alpha] = ambient_rates(sc);
    check(beta > alpha, "params.beta", "optimize requires beta > alpha");
    const InvestmentProblem prob = build_problem(*sc.investment, beta, alpha);
    const EradicationCheck erad = eradication_check(prob);
    const InvestmentSolution sol = solve(prob);

    ojson out;
    out["family"] = sc.investment->family;
    out["budget"] = sc.investment->budget;
    out["a_star"] = sol.a_star;
    out["b_star"] = sol.b_star;
    out["case"] = sol.allocation_case == InvestmentSolution::Case::kSaturation ? "SATURATION"
                                                                               : "INTERIOR_FOC";
    out["foc_residual"] = sol.foc_residual;
    out["predicted_L"] = sol.predicted_limit;
    out["eradication"] = ojson{{"feasible", erad.feasible},
                               {"best_product", erad.best_product},
                               {"a_at_best", erad.a_at_best}};

    CommandResult res;
    res.files.push_back({"investment.json", out.dump(2) + "\n"});
    return res;
}

// --- peak --------------------------------------------------------------------

CommandResult run_peak(const Scenario& sc) {
    if (sc.model != ModelKind::kAsir || !sc.asir)
        throw ConfigError("model", "peak requires model \"asir\"");
    const IntegrationOptions& opts = require_integration(sc, "peak");
    check(sc.initial[4] == 0.0, "initial.r",
          "the peak characterization assumes no initially protected nodes");
    const double s_a0 = sc.initial[0];
    const double i_0 = sc.initial[2] + sc.initial[3];
    check(i_0 > 0.0 && i_0 < 1.0, "initial", "requires total infected fraction in (0, 1)");

    const AsirPeakReport formula = asir_peak(*sc.asir, s_a0, i_0);
    const ModelRun run = make_run(sc);
    const Trajectory traj = integrate(run.field, sc.initial, opts);

    ojson out;
    out["case"] =
        formula.peak_case == AsirPeakReport::Case::kMonotone ? "MONOTONE" : "FORMULA";
    out["i_pk_formula"] = formula.i_pk;
    if (std::isfinite(formula.threshold_rhs)) out["threshold_rhs"] = formula.threshold_rhs;
    out["i_pk_integrated"] = traj.peak_infected;
    out["peak_time"] = traj.peak_time;
    out["delta"] = std::abs(formula.i_pk - traj.peak_infected);

    CommandResult res;
    res.files.push_back({"peak.json", out.dump(2) + "\n"});
    return res;
}

// --- sweep ---------------------------------------------------------------------

namespace {

// One grid point of a sweep: scenario with the parameter patched in.
struct SweepPoint {
    std::optional<SisParams> sis;
    std::optional<AsisParams> asis;
    std::optional<AsirParams> asir;
    double budget = 0.0;
    double s_a0 = 0.0;
    double i_0 = 0.0;
};

SweepPoint patch_point(const Scenario& sc, const std::string& parameter, double v) {
    SweepPoint pt;
    pt.sis = sc.sis;
    pt.asis = sc.asis;
    pt.asir = sc.asir;
    if (sc.investment) pt.budget = sc.investment->budget;
    if (sc.model == ModelKind::kAsir) {
        pt.s_a0 = sc.initial[0];
        pt.i_0 = sc.initial[2] + sc.initial[3];
    }
    auto patch = [&](auto& slot, auto member) {
        if (slot) {
            auto p = *slot;
            p.*member = v;
            slot = p;
        }
    };
    if (parameter == "beta") {
        patch(pt.sis, &SisParams::beta);
        patch(pt.asis, &AsisParams::beta);
        patch(pt.asir, &AsirParams::beta);
    } else if (parameter == "beta_a") {
        patch(pt.asis, &AsisParams::beta_a);
        patch(pt.asir, &AsirParams::beta_a);
    } else if (parameter == "alpha") {
        patch(pt.sis, &SisParams::alpha);
        patch(pt.asis, &AsisParams::alpha);
        patch(pt.asir, &AsirParams::alpha);
    } else if (parameter == "x_a") {
        patch(pt.asis, &AsisParams::x_a);
    } else if (parameter == "M") {
        pt.budget = v;
    } else if (parameter == "s_a0") {
        pt.s_a0 = v;
    }
    return pt;
}

}  // namespace

CommandResult run_sweep(const Scenario& sc, int workers) {
    if (!sc.sweep) throw ConfigError("sweep", "required for sweep");
    const SweepConfig& sw = *sc.sweep;

    std::vector<std::string> rows(static_cast<std::size_t>(sw.count));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    detail::parallel_for(sw.count, workers, [&](int k) {
        try {
            const double v = sw.min + (sw.max - sw.min) * k / (sw.count - 1);
            const SweepPoint pt = patch_point(sc, sw.parameter, v);
            std::string row = sw.parameter + "," + num12(v);
            std::optional<RegimeReport> rep;
            for (const std::string& out : sw.outputs) {
                row += ",";
                if (out == "lambda_plus" || out == "regime" || out == "f" || out == "L") {
                    if (!rep) rep = classify(*pt.asis);
                    if (out == "lambda_plus") row += num12(rep->spectral.lambda_plus);
                    if (out == "regime")
                        row += rep->regime == Regime::kEndemic ? "ENDEMIC" : "IFE_GAS";
                    if (out == "f" && rep->endemic_fraction)
                        row += num12(*rep->endemic_fraction);
                    if (out == "L") row += num12(rep->limiting_infected);
                } else if (out == "a_star") {
                    const auto [beta, alpha] = [&]() -> std::pair<double, double> {
                        if (pt.asis) return {pt.asis->beta, pt.asis->alpha};
                        if (pt.asir) return {pt.asir->beta, pt.asir->alpha};
                        return {pt.sis->beta, pt.sis->alpha};
                    }();
                    InvestmentConfig cfg = *sc.investment;
                    cfg.budget = pt.budget;
                    row += num12(solve(build_problem(cfg, beta, alpha)).a_star);
                } else if (out == "i_pk") {
                    row += num12(asir_peak(*pt.asir, pt.s_a0, pt.i_0).i_pk);
                }
            }
            rows[static_cast<std::size_t>(k)] = row + "\n";
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    std::string csv = "parameter,value";
    for (const std::string& out : sw.outputs) csv += "," + out;
    csv += "\n";
    for (const std::string& row : rows) csv += row;

    CommandResult res;
    res.files.push_back({"sweep.csv", csv});
    return res;
}

// --- stochastic -----------------------------------------------------------------

CommandResult run_stochastic(const Scenario& sc, std::optional<std::uint64_t> seed_override,
                             int workers) {
    const AsisParams& p = require_asis(sc, "stochastic");
    if (!sc.stochastic) throw ConfigError("stochastic", "required for stochastic");
    const StochasticConfig& st = *sc.stochastic;

    PopulationConfig cfg{.population = st.population,
                         .params = p,
                         .initial_infected_active = 0,
                         .initial_infected_reactive = 0,
                         .seed = seed_override.value_or(st.seed),
                         .t_end = 0.0,
                         .replicates = st.replicates};
    if (st.t_end)
        cfg.t_end = *st.t_end;
    else if (sc.integration)
        cfg.t_end = sc.integration->t_end;
    else
        throw ConfigError("stochastic.t_end", "required (or provide integration.t_end)");

    const std::int64_t n_active = cfg.active_count();
    const double n = static_cast<double>(cfg.population);
    // Derived counts are clamped into the rounded type populations so a
    // boundary fraction cannot overflow by one node.
    cfg.initial_infected_active = st.initial_infected_active.value_or(
        std::min<std::int64_t>(std::llround(sc.initial[0] * n), n_active));
    cfg.initial_infected_reactive = st.initial_infected_reactive.value_or(
        std::min<std::int64_t>(std::llround(sc.initial[1] * n), cfg.population - n_active));
    check(cfg.initial_infected_active <= n_active, "stochastic.initial_infected_active",
          "exceeds the active population round(x_a * N)");
    check(cfg.initial_infected_reactive <= cfg.population - n_active,
          "stochastic.initial_infected_reactive", "exceeds the reactive population");

    const EnsembleSummary summary = simulate_summary(cfg, st.grid_points, workers);

    std::string csv = "t,mean_ia,mean_ir,sd_ia,sd_ir\n";
    for (std::size_t k = 0; k < summary.times.size(); ++k) {
        csv += num12(summary.times[k]) + "," + num12(summary.mean_ia[k]) + "," +
               num12(summary.mean_ir[k]) + "," + num12(summary.sd_ia[k]) + "," +
               num12(summary.sd_ir[k]) + "\n";
    }

    // Mean-field reference: the ODE started from the realized fractions.
    const AsisParams realized(p.beta, p.beta_a, p.alpha, summary.realized_active_fraction);
    IntegrationOptions opts;
    opts.t_end = cfg.t_end;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-12;
    const std::vector<double> s0 = {
        static_cast<double>(cfg.initial_infected_active) / n,
        static_cast<double>(cfg.initial_infected_reactive) / n};
    const Trajectory mf = integrate(asis_vector_field(realized), s0, opts);

    const double mean_ia_end = summary.mean_ia.back();
    const double mean_ir_end = summary.mean_ir.back();
    ojson out;
    out["population"] = cfg.population;
    out["replicates"] = cfg.replicates;
    out["seed"] = cfg.seed;
    out["t_end"] = cfg.t_end;
    out["realized_active_fraction"] = summary.realized_active_fraction;
    out["extinction_fraction"] = summary.extinction_fraction;
    out["mean_infected"] = ojson{{"i_a", mean_ia_end},
                                 {"i_r", mean_ir_end},
                                 {"total", mean_ia_end + mean_ir_end}};
    out["mean_field"] = ojson{{"i_a", mf.final_state[0]},
                              {"i_r", mf.final_state[1]},
                              {"total", mf.final_state[0] + mf.final_state[1]}};
    out["delta"] =
        ojson{{"i_a", std::abs(mean_ia_end - mf.final_state[0])},
              {"i_r", std::abs(mean_ir_end - mf.final_state[1])},
              {"total",
               std::abs(mean_ia_end + mean_ir_end - mf.final_state[0] - mf.final_state[1])}};

    CommandResult res;
    res.files.push_back({"ensemble.csv", csv});
    res.files.push_back({"stochastic.json", out.dump(2) + "\n"});
    return res;
}

// --- output ------------------------------------------------------------------------

void write_outputs(const std::string& out_dir, const CommandResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<fs::path> temps;
    temps.reserve(result.files.size());
    for (const OutputFile& f : result.files) {
        const fs::path tmp = fs::path(out_dir) / (f.name + ".tmp");
        std::ofstream stream(tmp, std::ios::binary | std::ios::trunc);
        stream.write(f.bytes.data(), static_cast<std::streamsize>(f.bytes.size()));
        stream.close();
        if (!stream) {
            for (const fs::path& t : temps) fs::remove(t);
            fs::remove(tmp);
            throw std::runtime_error("failed to write " + tmp.string());
        }
        temps.push_back(tmp);
    }
    for (std::size_t k = 0; k < result.files.size(); ++k) {
        fs::rename(temps[k], fs::path(out_dir) / result.files[k].name);
    }
}

}  // namespace acdyn
