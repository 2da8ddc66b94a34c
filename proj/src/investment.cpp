#include "acdyn/investment.hpp"

#include <cmath>
#include <stdexcept>

#include "acdyn/analysis.hpp"

namespace acdyn {

namespace {

constexpr double kBisectTol = 1e-12;
constexpr int kIterCap = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

double raw_residual(const InvestmentProblem& p, double a) {
    const double b = p.budget - a;
    return p.g.value(b) * p.h.derivative(a) - p.g.derivative(b) * p.h.value(a);
}

double product(const InvestmentProblem& p, double a) {
    return p.g.value(p.budget - a) * p.h.value(a);
}

}  // namespace

ReturnFunction linear_return(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("linear_return: c must be > 0");
    ReturnFunction f;
    f.value = [c](double x) { return c * x; };
    f.derivative = [c](double) { return c; };
    return f;
}

ReturnFunction linear_fraction_return(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("linear_fraction_return: c must be > 0");
    const double t = 1.0 / c;
    ReturnFunction f;
    f.value = [c](double x) { return std::min(c * x, 1.0); };
    f.derivative = [c, t](double x) { return x > t ? 0.0 : c; };
    f.saturating = true;
    f.saturation = t;
    return f;
}

ReturnFunction hyperbolic_return(double c, double scale) {
    if (!(c > 0.0) || !(scale > 0.0))
        throw std::invalid_argument("hyperbolic_return: constants must be > 0");
    ReturnFunction f;
    f.value = [c, scale](double x) { return scale * x / (x + c); };
    f.derivative = [c, scale](double x) { return scale * c / ((x + c) * (x + c)); };
    return f;
}

ReturnFunction saturating_return(std::function<double(double)> hat_value,
                                 std::function<double(double)> hat_derivative, double t,
                                 double cap) {
    if (std::isnan(t)) {
        if (hat_value(cap) < 1.0) {
            t = kInf;
        } else {
            double lo = 0.0, hi = cap;
            for (int it = 0; it < kIterCap && hi - lo > kBisectTol; ++it) {
                const double mid = 0.5 * (lo + hi);
                (hat_value(mid) < 1.0 ? lo : hi) = mid;
            }
            t = 0.5 * (lo + hi);
        }
    }
    ReturnFunction f;
    f.value = [hv = std::move(hat_value)](double x) { return std::min(hv(x), 1.0); };
    f.derivative = [hd = std::move(hat_derivative), t](double x) {
        return x > t ? 0.0 : hd(x);
    };
    f.saturating = true;
    f.saturation = t;
    return f;
}

void audit_return_function(const ReturnFunction& f, double cap, int samples) {
    if (!f.value || !f.derivative)
        throw std::invalid_argument("return function: missing value or derivative");
    if (std::abs(f.value(0.0)) > 1e-12)
        throw std::invalid_argument("return function: value(0) must be 0");
    double prev_v = 0.0;
    double prev_d = kInf;
    for (int k = 1; k <= samples; ++k) {
        const double x = cap * k / samples;
        const double v = f.value(x);
        const double d = f.derivative(x);
        if (!std::isfinite(v) || !std::isfinite(d))
            throw std::invalid_argument("return function: non-finite value on [0, cap]");
        const bool saturated = f.saturating && x >= f.saturation;
        if (!saturated && !(v > prev_v))
            throw std::invalid_argument("return function: value must be strictly increasing");
        if (v < prev_v)
            throw std::invalid_argument("return function: value must be non-decreasing");
        if (!saturated && !(d > 0.0))
            throw std::invalid_argument("return function: derivative must be positive");
        if (d > prev_d + 1e-12)
            throw std::invalid_argument("return function: derivative must be non-increasing");
        if (f.saturating && v > 1.0)
            throw std::invalid_argument("return function: fraction return must stay within [0, 1]");
        prev_v = v;
        prev_d = d;
    }
}

InvestmentProblem::InvestmentProblem(ReturnFunction h_, ReturnFunction g_, double budget_,
                                     double beta_, double alpha_)
    : h(std::move(h_)), g(std::move(g_)), budget(budget_), beta(beta_), alpha(alpha_) {
    if (!(budget > 0.0)) throw std::invalid_argument("InvestmentProblem: budget must be > 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("InvestmentProblem: alpha must be > 0");
    if (!(beta > alpha))
        throw std::invalid_argument(
            "InvestmentProblem: requires beta > alpha; otherwise zero investment already "
            "eliminates the infection");
    if (!h.saturating)
        throw std::invalid_argument("InvestmentProblem: h must be a saturating fraction return");
    audit_return_function(h, budget);
    audit_return_function(g, budget);
}

double foc_residual(const InvestmentProblem& prob, double a) {
    if (!(a > 0.0 && a < prob.budget))
        throw std::invalid_argument("foc_residual: a must be in (0, M)");
    return raw_residual(prob, a);
}

EradicationCheck eradication_check(const InvestmentProblem& prob) {
    const double target = prob.beta - prob.alpha;
    auto log_product = [&](double a) {
        const double v = product(prob, a);
        return v > 0.0 ? std::log(v) : -kInf;
    };
    constexpr double kGolden = 0.6180339887498949;  // 1/phi
    double lo = 0.0, hi = prob.budget;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = log_product(x1);
    double f2 = log_product(x2);
    for (int it = 0; it < kIterCap && hi - lo > 1e-12 * prob.budget; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = log_product(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = log_product(x1);
        }
    }
    EradicationCheck out;
    out.a_at_best = 0.5 * (lo + hi);
    out.best_product = product(prob, out.a_at_best);
    out.feasible = out.best_product >= target;
    return out;
}

InvestmentSolution solve(const InvestmentProblem& prob) {
    const double M = prob.budget;
    const double t = prob.h.saturation;

    InvestmentSolution sol;
    sol.eradication_feasible = eradication_check(prob).feasible;

    bool saturation_case = false;
    if (t < M) {
        // Past t extra h-spend is wasted, so the corner (t, M-t) wins
        // unless g still has the larger marginal return there.
        saturation_case = prob.g.derivative(M - t) < prob.g.value(M - t) * prob.h.derivative(t);
    }

    if (saturation_case) {
        sol.allocation_case = InvestmentSolution::Case::kSaturation;
        sol.a_star = t;
    } else {
        sol.allocation_case = InvestmentSolution::Case::kInteriorFoc;
        double lo = 0.0, hi = std::min(M, t);
        double r_lo = raw_residual(prob, lo);
        double r_hi = raw_residual(prob, hi);
        if (!(r_lo > 0.0) || r_hi > 0.0)
            throw std::runtime_error(
                "solve: residual does not bracket a root; return functions violate the "
                "concave-increasing contract");
        int it = 0;
        while (hi - lo > kBisectTol) {
            if (++it > kIterCap)
                throw std::runtime_error("solve: bisection failed to converge");
            const double mid = 0.5 * (lo + hi);
            const double r_mid = raw_residual(prob, mid);
            if (!std::isfinite(r_mid))
                throw std::runtime_error("solve: non-finite residual");
            (r_mid > 0.0 ? lo : hi) = mid;
        }
        sol.a_star = 0.5 * (lo + hi);
    }

    sol.b_star = M - sol.a_star;
    sol.foc_residual = raw_residual(prob, sol.a_star);
    sol.predicted_limit = limiting_infected(prob.beta, prob.g.value(sol.b_star), prob.alpha,
                                            prob.h.value(sol.a_star));
    return sol;
}

}  // namespace acdyn
