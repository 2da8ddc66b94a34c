#pragma once

#include <functional>
#include <limits>

namespace acdyn {

/// Concave, strictly increasing return on investment with value(0) = 0.
/// The saturating family represents h(a) = min{hat(a), 1}: `value` already
/// applies the cap, `derivative` is the one-sided hat-derivative at the
/// saturation point t and zero beyond it. t = +inf when the cap is never
/// reached (then the function is an ordinary member of the family).
struct ReturnFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    bool saturating = false;
    double saturation = std::numeric_limits<double>::infinity();  // t
};

/// g(x) = c * x.
[[nodiscard]] ReturnFunction linear_return(double c);

/// h(a) = min{c * a, 1} with saturation point t = 1/c.
[[nodiscard]] ReturnFunction linear_fraction_return(double c);

/// f(x) = scale * x / (x + c); bounded by `scale`, saturation at +inf.
[[nodiscard]] ReturnFunction hyperbolic_return(double c, double scale = 1.0);

/// Wraps a user-supplied pair (hat value, hat derivative) as a saturating
/// fraction return. If `t` is NaN the saturation point is located by
/// bisection on hat(a) = 1 over [0, cap].
[[nodiscard]] ReturnFunction saturating_return(std::function<double(double)> hat_value,
                                               std::function<double(double)> hat_derivative,
                                               double t = std::numeric_limits<double>::quiet_NaN(),
                                               double cap = 1e12);

/// Numeric audit of the concave-increasing contract on [0, cap]:
/// value(0) = 0, strictly increasing values, positive non-increasing
/// derivative. Throws std::invalid_argument on violation. The bracketed
/// root-finding below silently misbehaves on functions outside the family,
/// so problems audit their returns at construction.
void audit_return_function(const ReturnFunction& f, double cap, int samples = 1000);

/// Budget-allocation problem: split M between raising the defender
/// fraction (h, spend a) and raising cleanup effectiveness (g, spend b)
/// to minimize the limiting infected fraction with ambient rates
/// (beta, alpha).
struct InvestmentProblem {
    ReturnFunction h;  // fraction return, values in [0, 1], saturating form
    ReturnFunction g;  // rate return
    double budget;     // M > 0
    double beta;
    double alpha;

    InvestmentProblem(ReturnFunction h_, ReturnFunction g_, double budget_, double beta_,
                      double alpha_);
};

/// H_1(a) - H_2(a) = g(M-a) h'(a) - g'(M-a) h(a); strictly decreasing on
/// (0, min{M, t}). Requires a in (0, M).
[[nodiscard]] double foc_residual(const InvestmentProblem& prob, double a);

struct EradicationCheck {
    bool feasible = false;   // max product >= beta - alpha
    double best_product = 0.0;
    double a_at_best = 0.0;
};

/// Maximizes g(M-a) h(a) over [0, M] by golden-section search on its
/// logarithm (a sum of concave logs, hence unimodal).
[[nodiscard]] EradicationCheck eradication_check(const InvestmentProblem& prob);

struct InvestmentSolution {
    enum class Case { kInteriorFoc, kSaturation };
    double a_star = 0.0;
    double b_star = 0.0;
    double foc_residual = 0.0;      // H_1(a*) - H_2(a*)
    double predicted_limit = 0.0;   // limiting infected fraction at the optimum
    bool eradication_feasible = false;
    Case allocation_case = Case::kInteriorFoc;
};

/// Unique optimal allocation. Interior case: bracketed bisection on the
/// first-order condition (tolerance 1e-12 on the a-interval). Saturation
/// case (t < M and g'(M-t) < g(M-t) hat-h'(t)): a* = t, b* = M - t.
/// Throws std::runtime_error on non-bracketing residual signs, which
/// signals a return function violating the concave-increasing contract.
[[nodiscard]] InvestmentSolution solve(const InvestmentProblem& prob);

}  // namespace acdyn
