#include "acdyn/models.hpp"

#include <cmath>
#include <string>

namespace acdyn {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool in_box(double v, double lo, double hi, double tol) {
    return v >= lo - tol && v <= hi + tol;
}

}  // namespace

SisParams::SisParams(double beta_, double alpha_) : beta(beta_), alpha(alpha_) {
    require(std::isfinite(beta) && beta > 0.0, "SisParams: beta must be > 0");
    require(std::isfinite(alpha) && alpha > 0.0, "SisParams: alpha must be > 0");
}

AsisParams::AsisParams(double beta_, double beta_a_, double alpha_, double x_a_)
    : beta(beta_), beta_a(beta_a_), alpha(alpha_), x_a(x_a_) {
    require(std::isfinite(beta) && beta >= 0.0, "AsisParams: beta must be >= 0");
    require(std::isfinite(beta_a) && beta_a >= 0.0, "AsisParams: beta_a must be >= 0");
    require(std::isfinite(alpha) && alpha > 0.0, "AsisParams: alpha must be > 0");
    require(std::isfinite(x_a) && x_a >= 0.0 && x_a <= 1.0, "AsisParams: x_a must be in [0, 1]");
}

AsirParams::AsirParams(double beta_, double beta_a_, double alpha_)
    : beta(beta_), beta_a(beta_a_), alpha(alpha_) {
    require(std::isfinite(beta) && beta >= 0.0, "AsirParams: beta must be >= 0");
    require(std::isfinite(beta_a) && beta_a >= 0.0, "AsirParams: beta_a must be >= 0");
    require(std::isfinite(alpha) && alpha > 0.0, "AsirParams: alpha must be > 0");
}

void validate_sis_state(double i, double tol) {
    require(std::isfinite(i) && in_box(i, 0.0, 1.0, tol), "sis state: i must be in [0, 1]");
}

void validate_asis_state(const AsisParams& p, const AsisState& s, double tol) {
    require(std::isfinite(s.i_a) && in_box(s.i_a, 0.0, p.x_a, tol),
            "asis state: i_a must be in [0, x_a]");
    require(std::isfinite(s.i_r) && in_box(s.i_r, 0.0, 1.0 - p.x_a, tol),
            "asis state: i_r must be in [0, 1 - x_a]");
}

void validate_asir_state(const AsirState& s, double tol) {
    for (double v : {s.s_a, s.s_r, s.i_a, s.i_r, s.r}) {
        require(std::isfinite(v) && in_box(v, 0.0, 1.0, tol),
                "asir state: components must be in [0, 1]");
    }
    // Sum drifts with integration rounding, so the gate is looser than
    // the per-component box check.
    require(std::abs(s.total() - 1.0) <= 1e-8, "asir state: components must sum to 1");
}

double sis_rate(const SisParams& p, double i) {
    // Factor order mirrors the planar reactive component, so the x_a = 0
    // reduction reproduces this rate bit-exactly.
    return p.beta * (1.0 - i) * i - p.alpha * i;
}

AsisRates asis_rates(const AsisParams& p, double i_a, double i_r) {
    const double i = i_a + i_r;
    const double s_a = p.x_a - i_a;
    const double s_r = (1.0 - p.x_a) - i_r;
    return {p.beta * s_a * i - p.beta_a * s_a * i_a - p.alpha * i_a,
            p.beta * s_r * i - p.beta_a * s_a * i_r - p.alpha * i_r};
}

AsirRates asir_rates(const AsirParams& p, const AsirState& s) {
    const double i = s.i_a + s.i_r;
    AsirRates out;
    out.ds_a = -p.beta * s.s_a * i;
    out.ds_r = -p.beta * s.s_r * i;
    out.di_a = p.beta * s.s_a * i - p.beta_a * s.s_a * s.i_a - p.alpha * s.i_a;
    out.di_r = p.beta * s.s_r * i - p.beta_a * s.s_a * s.i_r - p.alpha * s.i_r;
    // Negated partial sum instead of beta_a*s_a*i + alpha*i: identical in
    // exact arithmetic, and makes the five components cancel bit-exactly.
    out.dr = -(((out.ds_a + out.ds_r) + out.di_a) + out.di_r);
    return out;
}

double sis_field(const SisParams& p, double i) {
    validate_sis_state(i);
    return sis_rate(p, i);
}

AsisRates asis_field(const AsisParams& p, const AsisState& s) {
    validate_asis_state(p, s);
    return asis_rates(p, s.i_a, s.i_r);
}

AsirRates asir_field(const AsirParams& p, const AsirState& s) {
    validate_asir_state(s);
    return asir_rates(p, s);
}

}  // namespace acdyn
