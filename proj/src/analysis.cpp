#include "acdyn/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace acdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double isocline_offset(const AsisParams& p) {
    // d = alpha + beta_a x_a - beta (1 - x_a)
    return p.alpha + p.beta_a * p.x_a - p.beta * (1.0 - p.x_a);
}

void require_interior_x_a(const AsisParams& p, const char* who) {
    if (p.x_a <= 0.0 || p.x_a >= 1.0)
        throw std::invalid_argument(std::string(who) +
                                    ": x_a in {0, 1} degenerates the planar state space; "
                                    "analyze via the 1-D SIS reduction instead");
}

void require_endemic(const AsisParams& p, const char* who) {
    if (!(spectral(p).lambda_plus > 0.0))
        throw std::invalid_argument(std::string(who) + ": requires the endemic regime "
                                                       "(lambda_+ > 0)");
}

}  // namespace

SpectralInfo spectral(const AsisParams& p) {
    return {p.beta - p.beta_a * p.x_a - p.alpha, -(p.beta_a * p.x_a + p.alpha)};
}

RegimeReport classify(const AsisParams& p) {
    RegimeReport rep;
    rep.spectral = spectral(p);
    rep.sis_reduction = (p.x_a == 0.0);
    if (rep.spectral.lambda_plus > 0.0) {
        rep.regime = Regime::kEndemic;
        const double f = rep.spectral.lambda_plus / (rep.spectral.lambda_plus + p.alpha);
        rep.endemic_fraction = f;
        rep.endemic = AsisState{p.x_a * f, (1.0 - p.x_a) * f};
        rep.limiting_infected = f;
    } else {
        rep.regime = Regime::kIfeGas;
        rep.limiting_infected = 0.0;
    }
    return rep;
}

std::array<double, 2> Mat2::real_eigenvalues() const {
    const double disc = trace() * trace() - 4.0 * det();
    if (disc < 0.0) throw std::domain_error("Mat2: complex eigenvalue pair");
    const double root = std::sqrt(disc);
    return {0.5 * (trace() + root), 0.5 * (trace() - root)};
}

Mat2 jacobian(const AsisParams& p, const AsisState& s) {
    validate_asis_state(p, s);
    const double s_a = p.x_a - s.i_a;
    return {(p.beta - p.beta_a) * (p.x_a - 2.0 * s.i_a) - p.beta * s.i_r - p.alpha,
            p.beta * s_a,
            p.beta_a * s.i_r + p.beta * (1.0 - p.x_a - s.i_r),
            p.beta * (1.0 - p.x_a - 2.0 * s.i_r - s.i_a) - p.beta_a * s_a - p.alpha};
}

double nullcline_a(const AsisParams& p, double i_a) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("nullcline_a: requires beta > 0");
    if (!(i_a >= 0.0 && i_a < p.x_a))
        throw std::invalid_argument("nullcline_a: i_a must be in [0, x_a)");
    return (p.alpha / (p.beta * (p.x_a - i_a)) - (1.0 - p.beta_a / p.beta)) * i_a;
}

double nullcline_r(const AsisParams& p, double i_r) {
    if (!(i_r >= 0.0 && i_r <= 1.0 - p.x_a))
        throw std::invalid_argument("nullcline_r: i_r must be in [0, 1 - x_a]");
    const double denom = p.beta * (1.0 - p.x_a - i_r) + p.beta_a * i_r;
    if (denom <= 0.0) throw std::invalid_argument("nullcline_r: singular at this i_r");
    return (p.alpha - p.beta * (1.0 - p.x_a - i_r) + p.beta_a * p.x_a) / denom * i_r;
}

double nullcline_r_inverse(const AsisParams& p, double i_a) {
    if (!(p.beta > 0.0)) throw std::invalid_argument("nullcline_r_inverse: requires beta > 0");
    if (!(i_a >= 0.0 && i_a <= p.x_a + kStateTol))
        throw std::invalid_argument("nullcline_r_inverse: i_a must be in [0, x_a]");
    const double w = (isocline_offset(p) + i_a * (p.beta - p.beta_a)) / p.beta;
    return 0.5 * (-w + std::sqrt(w * w + 4.0 * i_a * (1.0 - p.x_a)));
}

double nullcline_r_inverse_slope(const AsisParams& p, double i_a) {
    if (!(p.beta > 0.0))
        throw std::invalid_argument("nullcline_r_inverse_slope: requires beta > 0");
    if (!(i_a >= 0.0 && i_a <= p.x_a + kStateTol))
        throw std::invalid_argument("nullcline_r_inverse_slope: i_a must be in [0, x_a]");
    const double d = isocline_offset(p);
    const double u = d + i_a * (p.beta - p.beta_a);
    const double radicand = (u / p.beta) * (u / p.beta) + 4.0 * i_a * (1.0 - p.x_a);
    if (radicand <= 0.0)
        throw std::invalid_argument("nullcline_r_inverse_slope: singular at this i_a");
    const double num = 2.0 * (p.beta - p.beta_a) * u / (p.beta * p.beta) + 4.0 * (1.0 - p.x_a);
    return 0.5 * (p.beta_a / p.beta - 1.0 + num / (2.0 * std::sqrt(radicand)));
}

double lyapunov_ife(const AsisParams& p, const AsisState& s) {
    require_interior_x_a(p, "lyapunov_ife");
    validate_asis_state(p, s);
    return std::max((1.0 - p.x_a) / p.x_a * s.i_a, s.i_r);
}

double lyapunov_ife_rate(const AsisParams& p, const AsisState& s) {
    require_interior_x_a(p, "lyapunov_ife_rate");
    validate_asis_state(p, s);
    const AsisRates r = asis_rates(p, s.i_a, s.i_r);
    return s.i_r > (1.0 - p.x_a) / p.x_a * s.i_a ? r.di_r : r.di_a;
}

VrValue lyapunov_endemic(const AsisParams& p, const AsisState& s, double R) {
    require_interior_x_a(p, "lyapunov_endemic");
    require_endemic(p, "lyapunov_endemic");
    if (!(R > 0.0)) throw std::invalid_argument("lyapunov_endemic: R must be > 0");
    validate_asis_state(p, s);
    const SpectralInfo sp = spectral(p);
    const double f = sp.lambda_plus / (sp.lambda_plus + p.alpha);
    const double da = s.i_a - p.x_a * f;
    const double dr = s.i_r - (1.0 - p.x_a) * f;
    const double va = std::abs(da);
    const double vr = R * std::abs(dr);
    // Ties belong to the a-family, which lists first in the region split.
    if (va >= vr) return {va, da < 0.0 ? VrRegion::kALess : VrRegion::kAGeq};
    return {vr, dr < 0.0 ? VrRegion::kRLess : VrRegion::kRGeq};
}

double lyapunov_endemic_rate(const AsisParams& p, const AsisState& s, double R) {
    const VrValue v = lyapunov_endemic(p, s, R);
    const AsisRates rates = asis_rates(p, s.i_a, s.i_r);
    switch (v.region) {
        case VrRegion::kALess: return -rates.di_a;
        case VrRegion::kAGeq: return rates.di_a;
        case VrRegion::kRLess: return -R * rates.di_r;
        case VrRegion::kRGeq: return R * rates.di_r;
    }
    throw std::logic_error("lyapunov_endemic_rate: unreachable");
}

AdmissibleR admissible_R(const AsisParams& p) {
    require_interior_x_a(p, "admissible_R");
    require_endemic(p, "admissible_R");
    AdmissibleR out;
    if (p.x_a > (p.beta - p.alpha) / (p.beta + p.beta_a)) {
        // Large-x_a case (equivalently d >= 0): both nullclines leave the
        // origin, and the chord-slope bounds on the two graphs pinch the
        // admissible weight to exactly x_a/(1-x_a). R = 1 only works where
        // it coincides with this value (x_a = 1/2).
        out.has_window = false;
        out.choice = p.x_a / (1.0 - p.x_a);
        return out;
    }
    const SpectralInfo sp = spectral(p);
    const double f = sp.lambda_plus / (sp.lambda_plus + p.alpha);
    const double i_a_star = p.x_a * f;
    out.has_window = true;
    out.lower = p.x_a / (1.0 - p.x_a);
    out.upper_slope = 1.0 / nullcline_r_inverse_slope(p, i_a_star);
    out.upper_ratio =
        p.beta * p.x_a * f / (isocline_offset(p) + p.beta * f * (1.0 - p.x_a));
    out.upper = std::min(out.upper_slope, out.upper_ratio);
    out.choice = 0.5 * (out.lower + out.upper);
    return out;
}

namespace {

// Shared grid sweep over Gamma. Calls fn(state) for every grid point not
// within `exclusion` (inf-norm) of an equilibrium.
template <typename Fn>
std::size_t sweep_gamma(const AsisParams& p, int grid_n, double exclusion, bool endemic, Fn&& fn) {
    if (grid_n < 2) throw std::invalid_argument("certify: grid must have at least 2 points");
    AsisState eq{0.0, 0.0};
    if (endemic) {
        const RegimeReport rep = classify(p);
        eq = *rep.endemic;
    }
    std::size_t checked = 0;
    for (int ka = 0; ka < grid_n; ++ka) {
        const double i_a = p.x_a * ka / (grid_n - 1);
        for (int kr = 0; kr < grid_n; ++kr) {
            const double i_r = (1.0 - p.x_a) * kr / (grid_n - 1);
            const bool near_ife = std::max(i_a, i_r) <= exclusion;
            const bool near_star =
                std::max(std::abs(i_a - eq.i_a), std::abs(i_r - eq.i_r)) <= exclusion;
            if (near_ife || (endemic && near_star)) continue;
            fn(AsisState{i_a, i_r});
            ++checked;
        }
    }
    return checked;
}

}  // namespace

LyapunovCertificate certify_ife(const AsisParams& p, int grid_n, double exclusion) {
    require_interior_x_a(p, "certify_ife");
    LyapunovCertificate cert;
    cert.kind = LyapunovCertificate::Kind::kIfe;
    cert.max_violation = -kInf;
    cert.samples_checked = sweep_gamma(p, grid_n, exclusion, false, [&](const AsisState& s) {
        cert.max_violation = std::max(cert.max_violation, lyapunov_ife_rate(p, s));
    });
    cert.certified = cert.max_violation < 0.0;
    return cert;
}

LyapunovCertificate certify_endemic(const AsisParams& p, double R, int grid_n, double exclusion) {
    require_interior_x_a(p, "certify_endemic");
    require_endemic(p, "certify_endemic");
    LyapunovCertificate cert;
    cert.kind = LyapunovCertificate::Kind::kEndemic;
    cert.R = R;
    cert.window = admissible_R(p);
    cert.max_violation = -kInf;
    cert.samples_checked = sweep_gamma(p, grid_n, exclusion, true, [&](const AsisState& s) {
        cert.max_violation = std::max(cert.max_violation, lyapunov_endemic_rate(p, s, R));
    });
    cert.certified = cert.max_violation < 0.0;
    return cert;
}

RegionSignReport check_region_signs(const AsisParams& p, double R, int grid_n, double exclusion) {
    require_interior_x_a(p, "check_region_signs");
    require_endemic(p, "check_region_signs");
    RegionSignReport rep;
    rep.min_fa_below = kInf;
    rep.max_fa_above = -kInf;
    rep.min_fr_below = kInf;
    rep.max_fr_above = -kInf;
    const RegimeReport cls = classify(p);
    const double f = *cls.endemic_fraction;
    rep.samples_checked = sweep_gamma(p, grid_n, exclusion, true, [&](const AsisState& s) {
        const double da = s.i_a - p.x_a * f;
        const double dr = s.i_r - (1.0 - p.x_a) * f;
        const double va = std::abs(da);
        const double vr = R * std::abs(dr);
        const AsisRates rates = asis_rates(p, s.i_a, s.i_r);
        // Ties are members of both families, so check every applicable region.
        if (va >= vr) {
            if (da < 0.0)
                rep.min_fa_below = std::min(rep.min_fa_below, rates.di_a);
            else
                rep.max_fa_above = std::max(rep.max_fa_above, rates.di_a);
        }
        if (vr >= va) {
            if (dr < 0.0)
                rep.min_fr_below = std::min(rep.min_fr_below, rates.di_r);
            else
                rep.max_fr_above = std::max(rep.max_fr_above, rates.di_r);
        }
    });
    rep.holds = rep.min_fa_below > 0.0 && rep.max_fa_above < 0.0 && rep.min_fr_below > 0.0 &&
                rep.max_fr_above < 0.0;
    return rep;
}

double limiting_infected(double beta, double beta_a, double alpha, double x_a) {
    if (beta_a * x_a < beta - alpha) return 1.0 - alpha / (beta - beta_a * x_a);
    return 0.0;
}

AsirPeakReport asir_peak(const AsirParams& p, double s_a0, double i_0) {
    if (!(i_0 > 0.0 && i_0 < 1.0)) throw std::invalid_argument("asir_peak: i_0 must be in (0, 1)");
    if (!(s_a0 >= 0.0) || s_a0 + i_0 > 1.0 + kStateTol)
        throw std::invalid_argument("asir_peak: requires 0 <= s_a0 <= 1 - i_0");
    const double s_0 = 1.0 - i_0;
    AsirPeakReport rep;
    rep.threshold_rhs = (p.beta * s_0 - p.alpha) / p.beta_a;
    // Product form of the case test avoids the division when beta_a = 0.
    if (p.beta_a * s_a0 >= p.beta * s_0 - p.alpha) {
        rep.peak_case = AsirPeakReport::Case::kMonotone;
        rep.i_pk = i_0;
    } else {
        rep.peak_case = AsirPeakReport::Case::kFormula;
        const double ab = p.alpha / p.beta;
        rep.i_pk = 1.0 - ab - (p.beta_a / p.beta) * s_a0 +
                   ab * std::log(p.alpha / (p.beta * s_0 - p.beta_a * s_a0));
    }
    return rep;
}

double asir_infected_at(const AsirParams& p, double s_a0, double i_0, double s_a) {
    if (!(i_0 > 0.0 && i_0 < 1.0))
        throw std::invalid_argument("asir_infected_at: i_0 must be in (0, 1)");
    if (!(s_a0 > 0.0))
        throw std::invalid_argument(
            "asir_infected_at: undefined at s_a0 = 0; use the monotone/SIR reduction");
    if (s_a0 + i_0 > 1.0 + kStateTol)
        throw std::invalid_argument("asir_infected_at: requires s_a0 <= 1 - i_0");
    if (!(s_a > 0.0 && s_a <= s_a0))
        throw std::invalid_argument("asir_infected_at: s_a must be in (0, s_a0]");
    const double s_0 = 1.0 - i_0;
    const double coupling = p.beta * s_0 / s_a0 - p.beta_a;
    return i_0 - coupling / p.beta * (s_a - s_a0) + p.alpha / p.beta * std::log(s_a / s_a0);
}

}  // namespace acdyn
