#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "acdyn/models.hpp"

namespace acdyn {

/// Eigenvalues of the Jacobian at the infection-free equilibrium.
/// lambda_plus decides the regime; lambda_minus is always negative.
struct SpectralInfo {
    double lambda_plus;   // beta - beta_a * x_a - alpha
    double lambda_minus;  // -(beta_a * x_a + alpha)
};

[[nodiscard]] SpectralInfo spectral(const AsisParams& p);

enum class Regime { kIfeGas, kEndemic };

/// Threshold classification with the closed-form endemic equilibrium and
/// the limiting infected fraction.
struct RegimeReport {
    SpectralInfo spectral;
    Regime regime;
    std::optional<AsisState> endemic;        // (i_a*, i_r*), endemic regime only
    std::optional<double> endemic_fraction;  // f = lambda_+ / (lambda_+ + alpha)
    double limiting_infected = 0.0;
    bool sis_reduction = false;  // x_a == 0: dynamics collapse to plain SIS
};

[[nodiscard]] RegimeReport classify(const AsisParams& p);

struct Mat2 {
    double a11, a12, a21, a22;

    [[nodiscard]] double trace() const { return a11 + a22; }
    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
    /// Both eigenvalues, descending; throws if the pair is complex.
    [[nodiscard]] std::array<double, 2> real_eigenvalues() const;
};

[[nodiscard]] Mat2 jacobian(const AsisParams& p, const AsisState& s);

// --- nullclines ---------------------------------------------------------

/// a-nullcline as i_r = I_a(i_a); singular at i_a = x_a (rejected).
[[nodiscard]] double nullcline_a(const AsisParams& p, double i_a);

/// r-nullcline in its natural parameterization i_a = I_r(i_r).
[[nodiscard]] double nullcline_r(const AsisParams& p, double i_r);

/// r-nullcline re-expressed over i_a ("+"-root of the quadratic); for
/// d = alpha + beta_a*x_a - beta*(1-x_a) < 0 this branch has value -d/beta
/// at i_a = 0 rather than passing through the origin.
[[nodiscard]] double nullcline_r_inverse(const AsisParams& p, double i_a);

/// Closed-form slope of nullcline_r_inverse (no finite differences).
[[nodiscard]] double nullcline_r_inverse_slope(const AsisParams& p, double i_a);

// --- Lyapunov machinery ---------------------------------------------------

/// V(i) = max{ (1-x_a)/x_a * i_a, i_r }; zero exactly at the
/// infection-free equilibrium. Requires x_a in (0, 1).
[[nodiscard]] double lyapunov_ife(const AsisParams& p, const AsisState& s);

/// dV/dt along the flow in indicator form: F_r where the i_r branch is
/// active, F_a otherwise. Negative away from the IFE when lambda_+ < 0.
[[nodiscard]] double lyapunov_ife_rate(const AsisParams& p, const AsisState& s);

enum class VrRegion { kALess, kAGeq, kRLess, kRGeq };

struct VrValue {
    double value;
    VrRegion region;
};

/// V_R(i) = max{ |i_a - x_a f|, R*|i_r - (1-x_a) f| } with the active
/// region label. Requires the endemic regime (lambda_+ > 0) and R > 0.
[[nodiscard]] VrValue lyapunov_endemic(const AsisParams& p, const AsisState& s, double R);

/// dV_R/dt along the flow: +-F_a or +-R*F_r depending on the region.
[[nodiscard]] double lyapunov_endemic_rate(const AsisParams& p, const AsisState& s, double R);

/// Admissible weight R for V_R. In the small-x_a case
/// (x_a <= (beta-alpha)/(beta+beta_a)) this is the half-open window
/// [x_a/(1-x_a), min{1/slope, ratio}); otherwise the graph-containment
/// bounds pinch to the single value x_a/(1-x_a) and no window is reported.
struct AdmissibleR {
    bool has_window = false;
    double lower = 0.0;
    double upper = 0.0;        // min of the two bounds below
    double upper_slope = 0.0;  // 1 / Ihat_r'(i_a*)
    double upper_ratio = 0.0;  // beta*x_a*f / (d + beta*f*(1-x_a))
    double choice = 1.0;       // window midpoint, or x_a/(1-x_a) without one
};

[[nodiscard]] AdmissibleR admissible_R(const AsisParams& p);

/// Grid-based numerical certificate that a Lyapunov function decays on
/// Gamma. States within `exclusion` (inf-norm) of an equilibrium are
/// skipped; everywhere else dV/dt must be strictly negative.
struct LyapunovCertificate {
    enum class Kind { kIfe, kEndemic };
    Kind kind;
    double R = 0.0;                    // endemic only
    std::optional<AdmissibleR> window; // endemic only
    std::size_t samples_checked = 0;
    double max_violation = 0.0;  // largest dV/dt observed; certified iff < 0
    bool certified = false;
};

[[nodiscard]] LyapunovCertificate certify_ife(const AsisParams& p, int grid_n = 200,
                                              double exclusion = 1e-9);
[[nodiscard]] LyapunovCertificate certify_endemic(const AsisParams& p, double R, int grid_n = 200,
                                                  double exclusion = 1e-9);

/// The four region sign conditions behind V_R, checked on a grid:
/// F_a > 0 on the a-below region, F_a < 0 on the a-above region (away
/// from equilibria), and likewise for F_r on the r-regions.
struct RegionSignReport {
    double min_fa_below = 0.0;  // min F_a over the a-below region (> 0 required)
    double max_fa_above = 0.0;  // max F_a over the a-above region (< 0 required)
    double min_fr_below = 0.0;
    double max_fr_above = 0.0;
    std::size_t samples_checked = 0;
    bool holds = false;
};

[[nodiscard]] RegionSignReport check_region_signs(const AsisParams& p, double R, int grid_n = 200,
                                                  double exclusion = 1e-9);

// --- limiting fraction and SIR-variant peak -------------------------------

/// Long-run total infected fraction L(x_a, beta_a):
/// 1 - alpha/(beta - beta_a*x_a) when beta_a*x_a < beta - alpha, else 0.
[[nodiscard]] double limiting_infected(double beta, double beta_a, double alpha, double x_a);

/// Peak infected fraction of the SIR-variant trajectory. MONOTONE when
/// beta_a*s_a0 >= beta*s_0 - alpha (then i never rises above i_0).
struct AsirPeakReport {
    enum class Case { kFormula, kMonotone };
    Case peak_case;
    double i_pk;
    double threshold_rhs;  // (beta*s_0 - alpha)/beta_a; +-inf when beta_a = 0
};

[[nodiscard]] AsirPeakReport asir_peak(const AsirParams& p, double s_a0, double i_0);

/// Infected fraction as a function of the susceptible-active fraction
/// along the SIR-variant trajectory:
/// i(s_a) = i_0 - (A/beta)(s_a - s_a0) + (alpha/beta) log(s_a/s_a0),
/// A = beta*s_0/s_a0 - beta_a. Requires s_a0 > 0 and s_a in (0, s_a0].
[[nodiscard]] double asir_infected_at(const AsirParams& p, double s_a0, double i_0, double s_a);

}  // namespace acdyn
