#pragma once

#include <array>
#include <stdexcept>

namespace acdyn {

// Slack allowed on box constraints before an input state is rejected.
// Absorbs integrator rounding; anything larger is treated as a logic error.
inline constexpr double kStateTol = 1e-9;

/// Rates of the classic SIS model reduced to the single infected fraction.
struct SisParams {
    double beta;   // infection rate per contact, > 0
    double alpha;  // reactive recovery rate, > 0

    SisParams(double beta_, double alpha_);
};

/// Rates and population composition of the active-defense SIS model.
/// beta_a = 0 is accepted so the model can degenerate to plain SIS, and
/// beta = 0 so infection-free channels can be switched off entirely.
struct AsisParams {
    double beta;    // infection rate, >= 0
    double beta_a;  // active cleanup rate, >= 0
    double alpha;   // reactive recovery rate, > 0
    double x_a;     // active-defender fraction, in [0, 1]

    AsisParams(double beta_, double beta_a_, double alpha_, double x_a_);
};

/// Planar state of the active-defense SIS model. Valid states live in
/// Gamma = [0, x_a] x [0, 1 - x_a]; the bound depends on the parameters,
/// so the joint check happens in asis_field / validate_asis_state.
struct AsisState {
    double i_a = 0.0;  // infected-active fraction
    double i_r = 0.0;  // infected-reactive fraction

    [[nodiscard]] double total() const { return i_a + i_r; }
};

struct AsisRates {
    double di_a;
    double di_r;
};

/// Rates of the active-defense SIR model (cleanup confers permanent
/// protection). beta_a = 0 recovers the classic SIR model.
struct AsirParams {
    double beta;    // infection rate, >= 0
    double beta_a;  // active cleanup rate, >= 0
    double alpha;   // reactive recovery rate, > 0

    AsirParams(double beta_, double beta_a_, double alpha_);
};

/// Five-compartment state of the active-defense SIR model.
struct AsirState {
    double s_a = 0.0;  // susceptible-active
    double s_r = 0.0;  // susceptible-reactive
    double i_a = 0.0;  // infected-active
    double i_r = 0.0;  // infected-reactive
    double r = 0.0;    // recovered

    [[nodiscard]] double total_infected() const { return i_a + i_r; }
    [[nodiscard]] double total() const { return s_a + s_r + i_a + i_r + r; }
};

struct AsirRates {
    double ds_a;
    double ds_r;
    double di_a;
    double di_r;
    double dr;
};

// --- raw evaluators ---------------------------------------------------
// Total functions of their arguments; no domain checks, no clamping.
// The integrator and grid-based certifiers call these on transient
// states that may sit slightly outside the box.

[[nodiscard]] double sis_rate(const SisParams& p, double i);
[[nodiscard]] AsisRates asis_rates(const AsisParams& p, double i_a, double i_r);
[[nodiscard]] AsirRates asir_rates(const AsirParams& p, const AsirState& s);

// --- checked field operations -----------------------------------------

/// di/dt = beta * i * (1 - i) - alpha * i. Rejects i outside [0, 1]
/// beyond kStateTol.
[[nodiscard]] double sis_field(const SisParams& p, double i);

/// (di_a/dt, di_r/dt) of the planar active-defense dynamics. Rejects
/// states outside Gamma beyond kStateTol.
[[nodiscard]] AsisRates asis_field(const AsisParams& p, const AsisState& s);

/// Five-component rate vector of the active-defense SIR dynamics.
/// dr/dt is assembled as the negated sum of the other four components,
/// so the five rates sum to zero bit-exactly.
[[nodiscard]] AsirRates asir_field(const AsirParams& p, const AsirState& s);

// --- state validation ---------------------------------------------------

void validate_sis_state(double i, double tol = kStateTol);
void validate_asis_state(const AsisParams& p, const AsisState& s, double tol = kStateTol);
void validate_asir_state(const AsirState& s, double tol = kStateTol);

}  // namespace acdyn
