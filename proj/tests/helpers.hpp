#pragma once

#include <cmath>
#include <random>

#include "acdyn/analysis.hpp"
#include "acdyn/models.hpp"

namespace acdyn::testing {

// Parameter sets used throughout: the subcritical set drives lambda_+ just
// below zero (-0.01), the supercritical set sits well inside the endemic
// regime (lambda_+ = 0.144).
inline AsisParams subcritical_params() { return {0.3, 0.35, 0.1, 0.6}; }
inline AsisParams supercritical_params() { return {0.3, 0.28, 0.1, 0.2}; }

inline AsisState endemic_equilibrium(const AsisParams& p) {
    const SpectralInfo sp = spectral(p);
    const double f = sp.lambda_plus / (sp.lambda_plus + p.alpha);
    return {p.x_a * f, (1.0 - p.x_a) * f};
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Independent oracle for the classic SIR peak (the beta_a = 0, s_a0 = 0
// reduction): 1 - alpha/beta + (alpha/beta) log(alpha/(beta s_0)).
inline double classic_sir_peak(double beta, double alpha, double i_0) {
    const double s_0 = 1.0 - i_0;
    return 1.0 - alpha / beta + alpha / beta * std::log(alpha / (beta * s_0));
}

// Closed-form optimum of the hyperbolic-return allocation problem for
// c1 != c2 (independent oracle for the bisection solver).
inline double hyperbolic_a_star(double c1, double c2, double M) {
    return c1 * (M + c2) / (c1 - c2) *
           (1.0 - std::sqrt(1.0 - (c1 - c2) * M / (c1 * (M + c2))));
}

}  // namespace acdyn::testing
