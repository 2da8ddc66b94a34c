#pragma once

#include <functional>
#include <span>
#include <vector>

#include "acdyn/models.hpp"

namespace acdyn {

struct IntegrationOptions {
    double t_end = 0.0;              // required, > 0
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double sample_interval = 0.0;    // <= 0 selects t_end / 1000
    double equilibrium_eps = 1e-10;  // field-norm threshold for early stop
    double fixed_step = 0.0;         // > 0 switches to fixed-step RK4 (debug)

    void validate() const;
    [[nodiscard]] double effective_sample_interval() const;
};

/// An autonomous ODE right-hand side together with the box its solutions
/// live in and the scalar used for peak tracking.
struct VectorField {
    std::size_t dim = 0;
    std::function<void(std::span<const double>, std::span<double>)> rhs;
    std::vector<double> lower;  // componentwise clamp box
    std::vector<double> upper;
    std::function<double(std::span<const double>)> infected;  // peak projection
};

[[nodiscard]] VectorField sis_vector_field(const SisParams& p);
[[nodiscard]] VectorField asis_vector_field(const AsisParams& p);
[[nodiscard]] VectorField asir_vector_field(const AsirParams& p);

struct Trajectory {
    std::vector<double> times;                // strictly increasing
    std::vector<std::vector<double>> states;  // aligned with times
    bool converged = false;   // field norm dropped below equilibrium_eps
    std::vector<double> final_state;
    double peak_infected = 0.0;  // running max of the infected projection
    double peak_time = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;

    [[nodiscard]] double final_time() const { return times.back(); }
};

/// Integrates the field from s0 with an embedded Dormand-Prince 5(4) pair.
/// States are clamped into the field's box after each accepted step; a clamp
/// larger than 1e-7 aborts, since the exact dynamics are forward-invariant.
/// Throws std::invalid_argument for bad s0/options and std::runtime_error on
/// step-size underflow or non-finite dynamics.
[[nodiscard]] Trajectory integrate(const VectorField& field, std::span<const double> s0,
                                   const IntegrationOptions& opts);

/// Maximum of `projection` over the sampled states, refined by a 3-point
/// quadratic fit around the discrete argmax. Returns {value, time}.
[[nodiscard]] std::pair<double, double> track_peak(
    const Trajectory& traj, const std::function<double(std::span<const double>)>& projection);

}  // namespace acdyn
