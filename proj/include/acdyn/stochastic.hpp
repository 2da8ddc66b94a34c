#pragma once

#include <cstdint>
#include <vector>

#include "acdyn/models.hpp"

namespace acdyn {

/// Finite-population realization of the active-defense SIS process.
/// The active-node count is round(x_a * N); the realized fraction is
/// reported by the summary and should be used in mean-field comparisons.
struct PopulationConfig {
    std::int64_t population = 0;  // N
    AsisParams params;
    std::int64_t initial_infected_active = 0;    // <= round(x_a * N)
    std::int64_t initial_infected_reactive = 0;  // <= N - round(x_a * N)
    std::uint64_t seed = 0;
    double t_end = 0.0;
    int replicates = 1;

    void validate() const;
    [[nodiscard]] std::int64_t active_count() const;
};

/// Exact event path of one replicate: counts immediately after each event,
/// with the initial state at t = 0 first.
struct EventPath {
    std::vector<double> times;
    std::vector<std::int64_t> infected_active;
    std::vector<std::int64_t> infected_reactive;
};

/// Exact stochastic simulation (Gillespie direct method) over the four
/// transition channels: infect-active, infect-reactive, active cleanup of
/// an infected node, and reactive recovery. Per-replicate RNG streams are
/// derived from the master seed with SplitMix64, so results are
/// deterministic and independent of worker scheduling.
[[nodiscard]] std::vector<EventPath> simulate_ctmc(const PopulationConfig& cfg, int workers = 1);

/// Per-replicate fractions sampled onto a uniform grid with mean and
/// standard deviation across replicates.
struct EnsembleSummary {
    std::vector<double> times;
    std::vector<double> mean_ia, mean_ir;  // fractions of N
    std::vector<double> sd_ia, sd_ir;
    double extinction_fraction = 0.0;  // replicates with zero infected at t_end
    double realized_active_fraction = 0.0;
    int replicates = 0;
};

[[nodiscard]] EnsembleSummary summarize(const PopulationConfig& cfg,
                                        const std::vector<EventPath>& ensemble,
                                        int grid_points = 201);

/// Streams each replicate directly onto the summary grid without keeping
/// event paths in memory. Produces bit-identical results to
/// summarize(cfg, simulate_ctmc(cfg)).
[[nodiscard]] EnsembleSummary simulate_summary(const PopulationConfig& cfg, int grid_points = 201,
                                               int workers = 1);

}  // namespace acdyn
