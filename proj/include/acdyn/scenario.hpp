#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "acdyn/integrate.hpp"
#include "acdyn/models.hpp"

namespace acdyn {

/// Scenario-document violation; `field` is the dotted path of the entry
/// that failed (e.g. "params.x_a"). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class ModelKind { kSis, kAsis, kAsir };

struct NullclineRequest {
    int count = 200;  // rows on the uniform i_a grid over [0, x_a)
};

struct LyapunovRequest {
    int grid = 200;
    std::optional<double> weight;  // endemic R; defaults to the window midpoint
};

struct PhaseGridRequest {
    int count = 25;  // field samples per axis over Gamma
};

struct AnalysisRequest {
    std::optional<NullclineRequest> nullclines;
    std::optional<LyapunovRequest> lyapunov;
    std::optional<PhaseGridRequest> phase_grid;
};

struct InvestmentConfig {
    std::string family;  // "linear" or "hyperbolic"
    double c1 = 0.0;
    double c2 = 0.0;
    double beta_bar = 1.0;  // hyperbolic only
    double budget = 0.0;    // M
};

struct StochasticConfig {
    std::int64_t population = 0;
    int replicates = 1;
    std::uint64_t seed = 0;
    std::optional<double> t_end;  // defaults to integration.t_end
    int grid_points = 201;
    std::optional<std::int64_t> initial_infected_active;    // default round(i_a0 * N)
    std::optional<std::int64_t> initial_infected_reactive;  // default round(i_r0 * N)
};

struct SweepConfig {
    std::string parameter;  // beta | beta_a | alpha | x_a | M | s_a0
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    std::vector<std::string> outputs;  // lambda_plus | regime | f | L | a_star | i_pk
};

struct Scenario {
    ModelKind model = ModelKind::kAsis;
    std::optional<SisParams> sis;
    std::optional<AsisParams> asis;
    std::optional<AsirParams> asir;
    std::vector<double> initial;  // model-dimension state vector
    std::optional<IntegrationOptions> integration;
    std::optional<AnalysisRequest> analysis;
    std::optional<InvestmentConfig> investment;
    std::optional<StochasticConfig> stochastic;
    std::optional<SweepConfig> sweep;
};

/// Parses and fully validates a scenario document. Throws ConfigError with
/// the offending field path on any omission or domain violation.
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);

struct OutputFile {
    std::string name;   // file name under the output directory
    std::string bytes;  // full contents
};

struct CommandResult {
    std::vector<OutputFile> files;
};

[[nodiscard]] CommandResult run_simulate(const Scenario& sc);
[[nodiscard]] CommandResult run_analyze(const Scenario& sc);
[[nodiscard]] CommandResult run_optimize(const Scenario& sc);
[[nodiscard]] CommandResult run_peak(const Scenario& sc);
[[nodiscard]] CommandResult run_sweep(const Scenario& sc, int workers = 1);
[[nodiscard]] CommandResult run_stochastic(const Scenario& sc,
                                           std::optional<std::uint64_t> seed_override = {},
                                           int workers = 1);

/// Writes every file to a temporary sibling first and renames after all
/// writes succeed, so outputs never appear partially.
void write_outputs(const std::string& out_dir, const CommandResult& result);

}  // namespace acdyn
