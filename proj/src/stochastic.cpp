#include "acdyn/stochastic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "acdyn/detail/parallel.hpp"

namespace acdyn {

namespace {

// SplitMix64 output function; the per-replicate seed is the mix of the
// master seed advanced k+1 gamma increments, which keeps replicate streams
// addressable by index.
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
    return splitmix64(master + static_cast<std::uint64_t>(replicate) * 0x9E3779B97F4A7C15ULL);
}

// Uniform in [0, 1) from the top 53 bits; deterministic across platforms,
// unlike the stdlib distributions.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Direct-method replicate. Observer receives (t, I_a, I_r) at t = 0 and
// after every event.
template <typename Observer>
void run_replicate(const PopulationConfig& cfg, int replicate, Observer&& observe) {
    const auto& p = cfg.params;
    const double n = static_cast<double>(cfg.population);
    const std::int64_t n_active = cfg.active_count();
    const std::int64_t n_reactive = cfg.population - n_active;

    std::mt19937_64 rng(replicate_seed(cfg.seed, replicate));
    double t = 0.0;
    std::int64_t ia = cfg.initial_infected_active;
    std::int64_t ir = cfg.initial_infected_reactive;
    observe(t, ia, ir);

    while (true) {
        const std::int64_t infected = ia + ir;
        if (infected == 0) return;  // absorbing state
        const double i_frac = static_cast<double>(infected) / n;
        const double sa = static_cast<double>(n_active - ia);
        const double sr = static_cast<double>(n_reactive - ir);
        const double rate_infect_a = p.beta * i_frac * sa;
        const double rate_infect_r = p.beta * i_frac * sr;
        const double rate_cleanup = p.beta_a * (sa / n) * static_cast<double>(infected);
        const double rate_recover = p.alpha * static_cast<double>(infected);
        const double total = rate_infect_a + rate_infect_r + rate_cleanup + rate_recover;

        t += -std::log(1.0 - uniform01(rng)) / total;
        if (t > cfg.t_end) return;

        double pick = uniform01(rng) * total;
        if (pick < rate_infect_a) {
            ++ia;
        } else if ((pick -= rate_infect_a) < rate_infect_r) {
            ++ir;
        } else {
            // Cleanup and recovery both flip one infected node back to
            // susceptible; choose the node type by infected composition.
            const bool active =
                uniform01(rng) * static_cast<double>(infected) < static_cast<double>(ia);
            if (active)
                --ia;
            else
                --ir;
        }
        observe(t, ia, ir);
    }
}

std::vector<double> summary_grid(double t_end, int grid_points) {
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int k = 0; k < grid_points; ++k)
        grid[static_cast<std::size_t>(k)] = t_end * k / (grid_points - 1);
    return grid;
}

// Samples one replicate's piecewise-constant path onto the grid while the
// events stream by.
class GridSampler {
public:
    GridSampler(const std::vector<double>& grid) : grid_(grid) {
        ia_.reserve(grid.size());
        ir_.reserve(grid.size());
    }

    void operator()(double t, std::int64_t ia, std::int64_t ir) {
        // Grid times strictly before the new event time keep the previous
        // counts; the state at exactly t is the post-event one.
        while (next_ < grid_.size() && grid_[next_] < t) {
            ia_.push_back(last_ia_);
            ir_.push_back(last_ir_);
            ++next_;
        }
        last_ia_ = ia;
        last_ir_ = ir;
    }

    void finish() {
        while (next_ < grid_.size()) {
            ia_.push_back(last_ia_);
            ir_.push_back(last_ir_);
            ++next_;
        }
    }

    std::vector<std::int64_t> ia_, ir_;

private:
    const std::vector<double>& grid_;
    std::size_t next_ = 0;
    std::int64_t last_ia_ = 0, last_ir_ = 0;
};

EnsembleSummary reduce(const PopulationConfig& cfg, const std::vector<double>& grid,
                       const std::vector<std::vector<std::int64_t>>& ia,
                       const std::vector<std::vector<std::int64_t>>& ir) {
    const double n = static_cast<double>(cfg.population);
    const std::size_t reps = ia.size();
    EnsembleSummary out;
    out.times = grid;
    out.replicates = static_cast<int>(reps);
    out.realized_active_fraction = static_cast<double>(cfg.active_count()) / n;
    out.mean_ia.resize(grid.size());
    out.mean_ir.resize(grid.size());
    out.sd_ia.resize(grid.size());
    out.sd_ir.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double sum_a = 0.0, sum_r = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            sum_a += static_cast<double>(ia[rep][k]);
            sum_r += static_cast<double>(ir[rep][k]);
        }
        const double mean_a = sum_a / (n * static_cast<double>(reps));
        const double mean_r = sum_r / (n * static_cast<double>(reps));
        double var_a = 0.0, var_r = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const double da = static_cast<double>(ia[rep][k]) / n - mean_a;
            const double dr = static_cast<double>(ir[rep][k]) / n - mean_r;
            var_a += da * da;
            var_r += dr * dr;
        }
        out.mean_ia[k] = mean_a;
        out.mean_ir[k] = mean_r;
        out.sd_ia[k] = std::sqrt(var_a / static_cast<double>(reps));
        out.sd_ir[k] = std::sqrt(var_r / static_cast<double>(reps));
    }
    int extinct = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        if (ia[rep].back() + ir[rep].back() == 0) ++extinct;
    }
    out.extinction_fraction = static_cast<double>(extinct) / static_cast<double>(reps);
    return out;
}

}  // namespace

void PopulationConfig::validate() const {
    if (population < 1) throw std::invalid_argument("PopulationConfig: population must be >= 1");
    if (!(t_end > 0.0)) throw std::invalid_argument("PopulationConfig: t_end must be > 0");
    if (replicates < 1) throw std::invalid_argument("PopulationConfig: replicates must be >= 1");
    const std::int64_t n_active = active_count();
    if (initial_infected_active < 0 || initial_infected_active > n_active)
        throw std::invalid_argument(
            "PopulationConfig: initial infected-active count exceeds the active population");
    if (initial_infected_reactive < 0 || initial_infected_reactive > population - n_active)
        throw std::invalid_argument(
            "PopulationConfig: initial infected-reactive count exceeds the reactive population");
}

std::int64_t PopulationConfig::active_count() const {
    return std::llround(params.x_a * static_cast<double>(population));
}

std::vector<EventPath> simulate_ctmc(const PopulationConfig& cfg, int workers) {
    cfg.validate();
    std::vector<EventPath> ensemble(static_cast<std::size_t>(cfg.replicates));
    detail::parallel_for(cfg.replicates, workers, [&](int rep) {
        EventPath& path = ensemble[static_cast<std::size_t>(rep)];
        run_replicate(cfg, rep, [&](double t, std::int64_t ia, std::int64_t ir) {
            path.times.push_back(t);
            path.infected_active.push_back(ia);
            path.infected_reactive.push_back(ir);
        });
    });
    return ensemble;
}

EnsembleSummary summarize(const PopulationConfig& cfg, const std::vector<EventPath>& ensemble,
                          int grid_points) {
    cfg.validate();
    if (ensemble.empty()) throw std::invalid_argument("summarize: empty ensemble");
    if (grid_points < 2) throw std::invalid_argument("summarize: grid needs at least 2 points");
    const std::vector<double> grid = summary_grid(cfg.t_end, grid_points);
    std::vector<std::vector<std::int64_t>> ia(ensemble.size()), ir(ensemble.size());
    for (std::size_t rep = 0; rep < ensemble.size(); ++rep) {
        const EventPath& path = ensemble[rep];
        if (path.times.empty()) throw std::invalid_argument("summarize: empty replicate path");
        GridSampler sampler(grid);
        for (std::size_t e = 0; e < path.times.size(); ++e)
            sampler(path.times[e], path.infected_active[e], path.infected_reactive[e]);
        sampler.finish();
        ia[rep] = std::move(sampler.ia_);
        ir[rep] = std::move(sampler.ir_);
    }
    return reduce(cfg, grid, ia, ir);
}

EnsembleSummary simulate_summary(const PopulationConfig& cfg, int grid_points, int workers) {
    cfg.validate();
    if (grid_points < 2)
        throw std::invalid_argument("simulate_summary: grid needs at least 2 points");
    const std::vector<double> grid = summary_grid(cfg.t_end, grid_points);
    std::vector<std::vector<std::int64_t>> ia(static_cast<std::size_t>(cfg.replicates)),
        ir(static_cast<std::size_t>(cfg.replicates));
    detail::parallel_for(cfg.replicates, workers, [&](int rep) {
        GridSampler sampler(grid);
        run_replicate(cfg, rep, std::ref(sampler));
        sampler.finish();
        ia[static_cast<std::size_t>(rep)] = std::move(sampler.ia_);
        ir[static_cast<std::size_t>(rep)] = std::move(sampler.ir_);
    });
    return reduce(cfg, grid, ia, ir);
}

}  // namespace acdyn
