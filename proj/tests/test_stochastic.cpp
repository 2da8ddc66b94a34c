#include "doctest.h"

#include <cmath>

#include "acdyn/integrate.hpp"
#include "acdyn/stochastic.hpp"
#include "helpers.hpp"

using namespace acdyn;

namespace {

PopulationConfig small_config() {
    PopulationConfig cfg{.population = 500,
                         .params = testing::supercritical_params(),
                         .initial_infected_active = 2,
                         .initial_infected_reactive = 8,
                         .seed = 42,
                         .t_end = 10.0,
                         .replicates = 4};
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("stochastic");

TEST_CASE("the infection-free state is absorbing") {
    PopulationConfig cfg = small_config();
    cfg.initial_infected_active = 0;
    cfg.initial_infected_reactive = 0;
    const auto ensemble = simulate_ctmc(cfg);
    for (const EventPath& path : ensemble) {
        CHECK(path.times.size() == 1);
        CHECK(path.infected_active[0] == 0);
        CHECK(path.infected_reactive[0] == 0);
    }
    const EnsembleSummary summary = summarize(cfg, ensemble, 11);
    CHECK(summary.extinction_fraction == 1.0);
    for (double m : summary.mean_ia) CHECK(m == 0.0);
}

TEST_CASE("without infection events the infected count never rises") {
    PopulationConfig cfg = small_config();
    cfg.params = AsisParams(0.0, 0.28, 0.1, 0.2);
    cfg.t_end = 50.0;
    for (const EventPath& path : simulate_ctmc(cfg)) {
        for (std::size_t e = 1; e < path.times.size(); ++e) {
            const std::int64_t prev = path.infected_active[e - 1] + path.infected_reactive[e - 1];
            const std::int64_t cur = path.infected_active[e] + path.infected_reactive[e];
            CHECK(cur <= prev);
        }
        CHECK(path.infected_active.back() + path.infected_reactive.back() == 0);
    }
}

TEST_CASE("counts respect the per-type populations on every path") {
    const PopulationConfig cfg = small_config();
    const std::int64_t active = cfg.active_count();
    const std::int64_t reactive = cfg.population - active;
    for (const EventPath& path : simulate_ctmc(cfg)) {
        for (std::size_t e = 0; e < path.times.size(); ++e) {
            CHECK(path.infected_active[e] >= 0);
            CHECK(path.infected_active[e] <= active);
            CHECK(path.infected_reactive[e] >= 0);
            CHECK(path.infected_reactive[e] <= reactive);
        }
    }
}

TEST_CASE("identical configurations produce bit-identical event sequences") {
    const auto a = simulate_ctmc(small_config());
    const auto b = simulate_ctmc(small_config());
    REQUIRE(a.size() == b.size());
    for (std::size_t rep = 0; rep < a.size(); ++rep) {
        CHECK(a[rep].times == b[rep].times);
        CHECK(a[rep].infected_active == b[rep].infected_active);
        CHECK(a[rep].infected_reactive == b[rep].infected_reactive);
    }
    PopulationConfig other = small_config();
    other.seed = 43;
    CHECK(simulate_ctmc(other)[0].times != a[0].times);
}

TEST_CASE("replicate order is independent of worker count") {
    const auto serial = simulate_ctmc(small_config(), 1);
    const auto parallel = simulate_ctmc(small_config(), 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t rep = 0; rep < serial.size(); ++rep)
        CHECK(serial[rep].times == parallel[rep].times);
}

TEST_CASE("streamed summary equals the two-pass summary") {
    const PopulationConfig cfg = small_config();
    const EnsembleSummary two_pass = summarize(cfg, simulate_ctmc(cfg), 51);
    const EnsembleSummary streamed = simulate_summary(cfg, 51, 3);
    CHECK(two_pass.times == streamed.times);
    CHECK(two_pass.mean_ia == streamed.mean_ia);
    CHECK(two_pass.mean_ir == streamed.mean_ir);
    CHECK(two_pass.sd_ia == streamed.sd_ia);
    CHECK(two_pass.sd_ir == streamed.sd_ir);
    CHECK(two_pass.extinction_fraction == streamed.extinction_fraction);
}

TEST_CASE("a single replicate has zero dispersion; duplicated paths too") {
    PopulationConfig cfg = small_config();
    cfg.replicates = 1;
    const auto ensemble = simulate_ctmc(cfg);
    const EnsembleSummary single = summarize(cfg, ensemble, 21);
    for (double sd : single.sd_ia) CHECK(sd == 0.0);
    for (double sd : single.sd_ir) CHECK(sd == 0.0);
    // Two byte-identical paths (same stream twice) still have zero spread.
    std::vector<EventPath> duplicated = {ensemble[0], ensemble[0]};
    cfg.replicates = 2;
    const EnsembleSummary doubled = summarize(cfg, duplicated, 21);
    CHECK(doubled.mean_ia == single.mean_ia);
    for (double sd : doubled.sd_ia) CHECK(sd == 0.0);
}

TEST_CASE("short-horizon drift matches the mean-field rates") {
    PopulationConfig cfg{.population = 10000,
                         .params = testing::supercritical_params(),
                         .initial_infected_active = 500,
                         .initial_infected_reactive = 2000,
                         .seed = 7,
                         .t_end = 0.02,
                         .replicates = 64};
    const double n = static_cast<double>(cfg.population);
    const AsisState start{cfg.initial_infected_active / n, cfg.initial_infected_reactive / n};
    const AsisRates drift = asis_field(cfg.params, start);

    const auto ensemble = simulate_ctmc(cfg, 4);
    std::vector<double> inc_a, inc_r;
    for (const EventPath& path : ensemble) {
        inc_a.push_back((path.infected_active.back() - cfg.initial_infected_active) / n /
                        cfg.t_end);
        inc_r.push_back((path.infected_reactive.back() - cfg.initial_infected_reactive) / n /
                        cfg.t_end);
    }
    auto mean_and_se = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
        return std::pair{mean, std::sqrt(var / static_cast<double>(v.size()))};
    };
    const auto [mean_a, se_a] = mean_and_se(inc_a);
    const auto [mean_r, se_r] = mean_and_se(inc_r);
    CHECK(std::abs(mean_a - drift.di_a) <= 3.0 * se_a);
    CHECK(std::abs(mean_r - drift.di_r) <= 3.0 * se_r);
}

TEST_CASE("subcritical ensembles drift to extinction as the horizon grows") {
    PopulationConfig cfg{.population = 5000,
                         .params = testing::subcritical_params(),
                         .initial_infected_active = 30,
                         .initial_infected_reactive = 20,
                         .seed = 12,
                         .t_end = 100.0,
                         .replicates = 16};
    double prev = -1.0;
    for (double t_end : {100.0, 600.0, 3000.0}) {
        cfg.t_end = t_end;
        const EnsembleSummary summary = simulate_summary(cfg, 21, 4);
        CHECK(summary.extinction_fraction >= prev);
        prev = summary.extinction_fraction;
    }
    CHECK(prev >= 0.9);
}

TEST_CASE("the endemic ensemble tracks the mean-field level") {
    PopulationConfig cfg{.population = 5000,
                         .params = testing::supercritical_params(),
                         .initial_infected_active = 10,
                         .initial_infected_reactive = 40,
                         .seed = 5,
                         .t_end = 120.0,
                         .replicates = 8};
    const EnsembleSummary summary = simulate_summary(cfg, 41, 4);
    const AsisState eq = testing::endemic_equilibrium(cfg.params);
    CHECK(std::abs(summary.mean_ia.back() + summary.mean_ir.back() - eq.total()) < 0.05);
    CHECK(summary.realized_active_fraction == 0.2);
}

TEST_CASE("configuration bounds are enforced") {
    PopulationConfig cfg = small_config();
    cfg.initial_infected_active = 101;  // active population is 100
    CHECK_THROWS_AS((void)simulate_ctmc(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.initial_infected_reactive = 401;
    CHECK_THROWS_AS((void)simulate_ctmc(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.population = 0;
    CHECK_THROWS_AS((void)simulate_ctmc(cfg), std::invalid_argument);
    cfg = small_config();
    cfg.replicates = 0;
    CHECK_THROWS_AS((void)simulate_ctmc(cfg), std::invalid_argument);
    CHECK_THROWS_AS((void)summarize(small_config(), {}, 11), std::invalid_argument);
}

TEST_SUITE_END();
