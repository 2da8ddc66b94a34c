#include "doctest.h"

#include "acdyn/scenario.hpp"

using namespace acdyn;
using nlohmann::json;

namespace {

json base_asis() {
    return json{{"model", "asis"},
                {"params", {{"beta", 0.3}, {"beta_a", 0.28}, {"alpha", 0.1}, {"x_a", 0.2}}},
                {"initial", {{"i_a", 0.01}, {"i_r", 0.01}}},
                {"integration", {{"t_end", 100.0}}}};
}

std::string field_of(const json& doc) {
    try {
        (void)parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("a complete scenario parses into validated types") {
    const Scenario sc = parse_scenario(base_asis());
    CHECK(sc.model == ModelKind::kAsis);
    REQUIRE(sc.asis);
    CHECK(sc.asis->beta == 0.3);
    CHECK(sc.asis->x_a == 0.2);
    CHECK(sc.initial == std::vector<double>{0.01, 0.01});
    REQUIRE(sc.integration);
    CHECK(sc.integration->t_end == 100.0);
}

TEST_CASE("missing required fields are reported by path") {
    json doc = base_asis();
    doc["params"].erase("beta");
    CHECK(field_of(doc) == "params.beta");

    doc = base_asis();
    doc.erase("initial");
    CHECK(field_of(doc) == "initial");

    doc = base_asis();
    doc.erase("model");
    CHECK(field_of(doc) == "model");
}

TEST_CASE("domain violations are reported by path") {
    json doc = base_asis();
    doc["params"]["x_a"] = 1.5;
    CHECK(field_of(doc) == "params.x_a");

    doc = base_asis();
    doc["params"]["alpha"] = 0.0;
    CHECK(field_of(doc) == "params.alpha");

    doc = base_asis();
    doc["initial"]["i_a"] = 0.3;  // beyond x_a
    CHECK(field_of(doc) == "initial.i_a");

    doc = base_asis();
    doc["integration"]["sample_interval"] = 200.0;
    CHECK(field_of(doc) == "integration.sample_interval");

    doc = base_asis();
    doc["model"] = "seir";
    CHECK(field_of(doc) == "model");
}

TEST_CASE("the five-compartment initial state must sum to one") {
    json doc = {{"model", "asir"},
                {"params", {{"beta", 0.3}, {"beta_a", 0.2}, {"alpha", 0.1}}},
                {"initial", {{"s_a", 0.3}, {"s_r", 0.6}, {"i_a", 0.05}, {"i_r", 0.05}}},
                {"integration", {{"t_end", 10.0}}}};
    CHECK(parse_scenario(doc).model == ModelKind::kAsir);
    doc["initial"]["s_r"] = 0.5;
    CHECK(field_of(doc) == "initial");
}

TEST_CASE("investment block validation") {
    json doc = base_asis();
    doc["investment"] = {{"family", "linear"}, {"c1", 0.5}, {"c2", 1.0}, {"M", 1.0}};
    CHECK(parse_scenario(doc).investment.has_value());

    doc["investment"]["family"] = "quadratic";
    CHECK(field_of(doc) == "investment.family");

    doc["investment"]["family"] = "linear";
    doc["investment"]["c1"] = 0.0;
    CHECK(field_of(doc) == "investment.c1");

    doc["investment"]["c1"] = 0.5;
    doc["investment"]["M"] = -1.0;
    CHECK(field_of(doc) == "investment.M");

    doc["investment"] = {{"family", "hyperbolic"}, {"c1", 2.0}, {"c2", 1.0}, {"M", 1.0}};
    CHECK(field_of(doc) == "investment.beta_bar");
}

TEST_CASE("stochastic block validation") {
    json doc = base_asis();
    doc["stochastic"] = {{"N", 1000}, {"replicates", 4}, {"seed", 3}};
    const Scenario sc = parse_scenario(doc);
    REQUIRE(sc.stochastic);
    CHECK(sc.stochastic->population == 1000);
    CHECK(sc.stochastic->seed == 3);

    doc["stochastic"]["N"] = 0;
    CHECK(field_of(doc) == "stochastic.N");

    doc["stochastic"]["N"] = 1000;
    doc["stochastic"]["replicates"] = 0;
    CHECK(field_of(doc) == "stochastic.replicates");

    doc["stochastic"]["replicates"] = 2;
    doc["stochastic"]["initial_infected_active"] = -1;
    CHECK(field_of(doc) == "stochastic.initial_infected_active");
}

TEST_CASE("explicit stochastic counts beyond the type populations fail at run time") {
    json doc = base_asis();
    // round(x_a N) = 200 active nodes; 201 infected-active is impossible.
    doc["stochastic"] = {{"N", 1000}, {"replicates", 1}, {"initial_infected_active", 201}};
    const Scenario sc = parse_scenario(doc);
    CHECK_THROWS_WITH_AS((void)run_stochastic(sc),
                         doctest::Contains("stochastic.initial_infected_active"), ConfigError);
}

TEST_CASE("sweep block validation") {
    json doc = base_asis();
    doc["sweep"] = {{"parameter", "x_a"}, {"min", 0.0}, {"max", 1.0},
                    {"count", 11},        {"outputs", json::array({"lambda_plus", "L"})}};
    CHECK(parse_scenario(doc).sweep.has_value());

    doc["sweep"]["parameter"] = "gamma";
    CHECK(field_of(doc) == "sweep.parameter");

    doc["sweep"]["parameter"] = "x_a";
    doc["sweep"]["count"] = 1;
    CHECK(field_of(doc) == "sweep.count");

    doc["sweep"]["count"] = 11;
    doc["sweep"]["min"] = 2.0;
    CHECK(field_of(doc) == "sweep.min");

    doc["sweep"]["min"] = 0.0;
    doc["sweep"]["max"] = 1.5;
    CHECK(field_of(doc) == "sweep.min");  // x_a domain violation

    doc["sweep"]["max"] = 1.0;
    doc["sweep"]["outputs"] = json::array({"a_star"});
    CHECK(field_of(doc) == "sweep.outputs");  // no investment block present

    doc["sweep"]["outputs"] = json::array({"i_pk"});
    CHECK(field_of(doc) == "sweep.outputs");  // wrong model for a peak sweep
}

TEST_CASE("commands demand their blocks") {
    const Scenario sc = parse_scenario(base_asis());
    CHECK_THROWS_AS((void)run_optimize(sc), ConfigError);
    CHECK_THROWS_AS((void)run_sweep(sc), ConfigError);
    CHECK_THROWS_AS((void)run_stochastic(sc), ConfigError);

    json doc = base_asis();
    doc.erase("integration");
    CHECK_THROWS_WITH_AS((void)run_simulate(parse_scenario(doc)),
                         doctest::Contains("integration"), ConfigError);
}

TEST_CASE("analyze rejects non-planar requests on degenerate compositions") {
    json doc = base_asis();
    doc["params"]["x_a"] = 0.0;
    doc["initial"]["i_a"] = 0.0;
    doc["analysis"] = {{"lyapunov", json::object()}};
    CHECK_THROWS_WITH_AS((void)run_analyze(parse_scenario(doc)),
                         doctest::Contains("analysis.lyapunov"), ConfigError);
    doc["analysis"] = {{"nullclines", json::object()}};
    CHECK_THROWS_WITH_AS((void)run_analyze(parse_scenario(doc)),
                         doctest::Contains("analysis.nullclines"), ConfigError);
}

TEST_SUITE_END();
