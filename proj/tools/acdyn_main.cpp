#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "acdyn/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int workers = 0;  // 0: hardware concurrency
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("scenario", args.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--out", args.out_dir, "Output directory (default ./out)");
    cmd->add_option("--seed", args.seed, "Override the stochastic seed");
    cmd->add_option("--workers", args.workers, "Worker threads for sweeps and replicates");
}

int effective_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

acdyn::Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw acdyn::ConfigError("scenario", "cannot read file: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw acdyn::ConfigError("scenario", std::string("malformed JSON: ") + e.what());
    }
    return acdyn::parse_scenario(doc);
}

int dispatch(const std::string& command, const CommonArgs& args) {
    try {
        const acdyn::Scenario sc = load_scenario(args.scenario_path);
        acdyn::CommandResult result;
        if (command == "simulate")
            result = acdyn::run_simulate(sc);
        else if (command == "analyze")
            result = acdyn::run_analyze(sc);
        else if (command == "optimize")
            result = acdyn::run_optimize(sc);
        else if (command == "peak")
            result = acdyn::run_peak(sc);
        else if (command == "sweep")
            result = acdyn::run_sweep(sc, effective_workers(args.workers));
        else if (command == "stochastic")
            result = acdyn::run_stochastic(sc, args.seed, effective_workers(args.workers));
        acdyn::write_outputs(args.out_dir, result);
        for (const auto& f : result.files) std::cout << f.name << "\n";
        return kExitOk;
    } catch (const acdyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-defense contagion dynamics toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string command;
    for (const auto& [name, help] :
         {std::pair{"simulate", "Integrate the model and export the trajectory"},
          {"analyze", "Regime classification, nullclines, Lyapunov certificate"},
          {"optimize", "Solve the defense-investment allocation"},
          {"peak", "Peak infection level: closed form vs. integration"},
          {"sweep", "Evaluate outputs over a parameter grid"},
          {"stochastic", "Finite-population stochastic ensemble"}}) {
        CLI::App* cmd = app.add_subcommand(name, help);
        add_common(cmd, args);
        cmd->callback([&command, name = std::string(name)] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    return dispatch(command, args);
}
