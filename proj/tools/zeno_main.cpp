#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "zeno/cli.hpp"

int main(int argc, char** argv) {
    using namespace zeno::cli;

    CLI::App app{"zeno: continuously measured projector dynamics.\n\n"
                 "Environment:\n"
                 "  ZENO_SEED          overrides the scenario's stroboscopic seed list with a single seed\n"
                 "  SOURCE_DATE_EPOCH  timestamp written into reports (default 0 for reproducible output)\n\n"
                 "Exit codes: 0 ok, 1 invariant check failed, 2 scenario validation failed, 3 runtime failure"};
    app.set_version_flag("--version", std::string("zeno ") + kToolVersion);
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir;
    std::string engine = "effective";

    auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and write a trajectory CSV plus JSON report");
    simulate->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--engine", engine, "effective (direct effective generator), frame (rotating frame), "
                                              "stroboscopic (discrete measurements at the largest n in n_list)")
        ->check(CLI::IsMember({"effective", "frame", "stroboscopic"}))
        ->capture_default_str();
    simulate->add_option("--out", out_dir, "Output directory (created if missing)")->required();

    auto* sweep = app.add_subcommand("sweep", "Stroboscopic convergence sweep over the scenario's n_list");
    sweep->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "Output directory (created if missing)")->required();

    auto* verify = app.add_subcommand("verify", "Run the invariant checks and print one line per check");
    verify->add_option("scenario", scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidationFailure;
    }

    if (simulate->parsed()) {
        return cmd_simulate(scenario, *parse_engine(engine), out_dir, std::cout, std::cerr);
    }
    if (sweep->parsed()) {
        return cmd_sweep(scenario, out_dir, std::cout, std::cerr);
    }
    return cmd_verify(scenario, std::cout, std::cerr);
}
