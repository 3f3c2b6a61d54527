#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "intphase/runner.hpp"

namespace {

struct SubArgs {
    CLI::App* app = nullptr;
    std::string command;
    std::string oracle;
};

CLI::App* add_command(CLI::App& app, intphase::CliOptions& opts, const std::string& name,
                      const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->callback([&opts, name] { opts.command = name; });
    return sub;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interferometric phases of clocks and atom interferometers in a "
                 "linear gravitational field with dilaton-coupled mass defects"};
    app.require_subcommand(1);

    intphase::CliOptions opts;
    std::string values_csv;
    std::string oracle_mode;

    CLI::App* simulate = add_command(app, opts, "simulate",
                                     "Evaluate one geometry and write a JSON report");
    CLI::App* sweep = add_command(app, opts, "sweep",
                                  "Sweep one parameter and write a CSV of phases");
    CLI::App* sensitivity = add_command(app, opts, "sensitivity",
                                        "Projected statistical bound on alpha");
    CLI::App* classify =
        add_command(app, opts, "classify", "Grid-classify redshift sensitivity");
    CLI::App* export_traj = add_command(app, opts, "export-trajectories",
                                        "Write sampled branch trajectories as CSV");
    CLI::App* verify = add_command(app, opts, "verify",
                                   "Run the acceptance suite and print one line per "
                                   "criterion");

    for (CLI::App* sub : {simulate, sweep, sensitivity, classify, export_traj}) {
        sub->add_option("-c,--config", opts.config_path, "Experiment description (TOML)")
            ->required();
        sub->add_option("-o,--out", opts.out_path, "Output path ('-' for stdout)");
    }
    for (CLI::App* sub : {simulate, verify})
        sub->add_option("--oracle", oracle_mode, "Cross-check against the ODE route")
            ->check(CLI::IsMember({"on", "off"}));
    sweep->add_option("--axis", opts.axis, "Parameter to sweep")->required();
    sweep->add_option("--values", values_csv, "Comma-separated axis values")->required();
    sweep->add_option("-j,--jobs", opts.jobs, "Worker threads (0 = logical processors)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (!oracle_mode.empty()) opts.oracle = (oracle_mode == "on");
    if (!values_csv.empty()) {
        try {
            opts.values = intphase::parse_value_list(values_csv);
        } catch (const intphase::ValidationError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
    }
    return intphase::run_command(opts);
}
