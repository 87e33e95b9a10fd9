#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "irsperf/experiment.hpp"

namespace {

int run_command(const std::string& preset, const std::string& config_path,
                const std::string& out_path, long trials_override,
                std::int64_t seed_override, bool validate_after, int threads) {
    irsperf::ExperimentSpec spec;
    if (!preset.empty() && !config_path.empty()) {
        std::cerr << "error: use either --preset or --config, not both\n";
        return 2;
    }
    if (!preset.empty()) {
        spec = irsperf::make_preset(preset);
    } else if (!config_path.empty()) {
        spec = irsperf::load_spec_file(config_path);
    } else {
        std::cerr << "error: run needs --preset <name> or --config <path>\n";
        return 2;
    }
    if (trials_override > 0) spec.n_trials = trials_override;
    if (seed_override >= 0) spec.seed = static_cast<std::uint64_t>(seed_override);

    const irsperf::MetricSweepResult result = irsperf::run(spec, threads);
    if (out_path.empty()) {
        irsperf::write_csv(result, std::cout);
    } else {
        irsperf::write_csv_file(result, out_path);
        std::cerr << "wrote " << out_path << " (" << result.rows.size() << " rows, "
                  << result.columns.size() << " columns)\n";
    }

    if (validate_after) {
        int failures = 0;
        for (const auto& c : irsperf::validate_suite(threads)) {
            std::cerr << c.name << "," << (c.pass ? "pass" : "FAIL") << ","
                      << c.measured << "," << c.threshold << "\n";
            if (!c.pass) ++failures;
        }
        if (failures > 0) {
            std::cerr << failures << " validation check(s) failed\n";
            return 1;
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Closed-form performance metrics for a distributed-IRS link over Nakagami-m "
        "fading, validated against a built-in Monte-Carlo simulator"};
    app.require_subcommand(1);

    std::string preset, config_path, out_path;
    long trials = 0;
    std::int64_t seed = -1;
    bool validate_after = false;
    int threads = 0;

    auto* run_cmd = app.add_subcommand("run", "evaluate a preset or config-file sweep, emit CSV");
    run_cmd->add_option("--preset", preset, "named experiment (see list-presets)");
    run_cmd->add_option("--config", config_path, "experiment config file");
    run_cmd->add_option("--out", out_path, "output CSV path (default: stdout)");
    run_cmd->add_option("--trials", trials, "override Monte-Carlo trial count");
    run_cmd->add_option("--seed", seed, "override the random seed");
    run_cmd->add_option("--threads", threads, "worker threads (default: hardware)");
    run_cmd->add_flag("--validate", validate_after,
                      "run the oracle/invariant suite after the sweep; nonzero exit on failure");

    auto* validate_cmd =
        app.add_subcommand("validate", "run the oracle/invariant suite and report per-check");
    validate_cmd->add_option("--threads", threads, "worker threads (default: hardware)");

    auto* list_cmd = app.add_subcommand("list-presets", "list available presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return run_command(preset, config_path, out_path, trials, seed, validate_after,
                               threads);
        if (validate_cmd->parsed()) {
            int failures = 0;
            std::printf("check,status,measured,threshold\n");
            for (const auto& c : irsperf::validate_suite(threads)) {
                std::printf("%s,%s,%.6g,%.6g\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                            c.measured, c.threshold);
                if (!c.pass) ++failures;
            }
            return failures == 0 ? 0 : 1;
        }
        if (list_cmd->parsed()) {
            for (const auto& name : irsperf::preset_names())
                std::printf("%-6s %s\n", name.c_str(),
                            irsperf::preset_description(name).c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
