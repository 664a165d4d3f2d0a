#include "rrdd/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"Nonoverlapping Robin-Robin domain decomposition experiments for "
                 "p-structure elliptic problems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;

    auto* run_cmd = app.add_subcommand("run", "Run one experiment from a config file");
    run_cmd->add_option("config", config_path, "Experiment config (INI)")->required();
    run_cmd->add_option("--out", out_override, "Override the [output] dir");

    std::string axis;
    std::vector<double> values;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("config", config_path, "Experiment config (INI)")->required();
    sweep_cmd->add_option("--axis", axis, "Sweep axis: s, p or h")->required();
    sweep_cmd->add_option("--values", values, "Sweep values (comma separated)")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out", out_override, "Override the [output] dir");

    std::string history_csv, summary_json;
    auto* certify_cmd =
        app.add_subcommand("certify", "Re-check the certificates of a recorded run");
    certify_cmd->add_option("history", history_csv, "history.csv of the run")->required();
    certify_cmd->add_option("summary", summary_json, "summary.json of the run")->required();

    CLI11_PARSE(app, argc, argv);

    // RRDD_OUTPUT_ROOT relocates the configured output directory under a
    // different root; --out replaces it outright.
    auto resolve_out = [&](rrdd::ExperimentConfig& cfg) {
        if (!out_override.empty()) {
            cfg.out_dir = out_override;
        } else if (const char* root = std::getenv("RRDD_OUTPUT_ROOT"); root != nullptr) {
            cfg.out_dir = (std::filesystem::path(root) / cfg.out_dir).string();
        }
    };

    try {
        if (run_cmd->parsed()) {
            rrdd::ExperimentConfig cfg = rrdd::parse_config_file(config_path);
            resolve_out(cfg);
            return rrdd::run_experiment(cfg);
        }
        if (sweep_cmd->parsed()) {
            rrdd::ExperimentConfig cfg = rrdd::parse_config_file(config_path);
            resolve_out(cfg);
            return rrdd::run_sweep_config(cfg, axis, values);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return rrdd::exit_usage;
    }
    return rrdd::certify_files(history_csv, summary_json);
}
