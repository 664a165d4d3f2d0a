#pragma once

#include "rrdd/config.hpp"

#include <string>
#include <vector>

namespace rrdd {

/// Exit codes shared by the library pipeline and the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,
    exit_no_convergence = 2,
    exit_certificate_violation = 3,
};

/// Full pipeline: mesh, decomposition, monolithic reference, Robin-Robin
/// run, certificates, transmission check; writes history.csv and
/// summary.json into the output directory and prints one line per
/// certificate.
int run_experiment(const ExperimentConfig& cfg);
int run_experiment(const std::string& config_path);

/// One subdirectory per value (full output set each), plus an aggregate
/// sweep.csv with iterations-to-tolerance per value. Points execute in
/// parallel.
int run_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values);
int run_sweep_config(const ExperimentConfig& base, const std::string& axis,
                     const std::vector<double>& values);

/// Re-checks the certificates of a serialized run.
int certify_files(const std::string& history_csv, const std::string& summary_json);

} // namespace rrdd
