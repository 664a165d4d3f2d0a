#pragma once

#include "rrdd/pstructure.hpp"
#include "rrdd/types.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace rrdd {

/// Parsed experiment configuration; flat INI-style text with sections
/// [problem], [mesh], [method], [newton], [output].
struct ExperimentConfig {
    // [problem]
    std::string preset = "resolvent"; ///< resolvent | reaction | linear
    double p = 2.0;
    double lambda = 1.0;
    std::string f_expr = "1";

    // [mesh]
    int dim = 1;
    double a = 0.0, b = 1.0;
    int n = 32;
    double lx = 1.0, ly = 1.0;
    int nx = 16, ny = 16;
    std::string axis = "x";
    double cut = 0.5;

    // [method]
    double s = 1.0;
    double tol_gap = 1e-8;
    int max_outer = 200;
    std::string eta0 = "neumann"; ///< zero | neumann | reference
    bool strict_recompute = false;

    // [newton]
    double tol = 1e-10;
    int max_iter = 30;
    double eps_reg = 1e-10;
    double damping = 0.5;
    int max_backtracks = 40;
    int quad_order = 4;

    // [output]
    std::string out_dir = "out";
    std::uint64_t seed = 1234;
    bool dump_meshes = false;

    void validate() const; ///< throws ConfigError
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Raw section/key/value view of an INI document.
std::map<std::string, std::map<std::string, std::string>> parse_ini(const std::string& text);

/// Compiles an expression over (x, y) into a source function. Supports
/// numbers, x, y, pi, + - * / ^, unary minus, parentheses, |expr| and the
/// functions abs, sin, cos, exp, sqrt.
SourceFn parse_expression(const std::string& expr);

} // namespace rrdd
