#include "rrdd/experiment.hpp"

#include "rrdd/diagnostics.hpp"
#include "rrdd/errors.hpp"
#include "rrdd/interface.hpp"
#include "rrdd/monolithic.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace rrdd {

/// Reverse transmission tolerance: the glued-pair residual is proportional
/// to the interface gap at which the iteration stopped.
constexpr double kReverseGapFactor = 50.0;

namespace {

struct ProblemSetup {
    PStructure ps;
    Mesh mesh;
    Decomposition dec;
    SourceFn f;
    QuadratureRule quad;
    NewtonConfig newton;
};

ProblemSetup build_problem(const ExperimentConfig& cfg)
{
    ProblemSetup setup;
    setup.ps = make_preset(preset_from_name(cfg.preset), cfg.p, cfg.lambda);
    validate_exponents(setup.ps.p, setup.ps.r, cfg.dim);

    if (cfg.dim == 1) {
        setup.mesh = build_interval_mesh(cfg.a, cfg.b, cfg.n);
        setup.dec = decompose(setup.mesh, Axis::x, cfg.cut);
    } else {
        setup.mesh = build_rect_mesh(cfg.lx, cfg.ly, cfg.nx, cfg.ny);
        setup.dec = decompose(setup.mesh, cfg.axis == "x" ? Axis::x : Axis::y, cfg.cut);
    }

    setup.f = parse_expression(cfg.f_expr);
    setup.quad = make_quadrature(cfg.dim, cfg.quad_order);
    setup.newton.tol_residual = cfg.tol;
    setup.newton.max_iter = cfg.max_iter;
    setup.newton.damping = cfg.damping;
    setup.newton.max_backtracks = cfg.max_backtracks;
    setup.newton.eps_reg = cfg.eps_reg;
    return setup;
}

nlohmann::json cert_json(const CertResult& cert)
{
    nlohmann::json j;
    j["pass"] = cert.pass;
    j["first_violation_n"] = cert.first_violation_n;
    j["worst_violation"] = cert.worst_violation;
    j["final_value"] = cert.final_value;
    j["slack"] = cert.slack;
    return j;
}

nlohmann::json equivalence_json(const EquivalenceReport& rep)
{
    nlohmann::json j;
    j["interior_residual1"] = rep.interior_residual1;
    j["interior_residual2"] = rep.interior_residual2;
    j["trace_mismatch"] = rep.trace_mismatch;
    j["flux_balance"] = rep.flux_balance;
    j["forward_pass"] = rep.forward_pass;
    j["forward_tol"] = rep.forward_tol;
    j["reverse_checked"] = rep.reverse_checked;
    j["global_residual"] = rep.global_residual;
    j["reverse_pass"] = rep.reverse_pass;
    j["reverse_tol"] = rep.reverse_tol;
    return j;
}

nlohmann::json decay_json(const ErrorDecaySummary& decay)
{
    nlohmann::json j;
    j["iterations"] = decay.iterations;
    j["final_gap"] = decay.final_gap;
    j["final_err_eta1"] = decay.final_err_eta1;
    j["final_err_eta2"] = decay.final_err_eta2;
    j["final_err_u1"] = decay.final_err_u1;
    j["final_err_u2"] = decay.final_err_u2;
    j["decades"] = nlohmann::json::array();
    for (const DecadeRecord& d : decay.decades) {
        j["decades"].push_back({{"gap_threshold", d.gap_threshold}, {"n", d.n}});
    }
    return j;
}

void print_line(std::ostream& os, const std::string& name, bool pass,
                const std::string& detail)
{
    std::string line = (pass ? "[PASS] " : "[FAIL] ") + name;
    if (!detail.empty()) {
        line += " (" + detail + ")";
    }
    line += "\n";
    os << line; // single insertion so parallel sweep points stay line-atomic
}

std::string fmt_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace

int run_experiment(const ExperimentConfig& cfg)
{
    namespace fs = std::filesystem;
    const fs::path out_dir(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << ": "
                  << ec.message() << "\n";
        return exit_usage;
    }

    ProblemSetup setup;
    try {
        setup = build_problem(cfg);
    } catch (const Error& e) {
        std::cerr << "error: problem setup failed: " << e.what() << "\n";
        return exit_usage;
    }

    if (cfg.dump_meshes) {
        std::ofstream ms(out_dir / "mesh_global.txt");
        dump_mesh(setup.mesh, ms);
        std::ofstream m1(out_dir / "mesh_sub1.txt");
        dump_mesh(setup.dec.sub[0], m1);
        std::ofstream m2(out_dir / "mesh_sub2.txt");
        dump_mesh(setup.dec.sub[1], m2);
    }

    InterfaceProblem iprob;
    iprob.dec = &setup.dec;
    iprob.ps = &setup.ps;
    iprob.f = setup.f;
    iprob.quad = setup.quad;
    iprob.newton = setup.newton;
    iprob.s = cfg.s;
    iprob.strict_recompute = cfg.strict_recompute;

    // Monolithic reference
    FeFunction u_global;
    try {
        u_global = solve_global(setup.mesh, setup.ps, setup.f, setup.quad, setup.newton).u;
    } catch (const SolveFailure& e) {
        std::cerr << "error: monolithic reference solve failed: " << e.what() << "\n";
        return exit_no_convergence;
    }
    ReferenceData reference;
    reference.eta_star = trace(setup.dec, 1, restrict_to(setup.dec, 1, u_global));
    reference.u_global = u_global;

    // Initial interface trace
    TraceVector eta20{setup.dec.id, Vector::Zero(setup.dec.n_interface())};
    try {
        if (cfg.eta0 == "neumann") {
            eta20 = default_initial_trace(iprob);
        } else if (cfg.eta0 == "reference") {
            eta20 = reference.eta_star;
        }
    } catch (const SolveFailure& e) {
        std::cerr << "error: initial-trace solve failed: " << e.what() << "\n";
        return exit_no_convergence;
    }

    // Robin-Robin iteration
    ConvergenceHistory hist;
    InterfaceState final_state;
    try {
        hist = run(iprob, eta20, StopRule{cfg.tol_gap, cfg.max_outer}, reference,
                   &final_state);
    } catch (const SolveFailure& e) {
        std::cerr << "error: Robin-Robin iteration failed: " << e.what() << "\n";
        return exit_no_convergence;
    }
    hist.meta.seed = cfg.seed;
    hist.meta.eta0_mode = cfg.eta0;

    {
        std::ofstream csv(out_dir / "history.csv");
        write_history_csv(hist, csv);
    }

    // Certificates and equivalence checks. The reverse transmission check
    // glues the final Robin-Robin pair; its residual scales with the gap
    // tolerance, hence the gap-proportional term in the tolerance.
    const CertResult contraction = contraction_certificate(hist);
    const CertResult monotone = monotone_gap_certificate(hist);
    const ErrorDecaySummary decay = error_decay_summary(hist);

    const double forward_tol = 10.0 * setup.newton.tol_residual;
    const double reverse_tol =
        kReverseGapFactor * cfg.tol_gap + 10.0 * setup.newton.tol_residual;
    const EquivalenceReport equivalence =
        check_transmission(setup.dec, setup.ps, setup.f, setup.quad, u_global, setup.newton,
                           forward_tol, &final_state.u1, &final_state.u2, reverse_tol);

    const bool converged = hist.converged;
    std::ostream& os = std::cout;
    print_line(os, "convergence", converged,
               "final gap " + fmt_num(hist.final_gap) + " after " +
                   std::to_string(hist.records.size()) + " iterations");
    print_line(os, "contraction certificate", contraction.pass,
               "worst violation " + fmt_num(contraction.worst_violation));
    print_line(os, "monotone-gap certificate", monotone.pass,
               "final pairing " + fmt_num(monotone.final_value));
    print_line(os, "transmission equivalence", equivalence.pass(),
               "flux balance " + fmt_num(equivalence.flux_balance));

    nlohmann::json summary;
    summary["run"] = nlohmann::json::parse(metadata_json(hist.meta));
    summary["converged"] = converged;
    summary["final_gap"] = hist.final_gap;
    summary["flux_residual"] = hist.flux_residual;
    summary["certificates"]["contraction"] = cert_json(contraction);
    summary["certificates"]["monotone_gap"] = cert_json(monotone);
    summary["transmission"] = equivalence_json(equivalence);
    summary["error_decay"] = decay_json(decay);
    {
        std::ofstream js(out_dir / "summary.json");
        js << summary.dump(2) << "\n";
    }

    if (!converged) {
        return exit_no_convergence;
    }
    if (!contraction.pass || !monotone.pass || !equivalence.pass()) {
        return exit_certificate_violation;
    }
    return exit_ok;
}

int run_experiment(const std::string& config_path)
{
    ExperimentConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return run_experiment(cfg);
}

int run_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values)
{
    ExperimentConfig base;
    try {
        base = parse_config_file(config_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return run_sweep_config(base, axis, values);
}

int run_sweep_config(const ExperimentConfig& base, const std::string& axis,
                     const std::vector<double>& values)
{
    try {
        if (axis != "s" && axis != "p" && axis != "h") {
            throw ConfigError("sweep axis must be one of s|p|h, got '" + axis + "'");
        }
        if (values.empty()) {
            throw ConfigError("sweep requires a non-empty value list");
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    namespace fs = std::filesystem;
    const fs::path root(base.out_dir);

    struct Point {
        double value = 0.0;
        ExperimentConfig cfg;
        int exit_code = exit_usage;
    };
    std::vector<Point> points;
    for (double v : values) {
        Point pt;
        pt.value = v;
        pt.cfg = base;
        std::ostringstream dir;
        dir << axis << "_" << v;
        pt.cfg.out_dir = (root / dir.str()).string();
        if (axis == "s") {
            pt.cfg.s = v;
        } else if (axis == "p") {
            pt.cfg.p = v;
        } else {
            const int n = static_cast<int>(std::lround(v));
            pt.cfg.n = n;
            pt.cfg.nx = n;
            pt.cfg.ny = n;
        }
        try {
            pt.cfg.validate();
        } catch (const Error& e) {
            std::cerr << "error: sweep value " << v << ": " << e.what() << "\n";
            return exit_usage;
        }
        points.push_back(std::move(pt));
    }

    std::vector<std::future<int>> jobs;
    jobs.reserve(points.size());
    for (Point& pt : points) {
        jobs.push_back(std::async(std::launch::async,
                                  [&pt]() { return run_experiment(pt.cfg); }));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        points[i].exit_code = jobs[i].get();
    }

    std::error_code ec;
    fs::create_directories(root, ec);
    std::ofstream agg(root / "sweep.csv");
    agg << "axis,value,exit_code,converged,iterations,final_gap\n";
    for (const Point& pt : points) {
        int iterations = -1;
        double final_gap = kNoValue;
        bool converged = false;
        std::ifstream js(fs::path(pt.cfg.out_dir) / "summary.json");
        if (js) {
            try {
                nlohmann::json j = nlohmann::json::parse(js);
                converged = j.value("converged", false);
                final_gap = j["final_gap"].is_number() ? j["final_gap"].get<double>()
                                                       : kNoValue;
                iterations = j["error_decay"]["iterations"].get<int>();
            } catch (const std::exception&) {
            }
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", final_gap);
        agg << axis << ',' << pt.value << ',' << pt.exit_code << ',' << (converged ? 1 : 0)
            << ',' << iterations << ',' << buf << '\n';
    }

    int worst = exit_ok;
    for (const Point& pt : points) {
        worst = std::max(worst, pt.exit_code);
    }
    return worst;
}

int certify_files(const std::string& history_csv, const std::string& summary_json)
{
    ConvergenceHistory hist;
    try {
        std::ifstream csv(history_csv);
        if (!csv) {
            throw Error("cannot open " + history_csv);
        }
        hist.records = read_history_csv(csv);

        std::ifstream js(summary_json);
        if (!js) {
            throw Error("cannot open " + summary_json);
        }
        std::ostringstream buf;
        buf << js.rdbuf();
        hist.meta = metadata_from_json(buf.str());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        const CertResult contraction = contraction_certificate(hist);
        const CertResult monotone = monotone_gap_certificate(hist);
        print_line(std::cout, "contraction certificate", contraction.pass,
                   "worst violation " + fmt_num(contraction.worst_violation));
        print_line(std::cout, "monotone-gap certificate", monotone.pass,
                   "final pairing " + fmt_num(monotone.final_value));
        return (contraction.pass && monotone.pass) ? exit_ok : exit_certificate_violation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }
}

} // namespace rrdd
