#include "rrdd/pstructure.hpp"

#include "rrdd/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace rrdd {

namespace {

bool finite(const Vec2& z)
{
    return std::isfinite(z[0]) && std::isfinite(z[1]);
}

/// |z|^{p-2} z with the exact convention alpha(0) = 0.
Vec2 plaplace_alpha(double p, const Vec2& z)
{
    const double n = z.norm();
    if (n == 0.0) {
        return Vec2::Zero();
    }
    return std::pow(n, p - 2.0) * z;
}

/// m^{p-2} (I + (p-2) z z^T / m^2), m = sqrt(|z|^2 + eps^2).
Mat2 plaplace_alpha_jac(double p, const Vec2& z, double eps)
{
    const double m2 = z.squaredNorm() + eps * eps;
    if (m2 == 0.0) {
        // p = 2 still yields the identity; p > 2 degenerates to zero.
        return p == 2.0 ? Mat2::Identity().eval() : Mat2::Zero().eval();
    }
    const double m = std::sqrt(m2);
    const double scale = std::pow(m, p - 2.0);
    return scale * (Mat2::Identity() + (p - 2.0) / m2 * (z * z.transpose()));
}

double power_g(double lambda, double r, double x)
{
    if (x == 0.0) {
        return 0.0;
    }
    return lambda * std::pow(std::abs(x), r - 2.0) * x;
}

double power_g_deriv(double lambda, double r, double x, double eps)
{
    const double m2 = x * x + eps * eps;
    if (m2 == 0.0) {
        return r == 2.0 ? lambda : 0.0;
    }
    const double m = std::sqrt(m2);
    return lambda * (std::pow(m, r - 2.0) + (r - 2.0) * x * x * std::pow(m, r - 4.0));
}

} // namespace

const char* preset_name(Preset preset)
{
    switch (preset) {
    case Preset::resolvent: return "resolvent";
    case Preset::reaction: return "reaction";
    case Preset::linear: return "linear";
    }
    return "unknown";
}

Preset preset_from_name(const std::string& name)
{
    if (name == "resolvent") return Preset::resolvent;
    if (name == "reaction") return Preset::reaction;
    if (name == "linear") return Preset::linear;
    throw InvalidArgument("unknown preset '" + name + "' (expected resolvent|reaction|linear)");
}

void validate_exponents(double p, double r, int dim)
{
    if (!(p >= 2.0)) {
        throw InvalidArgument("exponent p must satisfy p >= 2, got " + std::to_string(p));
    }
    if (!(r > 1.0)) {
        throw InvalidArgument("exponent r must satisfy r > 1, got " + std::to_string(r));
    }
    if (p < static_cast<double>(dim)) {
        const double d = static_cast<double>(dim);
        const double bound = d * p / (2.0 * (d - p)) + 1.0;
        if (r > bound) {
            throw InvalidArgument("exponent r exceeds the admissible bound for p < d");
        }
    }
}

PStructure make_preset(Preset preset, double p, double lambda)
{
    if (preset == Preset::linear) {
        p = 2.0;
    }
    if (!(p >= 2.0)) {
        throw InvalidArgument("preset requires p >= 2, got " + std::to_string(p));
    }
    if (!(lambda > 0.0)) {
        throw InvalidArgument("preset requires lambda > 0, got " + std::to_string(lambda));
    }

    PStructure ps;
    ps.p = p;
    ps.lambda = lambda;
    ps.name = preset_name(preset);
    ps.alpha = [p](const Vec2& z) { return plaplace_alpha(p, z); };
    ps.alpha_jac = [p](const Vec2& z, double eps) { return plaplace_alpha_jac(p, z, eps); };

    switch (preset) {
    case Preset::resolvent:
    case Preset::linear:
        ps.r = 2.0;
        ps.g = [lambda](double x) { return lambda * x; };
        ps.g_deriv = [lambda](double, double) { return lambda; };
        break;
    case Preset::reaction:
        ps.r = p;
        ps.g = [lambda, p](double x) { return power_g(lambda, p, x); };
        ps.g_deriv = [lambda, p](double x, double eps) { return power_g_deriv(lambda, p, x, eps); };
        break;
    }

    // |z|^{p-2}z attains the growth and coercivity bounds with constant 1;
    // its monotonicity constant 2^{2-p} is attained at antipodal pairs.
    GrowthConstants gc;
    gc.C1 = 1.0;
    gc.c1 = std::pow(2.0, 2.0 - p);
    gc.c2 = 1.0;
    gc.C2 = lambda;
    gc.c3 = lambda * std::pow(2.0, 2.0 - ps.r);
    gc.c4 = lambda;
    ps.growth_constants = gc;
    return ps;
}

Vec2 alpha_eval(const PStructure& ps, const Vec2& z)
{
    if (!finite(z)) {
        throw InvalidArgument("alpha_eval: non-finite input");
    }
    return ps.alpha(z);
}

Mat2 alpha_jacobian(const PStructure& ps, const Vec2& z, double eps_reg)
{
    if (!finite(z) || !std::isfinite(eps_reg) || eps_reg < 0.0) {
        throw InvalidArgument("alpha_jacobian: non-finite input or eps_reg < 0");
    }
    return ps.alpha_jac(z, eps_reg);
}

double g_eval(const PStructure& ps, double x)
{
    if (!std::isfinite(x)) {
        throw InvalidArgument("g_eval: non-finite input");
    }
    return ps.g(x);
}

double g_derivative(const PStructure& ps, double x, double eps_reg)
{
    if (!std::isfinite(x) || !std::isfinite(eps_reg) || eps_reg < 0.0) {
        throw InvalidArgument("g_derivative: non-finite input or eps_reg < 0");
    }
    return ps.g_deriv(x, eps_reg);
}

namespace {

struct RatioTracker {
    double worst = std::numeric_limits<double>::infinity();
    std::string sample;

    void lower(double ratio, const std::string& at)
    {
        if (ratio < worst) {
            worst = ratio;
            sample = at;
        }
    }
};

struct MaxTracker {
    double worst = 0.0;
    std::string sample;

    void raise(double ratio, const std::string& at)
    {
        if (ratio > worst) {
            worst = ratio;
            sample = at;
        }
    }
};

std::string fmt_pair(const Vec2& z, const Vec2& zt)
{
    std::ostringstream os;
    os << "z=(" << z[0] << "," << z[1] << "), zt=(" << zt[0] << "," << zt[1] << ")";
    return os.str();
}

std::string fmt_pair(double x, double xt)
{
    std::ostringstream os;
    os << "x=" << x << ", xt=" << xt;
    return os.str();
}

} // namespace

CertificationReport certify_p_structure(const PStructure& ps, int sample_count,
                                        std::uint64_t seed, double box_halfwidth,
                                        int dim)
{
    if (sample_count < 1) {
        throw InvalidArgument("certify_p_structure: sample_count must be >= 1");
    }
    if (dim != 1 && dim != 2) {
        throw InvalidArgument("certify_p_structure: dim must be 1 or 2");
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-box_halfwidth, box_halfwidth);
    auto draw = [&]() {
        Vec2 z(box(rng), 0.0);
        if (dim == 2) {
            z[1] = box(rng);
        }
        return z;
    };

    MaxTracker growth_a, growth_g;
    RatioTracker mono_a, coer_a, mono_g, coer_g;

    for (int k = 0; k < sample_count; ++k) {
        const Vec2 z = draw();
        const Vec2 zt = draw();
        const double x = box(rng);
        const double xt = box(rng);

        const Vec2 az = ps.alpha(z);
        const Vec2 azt = ps.alpha(zt);
        const double gx = ps.g(x);
        const double gxt = ps.g(xt);

        if (double zn = z.norm(); zn > 0.0) {
            growth_a.raise(az.norm() / std::pow(zn, ps.p - 1.0), fmt_pair(z, zt));
            coer_a.lower(az.dot(z) / std::pow(zn, ps.p), fmt_pair(z, zt));
        }
        if (double dn = (z - zt).norm(); dn > 0.0) {
            mono_a.lower((az - azt).dot(z - zt) / std::pow(dn, ps.p), fmt_pair(z, zt));
        }
        if (double xn = std::abs(x); xn > 0.0) {
            growth_g.raise(std::abs(gx) / std::pow(xn, ps.r - 1.0), fmt_pair(x, xt));
            coer_g.lower(gx * x / std::pow(xn, ps.r), fmt_pair(x, xt));
        }
        if (double dn = std::abs(x - xt); dn > 0.0) {
            mono_g.lower((gx - gxt) * (x - xt) / std::pow(dn, ps.r), fmt_pair(x, xt));
        }
    }

    constexpr double tol = 1e-12;
    const GrowthConstants& gc = ps.growth_constants;

    CertificationReport report;
    report.sample_count = sample_count;
    report.seed = seed;
    report.box_halfwidth = box_halfwidth;
    report.dim = dim;

    // Margin is the slack against the tolerance-widened acceptance region,
    // so bounds attained with equality still report a positive margin.
    auto add_upper = [&](const char* name, double required, const MaxTracker& t) {
        BoundReport b;
        b.bound = name;
        b.required = required;
        b.worst_ratio = t.worst;
        b.margin = (required + tol) - t.worst;
        b.pass = b.margin >= 0.0;
        b.worst_sample = t.sample;
        report.bounds.push_back(std::move(b));
    };
    auto add_lower = [&](const char* name, double required, const RatioTracker& t) {
        BoundReport b;
        b.bound = name;
        b.required = required;
        b.worst_ratio = t.worst;
        b.margin = t.worst - (required - tol);
        b.pass = b.margin >= 0.0;
        b.worst_sample = t.sample;
        report.bounds.push_back(std::move(b));
    };

    add_upper("growth_alpha", gc.C1, growth_a);
    add_upper("growth_g", gc.C2, growth_g);
    add_lower("monotonicity_alpha", gc.c1, mono_a);
    add_lower("coercivity_alpha", gc.c2, coer_a);
    add_lower("monotonicity_g", gc.c3, mono_g);
    add_lower("coercivity_g", gc.c4, coer_g);

    report.all_pass = true;
    for (const BoundReport& b : report.bounds) {
        report.all_pass = report.all_pass && b.pass;
    }
    return report;
}

std::string format_certification(const CertificationReport& report)
{
    std::ostringstream os;
    os << "p-structure certification: " << (report.all_pass ? "PASS" : "FAIL")
       << " (samples=" << report.sample_count << ", seed=" << report.seed
       << ", box=" << report.box_halfwidth << ", dim=" << report.dim << ")\n";
    for (const BoundReport& b : report.bounds) {
        os << "  " << (b.pass ? "ok  " : "FAIL") << " " << b.bound
           << ": worst=" << b.worst_ratio << " required=" << b.required
           << " margin=" << b.margin;
        if (!b.pass) {
            os << "  at " << b.worst_sample;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace rrdd
