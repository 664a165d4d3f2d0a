#pragma once

#include "rrdd/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rrdd {

/// Growth/monotonicity/coercivity constants of a p-structure nonlinearity:
///   |alpha(z)| <= C1 |z|^{p-1},   |g(x)| <= C2 |x|^{r-1},
///   (alpha(z)-alpha(zt)).(z-zt) >= c1 |z-zt|^p,   alpha(z).z >= c2 |z|^p,
///   (g(x)-g(xt))(x-xt) >= c3 |x-xt|^r,            g(x) x    >= c4 |x|^r.
struct GrowthConstants {
    double C1 = 1.0;
    double C2 = 1.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
    double c4 = 1.0;
};

enum class Preset {
    resolvent, ///< alpha(z)=|z|^{p-2}z, g(x)=lambda x, r=2
    reaction,  ///< alpha(z)=|z|^{p-2}z, g(x)=lambda |x|^{p-2}x, r=p
    linear,    ///< p=2, alpha=id, g(x)=lambda x, r=2
};

const char* preset_name(Preset preset);
Preset preset_from_name(const std::string& name);

/// The nonlinearity pair (alpha, g) with exponents (p, r), derivative
/// evaluators for Newton, and the constants the certification run checks.
/// Immutable after construction; all evaluators are pure.
struct PStructure {
    double p = 2.0; ///< diffusion exponent, p in [2, inf)
    double r = 2.0; ///< reaction exponent, r in (1, inf)
    double lambda = 1.0;

    std::function<Vec2(const Vec2&)> alpha;
    /// Derivative D alpha with modulus regularization; exact at eps_reg = 0
    /// away from z = 0. Used only inside Newton.
    std::function<Mat2(const Vec2&, double)> alpha_jac;
    std::function<double(double)> g;
    std::function<double(double, double)> g_deriv;

    GrowthConstants growth_constants;
    std::string name = "custom";
};

/// Built-in problem families. `p` is ignored by the linear preset (forced
/// to 2). lambda > 0 scales g.
PStructure make_preset(Preset preset, double p, double lambda);

/// Exponent admissibility for a d-dimensional domain: p >= 2, r > 1, and
/// r <= d p / (2(d-p)) + 1 when p < d. Throws InvalidArgument on violation.
void validate_exponents(double p, double r, int dim);

Vec2 alpha_eval(const PStructure& ps, const Vec2& z);
Mat2 alpha_jacobian(const PStructure& ps, const Vec2& z, double eps_reg);
double g_eval(const PStructure& ps, double x);
double g_derivative(const PStructure& ps, double x, double eps_reg);

/// One certified bound: the worst sampled ratio against the stored constant.
struct BoundReport {
    std::string bound;       ///< e.g. "monotonicity_alpha"
    double required = 0.0;   ///< stored constant
    double worst_ratio = 0.0;
    /// Slack against the tolerance-widened acceptance region; >= 0 iff pass.
    double margin = 0.0;
    bool pass = false;
    std::string worst_sample; ///< the sample attaining the worst ratio
};

struct CertificationReport {
    int sample_count = 0;
    std::uint64_t seed = 0;
    double box_halfwidth = 0.0;
    int dim = 2;
    std::vector<BoundReport> bounds;
    bool all_pass = false;
};

/// Samples (z, zt) pairs and (x, xt) points uniformly in
/// [-box_halfwidth, box_halfwidth]^dim and evaluates the growth,
/// monotonicity and coercivity bounds against the stored constants.
/// Deterministic in (sample_count, seed, box, dim). Violations beyond
/// tolerance 1e-12 mark the bound (and the report) as failed, with the
/// offending sample recorded.
CertificationReport certify_p_structure(const PStructure& ps, int sample_count,
                                        std::uint64_t seed,
                                        double box_halfwidth = 5.0, int dim = 2);

std::string format_certification(const CertificationReport& report);

} // namespace rrdd
