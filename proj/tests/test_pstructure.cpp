#include "rrdd/pstructure.hpp"

#include "oracles.hpp"
#include "rrdd/errors.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <random>

using namespace rrdd;

TEST_CASE("alpha_eval on the p-Laplacian presets")
{
    const PStructure p3 = make_preset(Preset::resolvent, 3.0, 1.0);
    const Vec2 a = alpha_eval(p3, Vec2(2.0, 0.0));
    CHECK(a[0] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(a[1] == doctest::Approx(0.0));

    const PStructure p4 = make_preset(Preset::resolvent, 4.0, 1.0);
    CHECK(alpha_eval(p4, Vec2::Zero()).norm() == 0.0);

    const PStructure p2 = make_preset(Preset::linear, 2.0, 1.0);
    const Vec2 z(1.5, -2.0);
    CHECK((alpha_eval(p2, z) - z).norm() == 0.0);
}

TEST_CASE("alpha_eval rejects non-finite input")
{
    const PStructure ps = make_preset(Preset::resolvent, 3.0, 1.0);
    CHECK_THROWS_AS((void)alpha_eval(ps, Vec2(std::nan(""), 0.0)), InvalidArgument);
    CHECK_THROWS_AS((void)g_eval(ps, std::numeric_limits<double>::infinity()),
                    InvalidArgument);
}

TEST_CASE("alpha_jacobian closed forms")
{
    const PStructure p2 = make_preset(Preset::linear, 2.0, 1.0);
    CHECK((alpha_jacobian(p2, Vec2(0.3, 9.0), 0.0) - Mat2::Identity()).norm() == 0.0);

    const PStructure p3 = make_preset(Preset::resolvent, 3.0, 1.0);
    const Mat2 j = alpha_jacobian(p3, Vec2(1.0, 0.0), 0.0);
    CHECK(j(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(j(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j(0, 1) == doctest::Approx(0.0));
    CHECK(j(1, 0) == doctest::Approx(0.0));
}

TEST_CASE("alpha_jacobian matches central finite differences")
{
    const PStructure p4 = make_preset(Preset::resolvent, 4.0, 1.0);
    const Vec2 z(0.3, -0.7);
    const Mat2 jac = alpha_jacobian(p4, z, 0.0);

    const auto fn = [&](const Vector& v) -> Vector {
        return alpha_eval(p4, Vec2(v[0], v[1]));
    };
    Vector at(2);
    at << z[0], z[1];
    const Matrix fd = oracle::central_jacobian(fn, at, 1e-6);
    CHECK((jac - fd).norm() / jac.norm() < 1e-6);
}

TEST_CASE("alpha_jacobian finite-difference consistency over sampled points")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> box(-3.0, 3.0);
    for (const PStructure& ps : {make_preset(Preset::resolvent, 3.0, 1.0),
                                 make_preset(Preset::reaction, 4.0, 2.0)}) {
        for (int k = 0; k < 50; ++k) {
            Vec2 z(box(rng), box(rng));
            if (z.norm() < 0.1) {
                continue;
            }
            const Mat2 jac = alpha_jacobian(ps, z, 0.0);
            const auto fn = [&](const Vector& v) -> Vector {
                return alpha_eval(ps, Vec2(v[0], v[1]));
            };
            Vector at(2);
            at << z[0], z[1];
            const Matrix fd = oracle::central_jacobian(fn, at, 1e-6 * std::max(1.0, z.norm()));
            CHECK((jac - fd).norm() / jac.norm() < 1e-5);

            // symmetric positive semidefinite
            CHECK((jac - jac.transpose()).norm() < 1e-12 * jac.norm());
            const Eigen::SelfAdjointEigenSolver<Mat2> eig(jac);
            CHECK(eig.eigenvalues().minCoeff() > -1e-12);
        }
    }
}

TEST_CASE("g evaluators")
{
    const PStructure resolvent = make_preset(Preset::resolvent, 3.0, 2.0);
    CHECK(g_eval(resolvent, 3.0) == doctest::Approx(6.0).epsilon(1e-15));

    const PStructure reaction = make_preset(Preset::reaction, 3.0, 1.0);
    CHECK(g_eval(reaction, -2.0) == doctest::Approx(-4.0).epsilon(1e-14));

    for (double x : {-1.0, 0.5, 2.0}) {
        const auto fn = [&](const Vector& v) -> Vector {
            Vector out(1);
            out[0] = g_eval(reaction, v[0]);
            return out;
        };
        Vector at(1);
        at << x;
        const Matrix fd = oracle::central_jacobian(fn, at, 1e-6);
        CHECK(g_derivative(reaction, x, 0.0) ==
              doctest::Approx(fd(0, 0)).epsilon(1e-6));
    }
}

TEST_CASE("positive homogeneity of degree p-1")
{
    const PStructure ps = make_preset(Preset::resolvent, 3.5, 1.0);
    const Vec2 z(0.4, -1.2);
    for (double t : {0.5, 2.0, 7.0}) {
        const Vec2 lhs = alpha_eval(ps, t * z);
        const Vec2 rhs = std::pow(t, ps.p - 1.0) * alpha_eval(ps, z);
        CHECK((lhs - rhs).norm() <= 1e-13 * rhs.norm());
    }
}

TEST_CASE("exact sign conditions on sampled pairs")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> box(-5.0, 5.0);
    for (const PStructure& ps : {make_preset(Preset::resolvent, 2.0, 1.0),
                                 make_preset(Preset::resolvent, 3.0, 0.5),
                                 make_preset(Preset::reaction, 4.0, 2.0)}) {
        for (int k = 0; k < 200; ++k) {
            const Vec2 z(box(rng), box(rng));
            const Vec2 zt(box(rng), box(rng));
            CHECK((alpha_eval(ps, z) - alpha_eval(ps, zt)).dot(z - zt) >= 0.0);
            CHECK(alpha_eval(ps, z).dot(z) >= 0.0);
        }
    }
}

TEST_CASE("certification: p=2 monotonicity ratio is identically one")
{
    const PStructure ps = make_preset(Preset::linear, 2.0, 1.0);
    const CertificationReport report = certify_p_structure(ps, 2000, 42);
    CHECK(report.all_pass);
    for (const BoundReport& b : report.bounds) {
        if (b.bound == "monotonicity_alpha" || b.bound == "coercivity_alpha") {
            CHECK(b.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("certification: p=4 worst monotonicity ratio stays above 2^{2-p}")
{
    const PStructure ps = make_preset(Preset::resolvent, 4.0, 1.0);
    const CertificationReport report = certify_p_structure(ps, 10000, 42, 5.0, 2);
    CHECK(report.all_pass);
    for (const BoundReport& b : report.bounds) {
        if (b.bound == "monotonicity_alpha") {
            CHECK(b.worst_ratio >= 0.25 - 1e-12);
            CHECK(b.margin >= 0.0);
        }
    }
}

TEST_CASE("certification: reaction coercivity ratio is the equality case")
{
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    const CertificationReport report = certify_p_structure(ps, 2000, 1);
    CHECK(report.all_pass);
    for (const BoundReport& b : report.bounds) {
        if (b.bound == "coercivity_g") {
            CHECK(b.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("certification is seed-deterministic and validates input")
{
    const PStructure ps = make_preset(Preset::reaction, 3.0, 1.0);
    const CertificationReport a = certify_p_structure(ps, 500, 77);
    const CertificationReport b = certify_p_structure(ps, 500, 77);
    REQUIRE(a.bounds.size() == b.bounds.size());
    for (std::size_t i = 0; i < a.bounds.size(); ++i) {
        CHECK(a.bounds[i].worst_ratio == b.bounds[i].worst_ratio);
    }
    CHECK_THROWS_AS((void)certify_p_structure(ps, 0, 1), InvalidArgument);
}

TEST_CASE("exponent admissibility")
{
    CHECK_NOTHROW(validate_exponents(2.0, 2.0, 2));
    CHECK_NOTHROW(validate_exponents(3.0, 3.0, 2));
    CHECK_THROWS_AS(validate_exponents(1.5, 2.0, 1), InvalidArgument);
    CHECK_THROWS_AS(validate_exponents(2.0, 1.0, 1), InvalidArgument);
    CHECK_THROWS_AS((void)make_preset(Preset::resolvent, 3.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS((void)preset_from_name("unknown"), InvalidArgument);
}
