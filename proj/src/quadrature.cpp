#include "rrdd/quadrature.hpp"

#include "rrdd/errors.hpp"

#include <cmath>

namespace rrdd {

namespace {

/// Gauss-Legendre nodes/weights on [-1,1] via Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        const double wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
}

void add_tri3(QuadratureRule& q, double a, double b, double c, double w)
{
    // Barycentric (a,b,c) and its cyclic permutations; weight given as a
    // fraction of the unit-triangle area 1/2.
    q.points.emplace_back(b, c);
    q.points.emplace_back(a, b);
    q.points.emplace_back(c, a);
    q.weights.insert(q.weights.end(), 3, 0.5 * w);
}

void add_tri6(QuadratureRule& q, double a, double b, double c, double w)
{
    const double bary[6][3] = {{a, b, c}, {a, c, b}, {b, a, c},
                               {b, c, a}, {c, a, b}, {c, b, a}};
    for (const auto& l : bary) {
        q.points.emplace_back(l[1], l[2]);
        q.weights.push_back(0.5 * w);
    }
}

} // namespace

QuadratureRule make_quadrature(int dim, int order)
{
    if (order < 1) {
        throw InvalidArgument("make_quadrature: order must be >= 1");
    }
    QuadratureRule q;
    q.dim = dim;
    q.order = order;

    if (dim == 1) {
        const int n = (order + 2) / 2; // n-point Gauss is exact to degree 2n-1
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        for (int i = 0; i < n; ++i) {
            q.points.emplace_back(0.5 * (x[i] + 1.0), 0.0);
            q.weights.push_back(0.5 * w[i]);
        }
        q.order = 2 * n - 1;
        return q;
    }
    if (dim != 2) {
        throw InvalidArgument("make_quadrature: dim must be 1 or 2");
    }

    // Symmetric positive triangle rules (Strang/Dunavant tables).
    switch (order) {
    case 1:
        q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
        q.weights.push_back(0.5);
        q.order = 1;
        break;
    case 2:
        add_tri3(q, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0);
        q.order = 2;
        break;
    case 3:
    case 4:
        add_tri3(q, 0.108103018168070, 0.445948490915965, 0.445948490915965,
                 0.223381589678011);
        add_tri3(q, 0.816847572980459, 0.091576213509771, 0.091576213509771,
                 0.109951743655322);
        q.order = 4;
        break;
    case 5:
        q.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
        q.weights.push_back(0.5 * 0.225);
        add_tri3(q, 0.059715871789770, 0.470142064105115, 0.470142064105115,
                 0.132394152788506);
        add_tri3(q, 0.797426985353087, 0.101286507323456, 0.101286507323456,
                 0.125939180544827);
        q.order = 5;
        break;
    default: // order >= 6
        add_tri3(q, 0.873821971016996, 0.063089014491502, 0.063089014491502,
                 0.050844906370207);
        add_tri3(q, 0.501426509658179, 0.249286745170910, 0.249286745170910,
                 0.116786275726379);
        add_tri6(q, 0.636502499121399, 0.310352451033785, 0.053145049844816,
                 0.082851075618374);
        q.order = 6;
        break;
    }
    return q;
}

} // namespace rrdd
