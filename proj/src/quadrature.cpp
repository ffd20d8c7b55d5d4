#include "uclab/quadrature.hpp"

namespace uclab {

double weighted_integral(const ScalarField& expr, Weight w, double r, const CutoffSpec& cut) {
    const auto& v = expr.values();
    return weighted_integral_expr(expr.grid(), [&](std::size_t k) { return v[k]; }, w, r, cut);
}

double ball_mean_square(const ScalarField& u, const Vec3& x0, double r) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const double h = g.spacing();
    if (r < 4.0 * h) throw std::invalid_argument("under-resolved radius");
    for (int a = 0; a < d; ++a)
        if (std::fabs(x0[a]) + r > g.radius() * (1.0 + 1e-12))
            throw std::invalid_argument("ball leaves domain");

    const double r2 = r * r * (1.0 + 1e-12);
    const auto& vals = u.values();
    const double num = det_sum(g.node_count(), [&](std::size_t k) -> double {
        if (!g.in_ball(k)) return 0.0;
        Vec3 x = g.position(k);
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) dist2 += (x[a] - x0[a]) * (x[a] - x0[a]);
        if (dist2 > r2) return 0.0;
        return vals[k] * vals[k];
    });
    const double den = det_sum(g.node_count(), [&](std::size_t k) -> double {
        if (!g.in_ball(k)) return 0.0;
        Vec3 x = g.position(k);
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) dist2 += (x[a] - x0[a]) * (x[a] - x0[a]);
        return dist2 > r2 ? 0.0 : 1.0;
    });
    if (den == 0.0) throw std::invalid_argument("ball contains no lattice nodes");
    return num / den;
}

}  // namespace uclab
