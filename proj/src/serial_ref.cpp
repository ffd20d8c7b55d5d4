#include "uclab/serial_ref.hpp"

#include <cmath>
#include <stdexcept>

namespace uclab::serial {

double weighted_integral(const ScalarField& expr, Weight w, double r, const CutoffSpec& cut) {
    const Grid& g = expr.grid();
    const int d = g.dim();
    if (r > g.radius() * (1.0 + 1e-12)) throw std::invalid_argument("radius exceeds domain");
    if (r < 4.0 * g.spacing()) throw std::invalid_argument("under-resolved radius");
    if ((1.0 - cut.upsilon) * r < 2.0 * g.spacing())
        throw std::invalid_argument("under-resolved cutoff ramp");

    const auto& v = expr.values();
    // Same cell-averaged radial weights as the parallel kernel, written out
    // longhand with plain accumulation.
    const double h = g.spacing();
    const double a = cut.ramp_start() * r;
    const double inv1mu = 1.0 / (1.0 - cut.upsilon);
    double sum = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.in_ball(k)) continue;
        const double ax = norm(g.position(k), d);
        const double lo = std::max(0.0, ax - 0.5 * h), hi = ax + 0.5 * h;
        if (lo >= r) continue;
        const double len = hi - lo;
        const double x1 = std::max(lo, a), x2 = std::min(hi, r);
        double wgt = 0.0;
        switch (w) {
            case Weight::phi: {
                double acc = std::max(0.0, std::min(hi, a) - lo);
                if (x2 > x1)
                    acc += ((x2 - x2 * x2 / (2.0 * r)) - (x1 - x1 * x1 / (2.0 * r))) * inv1mu;
                wgt = acc / len;
                break;
            }
            case Weight::minus_phi_prime:
                if (x2 > x1) wgt = (x2 - x1) * inv1mu / len;
                break;
            case Weight::minus_phi_prime_times_absx:
                if (x2 > x1) wgt = 0.5 * (x2 * x2 - x1 * x1) * inv1mu / len;
                break;
            case Weight::minus_phi_prime_over_absx:
                if (x2 > x1) wgt = std::log(x2 / x1) * inv1mu / len;
                break;
        }
        if (wgt != 0.0) sum += wgt * v[k];
    }
    return sum * std::pow(g.spacing(), d);
}

VectorField gradient(const ScalarField& field) {
    const Grid& g = field.grid();
    const int d = g.dim();
    const double h = g.spacing();
    const auto& u = field.values();
    std::array<std::vector<double>, 3> comps;
    for (int a = 0; a < d; ++a) comps[a].assign(g.node_count(), 0.0);

    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.in_ball(k)) continue;
        const Index3 ix = g.unflatten(k);
        for (int a = 0; a < d; ++a) {
            Index3 up = ix, dn = ix;
            up[a] += 1;
            dn[a] -= 1;
            const bool has_up = g.index_valid(up) && g.in_ball(up);
            const bool has_dn = g.index_valid(dn) && g.in_ball(dn);
            if (has_up && has_dn)
                comps[a][k] = (u[g.flatten(up)] - u[g.flatten(dn)]) / (2.0 * h);
            else if (has_up)
                comps[a][k] = (u[g.flatten(up)] - u[k]) / h;
            else if (has_dn)
                comps[a][k] = (u[k] - u[g.flatten(dn)]) / h;
        }
    }
    return VectorField(g, std::move(comps));
}

double ball_mean_square(const ScalarField& u, const Vec3& x0, double r) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (r < 4.0 * g.spacing()) throw std::invalid_argument("under-resolved radius");
    for (int a = 0; a < d; ++a)
        if (std::fabs(x0[a]) + r > g.radius() * (1.0 + 1e-12))
            throw std::invalid_argument("ball leaves domain");
    const auto& vals = u.values();
    const double r2 = r * r * (1.0 + 1e-12);
    double num = 0.0;
    long long cnt = 0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.in_ball(k)) continue;
        const Vec3 x = g.position(k);
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) dist2 += (x[a] - x0[a]) * (x[a] - x0[a]);
        if (dist2 > r2) continue;
        num += vals[k] * vals[k];
        ++cnt;
    }
    if (cnt == 0) throw std::invalid_argument("ball contains no lattice nodes");
    return num / static_cast<double>(cnt);
}

}  // namespace uclab::serial
