#pragma once

#include <cmath>
#include <stdexcept>

#include "uclab/grid.hpp"
#include "uclab/reduce.hpp"

namespace uclab {

// The four radial weights shared by every cutoff-weighted quantity.
enum class Weight {
    phi,                          // phi(|x|/r)
    minus_phi_prime,              // -phi'(|x|/r)
    minus_phi_prime_times_absx,   // -phi'(|x|/r) * |x|
    minus_phi_prime_over_absx,    // -phi'(|x|/r) / |x|
};

namespace detail {
inline void check_radius(const Grid& g, double r, const CutoffSpec& cut) {
    if (r > g.radius() * (1.0 + 1e-12)) throw std::invalid_argument("radius exceeds domain");
    const double h = g.spacing();
    if (r < 4.0 * h) throw std::invalid_argument("under-resolved radius");
    if ((1.0 - cut.upsilon) * r < 2.0 * h)
        throw std::invalid_argument("under-resolved cutoff ramp");
}
}  // namespace detail

// Nodal quadrature weights: the radial factor of each weight averaged in
// closed form over the node's radial cell [rho - h/2, rho + h/2] (clamped at
// 0). The ramp's kinks and the -phi' jump would otherwise alias on the
// lattice and make the weighted quantities noisy in r; the averaged weights
// have the same continuum limit and keep the radial finite differences
// usable. Everything stays a deterministic nodewise weight.
class CellWeight {
public:
    CellWeight(const CutoffSpec& cut, double r, double h)
        : r_(r), half_(0.5 * h), a_(cut.ramp_start() * r), inv1mu_(1.0 / (1.0 - cut.upsilon)) {}

    double phi(double rho) const {
        const double lo = std::max(0.0, rho - half_), hi = rho + half_;
        const double len = hi - lo;
        double acc = std::max(0.0, std::min(hi, a_) - lo);  // region where phi = 1
        const double x1 = std::max(lo, a_), x2 = std::min(hi, r_);
        if (x2 > x1)
            acc += ((x2 - x2 * x2 / (2.0 * r_)) - (x1 - x1 * x1 / (2.0 * r_))) * inv1mu_;
        return acc / len;
    }
    double mpp(double rho) const {
        const double lo = std::max(0.0, rho - half_), hi = rho + half_;
        const double x1 = std::max(lo, a_), x2 = std::min(hi, r_);
        return x2 > x1 ? (x2 - x1) * inv1mu_ / (hi - lo) : 0.0;
    }
    double mpp_times_x(double rho) const {
        const double lo = std::max(0.0, rho - half_), hi = rho + half_;
        const double x1 = std::max(lo, a_), x2 = std::min(hi, r_);
        return x2 > x1 ? 0.5 * (x2 * x2 - x1 * x1) * inv1mu_ / (hi - lo) : 0.0;
    }
    double mpp_over_x(double rho) const {
        const double lo = std::max(0.0, rho - half_), hi = rho + half_;
        const double x1 = std::max(lo, a_), x2 = std::min(hi, r_);
        return x2 > x1 ? std::log(x2 / x1) * inv1mu_ / (hi - lo) : 0.0;
    }
    double support_cap() const { return r_ + half_; }

private:
    double r_, half_, a_, inv1mu_;
};

// Quadrature sum h^d * sum_k wbar(|x_k|) * expr(k) over in-ball nodes, with
// wbar the cell-averaged weight above. expr is only evaluated where the
// weight is nonzero (in particular never at the origin for the -phi'
// weights). Deterministic for fixed inputs.
template <class F>
double weighted_integral_expr(const Grid& g, F&& expr, Weight w, double r,
                              const CutoffSpec& cut) {
    detail::check_radius(g, r, cut);
    const int d = g.dim();
    const CellWeight cw(cut, r, g.spacing());
    const double sum = det_sum(g.node_count(), [&](std::size_t k) -> double {
        if (!g.in_ball(k)) return 0.0;
        const Vec3 x = g.position(k);
        const double ax = norm(x, d);
        if (ax >= cw.support_cap()) return 0.0;
        double wgt;
        switch (w) {
            case Weight::phi:
                wgt = cw.phi(ax);
                break;
            case Weight::minus_phi_prime:
                wgt = cw.mpp(ax);
                break;
            case Weight::minus_phi_prime_times_absx:
                wgt = cw.mpp_times_x(ax);
                break;
            case Weight::minus_phi_prime_over_absx:
                wgt = cw.mpp_over_x(ax);
                break;
            default:
                wgt = 0.0;
        }
        if (wgt == 0.0) return 0.0;
        return wgt * expr(k);
    });
    return sum * std::pow(g.spacing(), d);
}

double weighted_integral(const ScalarField& expr, Weight w, double r, const CutoffSpec& cut);

// Mean of u^2 over the lattice ball B_r(x0):
// (sum_{|x-x0|<=r} u^2 h^d) / (sum_{|x-x0|<=r} h^d), in-ball nodes only.
double ball_mean_square(const ScalarField& u, const Vec3& x0, double r);

}  // namespace uclab
