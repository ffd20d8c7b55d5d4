#include "uclab/solve.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uclab/quadrature.hpp"
#include "uclab/reduce.hpp"

namespace uclab {

double BoundaryDatum::eval(const Vec3& x, int d) const {
    (void)d;
    if (kind == Kind::harmonic_poly) {
        const double c = std::cos(rotation), s = std::sin(rotation);
        const double y1 = c * x[0] + s * x[1];
        const double y2 = -s * x[0] + c * x[1];
        switch (k) {
            case 1: return scale * y1;
            case 2: return scale * (y1 * y1 - y2 * y2);
            case 3: return scale * (y1 * y1 * y1 - 3.0 * y1 * y2 * y2);
            default: throw std::invalid_argument("harmonic_poly degree must be 1, 2 or 3");
        }
    }
    const double x1 = x[0], x2 = x[1];
    if (expr == "x1") return scale * x1;
    if (expr == "x2") return scale * x2;
    if (expr == "x1x2") return scale * x1 * x2;
    if (expr == "x1^2-x2^2") return scale * (x1 * x1 - x2 * x2);
    if (expr == "x1^3-3x1x2^2") return scale * (x1 * x1 * x1 - 3.0 * x1 * x2 * x2);
    if (expr == "x2^2") return scale * x2 * x2;
    if (expr == "zero") return 0.0;
    throw std::invalid_argument("unknown datum expression: " + expr);
}

namespace {

// Discrete energy on the lattice ball:
//   E(u)/h^d =  sum over in-ball edges of 1/2 ((u_head - u_tail)/h)^2
//             + sum over in-ball nodes of F(x, u, Gc u)
// with Gc the central/one-sided nodal gradient of module grid. The exact
// gradient of E couples the staggered Laplacian with the adjoint of Gc
// applied to grad_p F; free nodes sit >= 2.5h inside the sphere, where every
// stencil they touch is central, so the adjoint reduces to the plain central
// divergence there.
class DiscreteProblem {
public:
    DiscreteProblem(const Grid& g, const Lagrangian& lag) : g_(g), lag_(lag) {
        const int d = g.dim();
        h_ = g.spacing();
        hd_ = std::pow(h_, d);
        const double rim = g.radius() - 2.5 * h_;
        free_.assign(g.node_count(), 0);
        nfree_ = 0;
#pragma omp parallel for schedule(static) reduction(+ : nfree_)
        for (long long k = 0; k < static_cast<long long>(g.node_count()); ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (!g.in_ball(ks)) continue;
            if (norm(g.position(ks), d) <= rim) {
                free_[ks] = 1;
                ++nfree_;
            }
        }
        has_F_ = lag.family != Family::quadratic;
        if (has_F_) {
            for (int a = 0; a < d; ++a) W_[a].assign(g.node_count(), 0.0);
        }
    }

    const std::vector<std::uint8_t>& free_mask() const { return free_; }
    long long free_count() const { return nfree_; }
    double cell() const { return hd_; }

    // Nodal gradient of u at an in-ball node (same stencils as gradient()).
    Vec3 nodal_gradient(const std::vector<double>& u, std::size_t k) const {
        const int d = g_.dim();
        const Index3 ix = g_.unflatten(k);
        Vec3 p{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            Index3 up = ix, dn = ix;
            up[a] += 1;
            dn[a] -= 1;
            switch (stencil_kind(g_, ix, a)) {
                case Stencil::central:
                    p[a] = (u[g_.flatten(up)] - u[g_.flatten(dn)]) / (2.0 * h_);
                    break;
                case Stencil::fwd:
                    p[a] = (u[g_.flatten(up)] - u[k]) / h_;
                    break;
                case Stencil::bwd:
                    p[a] = (u[k] - u[g_.flatten(dn)]) / h_;
                    break;
                case Stencil::none:
                    break;
            }
        }
        return p;
    }

    double energy(const std::vector<double>& u) const {
        const int d = g_.dim();
        return hd_ * det_sum(g_.node_count(), [&](std::size_t k) -> double {
            if (!g_.in_ball(k)) return 0.0;
            const Index3 ix = g_.unflatten(k);
            double e = 0.0;
            for (int a = 0; a < d; ++a) {
                Index3 up = ix;
                up[a] += 1;
                if (g_.index_valid(up) && g_.in_ball(up)) {
                    const double D = (u[g_.flatten(up)] - u[k]) / h_;
                    e += 0.5 * D * D;
                }
            }
            if (has_F_) e += eval_F(lag_, g_.position(k), u[k], nodal_gradient(u, k), d);
            return e;
        });
    }

    // Returns E(u); fills grad (zero at non-free nodes). Mutates the W_
    // scratch arrays; not reentrant.
    double energy_and_gradient(const std::vector<double>& u, std::vector<double>& grad) {
        const int d = g_.dim();
        const auto n = g_.node_count();
        grad.assign(n, 0.0);

        // Pass 1: per-node energy and, for nonlinear families, the flux
        // W = grad_p F at every in-ball node.
        const double E = hd_ * det_sum(n, [&](std::size_t k) -> double {
            if (!g_.in_ball(k)) {
                if (has_F_)
                    for (int a = 0; a < d; ++a) W_[a][k] = 0.0;
                return 0.0;
            }
            const Index3 ix = g_.unflatten(k);
            double e = 0.0;
            for (int a = 0; a < d; ++a) {
                Index3 up = ix;
                up[a] += 1;
                if (g_.index_valid(up) && g_.in_ball(up)) {
                    const double D = (u[g_.flatten(up)] - u[k]) / h_;
                    e += 0.5 * D * D;
                }
            }
            if (has_F_) {
                const Vec3 p = nodal_gradient(u, k);
                const Vec3 x = g_.position(k);
                e += eval_F(lag_, x, u[k], p, d);
                const Vec3 w = grad_p_F(lag_, x, u[k], p, d);
                for (int a = 0; a < d; ++a) W_[a][k] = w[a];
            }
            return e;
        });

        // Pass 2: gather the exact derivative at free nodes.
#pragma omp parallel for schedule(static)
        for (long long kk = 0; kk < static_cast<long long>(n); ++kk) {
            const auto k = static_cast<std::size_t>(kk);
            if (!free_[k]) continue;
            grad[k] = hd_ * gradient_entry(u, k);
        }
        return E;
    }

    // The h^d-normalized gradient entry: minus the staggered Laplacian plus
    // the adjoint of the nodal-gradient operator applied to W.
    double gradient_entry(const std::vector<double>& u, std::size_t k) const {
        const int d = g_.dim();
        const Index3 ix = g_.unflatten(k);
        double gq = 0.0, gf = 0.0;
        for (int a = 0; a < d; ++a) {
            Index3 up = ix, dn = ix;
            up[a] += 1;
            dn[a] -= 1;
            const bool has_up = g_.index_valid(up) && g_.in_ball(up);
            const bool has_dn = g_.index_valid(dn) && g_.in_ball(dn);
            const std::size_t ku = has_up ? g_.flatten(up) : 0;
            const std::size_t kd = has_dn ? g_.flatten(dn) : 0;
            if (has_up) gq += (u[k] - u[ku]) / (h_ * h_);
            if (has_dn) gq += (u[k] - u[kd]) / (h_ * h_);
            if (!has_F_) continue;
            // Adjoint of the nodal gradient: neighbors reference u(k)
            // through their own stencils, plus k's own one-sided stencil.
            if (has_dn) {
                switch (stencil_kind(g_, dn, a)) {
                    case Stencil::central: gf += W_[a][kd] / (2.0 * h_); break;
                    case Stencil::fwd: gf += W_[a][kd] / h_; break;
                    default: break;
                }
            }
            if (has_up) {
                switch (stencil_kind(g_, up, a)) {
                    case Stencil::central: gf -= W_[a][ku] / (2.0 * h_); break;
                    case Stencil::bwd: gf -= W_[a][ku] / h_; break;
                    default: break;
                }
            }
            switch (stencil_kind(g_, ix, a)) {
                case Stencil::fwd: gf -= W_[a][k] / h_; break;
                case Stencil::bwd: gf += W_[a][k] / h_; break;
                default: break;
            }
        }
        // s-derivative term of F: identically zero for the shipped
        // (s-independent) families; kept as a named slot for generality.
        const double gs = 0.0;
        return gq + gf + gs;
    }

    // Refreshes W_ for an arbitrary field, then exposes gradient entries.
    void prepare_flux(const std::vector<double>& u) {
        if (!has_F_) return;
        const int d = g_.dim();
#pragma omp parallel for schedule(static)
        for (long long kk = 0; kk < static_cast<long long>(g_.node_count()); ++kk) {
            const auto k = static_cast<std::size_t>(kk);
            if (!g_.in_ball(k)) {
                for (int a = 0; a < d; ++a) W_[a][k] = 0.0;
                continue;
            }
            const Vec3 w =
                grad_p_F(lag_, g_.position(k), u[k], nodal_gradient(u, k), d);
            for (int a = 0; a < d; ++a) W_[a][k] = w[a];
        }
    }

private:
    const Grid& g_;
    const Lagrangian& lag_;
    double h_ = 0.0, hd_ = 0.0;
    bool has_F_ = false;
    std::vector<std::uint8_t> free_;
    long long nfree_ = 0;
    std::array<std::vector<double>, 3> W_;
};

double det_dot(const std::vector<double>& a, const std::vector<double>& b) {
    return det_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sup_residual(const std::vector<double>& g, double hd) {
    return det_max(g.size(), [&](std::size_t i) { return std::fabs(g[i]); }) / hd;
}

}  // namespace

SolveResult minimize(const Lagrangian& lag, const BoundaryDatum& datum, const Grid& grid,
                     const SolveOptions& opts) {
    const auto exp_rep = validate_exponents(lag, grid.dim());
    if (!exp_rep.pass) throw std::invalid_argument(exp_rep.violation);
    if (!(opts.gradient_tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (!(opts.backtrack > 0.0 && opts.backtrack < 1.0))
        throw std::invalid_argument("backtracking factor must be in (0,1)");

    const std::size_t n = grid.node_count();
    const int d = grid.dim();
    DiscreteProblem prob(grid, lag);

    // Initial iterate: datum everywhere (its closed form is the natural
    // extension; for the harmonic catalog it is the harmonic extension),
    // zero inside the ring, or a caller-provided field.
    std::vector<double> u(n, 0.0);
    {
        const auto& fm = prob.free_mask();
#pragma omp parallel for schedule(static)
        for (long long k = 0; k < static_cast<long long>(n); ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (!grid.in_ball(ks)) continue;
            const bool fixed = !fm[ks];
            switch (opts.init) {
                case SolveOptions::Init::zero:
                    u[ks] = fixed ? datum.eval(grid.position(ks), d) : 0.0;
                    break;
                case SolveOptions::Init::datum_extension:
                    u[ks] = datum.eval(grid.position(ks), d);
                    break;
                case SolveOptions::Init::custom:
                    if (!opts.custom_init) throw std::invalid_argument("custom init missing");
                    u[ks] = fixed ? datum.eval(grid.position(ks), d)
                                  : opts.custom_init->values()[ks];
                    break;
            }
            if (!std::isfinite(u[ks]))
                throw std::invalid_argument("datum not finite on the grid");
        }
    }

    std::vector<double> g(n), gold(n), dir(n, 0.0), utrial(n);
    double E = prob.energy_and_gradient(u, g);
    double res = sup_residual(g, prob.cell());
    const int restart_every =
        opts.restart_interval > 0
            ? opts.restart_interval
            : std::max<int>(100, static_cast<int>(prob.free_count() / 10));

    int iter = 0;
    double gg = det_dot(g, g);
    double alpha_seed = 1.0;
    int since_restart = 0;

    while (res > opts.gradient_tolerance) {
        if (iter >= opts.max_iterations) {
            char msg[128];
            std::snprintf(msg, sizeof msg,
                          "no convergence after %d iterations; residual = %.3e", iter, res);
            throw std::runtime_error(msg);
        }

        // Polak-Ribiere+ direction with periodic restarts.
        double beta = 0.0;
        if (iter > 0 && since_restart < restart_every) {
            const double num = det_sum(n, [&](std::size_t i) { return g[i] * (g[i] - gold[i]); });
            const double den = det_dot(gold, gold);
            if (den > 0.0) beta = std::max(0.0, num / den);
        }
        if (beta == 0.0) since_restart = 0;
        ++since_restart;
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            dir[i] = -g[i] + beta * dir[i];
        double dphi0 = det_dot(g, dir);
        if (!(dphi0 < 0.0)) {  // lost descent: restart on steepest descent
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(n); ++i) dir[i] = -g[i];
            dphi0 = -gg;
            since_restart = 0;
            if (!(dphi0 < 0.0)) break;  // exact stationarity
        }

        // Line search: probe at the previous accepted step, take the secant
        // step from (0, probe) -- the exact minimizer on quadratics -- and
        // Armijo-backtrack from there. Near-exact steps keep the conjugate
        // directions effective.
        auto eval_at = [&](double a) {
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(n); ++i)
                utrial[i] = u[i] + a * dir[i];
            return prob.energy_and_gradient(utrial, gold);  // gold = trial gradient
        };
        // The required decrease shrinks below the rounding noise of E once
        // the residual is small; the noise allowance keeps the line search
        // usable down to the gradient floor (energy stays monotone to within
        // it).
        const double noise_E = 1e-12 * (std::fabs(E) + 1e-300);
        auto armijo = [&](double a, double Ea) {
            return Ea <= E + opts.sufficient_decrease * a * dphi0 + noise_E;
        };
        auto accept = [&](double a, double Ea) {
            if (!(Ea <= E + 2.0 * noise_E))
                throw std::logic_error("energy increased across an accepted step");
            u.swap(utrial);
            std::swap(g, gold);  // g = accepted gradient, gold = previous one
            E = Ea;
            alpha_seed = a;
        };

        double t = alpha_seed;
        double Et = eval_at(t);
        double dphit = det_dot(gold, dir);
        double astar = dphit > dphi0 ? t * dphi0 / (dphi0 - dphit) : 4.0 * t;
        if (!std::isfinite(astar) || astar <= 0.0) astar = t;
        if (armijo(t, Et) && std::fabs(astar - t) <= 0.05 * t) {
            accept(t, Et);
            alpha_seed = astar;
        } else {
            bool accepted = false;
            double a = astar;
            for (int ls = 0; ls < 60 && !accepted; ++ls) {
                const double Ea = eval_at(a);
                if (armijo(a, Ea)) {
                    accept(a, Ea);
                    accepted = true;
                    break;
                }
                const double dphia = det_dot(gold, dir);
                double an = opts.backtrack * a;
                if (dphia > dphi0) {
                    const double sec = a * dphi0 / (dphi0 - dphia);
                    if (sec > 1e-3 * a && sec < an) an = sec;
                }
                a = an;
                if (a < 1e-20) throw std::runtime_error("line-search failure: step underflow");
            }
            if (!accepted) {
                // the probe itself satisfied Armijo; re-evaluate and take it
                if (armijo(t, Et)) {
                    const double Er = eval_at(t);
                    accept(t, Er);
                } else {
                    throw std::runtime_error("line-search failure: no Armijo step");
                }
            }
        }

        gg = det_dot(g, g);
        res = sup_residual(g, prob.cell());
        ++iter;
    }

    SolveResult out{ScalarField(grid, std::move(u)), iter, res, E};
    return out;
}

double el_residual(const Lagrangian& lag, const ScalarField& field) {
    DiscreteProblem prob(field.grid(), lag);
    prob.prepare_flux(field.values());
    const auto& fm = prob.free_mask();
    return det_max(field.grid().node_count(), [&](std::size_t k) -> double {
        if (!fm[k]) return 0.0;
        return std::fabs(prob.gradient_entry(field.values(), k));
    });
}

namespace {
CaccioppoliResult caccioppoli_impl(const ScalarField& u, double k, const Vec3& x0, double rho,
                                   double r, bool super) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (!(rho < r)) throw std::invalid_argument("need rho < r");
    for (int a = 0; a < d; ++a)
        if (std::fabs(x0[a]) + r > g.radius() * (1.0 + 1e-12))
            throw std::invalid_argument("ball leaves domain");

    const VectorField grad = gradient(u);
    const double hd = std::pow(g.spacing(), d);
    const auto& vals = u.values();
    auto dist2 = [&](std::size_t kk) {
        const Vec3 x = g.position(kk);
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += (x[a] - x0[a]) * (x[a] - x0[a]);
        return s;
    };
    auto level = [&](double v) { return super ? v > k : v < k; };

    const double num = hd * det_sum(g.node_count(), [&](std::size_t kk) -> double {
        if (!g.in_ball(kk) || !level(vals[kk])) return 0.0;
        if (dist2(kk) > rho * rho) return 0.0;
        return norm2(grad.at(kk), d);
    });
    const double den = hd * det_sum(g.node_count(), [&](std::size_t kk) -> double {
        if (!g.in_ball(kk) || !level(vals[kk])) return 0.0;
        if (dist2(kk) > r * r) return 0.0;
        const double w = vals[kk] - k;
        return w * w;
    });

    CaccioppoliResult out;
    out.numerator = num;
    out.denominator = den;
    if (den == 0.0) {
        out.vacuous = true;
        out.flagged = num > 1e-20 * (1.0 + u.sup_abs());
        out.constant = 0.0;
    } else {
        out.constant = num * (r - rho) * (r - rho) / den;
    }
    return out;
}
}  // namespace

CaccioppoliResult caccioppoli_super(const ScalarField& u, double k, const Vec3& x0, double rho,
                                    double r) {
    return caccioppoli_impl(u, k, x0, rho, r, true);
}
CaccioppoliResult caccioppoli_sub(const ScalarField& u, double k, const Vec3& x0, double rho,
                                  double r) {
    return caccioppoli_impl(u, k, x0, rho, r, false);
}

namespace {
// Small deterministic generator for the sampled Hoelder pairs.
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n) % n; }
};
}  // namespace

LinearBoundReport linear_bound_check(const ScalarField& u, double alpha, LinearBoundMode mode) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    const Grid& g = u.grid();
    const int d = g.dim();
    const double R = g.radius(), h = g.spacing();
    const VectorField grad = gradient(u);
    const auto& vals = u.values();

    LinearBoundReport rep;
    rep.alpha = alpha;
    rep.mode = mode;

    std::vector<Vec3> centers{{0, 0, 0}};
    for (int a = 0; a < d; ++a) {
        Vec3 c{0, 0, 0};
        c[a] = 0.3 * R;
        centers.push_back(c);
        c[a] = -0.3 * R;
        centers.push_back(c);
    }
    const double radii[3] = {0.2 * R, 0.3 * R, 0.4 * R};

    int ball_id = 0;
    for (const Vec3& c : centers) {
        for (double r : radii) {
            ++ball_id;
            if (norm(c, d) + r > R * (1.0 + 1e-12)) continue;
            if (r < 8.0 * h) continue;

            // Nodes of B_{r/2}(c).
            std::vector<std::size_t> inner;
            for (std::size_t k = 0; k < g.node_count(); ++k) {
                if (!g.in_ball(k)) continue;
                const Vec3 x = g.position(k);
                double s = 0.0;
                for (int a = 0; a < d; ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
                if (s <= 0.25 * r * r) inner.push_back(k);
            }
            if (inner.size() < 8) continue;

            double sup_u = 0.0, sup_g = 0.0;
            for (std::size_t k : inner) {
                sup_u = std::max(sup_u, std::fabs(vals[k]));
                sup_g = std::max(sup_g, norm(grad.at(k), d));
            }
            double semi_u = 0.0, semi_g = 0.0;
            SplitMix64 rng(0x5eedba11ull + static_cast<std::uint64_t>(ball_id));
            int got = 0;
            for (int trial = 0; trial < 100000 && got < 10000; ++trial) {
                const std::size_t ka = inner[rng.below(inner.size())];
                const std::size_t kb = inner[rng.below(inner.size())];
                if (ka == kb) continue;
                const Vec3 xa = g.position(ka), xb = g.position(kb);
                Vec3 diff{0, 0, 0};
                for (int a = 0; a < d; ++a) diff[a] = xa[a] - xb[a];
                const double dist = norm(diff, d);
                if (dist < 2.0 * h || dist > 0.5 * r) continue;
                ++got;
                const double denom = std::pow(dist, alpha);
                semi_u = std::max(semi_u, std::fabs(vals[ka] - vals[kb]) / denom);
                Vec3 dg{0, 0, 0};
                const Vec3 ga = grad.at(ka), gb = grad.at(kb);
                for (int a = 0; a < d; ++a) dg[a] = ga[a] - gb[a];
                semi_g = std::max(semi_g, norm(dg, d) / denom);
            }

            const double msq = ball_mean_square(u, c, r);
            const double denom = mode == LinearBoundMode::paper ? msq : std::sqrt(msq);
            const double norm_u = sup_u + semi_u;
            const double norm_g = r * (sup_g + semi_g);
            if (denom <= 1e-30 * (1.0 + u.sup_abs())) {
                if (norm_u + norm_g > 1e-12 * (1.0 + u.sup_abs())) rep.violation = true;
                continue;
            }
            rep.measured_C_u = std::max(rep.measured_C_u, norm_u / denom);
            rep.measured_C_grad = std::max(rep.measured_C_grad, norm_g / denom);
            ++rep.balls;
        }
    }
    return rep;
}

}  // namespace uclab
