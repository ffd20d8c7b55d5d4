#include "uclab/frequency.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uclab {

namespace {

double radial_unit(const Grid& g, std::size_t k, Vec3& xhat, double& ax) {
    const Vec3 x = g.position(k);
    ax = norm(x, g.dim());
    if (ax == 0.0) return 0.0;
    for (int a = 0; a < g.dim(); ++a) xhat[a] = x[a] / ax;
    return ax;
}

// d_nu u = grad u . x/|x|; zero at the origin node (the -phi' weights vanish
// there anyway).
double radial_derivative(const Grid& g, const VectorField& grad, std::size_t k) {
    Vec3 xhat{0, 0, 0};
    double ax = 0.0;
    if (radial_unit(g, k, xhat, ax) == 0.0) return 0.0;
    return dot(grad.at(k), xhat, g.dim());
}

}  // namespace

FrequencyComponents components(const ScalarField& u, const VectorField& grad,
                               const Lagrangian& lag, double r, const CutoffSpec& cut) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const auto& uv = u.values();

    FrequencyComponents c;
    c.H = weighted_integral_expr(
        g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::minus_phi_prime_over_absx, r,
        cut);
    c.G = weighted_integral_expr(
        g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::phi, r, cut);
    c.D0 = weighted_integral_expr(
        g, [&](std::size_t k) { return norm2(grad.at(k), d); }, Weight::phi, r, cut);
    c.Dl = weighted_integral_expr(
        g,
        [&](std::size_t k) {
            return s_times_ds_F(lag, g.position(k), uv[k], grad.at(k), d);
        },
        Weight::phi, r, cut);
    c.D = c.D0 + c.Dl;
    c.A = weighted_integral_expr(
        g,
        [&](std::size_t k) {
            const double dn = radial_derivative(g, grad, k);
            return dn * dn;
        },
        Weight::minus_phi_prime_times_absx, r, cut);
    c.B = weighted_integral_expr(
        g, [&](std::size_t k) { return uv[k] * radial_derivative(g, grad, k); },
        Weight::minus_phi_prime, r, cut);
    return c;
}

FrequencyComponents components(const ScalarField& u, const Lagrangian& lag, double r,
                               const CutoffSpec& cut) {
    return components(u, gradient(u), lag, r, cut);
}

double height_floor(const ScalarField& u, double r) {
    const double s = u.sup_abs();
    return 1e-14 * s * s * std::pow(r, u.grid().dim() - 1) + 1e-300;
}

double frequency_N(const FrequencyComponents& c, double r, double tol_H) {
    if (c.H <= tol_H) throw std::runtime_error("height vanishes");
    return r * c.D / c.H;
}

namespace {
// Radial derivative by the 4th-order central difference with a wide step
// h_r = max(r/8, 2h). The discrete weighted quantities carry a lattice
// wiggle on the cell scale; the wide stencil averages it out, while the
// truncation error stays negligible at this width (the quantities are
// low-degree polynomial-like in r).
constexpr double kDefectStepFraction = 8.0;

template <class F>
double radial_derivative_fd(const Grid& g, F&& f, double r) {
    const double h_r = std::max(r / kDefectStepFraction, 2.0 * g.spacing());
    return (-f(r + 2.0 * h_r) + 8.0 * f(r + h_r) - 8.0 * f(r - h_r) + f(r - 2.0 * h_r)) /
           (12.0 * h_r);
}
}  // namespace

double height_identity_defect(const ScalarField& u, const VectorField& grad,
                              const Lagrangian& lag, double r, const CutoffSpec& cut) {
    const int d = u.grid().dim();
    const Grid& g = u.grid();
    const auto& uv = u.values();
    const FrequencyComponents c0 = components(u, grad, lag, r, cut);
    const double Hprime = radial_derivative_fd(
        g,
        [&](double rr) {
            return weighted_integral_expr(
                g, [&](std::size_t k) { return uv[k] * uv[k]; },
                Weight::minus_phi_prime_over_absx, rr, cut);
        },
        r);
    const double defect = Hprime - (d - 1) * c0.H / r - 2.0 * c0.B / r;
    return std::fabs(defect) / std::max(c0.H / r, 1e-30);
}

namespace {

struct OuterParts {
    double e_O = 0.0, envelope = 0.0;
};

OuterParts outer_parts(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                       double r, const CutoffSpec& cut) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const auto& uv = u.values();
    const double kappa = 0.5 * lag.growth.gamma;

    const double e1 = weighted_integral_expr(
        g,
        [&](std::size_t k) {
            const Vec3 p = grad.at(k);
            return dot(p, grad_p_F(lag, g.position(k), uv[k], p, d), d);
        },
        Weight::phi, r, cut);
    // (1/r) int phi' u (grad_p F . x/|x|) = -(1/r) * [-phi' weighted integral]
    const double e2 = -(1.0 / r) * weighted_integral_expr(
        g,
        [&](std::size_t k) {
            Vec3 xhat{0, 0, 0};
            double ax = 0.0;
            if (radial_unit(g, k, xhat, ax) == 0.0) return 0.0;
            const Vec3 p = grad.at(k);
            return uv[k] * dot(grad_p_F(lag, g.position(k), uv[k], p, d), xhat, d);
        },
        Weight::minus_phi_prime, r, cut);

    double env = 0.0;
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return std::pow(std::fabs(uv[k]), 2.0 + kappa); }, Weight::phi,
        r, cut);
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return std::pow(norm(grad.at(k), d), 2.0 + kappa); },
        Weight::phi, r, cut);
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return std::pow(std::fabs(uv[k]), 2.0 + kappa); },
        Weight::minus_phi_prime, r, cut);
    env += weighted_integral_expr(
        g,
        [&](std::size_t k) {
            return std::fabs(uv[k]) * std::pow(norm(grad.at(k), d), 1.0 + kappa);
        },
        Weight::minus_phi_prime, r, cut);
    return {e1 + e2, env};
}

struct InnerParts {
    double e_I = 0.0, envelope = 0.0;  // e_I = e_i1 + e_i2 + (r/2) Dl'
};

InnerParts inner_parts(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                       double r, const CutoffSpec& cut, double Dl) {
    const Grid& g = u.grid();
    const int d = g.dim();
    const auto& uv = u.values();
    const double kappa = 0.5 * lag.growth.gamma;

    const double ei1 = weighted_integral_expr(
        g,
        [&](std::size_t k) {
            const Vec3 x = g.position(k);
            const Vec3 p = grad.at(k);
            const double F = eval_F(lag, x, uv[k], p, d);
            const Vec3 gx = grad_x_F(lag, x, uv[k], p, d);
            const Vec3 gp = grad_p_F(lag, x, uv[k], p, d);
            return d * F + dot(x, gx, d) - dot(p, gp, d);
        },
        Weight::phi, r, cut) + 0.5 * (d - 2) * Dl;

    // (1/r) int |x| phi' [...] = -(1/r) * [-phi' |x| weighted integral]
    const double ei2 = -(1.0 / r) * weighted_integral_expr(
        g,
        [&](std::size_t k) {
            Vec3 xhat{0, 0, 0};
            double ax = 0.0;
            if (radial_unit(g, k, xhat, ax) == 0.0) return 0.0;
            const Vec3 x = g.position(k);
            const Vec3 p = grad.at(k);
            const double F = eval_F(lag, x, uv[k], p, d);
            const double dn = dot(p, xhat, d);
            return F - dn * dot(grad_p_F(lag, x, uv[k], p, d), xhat, d);
        },
        Weight::minus_phi_prime_times_absx, r, cut);

    // Chain-rule derivative of Dl; vanishes for the shipped families.
    const double dlprime = (1.0 / (r * r)) * weighted_integral_expr(
        g,
        [&](std::size_t k) {
            return s_times_ds_F(lag, g.position(k), uv[k], grad.at(k), d);
        },
        Weight::minus_phi_prime_times_absx, r, cut);

    double env = 0.0;
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::phi, r, cut);
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return std::pow(norm(grad.at(k), d), 2.0 + kappa); },
        Weight::phi, r, cut);
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::minus_phi_prime, r, cut);
    env += weighted_integral_expr(
        g, [&](std::size_t k) { return std::pow(norm(grad.at(k), d), 2.0 + kappa); },
        Weight::minus_phi_prime, r, cut);
    return {ei1 + ei2 + 0.5 * r * dlprime, env};
}

}  // namespace

DefectPair outer_defect(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                        double r, const CutoffSpec& cut) {
    const FrequencyComponents c = components(u, grad, lag, r, cut);
    const OuterParts parts = outer_parts(u, grad, lag, r, cut);
    const double raw = c.D - c.B / r + parts.e_O;
    const double scale = std::max({c.D0, std::fabs(c.B) / r, 1e-30});
    return {std::fabs(raw) / scale, parts.envelope, parts.e_O};
}

DefectPair inner_defect(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                        double r, const CutoffSpec& cut) {
    const int d = u.grid().dim();
    const Grid& g = u.grid();
    const auto& uv = u.values();
    const FrequencyComponents c0 = components(u, grad, lag, r, cut);
    const double Dprime = radial_derivative_fd(
        g,
        [&](double rr) {
            return weighted_integral_expr(
                g,
                [&](std::size_t k) {
                    return norm2(grad.at(k), d) +
                           s_times_ds_F(lag, g.position(k), uv[k], grad.at(k), d);
                },
                Weight::phi, rr, cut);
        },
        r);
    const InnerParts parts = inner_parts(u, grad, lag, r, cut, c0.Dl);
    const double raw = 0.5 * (d - 2) * c0.D - 0.5 * r * Dprime + c0.A / r + parts.e_I;
    const double scale = std::max({c0.D0, c0.A / r, 0.5 * r * std::fabs(Dprime), 1e-30});
    return {std::fabs(raw) / scale, parts.envelope, parts.e_I};
}

std::vector<double> scan_radii(const Grid& g, const CutoffSpec& cut, double r_min, double r_max,
                               double ratio) {
    const double h = g.spacing();
    // Headroom so the defect ops' finite-difference probes at r(1 -/+ 1/4)
    // (or r -/+ 4h near the floor) stay resolved as well.
    const double base = std::max(8.0 * h, 2.0 * h / (1.0 - cut.upsilon));
    const double floor_r = std::max(base * 4.0 / 3.0, base + 4.0 * h);
    const double lo = std::max(r_min, floor_r);
    const double hi = std::min(r_max, 0.8 * g.radius());
    std::vector<double> radii;
    if (!(ratio > 1.0)) throw std::invalid_argument("radius ratio must exceed 1");
    for (double r = lo; r <= hi * (1.0 + 1e-12); r *= ratio) radii.push_back(r);
    return radii;
}

RadialProfile corrected_frequency_scan(const ScalarField& u, const Lagrangian& lag,
                                       const std::vector<double>& radii, double C_g, double beta,
                                       const CutoffSpec& cut) {
    if (!(C_g >= 0.0)) throw std::invalid_argument("C_g must be >= 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must be in (0,1]");
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1]))
            throw std::invalid_argument("radii must be strictly increasing");

    const VectorField grad = gradient(u);
    RadialProfile prof;
    prof.C_g = C_g;
    prof.beta = beta;
    prof.upsilon = cut.upsilon;

    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        ProfileRow row;
        row.r = r;
        row.c = components(u, grad, lag, r, cut);
        const double tolH = height_floor(u, r);
        if (row.c.H <= tolH) {
            prof.truncated_at = static_cast<int>(i);
            break;
        }
        row.N = r * row.c.D / row.c.H;
        row.g = (C_g / beta) * (std::pow(r, beta) + std::pow(std::max(row.c.D, 0.0), beta));
        row.Ncorr = std::exp(row.g) * row.N;
        row.defect_H = height_identity_defect(u, grad, lag, r, cut);
        const DefectPair od = outer_defect(u, grad, lag, r, cut);
        row.defect_outer = od.defect;
        row.env_outer = od.envelope;
        row.e_outer = od.raw_error;
        const DefectPair id = inner_defect(u, grad, lag, r, cut);
        row.defect_inner = id.defect;
        row.env_inner = id.envelope;
        row.e_inner = id.raw_error;
        row.cs_gap = row.c.A * row.c.H - row.c.B * row.c.B;

        const double half = 0.5 * r;
        const Grid& g = u.grid();
        const bool half_ok =
            half >= 4.0 * g.spacing() && (1.0 - cut.upsilon) * half >= 2.0 * g.spacing();
        if (half_ok) {
            const auto& uv = u.values();
            const double Ghalf = weighted_integral_expr(
                g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::phi, half, cut);
            row.doubling = Ghalf > 0.0 ? row.c.G / Ghalf
                                       : std::numeric_limits<double>::quiet_NaN();
        } else {
            row.doubling = std::numeric_limits<double>::quiet_NaN();
        }
        prof.rows.push_back(row);
    }
    return prof;
}

MonotonicityReport monotonicity_report(const RadialProfile& p, double rel_tol) {
    MonotonicityReport rep;
    rep.min_cs_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const ProfileRow& row = p.rows[i];
        rep.min_cs_gap = std::min(rep.min_cs_gap,
                                  row.cs_gap + 1e-10 * (row.c.A * row.c.H + 1.0));
        if (row.env_outer > 0.0)
            rep.outer_C = std::max(rep.outer_C, std::fabs(row.e_outer) / row.env_outer);
        if (row.env_inner > 0.0)
            rep.inner_C = std::max(rep.inner_C, std::fabs(row.e_inner) / row.env_inner);
        if (i == 0) continue;
        const ProfileRow& prev = p.rows[i - 1];
        if (row.c.D0 < prev.c.D0 || row.c.G < prev.c.G) rep.d0_g_monotone = false;
        if (row.g < prev.g) rep.g_decreasing_to_zero = false;
        const double scale = std::max(std::fabs(prev.Ncorr), 1e-30);
        const double drop = (prev.Ncorr - row.Ncorr) / scale;
        rep.max_drop = std::max(rep.max_drop, drop);
        if (drop > rel_tol) rep.violations.push_back({prev.r, row.r, drop});
    }
    if (!std::isfinite(rep.min_cs_gap)) rep.min_cs_gap = 0.0;
    return rep;
}

std::pair<double, double> poincare_ratio(const ScalarField& u, const VectorField& grad,
                                         const Lagrangian& lag, double r, const CutoffSpec& cut,
                                         double tol_u, double tol_g) {
    const Grid& g = u.grid();
    Index3 cix{g.center_index(), g.center_index(), g.center_index()};
    if (g.dim() == 2) cix[2] = 0;
    const std::size_t kc = g.flatten(cix);
    if (std::fabs(u[kc]) > tol_u || norm(grad.at(kc), g.dim()) > tol_g)
        throw std::runtime_error("center not singular");
    const FrequencyComponents c = components(u, grad, lag, r, cut);
    if (c.H <= height_floor(u, r)) throw std::runtime_error("height vanishes");
    if (c.D0 <= 0.0) throw std::runtime_error("energy vanishes");
    return {r * c.D0 / c.H, c.G / (r * r * c.D0)};
}

DoublingReport doubling_and_vanishing(const ScalarField& u, const Vec3& x0,
                                      const std::vector<double>& radii, const CutoffSpec& cut,
                                      double order_cap) {
    if (radii.size() < 3) throw std::invalid_argument("need at least 3 radii");
    const Grid& g = u.grid();
    DoublingReport rep;
    rep.radii = radii;

    const auto& uv = u.values();
    auto G_at = [&](double r) {
        return weighted_integral_expr(
            g, [&](std::size_t k) { return uv[k] * uv[k]; }, Weight::phi, r, cut);
    };
    const double h = g.spacing();
    for (double r : radii) {
        const double half = 0.5 * r;
        if (half >= 4.0 * h && (1.0 - cut.upsilon) * half >= 2.0 * h) {
            const double gh = G_at(half);
            rep.doubling.push_back(gh > 0.0 ? G_at(r) / gh
                                            : std::numeric_limits<double>::quiet_NaN());
        } else {
            rep.doubling.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }

    const double s = u.sup_abs();
    const double zero_tol = 1e-24 * (s * s) + 1e-300;
    std::vector<double> lr, lm;
    bool any_positive = false;
    for (double r : radii) {
        const double m = ball_mean_square(u, x0, r);
        if (m > zero_tol) {
            any_positive = true;
            lr.push_back(std::log(r));
            lm.push_back(std::log(m));
        }
    }
    if (!any_positive) {
        rep.flag = VanishingFlag::identically_zero;
        rep.vanishing_order = std::numeric_limits<double>::infinity();
        return rep;
    }
    if (lr.size() < 3) throw std::invalid_argument("fewer than 3 usable radii");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double nn = static_cast<double>(lr.size());
    for (std::size_t i = 0; i < lr.size(); ++i) {
        sx += lr[i];
        sy += lm[i];
        sxx += lr[i] * lr[i];
        sxy += lr[i] * lm[i];
    }
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    rep.vanishing_order = 0.5 * slope;
    rep.flag = rep.vanishing_order > order_cap ? VanishingFlag::infinite_order
                                               : VanishingFlag::finite_order;
    return rep;
}

double outer_equivalence(const FrequencyComponents& c, double r) {
    if (!(c.D0 > 0.0)) throw std::runtime_error("D0 vanishes");
    return c.B / (r * c.D0);
}

namespace {
void append_num(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}
}  // namespace

std::string profile_csv(const RadialProfile& p) {
    std::string out =
        "r,H,D0,Dl,D,G,A,B,N,g,Ncorr,defect_H,defect_outer,defect_inner,env_outer,env_inner,"
        "doubling,cs_gap\n";
    for (const ProfileRow& row : p.rows) {
        const double cols[18] = {row.r,        row.c.H,          row.c.D0,
                                 row.c.Dl,     row.c.D,          row.c.G,
                                 row.c.A,      row.c.B,          row.N,
                                 row.g,        row.Ncorr,        row.defect_H,
                                 row.defect_outer, row.defect_inner, row.env_outer,
                                 row.env_inner, row.doubling,    row.cs_gap};
        for (int i = 0; i < 18; ++i) {
            if (i) out.push_back(',');
            append_num(out, cols[i]);
        }
        out.push_back('\n');
    }
    return out;
}

}  // namespace uclab
