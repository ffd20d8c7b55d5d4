#include "uclab/lagrangian.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "uclab/quadrature.hpp"

namespace uclab {

std::string family_name(Family f) {
    switch (f) {
        case Family::quadratic: return "quadratic";
        case Family::power: return "power";
        case Family::double_phase: return "double_phase";
        case Family::multiphase: return "multiphase";
    }
    return "?";
}

Family family_from_name(const std::string& s) {
    if (s == "quadratic") return Family::quadratic;
    if (s == "power") return Family::power;
    if (s == "double_phase") return Family::double_phase;
    if (s == "multiphase") return Family::multiphase;
    throw std::invalid_argument("unknown lagrangian family: " + s);
}

CoefficientSpec CoefficientSpec::constant(double v) {
    CoefficientSpec c;
    c.kind = Kind::constant;
    c.value = v;
    return c;
}
CoefficientSpec CoefficientSpec::affine(double offset, const Vec3& slope) {
    CoefficientSpec c;
    c.kind = Kind::affine;
    c.offset = offset;
    c.slope = slope;
    return c;
}
CoefficientSpec CoefficientSpec::bump(const Vec3& center, double width, double height) {
    CoefficientSpec c;
    c.kind = Kind::bump;
    c.center = center;
    c.width = width;
    c.height = height;
    return c;
}

double CoefficientSpec::eval(const Vec3& x, int d) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::affine:
            return offset + dot(slope, x, d);
        case Kind::bump: {
            Vec3 y{0, 0, 0};
            for (int a = 0; a < d; ++a) y[a] = x[a] - center[a];
            const double t2 = norm2(y, d) / (width * width);
            if (t2 >= 1.0) return 0.0;
            const double w = 1.0 - t2;
            return height * w * w;
        }
    }
    return 0.0;
}

Vec3 CoefficientSpec::grad(const Vec3& x, int d) const {
    Vec3 g{0, 0, 0};
    switch (kind) {
        case Kind::constant:
            break;
        case Kind::affine:
            for (int a = 0; a < d; ++a) g[a] = slope[a];
            break;
        case Kind::bump: {
            Vec3 y{0, 0, 0};
            for (int a = 0; a < d; ++a) y[a] = x[a] - center[a];
            const double t2 = norm2(y, d) / (width * width);
            if (t2 >= 1.0) break;
            // d/dx height (1-t^2)^2 = -4 height (1-t^2) (x-c)/width^2
            const double f = -4.0 * height * (1.0 - t2) / (width * width);
            for (int a = 0; a < d; ++a) g[a] = f * y[a];
            break;
        }
    }
    return g;
}

double CoefficientSpec::lipschitz(int d) const {
    switch (kind) {
        case Kind::constant:
            return 0.0;
        case Kind::affine:
            return norm(slope, d);
        case Kind::bump:
            // max_t 4t(1-t^2) = 8/(3 sqrt 3) on [0,1]
            return 8.0 / (3.0 * std::sqrt(3.0)) * std::fabs(height) / width;
    }
    return 0.0;
}

void CoefficientSpec::validate(double R, int d) const {
    switch (kind) {
        case Kind::constant:
            if (value < 0.0) throw std::invalid_argument("coefficient constant must be >= 0");
            break;
        case Kind::affine:
            if (offset - norm(slope, d) * R < 0.0)
                throw std::invalid_argument("affine coefficient negative somewhere on the ball");
            break;
        case Kind::bump:
            if (height < 0.0) throw std::invalid_argument("bump height must be >= 0");
            if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
            break;
    }
}

Lagrangian Lagrangian::quadratic() {
    Lagrangian l;
    l.family = Family::quadratic;
    return l;
}
Lagrangian Lagrangian::power(double q) {
    Lagrangian l;
    l.family = Family::power;
    l.q = q;
    l.growth.gamma = q - 2.0;
    l.growth.C = 1.0;
    return l;
}
Lagrangian Lagrangian::double_phase(double q, const CoefficientSpec& a) {
    Lagrangian l;
    l.family = Family::double_phase;
    l.q = q;
    l.a = a;
    l.growth.gamma = q - 2.0;
    return l;
}
Lagrangian Lagrangian::multiphase(double q, double s_exp, const CoefficientSpec& a,
                                  const CoefficientSpec& b) {
    Lagrangian l;
    l.family = Family::multiphase;
    l.q = q;
    l.s_exp = s_exp;
    l.a = a;
    l.b = b;
    l.growth.gamma = q - 2.0;
    return l;
}

namespace {
inline double pow_abs(double m2, double expo) {
    // |p|^expo from |p|^2; 0^positive = 0
    if (m2 == 0.0) return 0.0;
    return std::pow(m2, 0.5 * expo);
}
}  // namespace

double eval_F(const Lagrangian& lag, const Vec3& x, double /*s*/, const Vec3& p, int d) {
    const double m2 = norm2(p, d);
    switch (lag.family) {
        case Family::quadratic:
            return 0.0;
        case Family::power:
            return pow_abs(m2, lag.q) / lag.q;
        case Family::double_phase:
            return lag.a.eval(x, d) * pow_abs(m2, lag.q);
        case Family::multiphase:
            return lag.a.eval(x, d) * pow_abs(m2, lag.q) +
                   lag.b.eval(x, d) * pow_abs(m2, lag.s_exp);
    }
    return 0.0;
}

Vec3 grad_p_F(const Lagrangian& lag, const Vec3& x, double /*s*/, const Vec3& p, int d) {
    Vec3 g{0, 0, 0};
    const double m2 = norm2(p, d);
    if (m2 == 0.0) return g;  // q > 2 forces vanishing
    double coef = 0.0;
    switch (lag.family) {
        case Family::quadratic:
            return g;
        case Family::power:
            coef = pow_abs(m2, lag.q - 2.0);
            break;
        case Family::double_phase:
            coef = lag.a.eval(x, d) * lag.q * pow_abs(m2, lag.q - 2.0);
            break;
        case Family::multiphase:
            coef = lag.a.eval(x, d) * lag.q * pow_abs(m2, lag.q - 2.0) +
                   lag.b.eval(x, d) * lag.s_exp * pow_abs(m2, lag.s_exp - 2.0);
            break;
    }
    for (int a = 0; a < d; ++a) g[a] = coef * p[a];
    return g;
}

double s_times_ds_F(const Lagrangian&, const Vec3&, double, const Vec3&, int) {
    return 0.0;  // every shipped family is s-independent
}

Vec3 grad_x_F(const Lagrangian& lag, const Vec3& x, double /*s*/, const Vec3& p, int d) {
    Vec3 g{0, 0, 0};
    const double m2 = norm2(p, d);
    switch (lag.family) {
        case Family::quadratic:
        case Family::power:
            return g;
        case Family::double_phase: {
            const Vec3 ga = lag.a.grad(x, d);
            const double pq = pow_abs(m2, lag.q);
            for (int a = 0; a < d; ++a) g[a] = ga[a] * pq;
            return g;
        }
        case Family::multiphase: {
            const Vec3 ga = lag.a.grad(x, d);
            const Vec3 gb = lag.b.grad(x, d);
            const double pq = pow_abs(m2, lag.q);
            const double ps = pow_abs(m2, lag.s_exp);
            for (int a = 0; a < d; ++a) g[a] = ga[a] * pq + gb[a] * ps;
            return g;
        }
    }
    return g;
}

ExponentReport validate_exponents(const Lagrangian& lag, int d) {
    ExponentReport rep;
    char buf[160];
    const double q = lag.q, s = lag.s_exp;
    switch (lag.family) {
        case Family::quadratic:
            break;
        case Family::power: {
            const double cap = 2.0 + std::min(2.0, 4.0 / (d - 1));
            if (!(q > 2.0) || q > cap) {
                std::snprintf(buf, sizeof buf,
                              "power exponent q = %g violates 2 < q <= 2 + min{2, 4/(d-1)} = %g",
                              q, cap);
                rep = {false, buf};
            }
            break;
        }
        case Family::double_phase: {
            const double cap = 2.0 + 2.0 / d;
            if (!(q > 2.0) || q > cap) {
                std::snprintf(buf, sizeof buf,
                              "double-phase exponent q = %g violates 2 < q <= 2 + 2/d = %g", q,
                              cap);
                rep = {false, buf};
            }
            break;
        }
        case Family::multiphase: {
            const double cap = 2.0 + 2.0 / d;
            if (!(q > 2.0) || !(q <= s) || s > cap) {
                std::snprintf(buf, sizeof buf,
                              "multiphase exponents (q,s) = (%g,%g) violate 2 < q <= s <= 2 + 2/d "
                              "= %g",
                              q, s, cap);
                rep = {false, buf};
            }
            break;
        }
    }
    return rep;
}

namespace {
double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}
}  // namespace

GrowthReport check_growth_conditions(const Lagrangian& lag, int d, double domain_R,
                                     int sample_count, double nbhd_radius, double gamma,
                                     double C) {
    if (sample_count < 1000) throw std::invalid_argument("growth check needs >= 1000 samples");
    if (d != 2 && d != 3) throw std::invalid_argument("dimension must be 2 or 3");
    static const int bases[7] = {2, 3, 5, 7, 11, 13, 17};
    GrowthReport rep;
    rep.gamma = gamma;
    rep.C = C;
    rep.domain_R = domain_R;
    rep.nbhd = nbhd_radius;
    rep.samples = sample_count;

    for (int i = 1; i <= sample_count; ++i) {
        Vec3 x{0, 0, 0}, p{0, 0, 0};
        int bi = 0;
        for (int a = 0; a < d; ++a) x[a] = domain_R * (2.0 * halton(i, bases[bi++]) - 1.0);
        const double s = nbhd_radius * (2.0 * halton(i, bases[bi++]) - 1.0);
        for (int a = 0; a < d; ++a) p[a] = nbhd_radius * (2.0 * halton(i, bases[bi++]) - 1.0);

        const double ap = norm(p, d), as = std::fabs(s);
        const double den_fx = std::pow(ap, 2.0 + gamma) + as * as;
        const double den_p = std::pow(ap, 1.0 + gamma) + std::pow(as, 1.0 + gamma);

        const double F = eval_F(lag, x, s, p, d);
        const Vec3 gx = grad_x_F(lag, x, s, p, d);
        const Vec3 gp = grad_p_F(lag, x, s, p, d);
        const double sds = s_times_ds_F(lag, x, s, p, d);

        if (den_fx > 0.0) {
            rep.max_ratio_Fx = std::max(rep.max_ratio_Fx, (std::fabs(F) + norm(gx, d)) / den_fx);
            rep.max_ratio_s = std::max(rep.max_ratio_s, std::fabs(sds) / den_fx);
        }
        if (den_p > 0.0) rep.max_ratio_p = std::max(rep.max_ratio_p, norm(gp, d) / den_p);
    }
    const double cap = C * (1.0 + 1e-9);
    rep.pass = rep.max_ratio_Fx <= cap && rep.max_ratio_p <= cap && rep.max_ratio_s <= cap;
    return rep;
}

double energy(const Lagrangian& lag, const ScalarField& field) {
    return energy(lag, field, gradient(field));
}

double energy(const Lagrangian& lag, const ScalarField& field, const VectorField& grad) {
    const Grid& g = field.grid();
    const int d = g.dim();
    const auto& u = field.values();
    const double sum = det_sum(g.node_count(), [&](std::size_t k) -> double {
        if (!g.in_ball(k)) return 0.0;
        const Vec3 p = grad.at(k);
        return 0.5 * norm2(p, d) + eval_F(lag, g.position(k), u[k], p, d);
    });
    return sum * std::pow(g.spacing(), d);
}

}  // namespace uclab
