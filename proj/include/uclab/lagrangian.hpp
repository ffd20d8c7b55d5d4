#pragma once

#include <string>

#include "uclab/grid.hpp"

namespace uclab {

enum class Family { quadratic, power, double_phase, multiphase };

std::string family_name(Family f);
Family family_from_name(const std::string& s);

// Nonnegative Lipschitz coefficient with a closed-form gradient.
struct CoefficientSpec {
    enum class Kind { constant, affine, bump };
    Kind kind = Kind::constant;
    double value = 1.0;                  // constant
    double offset = 1.0;                 // affine: offset + slope . x
    Vec3 slope{0.0, 0.0, 0.0};
    Vec3 center{0.0, 0.0, 0.0};          // bump: height * (1 - t^2)^2, t = |x-c|/width
    double width = 0.5;
    double height = 1.0;

    static CoefficientSpec constant(double v);
    static CoefficientSpec affine(double offset, const Vec3& slope);
    static CoefficientSpec bump(const Vec3& center, double width, double height);

    double eval(const Vec3& x, int d) const;
    Vec3 grad(const Vec3& x, int d) const;
    double lipschitz(int d) const;
    // Verifies nonnegativity over the ball |x| <= R; throws on violation.
    void validate(double R, int d) const;
};

struct GrowthRecord {
    double gamma = 1.0;   // exponent in the structure bounds
    double C = 1.0;       // structure constant
    double delta0 = 0.1;  // smallness scale
};

// L(x,s,p) = 1/2 |p|^2 + F(x,s,p) with
//   quadratic:    F = 0
//   power:        F = (1/q) |p|^q
//   double_phase: F = a(x) |p|^q
//   multiphase:   F = a(x) |p|^q + b(x) |p|^s
// All shipped families are s-independent, so s * dF/ds = 0 identically; the
// interface still carries the term so the frequency module implements the
// general formulas.
struct Lagrangian {
    Family family = Family::quadratic;
    double q = 3.0;
    double s_exp = 3.0;
    CoefficientSpec a = CoefficientSpec::constant(1.0);
    CoefficientSpec b = CoefficientSpec::constant(1.0);
    GrowthRecord growth;

    static Lagrangian quadratic();
    static Lagrangian power(double q);
    static Lagrangian double_phase(double q, const CoefficientSpec& a);
    static Lagrangian multiphase(double q, double s_exp, const CoefficientSpec& a,
                                 const CoefficientSpec& b);
};

double eval_F(const Lagrangian& lag, const Vec3& x, double s, const Vec3& p, int d);
Vec3 grad_p_F(const Lagrangian& lag, const Vec3& x, double s, const Vec3& p, int d);
double s_times_ds_F(const Lagrangian& lag, const Vec3& x, double s, const Vec3& p, int d);
Vec3 grad_x_F(const Lagrangian& lag, const Vec3& x, double s, const Vec3& p, int d);

struct ExponentReport {
    bool pass = true;
    std::string violation;  // names the violated bound
};
ExponentReport validate_exponents(const Lagrangian& lag, int d);

// Deterministic Halton sampling of (x,s,p) in the box
// {|x|_inf <= R, |s| <= nbhd, |p|_inf <= nbhd}; reports the maxima of the
// three structure-condition ratios and passes iff all are <= C.
struct GrowthReport {
    double max_ratio_Fx = 0.0;  // (|F| + |grad_x F|) / (|p|^{2+g} + s^2)
    double max_ratio_p = 0.0;   // |grad_p F| / (|p|^{1+g} + |s|^{1+g})
    double max_ratio_s = 0.0;   // |s dF/ds| / (|p|^{2+g} + s^2)
    double gamma = 0.0, C = 0.0, domain_R = 0.0, nbhd = 0.0;
    int samples = 0;
    bool pass = false;
};
GrowthReport check_growth_conditions(const Lagrangian& lag, int d, double domain_R,
                                     int sample_count, double nbhd_radius, double gamma,
                                     double C);

// h^d * sum over in-ball nodes of 1/2 |grad u|^2 + F(x, u, grad u), with the
// nodal gradient of module grid.
double energy(const Lagrangian& lag, const ScalarField& field);
double energy(const Lagrangian& lag, const ScalarField& field, const VectorField& grad);

}  // namespace uclab
