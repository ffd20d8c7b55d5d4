#pragma once

#include <string>
#include <vector>

#include "uclab/grid.hpp"
#include "uclab/lagrangian.hpp"
#include "uclab/quadrature.hpp"

namespace uclab {

// Cutoff-weighted quantities at one radius:
//   H  = -int phi'(|x|/r) u^2 / |x|
//   D0 =  int phi(|x|/r) |grad u|^2
//   Dl =  int phi(|x|/r) u dF/ds          (0 for the shipped families)
//   D  = D0 + Dl
//   G  =  int phi(|x|/r) u^2
//   A  = -int phi'(|x|/r) |x| (d_nu u)^2
//   B  = -int phi'(|x|/r) u (d_nu u)
struct FrequencyComponents {
    double H = 0.0, D0 = 0.0, Dl = 0.0, D = 0.0, G = 0.0, A = 0.0, B = 0.0;
};

FrequencyComponents components(const ScalarField& u, const VectorField& grad,
                               const Lagrangian& lag, double r, const CutoffSpec& cut);
FrequencyComponents components(const ScalarField& u, const Lagrangian& lag, double r,
                               const CutoffSpec& cut);

// Scale-aware floor below which the height is treated as vanished.
double height_floor(const ScalarField& u, double r);

// N(r) = r D / H; throws "height vanishes" when H <= tol_H.
double frequency_N(const FrequencyComponents& c, double r, double tol_H);

// |H' - (d-1)H/r - 2B/r| normalized by max(H/r, tol). H' by a wide 4th-order
// central difference in r (step max(r/8, 2h)); narrower stencils read the
// lattice wiggle of the discrete height instead of its trend.
double height_identity_defect(const ScalarField& u, const VectorField& grad,
                              const Lagrangian& lag, double r, const CutoffSpec& cut);

struct DefectPair {
    double defect = 0.0;    // relative aggregate defect of the identity
    double envelope = 0.0;  // the four-integral envelope bound
    double raw_error = 0.0; // the exact aggregate error term (e_O or e_I)
};

// Outer variation: defect of D - B/r + e_O = 0 with
//   e_O = int phi grad u . grad_p F + (1/r) int phi' u (grad_p F . x/|x|),
// envelope = int phi |u|^{2+k} + int phi |grad u|^{2+k}
//          - int phi' |u|^{2+k} - int phi' |u| |grad u|^{1+k},  k = gamma/2.
DefectPair outer_defect(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                        double r, const CutoffSpec& cut);

// Inner variation: defect of
//   (d-2)/2 D - r/2 D'_fd + A/r + e_i1 + e_i2 + r/2 Dl' = 0 with
//   e_i1 = int psi_r [ d F + x . grad_x F - grad u . grad_p F ] + (d-2)/2 Dl,
//   e_i2 = (1/r) int |x| phi' [ F - (d_nu u)(x/|x| . grad_p F) ],
//   Dl'  = (1/r^2) int (-phi') |x| u dF/ds   (chain rule; the paper's section
//          3 display carries -(1/2r) instead -- both vanish for the shipped
//          s-independent families),
// envelope = int phi |u|^2 + int phi |grad u|^{2+k}
//          - int phi' |u|^2 - int phi' |grad u|^{2+k}.
// D' by the same wide finite difference as H' above.
DefectPair inner_defect(const ScalarField& u, const VectorField& grad, const Lagrangian& lag,
                        double r, const CutoffSpec& cut);

struct ProfileRow {
    double r = 0.0;
    FrequencyComponents c;
    double N = 0.0, g = 0.0, Ncorr = 0.0;
    double defect_H = 0.0, defect_outer = 0.0, defect_inner = 0.0;
    double env_outer = 0.0, env_inner = 0.0;
    double e_outer = 0.0, e_inner = 0.0;  // raw aggregates behind the defects
    double doubling = 0.0;                // G(r)/G(r/2); NaN when r/2 unresolved
    double cs_gap = 0.0;                  // A H - B^2
};

struct RadialProfile {
    std::vector<ProfileRow> rows;
    double C_g = 1.0, beta = 0.5, upsilon = 0.9;
    int truncated_at = -1;  // index of the first radius where H vanished, -1 if none
};

// Geometric radius ladder r_min * ratio^i capped at r_max, clamped below by
// the resolution floor max(8h, 2h/(1-upsilon)).
std::vector<double> scan_radii(const Grid& g, const CutoffSpec& cut, double r_min, double r_max,
                               double ratio);

RadialProfile corrected_frequency_scan(const ScalarField& u, const Lagrangian& lag,
                                       const std::vector<double>& radii, double C_g, double beta,
                                       const CutoffSpec& cut);

struct MonotonicityViolation {
    double r_lo = 0.0, r_hi = 0.0;
    double drop = 0.0;  // relative decrease of e^g N across the step
};

struct MonotonicityReport {
    std::vector<MonotonicityViolation> violations;
    double max_drop = 0.0;
    bool g_decreasing_to_zero = true;  // g nondecreasing in r along the scan
    bool d0_g_monotone = true;         // D0 and G nondecreasing in r (exact)
    double outer_C = 0.0, inner_C = 0.0;  // max |aggregate| / envelope
    double min_cs_gap = 0.0;              // min of cs_gap + 1e-10 (A H + 1) slack margin
};
MonotonicityReport monotonicity_report(const RadialProfile& p, double rel_tol);

// (r D0 / H, G / (r^2 D0)); requires u(0) = 0, grad u(0) = 0 within the
// nodal tolerances; throws "center not singular" / "height vanishes".
std::pair<double, double> poincare_ratio(const ScalarField& u, const VectorField& grad,
                                         const Lagrangian& lag, double r, const CutoffSpec& cut,
                                         double tol_u, double tol_g);

enum class VanishingFlag { finite_order, infinite_order, identically_zero };

struct DoublingReport {
    std::vector<double> radii;
    std::vector<double> doubling;  // G(r)/G(r/2) where resolved
    double vanishing_order = 0.0;  // half the log-log slope of mean(B_r, u^2)
    VanishingFlag flag = VanishingFlag::finite_order;
};
DoublingReport doubling_and_vanishing(const ScalarField& u, const Vec3& x0,
                                      const std::vector<double>& radii, const CutoffSpec& cut,
                                      double order_cap);

// B / (r D0), the computable surrogate for F(r) / D0(r); throws when D0 = 0.
double outer_equivalence(const FrequencyComponents& c, double r);

// CSV with the fixed header
// r,H,D0,Dl,D,G,A,B,N,g,Ncorr,defect_H,defect_outer,defect_inner,env_outer,env_inner,doubling,cs_gap
std::string profile_csv(const RadialProfile& p);

}  // namespace uclab
