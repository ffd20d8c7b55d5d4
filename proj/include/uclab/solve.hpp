#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uclab/grid.hpp"
#include "uclab/lagrangian.hpp"

namespace uclab {

struct SolveOptions {
    int max_iterations = 50000;
    double gradient_tolerance = 1e-9;     // sup-norm of the residual-scaled energy gradient
    double backtrack = 0.5;               // line-search shrink factor
    double sufficient_decrease = 1e-4;    // Armijo constant
    enum class Init { zero, datum_extension, custom } init = Init::datum_extension;
    const ScalarField* custom_init = nullptr;
    int restart_interval = 0;             // 0 = n^d / 10
};

// Closed-form boundary data. harmonic_poly(k, rotation) is the degree-k
// planar harmonic scale * Re((e^{-i rot} (x1 + i x2))^k); custom names an
// entry of the built-in expression catalog.
struct BoundaryDatum {
    enum class Kind { harmonic_poly, custom } kind = Kind::harmonic_poly;
    int k = 1;
    double rotation = 0.0;
    double scale = 0.05;
    std::string expr = "x1";  // custom catalog: x1 x2 x1x2 x1^2-x2^2 x1^3-3x1x2^2 x2^2 zero

    double eval(const Vec3& x, int d) const;
};

struct SolveResult {
    ScalarField u;
    int iterations = 0;
    double final_residual = 0.0;  // sup |discrete energy gradient| / h^d over free nodes
    double energy = 0.0;          // internal discrete energy at the solution
};

// Minimizes the discrete functional with the datum imposed on the Dirichlet
// ring |x| > R - 2.5h. Nonlinear conjugate gradient with a secant-seeded
// backtracking line search; energy decreases at every accepted step; output
// is bit-reproducible for fixed inputs regardless of thread count.
SolveResult minimize(const Lagrangian& lag, const BoundaryDatum& datum, const Grid& grid,
                     const SolveOptions& opts);

// Sup over free nodes (|x| <= R - 2.5h) of the discrete divergence of the
// flux grad u + grad_p F, with the same stencils the solver differentiates,
// so solver stationarity is exactly smallness of this residual.
double el_residual(const Lagrangian& lag, const ScalarField& field);

struct CaccioppoliResult {
    double constant = 0.0;  // measured C: grad-integral * (r-rho)^2 / level-integral
    bool vacuous = false;   // denominator vanished
    bool flagged = false;   // denominator vanished but numerator did not
    double numerator = 0.0, denominator = 0.0;
};
// Superlevel {u > k} and sublevel {u < k} Caccioppoli quotients on
// B_rho(x0) vs B_r(x0).
CaccioppoliResult caccioppoli_super(const ScalarField& u, double k, const Vec3& x0, double rho,
                                    double r);
CaccioppoliResult caccioppoli_sub(const ScalarField& u, double k, const Vec3& x0, double rho,
                                  double r);

enum class LinearBoundMode { paper, sqrt };  // divide by mean(u^2) or its square root

struct LinearBoundReport {
    double measured_C_u = 0.0;     // max over balls of ||u||_{C^0,alpha}(B_{r/2}) / denom
    double measured_C_grad = 0.0;  // max over balls of r * ||grad u||_{C^0,alpha}(B_{r/2}) / denom
    bool violation = false;        // a ball had mean(u^2) ~ 0 with a nonvanishing norm
    int balls = 0;
    double alpha = 0.0;
    LinearBoundMode mode = LinearBoundMode::paper;
};
// Deterministic family of balls B_r(x) in B; Hoelder seminorms sampled over
// 10^4 fixed-seed node pairs per ball with |a-b| in [2h, r/2].
LinearBoundReport linear_bound_check(const ScalarField& u, double alpha, LinearBoundMode mode);

}  // namespace uclab
