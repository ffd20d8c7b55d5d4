#pragma once

#include <cstdint>
#include <string>

#include "uclab/grid.hpp"
#include "uclab/lagrangian.hpp"
#include "uclab/solve.hpp"

namespace uclab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Flat dotted-key experiment description (`key = value` lines, `#` comments).
// Parsing validates every module precondition and rejects unknown keys.
struct ExperimentConfig {
    // grid
    int grid_d = 2;
    int grid_n = 257;
    double grid_R = 1.0;
    // cutoff
    double upsilon = 0.9;
    bool literal_paper = false;
    // lagrangian
    Family family = Family::quadratic;
    double q = 3.0;
    double s_exp = 3.0;
    double gamma = 0.0;  // 0 = auto q-2 (1 for quadratic)
    double growth_C = 1.0;
    double delta0 = 0.1;
    CoefficientSpec coeff_a = CoefficientSpec::constant(1.0);
    CoefficientSpec coeff_b = CoefficientSpec::constant(1.0);
    // datum
    BoundaryDatum datum;
    // solve
    SolveOptions solve;
    std::string initial_guess = "datum_extension";
    // frequency
    double r_min = 0.15;
    double r_max = 0.7;
    double r_ratio = 1.1;
    double Cg = 1.0;
    double beta = 0.0;    // 0 = auto min(alpha*lambda*kappa, 1/2)
    double lambda = 0.5;
    double kappa = 0.0;   // 0 = auto gamma/2
    double holder_alpha = 0.5;
    double monotonicity_tol = 1e-3;
    double defect_tol = 0.05;
    double poincare_min = 0.0;  // 0 disables the hard lower bound
    // whitney
    bool whitney_enabled = true;
    double whitney_C0 = 1.0;
    double whitney_alpha = 0.25;
    int whitney_max_depth = 0;  // 0 = auto (5 in d=2, 3 in d=3)
    // critical
    double crit_tol_u_coeff = 5.0;  // x h^2 x scale
    double crit_tol_g_coeff = 5.0;  // x h x scale
    double crit_scale = 0.0;        // 0 = auto sup|u|
    double crit_dim_cap = 0.3;

    static ExperimentConfig parse_file(const std::string& path);
    static ExperimentConfig parse_text(const std::string& text);

    Grid make_grid() const;
    CutoffSpec make_cutoff() const;
    Lagrangian make_lagrangian() const;
    SolveOptions make_solve_options() const;
    double effective_gamma() const;
    double effective_kappa() const;
    double effective_beta() const;
    int effective_max_depth() const;

    // Fixed-order key dump; identical configs yield identical text.
    std::string canonical_text() const;
    // Fingerprint of the solve-relevant subset (grid/cutoff/lagrangian/
    // datum/solve); keys the cache of solved fields.
    std::uint64_t solve_fingerprint() const;
};

}  // namespace uclab
