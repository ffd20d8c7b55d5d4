#include "uclab/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uclab/critical.hpp"
#include "uclab/frequency.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void VerificationReport::add(const std::string& name, bool pass, bool hard, double value,
                             double threshold, const std::string& note) {
    checks.push_back({name, pass, hard, value, threshold, note});
}

bool VerificationReport::hard_pass() const {
    for (const Check& c : checks)
        if (c.hard && !c.pass) return false;
    return true;
}

namespace {

json config_echo(const ExperimentConfig& cfg) {
    json echo = json::object();
    std::istringstream in(cfg.canonical_text());
    std::string ln;
    while (std::getline(in, ln)) {
        const auto eq = ln.find(" = ");
        if (eq == std::string::npos) continue;
        echo[ln.substr(0, eq)] = ln.substr(eq + 3);
    }
    return echo;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json report_json(const ExperimentConfig& cfg, const VerificationReport& rep) {
    json out;
    out["config"] = config_echo(cfg);
    json checks = json::array();
    for (const Check& c : rep.checks) {
        json e;
        e["name"] = c.name;
        e["pass"] = c.pass;
        e["hard"] = c.hard;
        e["value"] = c.value;
        e["threshold"] = c.threshold;
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(e);
    }
    out["checks"] = checks;
    out["hard_pass"] = rep.hard_pass();
    return out;
}

}  // namespace

int run_pipeline(const ExperimentConfig& cfg, const std::string& out_dir,
                 const std::string& cache_dir, unsigned stages, bool verify_only) {
    fs::create_directories(out_dir);
    fs::create_directories(cache_dir);

    const Grid grid = cfg.make_grid();
    const CutoffSpec cut = cfg.make_cutoff();
    const Lagrangian lag = cfg.make_lagrangian();
    VerificationReport rep;

    // --- solve (or load from the fingerprinted cache) -----------------------
    const std::string fp = hex64(cfg.solve_fingerprint());
    const fs::path cache_field = fs::path(cache_dir) / ("field-" + fp + ".bin");
    ScalarField u = ScalarField(grid, std::vector<double>(grid.node_count(), 0.0));
    int iterations = 0;
    double residual = 0.0;
    bool from_cache = false;
    try {
        if (verify_only && fs::exists(cache_field)) {
            ScalarField cached = read_field(cache_field.string());
            if (cached.grid().same_layout(grid)) {
                u = std::move(cached);
                from_cache = true;
            }
        }
        if (!from_cache) {
            SolveResult res = minimize(lag, cfg.datum, grid, cfg.make_solve_options());
            u = std::move(res.u);
            iterations = res.iterations;
            residual = res.final_residual;
            write_field(cache_field.string(), u);
        }
    } catch (const std::runtime_error& e) {
        rep.add("solver.converged", false, true, 0.0, 0.0, e.what());
        write_text(fs::path(out_dir) / "report.json", report_json(cfg, rep).dump(2) + "\n");
        return 3;
    }
    rep.add("solver.converged", true, true, residual, cfg.solve.gradient_tolerance,
            from_cache ? "cached field " + fp : "iterations " + std::to_string(iterations));

    const VectorField grad = gradient(u);

    if ((stages & StageSolve) && !verify_only) {
        write_field((fs::path(out_dir) / "field.bin").string(), u);
        json side;
        side["config"] = config_echo(cfg);
        side["iterations"] = iterations;
        side["final_residual"] = residual;
        side["energy"] = energy(lag, u, grad);
        side["solve_fingerprint"] = fp;
        write_text(fs::path(out_dir) / "field.json", side.dump(2) + "\n");
    }

    // EL residual: solver stationarity in the same stencil.
    {
        const double r = el_residual(lag, u);
        rep.add("solve.el_residual", r <= 10.0 * cfg.solve.gradient_tolerance, true, r,
                10.0 * cfg.solve.gradient_tolerance);
    }

    // Growth-condition report (soft).
    {
        const auto gr = check_growth_conditions(lag, grid.dim(), grid.radius(), 4096,
                                                cfg.delta0, cfg.effective_gamma(), cfg.growth_C);
        rep.add("lagrangian.growth_conditions", gr.pass, false,
                std::max({gr.max_ratio_Fx, gr.max_ratio_p, gr.max_ratio_s}), cfg.growth_C);
    }

    // Caccioppoli quotients and the linear C^{0,alpha}-L^2 bounds (measured
    // constants; the paper asserts existence, not values).
    {
        const double R = grid.radius();
        const auto sup = caccioppoli_super(u, 0.0, Vec3{0, 0, 0}, 0.25 * R, 0.5 * R);
        const auto sub = caccioppoli_sub(u, 0.0, Vec3{0, 0, 0}, 0.25 * R, 0.5 * R);
        rep.add("solve.caccioppoli_super", !sup.flagged, false, sup.constant, 0.0,
                sup.vacuous ? "vacuous level" : "");
        rep.add("solve.caccioppoli_sub", !sub.flagged, false, sub.constant, 0.0,
                sub.vacuous ? "vacuous level" : "");
        const auto lb_paper = linear_bound_check(u, cfg.holder_alpha, LinearBoundMode::paper);
        const auto lb_sqrt = linear_bound_check(u, cfg.holder_alpha, LinearBoundMode::sqrt);
        rep.add("solve.linear_bound_paper", !lb_paper.violation, false,
                std::max(lb_paper.measured_C_u, lb_paper.measured_C_grad), 0.0);
        rep.add("solve.linear_bound_sqrt", !lb_sqrt.violation, false,
                std::max(lb_sqrt.measured_C_u, lb_sqrt.measured_C_grad), 0.0);
    }

    // --- frequency scan ------------------------------------------------------
    if (stages & StageFrequency) {
        const auto radii = scan_radii(grid, cut, cfg.r_min, cfg.r_max, cfg.r_ratio);
        if (radii.size() >= 3) {
            const RadialProfile prof = corrected_frequency_scan(
                u, lag, radii, cfg.Cg, cfg.effective_beta(), cut);
            if (!verify_only)
                write_text(fs::path(out_dir) / "frequency.csv", profile_csv(prof));

            const MonotonicityReport mono = monotonicity_report(prof, cfg.monotonicity_tol);
            rep.add("frequency.cs_gap", mono.min_cs_gap >= 0.0, true, mono.min_cs_gap, 0.0);
            rep.add("frequency.D0_G_monotone", mono.d0_g_monotone, true, 0.0, 0.0);
            rep.add("frequency.corrected_monotone", mono.violations.empty(), true,
                    mono.max_drop, cfg.monotonicity_tol,
                    std::to_string(mono.violations.size()) + " violations");
            rep.add("frequency.g_to_zero", mono.g_decreasing_to_zero, false, 0.0, 0.0);
            rep.add("frequency.outer_envelope_C", true, false, mono.outer_C, 0.0);
            rep.add("frequency.inner_envelope_C", true, false, mono.inner_C, 0.0);

            double worst_h = 0.0, worst_o = 0.0, worst_i = 0.0;
            for (const ProfileRow& row : prof.rows) {
                worst_h = std::max(worst_h, row.defect_H);
                worst_o = std::max(worst_o, row.defect_outer);
                worst_i = std::max(worst_i, row.defect_inner);
            }
            rep.add("frequency.height_identity", worst_h <= cfg.defect_tol, true, worst_h,
                    cfg.defect_tol);
            rep.add("frequency.outer_identity", worst_o <= cfg.defect_tol, true, worst_o,
                    cfg.defect_tol);
            rep.add("frequency.inner_identity", worst_i <= cfg.defect_tol, true, worst_i,
                    cfg.defect_tol);

            // Poincare / height-energy control on singular-center fields.
            const double h = grid.spacing();
            const double uscale = std::max(u.sup_abs(), 1e-30);
            double pmin = 0.0, pmax = 0.0, gmax = 0.0;
            bool singular = true;
            try {
                bool first = true;
                for (const ProfileRow& row : prof.rows) {
                    const auto pr = poincare_ratio(u, grad, lag, row.r, cut, 5 * h * h * uscale,
                                                   5 * h * uscale);
                    if (first) {
                        pmin = pmax = pr.first;
                        gmax = pr.second;
                        first = false;
                    }
                    pmin = std::min(pmin, pr.first);
                    pmax = std::max(pmax, pr.first);
                    gmax = std::max(gmax, pr.second);
                }
            } catch (const std::runtime_error&) {
                singular = false;
            }
            if (singular) {
                rep.add("frequency.poincare_min_ratio",
                        cfg.poincare_min <= 0.0 || pmin >= cfg.poincare_min,
                        cfg.poincare_min > 0.0, pmin, cfg.poincare_min);
                rep.add("frequency.height_energy_control", true, false, gmax, 0.0,
                        "max G/(r^2 D0)");
            } else {
                rep.add("frequency.poincare_min_ratio", true, false, 0.0, 0.0,
                        "skipped: center not singular");
            }

            // Outer-equivalence surrogate B/(r D0) and the D vs D0 gap,
            // reported across the scan.
            double eq_first = 0.0, eq_last = 0.0, dl_gap = 0.0;
            bool eq_ok = true;
            for (std::size_t i = 0; i < prof.rows.size(); ++i) {
                const ProfileRow& row = prof.rows[i];
                if (row.c.D0 > 0.0) {
                    const double eq = outer_equivalence(row.c, row.r);
                    if (i == 0) eq_first = eq;
                    eq_last = eq;
                    dl_gap = std::max(dl_gap, std::fabs(row.c.D - row.c.D0) /
                                                  std::max(row.c.D0, 1e-30));
                } else {
                    eq_ok = false;
                }
            }
            rep.add("frequency.outer_equivalence", eq_ok, false, eq_first,
                    1.0, "B/(r D0) at the smallest scanned radius");
            rep.add("frequency.D_vs_D0_gap", true, false, dl_gap, 0.0);

            json mj;
            mj["upsilon"] = cut.upsilon;
            mj["C_g"] = cfg.Cg;
            mj["beta"] = cfg.effective_beta();
            mj["lambda"] = cfg.lambda;
            mj["kappa"] = cfg.effective_kappa();
            mj["monotonicity_tol"] = cfg.monotonicity_tol;
            mj["outer_equivalence_first_last"] = {eq_first, eq_last};
            mj["max_D_vs_D0_gap"] = dl_gap;
            mj["max_drop"] = mono.max_drop;
            mj["g_decreasing_to_zero"] = mono.g_decreasing_to_zero;
            mj["outer_envelope_C"] = mono.outer_C;
            mj["inner_envelope_C"] = mono.inner_C;
            mj["truncated_at"] = prof.truncated_at;
            json viol = json::array();
            for (const auto& v : mono.violations) {
                json e;
                e["r_lo"] = v.r_lo;
                e["r_hi"] = v.r_hi;
                e["drop"] = v.drop;
                viol.push_back(e);
            }
            mj["violations"] = viol;
            if (!verify_only)
                write_text(fs::path(out_dir) / "monotonicity.json", mj.dump(2) + "\n");

            // Doubling / vanishing-order diagnostics (soft).
            try {
                const auto dv = doubling_and_vanishing(u, Vec3{0, 0, 0}, radii, cut, 10.0);
                const char* flag = dv.flag == VanishingFlag::identically_zero ? "identically_zero"
                                   : dv.flag == VanishingFlag::infinite_order ? "infinite_order"
                                                                              : "finite_order";
                rep.add("frequency.vanishing_order",
                        dv.flag != VanishingFlag::infinite_order, false, dv.vanishing_order,
                        10.0, flag);
            } catch (const std::exception& e) {
                rep.add("frequency.vanishing_order", true, false, 0.0, 0.0,
                        std::string("skipped: ") + e.what());
            }
        } else {
            rep.add("frequency.scan", false, false, 0.0, 0.0, "no resolved radii");
        }
    }

    // --- whitney -------------------------------------------------------------
    if ((stages & StageWhitney) && cfg.whitney_enabled) {
        try {
            const WhitneyDecomposition w =
                decompose(u, grad, cfg.whitney_C0, cfg.whitney_alpha, cfg.effective_max_depth());
            const double h = grid.spacing();
            const double uscale = std::max(u.sup_abs(), 1e-30);
            const WhitneyVerification wv = verify_decomposition(
                w, u, grad, cfg.crit_tol_u_coeff * h * h * uscale,
                cfg.crit_tol_g_coeff * h * uscale);
            rep.add("whitney.partition", wv.partition_ok, true, 0.0, 0.0);
            rep.add("whitney.criteria", wv.criteria_ok, true, 0.0, 0.0);
            rep.add("whitney.contact_set", wv.contact_ok, false, wv.contact_worst, 1.0);
            rep.add("whitney.excess_father_C", true, false,
                    std::max(wv.excess_C_u, wv.excess_C_grad), 0.0);
            rep.add("whitney.height_father_C", true, false,
                    std::max(wv.height_C_u, wv.height_C_grad), 0.0);
            try {
                const double rstar = 0.5 * grid.radius();
                const double D0 = weighted_integral_expr(
                    grid, [&](std::size_t k) { return norm2(grad.at(k), grid.dim()); },
                    Weight::phi, rstar, cut);
                const CubeSupReport cs = cube_sup_check(w, u, grad, D0, rstar, cfg.lambda);
                rep.add("whitney.cube_sup_C", !cs.violation, false, cs.measured_C, 0.0,
                        std::to_string(cs.cubes) + " cubes meet B_r");
            } catch (const std::exception& e) {
                rep.add("whitney.cube_sup_C", true, false, 0.0, 0.0,
                        std::string("skipped: ") + e.what());
            }

            json wj;
            wj["C0"] = w.C0;
            wj["alpha"] = w.alpha;
            wj["max_depth"] = w.max_depth;
            wj["scale"] = w.scale;
            wj["counts"] = {{"excess", wv.excess_count},
                            {"height", wv.height_count},
                            {"subdivided", wv.subdivided_count},
                            {"residual", wv.residual_count}};
            wj["gamma_volume_fraction"] = w.residual_volume_fraction();
            wj["father_constants"] = {{"excess_u", wv.excess_C_u},
                                      {"excess_grad", wv.excess_C_grad},
                                      {"height_u", wv.height_C_u},
                                      {"height_grad", wv.height_C_grad}};
            json tree = json::array();
            for (const CubeNode& c : w.nodes) {
                json e;
                e["level"] = c.level;
                std::int64_t den = 1;
                for (int j = 1; j < c.level; ++j) den *= 3;
                json ctr = json::array();
                for (int a = 0; a < w.d; ++a) {
                    std::int64_t num = c.num[a], dd = den;
                    while (num != 0 && num % 3 == 0 && dd % 3 == 0) {
                        num /= 3;
                        dd /= 3;
                    }
                    ctr.push_back(std::to_string(num) + "/" + std::to_string(dd));
                }
                e["center"] = ctr;
                e["class"] = cube_class_name(c.cls);
                e["excess_integral"] = c.excess_integral;
                e["height_integral"] = c.height_integral;
                tree.push_back(e);
            }
            wj["tree"] = tree;
            if (!verify_only)
                write_text(fs::path(out_dir) / "whitney.json", wj.dump(2) + "\n");
        } catch (const std::runtime_error& e) {
            rep.add("whitney.decompose", false, false, 0.0, 0.0, e.what());
        }
    }

    // --- critical set ----------------------------------------------------------
    if (stages & StageCritical) {
        const double h = grid.spacing();
        const double uscale = cfg.crit_scale > 0.0 ? cfg.crit_scale
                                                   : std::max(u.sup_abs(), 1e-30);
        const double tol_u = cfg.crit_tol_u_coeff * h * h * uscale;
        const double tol_g = cfg.crit_tol_g_coeff * h * uscale;
        const CriticalSet set = detect_critical(u, grad, tol_u, tol_g);
        std::vector<double> scales;
        for (double s = 2.0 * h; s < 0.5 * grid.radius() && scales.size() < 5; s *= 2.0)
            scales.push_back(s);
        json cj;
        cj["tol_u"] = tol_u;
        cj["tol_g"] = tol_g;
        cj["node_count"] = set.nodes.size();
        if (scales.size() >= 3) {
            const BoxDimension bd = box_dimension(set, grid, scales);
            cj["dimension"] = bd.empty ? json("empty") : json(bd.dim);
            cj["scales"] = bd.scales;
            cj["box_counts"] = bd.counts;
            const double dim = bd.empty ? 0.0 : bd.dim;
            rep.add("critical.dimension_cap", dim <= cfg.crit_dim_cap, false, dim,
                    cfg.crit_dim_cap);
        }
        cj["zero_fraction_h"] = zero_set_volume(u, h * uscale);
        cj["zero_fraction_h2"] = zero_set_volume(u, h * h * uscale);
        if (!verify_only) write_text(fs::path(out_dir) / "critical.json", cj.dump(2) + "\n");
    }

    write_text(fs::path(out_dir) / "report.json", report_json(cfg, rep).dump(2) + "\n");
    return rep.hard_pass() ? 0 : 1;
}

}  // namespace uclab
