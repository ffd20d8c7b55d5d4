#include "uclab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace uclab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects a number, got '" + v + "'");
    }
}

int parse_int(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects an integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects true/false, got '" + v + "'");
}

Vec3 parse_vec(const std::string& v, const std::string& key, int line) {
    std::istringstream in(v);
    Vec3 out{0, 0, 0};
    int i = 0;
    double x;
    while (in >> x) {
        if (i >= 3)
            throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "' takes at most 3 components");
        out[i++] = x;
    }
    if (i == 0)
        throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                          "' expects numbers");
    return out;
}

CoefficientSpec::Kind parse_coeff_kind(const std::string& v, const std::string& key, int line) {
    if (v == "constant") return CoefficientSpec::Kind::constant;
    if (v == "affine") return CoefficientSpec::Kind::affine;
    if (v == "bump") return CoefficientSpec::Kind::bump;
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' expects constant/affine/bump");
}

void append_kv(std::string& out, const char* key, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out += key;
    out += " = ";
    out.append(buf, res.ptr);
    out += '\n';
}
void append_kv(std::string& out, const char* key, int v) {
    out += key;
    out += " = ";
    out += std::to_string(v);
    out += '\n';
}
void append_kv(std::string& out, const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += '\n';
}
void append_kv(std::string& out, const char* key, bool v) {
    append_kv(out, key, std::string(v ? "true" : "false"));
}
void append_kv(std::string& out, const char* key, const Vec3& v) {
    char buf[32];
    out += key;
    out += " =";
    for (int a = 0; a < 3; ++a) {
        auto res = std::to_chars(buf, buf + sizeof buf, v[a]);
        out += ' ';
        out.append(buf, res.ptr);
    }
    out += '\n';
}

void apply_coeff_key(CoefficientSpec& c, const std::string& sub, const std::string& val,
                     const std::string& key, int line) {
    if (sub == "kind")
        c.kind = parse_coeff_kind(val, key, line);
    else if (sub == "value")
        c.value = parse_double(val, key, line);
    else if (sub == "offset")
        c.offset = parse_double(val, key, line);
    else if (sub == "slope")
        c.slope = parse_vec(val, key, line);
    else if (sub == "center")
        c.center = parse_vec(val, key, line);
    else if (sub == "width")
        c.width = parse_double(val, key, line);
    else if (sub == "height")
        c.height = parse_double(val, key, line);
    else
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    ExperimentConfig c;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (raw.empty()) continue;
        const std::size_t eq = raw.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        const std::string key = trim(raw.substr(0, eq));
        const std::string val = trim(raw.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");

        if (key == "grid.d")
            c.grid_d = parse_int(val, key, line);
        else if (key == "grid.n")
            c.grid_n = parse_int(val, key, line);
        else if (key == "grid.R")
            c.grid_R = parse_double(val, key, line);
        else if (key == "cutoff.upsilon")
            c.upsilon = parse_double(val, key, line);
        else if (key == "cutoff.literal_paper")
            c.literal_paper = parse_bool(val, key, line);
        else if (key == "lagrangian.family")
            c.family = family_from_name(val);
        else if (key == "lagrangian.q")
            c.q = parse_double(val, key, line);
        else if (key == "lagrangian.s")
            c.s_exp = parse_double(val, key, line);
        else if (key == "lagrangian.gamma")
            c.gamma = parse_double(val, key, line);
        else if (key == "lagrangian.C")
            c.growth_C = parse_double(val, key, line);
        else if (key == "lagrangian.delta0")
            c.delta0 = parse_double(val, key, line);
        else if (key.rfind("lagrangian.a.", 0) == 0)
            apply_coeff_key(c.coeff_a, key.substr(13), val, key, line);
        else if (key.rfind("lagrangian.b.", 0) == 0)
            apply_coeff_key(c.coeff_b, key.substr(13), val, key, line);
        else if (key == "datum.kind") {
            if (val == "harmonic_poly")
                c.datum.kind = BoundaryDatum::Kind::harmonic_poly;
            else if (val == "custom")
                c.datum.kind = BoundaryDatum::Kind::custom;
            else
                throw ConfigError("line " + std::to_string(line) +
                                  ": datum.kind expects harmonic_poly/custom");
        } else if (key == "datum.k")
            c.datum.k = parse_int(val, key, line);
        else if (key == "datum.rotation")
            c.datum.rotation = parse_double(val, key, line);
        else if (key == "datum.scale")
            c.datum.scale = parse_double(val, key, line);
        else if (key == "datum.expr")
            c.datum.expr = val;
        else if (key == "solve.max_iterations")
            c.solve.max_iterations = parse_int(val, key, line);
        else if (key == "solve.tolerance")
            c.solve.gradient_tolerance = parse_double(val, key, line);
        else if (key == "solve.backtrack")
            c.solve.backtrack = parse_double(val, key, line);
        else if (key == "solve.sufficient_decrease")
            c.solve.sufficient_decrease = parse_double(val, key, line);
        else if (key == "solve.initial_guess")
            c.initial_guess = val;
        else if (key == "frequency.r_min")
            c.r_min = parse_double(val, key, line);
        else if (key == "frequency.r_max")
            c.r_max = parse_double(val, key, line);
        else if (key == "frequency.ratio")
            c.r_ratio = parse_double(val, key, line);
        else if (key == "frequency.Cg")
            c.Cg = parse_double(val, key, line);
        else if (key == "frequency.beta")
            c.beta = parse_double(val, key, line);
        else if (key == "frequency.lambda")
            c.lambda = parse_double(val, key, line);
        else if (key == "frequency.kappa")
            c.kappa = parse_double(val, key, line);
        else if (key == "frequency.holder_alpha")
            c.holder_alpha = parse_double(val, key, line);
        else if (key == "frequency.monotonicity_tol")
            c.monotonicity_tol = parse_double(val, key, line);
        else if (key == "frequency.defect_tol")
            c.defect_tol = parse_double(val, key, line);
        else if (key == "frequency.poincare_min")
            c.poincare_min = parse_double(val, key, line);
        else if (key == "whitney.enabled")
            c.whitney_enabled = parse_bool(val, key, line);
        else if (key == "whitney.C0")
            c.whitney_C0 = parse_double(val, key, line);
        else if (key == "whitney.alpha")
            c.whitney_alpha = parse_double(val, key, line);
        else if (key == "whitney.max_depth")
            c.whitney_max_depth = parse_int(val, key, line);
        else if (key == "critical.tol_u_coeff")
            c.crit_tol_u_coeff = parse_double(val, key, line);
        else if (key == "critical.tol_g_coeff")
            c.crit_tol_g_coeff = parse_double(val, key, line);
        else if (key == "critical.scale")
            c.crit_scale = parse_double(val, key, line);
        else if (key == "critical.dim_cap")
            c.crit_dim_cap = parse_double(val, key, line);
        else
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'");
    }

    // Parse-time validation of every module precondition.
    if (c.grid_d != 2 && c.grid_d != 3) throw ConfigError("grid.d must be 2 or 3");
    if (c.grid_n % 2 == 0)
        throw ConfigError("grid.n = " + std::to_string(c.grid_n) +
                          " is even: the origin would be off-lattice");
    if (c.grid_n < 33) throw ConfigError("grid.n must be >= 33");
    if (!(c.grid_R > 0.0)) throw ConfigError("grid.R must be positive");
    if (!(c.upsilon > 0.0 && c.upsilon < 1.0)) throw ConfigError("cutoff.upsilon must be in (0,1)");
    {
        const auto rep = validate_exponents(c.make_lagrangian(), c.grid_d);
        if (!rep.pass) throw ConfigError("lagrangian: " + rep.violation);
        c.coeff_a.validate(c.grid_R, c.grid_d);
        if (c.family == Family::multiphase) c.coeff_b.validate(c.grid_R, c.grid_d);
    }
    if (!(c.delta0 > 0.0 && c.delta0 < 1.0)) throw ConfigError("lagrangian.delta0 must be in (0,1)");
    if (!(c.solve.gradient_tolerance > 0.0)) throw ConfigError("solve.tolerance must be positive");
    if (!(c.solve.backtrack > 0.0 && c.solve.backtrack < 1.0))
        throw ConfigError("solve.backtrack must be in (0,1)");
    if (c.initial_guess != "zero" && c.initial_guess != "datum_extension")
        throw ConfigError("solve.initial_guess must be zero or datum_extension");
    if (c.datum.kind == BoundaryDatum::Kind::harmonic_poly &&
        (c.datum.k < 1 || c.datum.k > 3))
        throw ConfigError("datum.k must be 1, 2 or 3");
    if (c.datum.kind == BoundaryDatum::Kind::custom) {
        try {
            Vec3 probe{0.1, 0.2, 0.0};
            (void)c.datum.eval(probe, c.grid_d);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("datum.expr: ") + e.what());
        }
    }
    if (!(c.r_ratio > 1.0)) throw ConfigError("frequency.ratio must exceed 1");
    if (!(c.r_min > 0.0 && c.r_max > c.r_min)) throw ConfigError("frequency radii must satisfy 0 < r_min < r_max");
    if (!(c.Cg >= 0.0)) throw ConfigError("frequency.Cg must be >= 0");
    if (c.beta != 0.0 && !(c.beta > 0.0 && c.beta <= 1.0))
        throw ConfigError("frequency.beta must be in (0,1]");
    if (!(c.holder_alpha > 0.0 && c.holder_alpha < 1.0))
        throw ConfigError("frequency.holder_alpha must be in (0,1)");
    if (!(c.whitney_C0 > 0.0)) throw ConfigError("whitney.C0 must be positive");
    if (!(c.whitney_alpha > 0.0 && c.whitney_alpha < 0.5))
        throw ConfigError("whitney.alpha must be in (0, 1/2)");
    if (c.whitney_max_depth != 0 && (c.whitney_max_depth < 1 || c.whitney_max_depth > 8))
        throw ConfigError("whitney.max_depth must be in [1,8]");
    if (!(c.crit_tol_u_coeff > 0.0 && c.crit_tol_g_coeff > 0.0))
        throw ConfigError("critical tolerance coefficients must be positive");
    return c;
}

Grid ExperimentConfig::make_grid() const { return Grid::make(grid_d, grid_n, grid_R); }

CutoffSpec ExperimentConfig::make_cutoff() const { return CutoffSpec{upsilon, literal_paper}; }

double ExperimentConfig::effective_gamma() const {
    if (gamma != 0.0) return gamma;
    return family == Family::quadratic ? 1.0 : q - 2.0;
}
double ExperimentConfig::effective_kappa() const {
    return kappa != 0.0 ? kappa : 0.5 * effective_gamma();
}
double ExperimentConfig::effective_beta() const {
    if (beta != 0.0) return beta;
    return std::max(1e-3, std::min(holder_alpha * lambda * effective_kappa(), 0.5));
}
int ExperimentConfig::effective_max_depth() const {
    if (whitney_max_depth != 0) return whitney_max_depth;
    return grid_d == 2 ? 5 : 3;
}

Lagrangian ExperimentConfig::make_lagrangian() const {
    Lagrangian l;
    l.family = family;
    l.q = q;
    l.s_exp = s_exp;
    l.a = coeff_a;
    l.b = coeff_b;
    l.growth.gamma = effective_gamma();
    l.growth.C = growth_C;
    l.growth.delta0 = delta0;
    return l;
}

SolveOptions ExperimentConfig::make_solve_options() const {
    SolveOptions o = solve;
    o.init = initial_guess == "zero" ? SolveOptions::Init::zero
                                     : SolveOptions::Init::datum_extension;
    return o;
}

std::string ExperimentConfig::canonical_text() const {
    std::string out;
    append_kv(out, "grid.d", grid_d);
    append_kv(out, "grid.n", grid_n);
    append_kv(out, "grid.R", grid_R);
    append_kv(out, "cutoff.upsilon", upsilon);
    append_kv(out, "cutoff.literal_paper", literal_paper);
    append_kv(out, "lagrangian.family", family_name(family));
    append_kv(out, "lagrangian.q", q);
    append_kv(out, "lagrangian.s", s_exp);
    append_kv(out, "lagrangian.gamma", effective_gamma());
    append_kv(out, "lagrangian.C", growth_C);
    append_kv(out, "lagrangian.delta0", delta0);
    auto coeff = [&](const char* prefix, const CoefficientSpec& cs) {
        std::string base(prefix);
        append_kv(out, (base + ".kind").c_str(),
                  cs.kind == CoefficientSpec::Kind::constant ? std::string("constant")
                  : cs.kind == CoefficientSpec::Kind::affine ? std::string("affine")
                                                             : std::string("bump"));
        append_kv(out, (base + ".value").c_str(), cs.value);
        append_kv(out, (base + ".offset").c_str(), cs.offset);
        append_kv(out, (base + ".slope").c_str(), cs.slope);
        append_kv(out, (base + ".center").c_str(), cs.center);
        append_kv(out, (base + ".width").c_str(), cs.width);
        append_kv(out, (base + ".height").c_str(), cs.height);
    };
    coeff("lagrangian.a", coeff_a);
    coeff("lagrangian.b", coeff_b);
    append_kv(out, "datum.kind",
              datum.kind == BoundaryDatum::Kind::harmonic_poly ? std::string("harmonic_poly")
                                                               : std::string("custom"));
    append_kv(out, "datum.k", datum.k);
    append_kv(out, "datum.rotation", datum.rotation);
    append_kv(out, "datum.scale", datum.scale);
    append_kv(out, "datum.expr", datum.expr);
    append_kv(out, "solve.max_iterations", solve.max_iterations);
    append_kv(out, "solve.tolerance", solve.gradient_tolerance);
    append_kv(out, "solve.backtrack", solve.backtrack);
    append_kv(out, "solve.sufficient_decrease", solve.sufficient_decrease);
    append_kv(out, "solve.initial_guess", initial_guess);
    append_kv(out, "frequency.r_min", r_min);
    append_kv(out, "frequency.r_max", r_max);
    append_kv(out, "frequency.ratio", r_ratio);
    append_kv(out, "frequency.Cg", Cg);
    append_kv(out, "frequency.beta", effective_beta());
    append_kv(out, "frequency.lambda", lambda);
    append_kv(out, "frequency.kappa", effective_kappa());
    append_kv(out, "frequency.holder_alpha", holder_alpha);
    append_kv(out, "frequency.monotonicity_tol", monotonicity_tol);
    append_kv(out, "frequency.defect_tol", defect_tol);
    append_kv(out, "frequency.poincare_min", poincare_min);
    append_kv(out, "whitney.enabled", whitney_enabled);
    append_kv(out, "whitney.C0", whitney_C0);
    append_kv(out, "whitney.alpha", whitney_alpha);
    append_kv(out, "whitney.max_depth", effective_max_depth());
    append_kv(out, "critical.tol_u_coeff", crit_tol_u_coeff);
    append_kv(out, "critical.tol_g_coeff", crit_tol_g_coeff);
    append_kv(out, "critical.scale", crit_scale);
    append_kv(out, "critical.dim_cap", crit_dim_cap);
    return out;
}

std::uint64_t ExperimentConfig::solve_fingerprint() const {
    const std::string all = canonical_text();
    // Only the solve-relevant prefix keys matter for the field cache.
    std::string subset;
    std::istringstream in(all);
    std::string ln;
    while (std::getline(in, ln)) {
        if (ln.rfind("grid.", 0) == 0 || ln.rfind("cutoff.", 0) == 0 ||
            ln.rfind("lagrangian.", 0) == 0 || ln.rfind("datum.", 0) == 0 ||
            ln.rfind("solve.", 0) == 0)
            subset += ln + '\n';
    }
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : subset) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace uclab
