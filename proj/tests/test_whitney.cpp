#include <doctest.h>

#include <cmath>

#include "uclab/frequency.hpp"
#include "uclab/whitney.hpp"

using namespace uclab;

namespace {
// Grids with R = 3 sqrt(d) make one cube unit equal one physical unit, so the
// criterion integrals match their closed forms directly.
Grid unit_scale_grid(int n) { return Grid::make(2, n, 3.0 * std::sqrt(2.0)); }

bool same_tree(const WhitneyDecomposition& a, const WhitneyDecomposition& b) {
    if (a.nodes.size() != b.nodes.size()) return false;
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        if (a.nodes[i].num != b.nodes[i].num || a.nodes[i].level != b.nodes[i].level ||
            a.nodes[i].cls != b.nodes[i].cls)
            return false;
    }
    return true;
}
}  // namespace

TEST_CASE("zero field never classifies: Gamma is the full cube") {
    const Grid g = unit_scale_grid(129);
    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    const WhitneyDecomposition w = decompose(z, 1.0, 0.25, 3);
    CHECK(w.scale == doctest::Approx(1.0));
    const auto res = residual_set(w);
    CHECK(res.size() == 81);  // 3^{d (max_depth - 1)}
    CHECK(w.residual_volume_fraction() == doctest::Approx(1.0).epsilon(1e-12));
    const auto v = verify_decomposition(w, z, gradient(z), 1e-12, 1e-12);
    CHECK(v.partition_ok);
    CHECK(v.criteria_ok);
    CHECK(v.contact_ok);  // u and grad u vanish exactly at every node
}

TEST_CASE("u = x1 with C0 = 1 is a single excess cube (9 pi oracle)") {
    const Grid g = unit_scale_grid(257);
    const ScalarField u = sample_field(g, [](const Vec3& x, int) { return x[0]; });
    const WhitneyDecomposition w = decompose(u, 1.0, 0.25, 3);
    REQUIRE(w.nodes.size() == 1);
    CHECK(w.nodes[0].cls == CubeClass::excess);
    CHECK(w.nodes[0].excess_integral == doctest::Approx(9.0 * M_PI).epsilon(0.02));
    CHECK(residual_set(w).empty());
}

TEST_CASE("u = x1 with C0 = 100 subdivides the root") {
    const Grid g = unit_scale_grid(257);
    const ScalarField u = sample_field(g, [](const Vec3& x, int) { return x[0]; });
    const WhitneyDecomposition w = decompose(u, 100.0, 0.25, 3);
    REQUIRE(w.nodes.size() > 1);
    CHECK(w.nodes[0].cls == CubeClass::subdivided);
    CHECK(w.nodes[0].excess_integral == doctest::Approx(9.0 * M_PI).epsilon(0.02));
    CHECK(w.nodes[0].height_integral == doctest::Approx(M_PI / 4.0 * 81.0).epsilon(0.02));
    CHECK(w.nodes[0].first_child == 1);
    // sons sit at level 2 with half-side 1/3 and even numerators
    for (int s = 0; s < 9; ++s) {
        const CubeNode& son = w.nodes[1 + s];
        CHECK(son.level == 2);
        CHECK(son.parent == 0);
        for (int a = 0; a < 2; ++a) CHECK(son.num[a] % 2 == 0);
    }
    const auto v = verify_decomposition(w, u, gradient(u), 1.0, 1.0);
    CHECK(v.partition_ok);
    CHECK(v.criteria_ok);
    CHECK(std::isfinite(v.excess_C_u));
}

TEST_CASE("decomposition is deterministic") {
    const Grid g = unit_scale_grid(129);
    const ScalarField u = sample_field(
        g, [](const Vec3& x, int) { return std::sin(0.9 * x[0]) * std::cos(0.7 * x[1]); });
    const WhitneyDecomposition a = decompose(u, 50.0, 0.25, 3);
    const WhitneyDecomposition b = decompose(u, 50.0, 0.25, 3);
    CHECK(same_tree(a, b));
}

TEST_CASE("raising C0 only delays classification") {
    const Grid g = unit_scale_grid(129);
    const ScalarField u = sample_field(
        g, [](const Vec3& x, int) { return 0.4 * std::sin(0.8 * x[0] + 0.3) * x[1]; });
    const WhitneyDecomposition lo = decompose(u, 20.0, 0.25, 3);
    const WhitneyDecomposition hi = decompose(u, 80.0, 0.25, 3);
    // every cube classified under the higher C0 must have an ancestor-or-self
    // classified under the lower one
    for (const CubeNode& c : hi.nodes) {
        if (c.cls != CubeClass::excess && c.cls != CubeClass::height) continue;
        bool found = false;
        for (const CubeNode& lc : lo.nodes) {
            if (lc.cls != CubeClass::excess && lc.cls != CubeClass::height) continue;
            if (lc.level > c.level) continue;
            // lc is an ancestor-or-self of c iff the numerators agree after
            // scaling down to lc's level
            bool anc = true;
            std::int64_t factor = 1;
            for (int j = lc.level; j < c.level; ++j) factor *= 3;
            for (int a = 0; a < 2 && anc; ++a) {
                // son numerators lie within factor * num +- (factor - 1)
                const std::int64_t lhs = c.num[a] - factor * lc.num[a];
                if (std::llabs(lhs) > factor - 1) anc = false;
            }
            if (anc) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("scaling the field and C0 together preserves the tree exactly") {
    const Grid g = unit_scale_grid(129);
    const ScalarField u = sample_field(
        g, [](const Vec3& x, int) { return 0.3 * std::cos(x[0]) * std::sin(0.6 * x[1]); });
    const ScalarField u2 = sample_field(
        g, [](const Vec3& x, int) { return 0.6 * std::cos(x[0]) * std::sin(0.6 * x[1]); });
    const WhitneyDecomposition a = decompose(u, 30.0, 0.25, 3);
    const WhitneyDecomposition b = decompose(u2, 120.0, 0.25, 3);  // lambda = 2, C0 * 4
    CHECK(same_tree(a, b));
}

TEST_CASE("residual cubes cluster at a flat critical point") {
    const Grid g = unit_scale_grid(129);
    // saturating radial profile: vanishes like |x|^4 at 0, levels off to 1
    // away from it, so the height criterion certifies everything except a
    // cluster around the degenerate origin
    const ScalarField u = sample_field(g, [](const Vec3& x, int) {
        const double r4 = std::pow(x[0] * x[0] + x[1] * x[1], 2);
        return r4 / (0.3 + r4);
    });
    const WhitneyDecomposition w = decompose(u, 150.0, 0.25, 3);
    const auto res = residual_set(w);
    REQUIRE_FALSE(res.empty());
    for (int idx : res) {
        const Vec3 c = w.center_cube(w.nodes[idx]);
        CHECK(norm(c, 2) <= 0.6);
    }
}

TEST_CASE("depth beyond the lattice resolution is refused") {
    const Grid g = unit_scale_grid(65);
    const ScalarField u = sample_field(g, [](const Vec3& x, int) { return x[0]; });
    CHECK_THROWS_WITH_AS(decompose(u, 100.0, 0.25, 5), doctest::Contains("depth exceeds"),
                         std::runtime_error);
}

TEST_CASE("cube_sup_check reports a finite constant on a singular-center field") {
    const Grid g = unit_scale_grid(129);
    const ScalarField u =
        sample_field(g, [](const Vec3& x, int) { return 0.05 * x[0] * x[1]; });
    const VectorField gr = gradient(u);
    const WhitneyDecomposition w = decompose(u, gr, 1e-4, 0.25, 3);
    const CutoffSpec cut{0.8, false};
    const double r = 2.0;
    const FrequencyComponents c = components(u, gr, Lagrangian::quadratic(), r, cut);
    const CubeSupReport rep = cube_sup_check(w, u, gr, c.D0, r, 0.5);
    CHECK(rep.cubes > 0);
    CHECK_FALSE(rep.violation);
    CHECK(rep.measured_C > 0.0);
    CHECK(std::isfinite(rep.measured_C));

    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    const WhitneyDecomposition wz = decompose(z, 1.0, 0.25, 2);
    const CubeSupReport vac = cube_sup_check(wz, z, gradient(z), 0.0, r, 0.5);
    CHECK(vac.cubes == 0);
    CHECK_FALSE(vac.violation);
}
