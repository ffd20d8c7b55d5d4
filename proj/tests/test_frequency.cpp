#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "uclab/frequency.hpp"

using namespace uclab;

namespace {
const Lagrangian kQuad = Lagrangian::quadratic();

ScalarField harmonic(const Grid& g, int k) {
    return sample_field(g, [k](const Vec3& x, int) {
        switch (k) {
            case 0: return 1.0;
            case 1: return x[0];
            case 2: return x[0] * x[0] - x[1] * x[1];
            default: return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1];
        }
    });
}
}  // namespace

TEST_CASE("components of the constant field") {
    const Grid g = Grid::make(2, 129, 1.0);
    const ScalarField one = harmonic(g, 0);
    for (double ups : {0.7, 0.9}) {
        const CutoffSpec cut{ups, false};
        const FrequencyComponents c = components(one, kQuad, 0.5, cut);
        CHECK(c.H == doctest::Approx(2.0 * M_PI * 0.5).epsilon(0.01));
        CHECK(c.D0 == 0.0);
        CHECK(c.A == 0.0);
        CHECK(c.B == 0.0);
        CHECK(c.Dl == 0.0);
    }
}

TEST_CASE("zero field: all components vanish and N is undefined") {
    const Grid g = Grid::make(2, 65, 1.0);
    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    const CutoffSpec cut{0.8, false};
    const FrequencyComponents c = components(z, kQuad, 0.4, cut);
    CHECK(c.H == 0.0);
    CHECK(c.G == 0.0);
    CHECK_THROWS_WITH_AS(frequency_N(c, 0.4, height_floor(z, 0.4)),
                         doctest::Contains("height vanishes"), std::runtime_error);
}

TEST_CASE("homogeneous harmonics have frequency equal to their degree") {
    const Grid g = Grid::make(2, 257, 1.0);
    for (int k : {1, 2}) {
        const ScalarField u = harmonic(g, k);
        for (double ups : {0.7, 0.9}) {
            const CutoffSpec cut{ups, false};
            for (double r : {0.3, 0.5, 0.7}) {
                const FrequencyComponents c = components(u, kQuad, r, cut);
                const double N = frequency_N(c, r, height_floor(u, r));
                CHECK(N == doctest::Approx(k).epsilon(0.01));
            }
        }
    }
}

TEST_CASE("A = B = H for u = x1 and the Cauchy-Schwarz gap closes") {
    const Grid g = Grid::make(2, 257, 1.0);
    const ScalarField u = harmonic(g, 1);
    const CutoffSpec cut{0.9, false};
    const FrequencyComponents c = components(u, kQuad, 0.5, cut);
    CHECK(c.A == doctest::Approx(c.H).epsilon(0.01));
    CHECK(c.B == doctest::Approx(c.H).epsilon(0.01));
    const double gap = c.A * c.H - c.B * c.B;
    CHECK(gap >= -1e-10 * (c.A * c.H + 1.0));
    CHECK(gap <= 0.01 * c.A * c.H);
}

TEST_CASE("identity defects are small on closed-form fields") {
    const Grid g = Grid::make(2, 257, 1.0);
    const CutoffSpec cut{0.8, false};
    for (int k : {1, 2}) {
        const ScalarField u = harmonic(g, k);
        const VectorField gr = gradient(u);
        for (double r : {0.4, 0.6}) {
            CHECK(height_identity_defect(u, gr, kQuad, r, cut) <= 0.01);
            const DefectPair od = outer_defect(u, gr, kQuad, r, cut);
            CHECK(od.defect <= 0.01);
            CHECK(od.raw_error == 0.0);  // quadratic: e_O vanishes identically
            const DefectPair id = inner_defect(u, gr, kQuad, r, cut);
            CHECK(id.defect <= 0.01);
        }
    }
    // the sharper ramp resolves more slowly; the defects stay moderate
    const CutoffSpec sharp{0.9, false};
    const ScalarField u = harmonic(g, 1);
    const VectorField gr = gradient(u);
    CHECK(height_identity_defect(u, gr, kQuad, 0.5, sharp) <= 0.03);
}

TEST_CASE("zero field gives zero defects and envelopes") {
    const Grid g = Grid::make(2, 65, 1.0);
    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    const VectorField gr = gradient(z);
    const CutoffSpec cut{0.8, false};
    const DefectPair od = outer_defect(z, gr, Lagrangian::power(3.0), 0.5, cut);
    CHECK(od.defect == 0.0);
    CHECK(od.envelope == 0.0);
    const DefectPair id = inner_defect(z, gr, Lagrangian::power(3.0), 0.5, cut);
    CHECK(id.defect == 0.0);
    CHECK(id.envelope == 0.0);
}

TEST_CASE("height identity defect shrinks under refinement") {
    const CutoffSpec cut{0.8, false};
    double defect[2];
    int i = 0;
    for (int n : {65, 129}) {
        const Grid g = Grid::make(2, n, 1.0);
        const ScalarField u = harmonic(g, 2);
        defect[i++] = height_identity_defect(u, gradient(u), kQuad, 0.5, cut);
    }
    CHECK(defect[0] / std::max(defect[1], 1e-15) >= 1.3);
}

TEST_CASE("corrected frequency scan is monotone for homogeneous harmonics") {
    const Grid g = Grid::make(2, 129, 1.0);
    const ScalarField u = harmonic(g, 1);
    const CutoffSpec cut{0.8, false};
    const auto radii = scan_radii(g, cut, 0.2, 0.7, 1.1);
    REQUIRE(radii.size() >= 5);
    const RadialProfile prof = corrected_frequency_scan(u, kQuad, radii, 1.0, 0.5, cut);
    REQUIRE(prof.rows.size() == radii.size());
    const MonotonicityReport rep = monotonicity_report(prof, 1e-3);
    CHECK(rep.violations.empty());
    CHECK(rep.d0_g_monotone);
    CHECK(rep.g_decreasing_to_zero);
    CHECK(rep.min_cs_gap >= 0.0);
    for (const ProfileRow& row : prof.rows) {
        CHECK(row.c.Dl == 0.0);
        CHECK(row.c.D == row.c.D0);
    }
}

TEST_CASE("constant field scans to N = 0 trivially") {
    const Grid g = Grid::make(2, 129, 1.0);
    const ScalarField one = harmonic(g, 0);
    const CutoffSpec cut{0.8, false};
    const auto radii = scan_radii(g, cut, 0.3, 0.6, 1.15);
    const RadialProfile prof = corrected_frequency_scan(one, kQuad, radii, 1.0, 0.5, cut);
    for (const ProfileRow& row : prof.rows) CHECK(row.N == 0.0);
    CHECK(monotonicity_report(prof, 1e-3).violations.empty());
}

TEST_CASE("frequency is insensitive to the cutoff parameter on harmonics") {
    const Grid g = Grid::make(2, 257, 1.0);
    const ScalarField u = harmonic(g, 2);
    const FrequencyComponents a = components(u, kQuad, 0.5, CutoffSpec{0.6, false});
    const FrequencyComponents b = components(u, kQuad, 0.5, CutoffSpec{0.95, false});
    const double Na = frequency_N(a, 0.5, height_floor(u, 0.5));
    const double Nb = frequency_N(b, 0.5, height_floor(u, 0.5));
    CHECK(Na == doctest::Approx(Nb).epsilon(0.01));
}

TEST_CASE("poincare ratio demands a singular center") {
    const Grid g = Grid::make(2, 129, 1.0);
    const CutoffSpec cut{0.9, false};
    const double h = g.spacing();

    const ScalarField xy = sample_field(g, [](const Vec3& x, int) { return x[0] * x[1]; });
    const auto pr = poincare_ratio(xy, gradient(xy), kQuad, 0.5, cut, 5 * h * h, 5 * h);
    CHECK(pr.first == doctest::Approx(2.0).epsilon(0.02));  // r D0 / H = N = k
    CHECK(pr.second > 0.0);

    const ScalarField x1 = harmonic(g, 1);
    CHECK_THROWS_WITH_AS(poincare_ratio(x1, gradient(x1), kQuad, 0.5, cut, 5 * h * h, 5 * h),
                         doctest::Contains("center not singular"), std::runtime_error);

    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    CHECK_THROWS_WITH_AS(poincare_ratio(z, gradient(z), kQuad, 0.5, cut, 5 * h * h, 5 * h),
                         doctest::Contains("height vanishes"), std::runtime_error);
}

TEST_CASE("doubling ratios and vanishing orders of homogeneous fields") {
    const Grid g = Grid::make(2, 257, 1.0);
    const CutoffSpec cut{0.9, false};
    std::vector<double> radii{0.4, 0.5, 0.6, 0.7};

    const ScalarField x1 = harmonic(g, 1);
    const auto d1 = doubling_and_vanishing(x1, Vec3{0, 0, 0}, radii, cut, 10.0);
    CHECK(d1.flag == VanishingFlag::finite_order);
    CHECK(d1.vanishing_order == doctest::Approx(1.0).epsilon(0.05));
    for (double ratio : d1.doubling)
        if (std::isfinite(ratio)) CHECK(ratio == doctest::Approx(16.0).epsilon(0.02));

    const ScalarField xy = sample_field(g, [](const Vec3& x, int) { return x[0] * x[1]; });
    const auto d2 = doubling_and_vanishing(xy, Vec3{0, 0, 0}, radii, cut, 10.0);
    CHECK(d2.vanishing_order == doctest::Approx(2.0).epsilon(0.05));
    for (double ratio : d2.doubling)
        if (std::isfinite(ratio)) CHECK(ratio == doctest::Approx(64.0).epsilon(0.02));

    const ScalarField z = sample_field(g, [](const Vec3&, int) { return 0.0; });
    const auto dz = doubling_and_vanishing(z, Vec3{0, 0, 0}, radii, cut, 10.0);
    CHECK(dz.flag == VanishingFlag::identically_zero);

    CHECK_THROWS_AS(doubling_and_vanishing(x1, Vec3{0, 0, 0}, {0.4, 0.5}, cut, 10.0),
                    std::invalid_argument);
}

TEST_CASE("outer equivalence surrogate B/(r D0)") {
    const Grid g = Grid::make(2, 257, 1.0);
    const CutoffSpec cut{0.9, false};
    const ScalarField x1 = harmonic(g, 1);
    const FrequencyComponents c = components(x1, kQuad, 0.5, cut);
    CHECK(outer_equivalence(c, 0.5) == doctest::Approx(1.0).epsilon(0.01));

    const ScalarField one = harmonic(g, 0);
    const FrequencyComponents c0 = components(one, kQuad, 0.5, cut);
    CHECK_THROWS_WITH_AS(outer_equivalence(c0, 0.5), doctest::Contains("D0 vanishes"),
                         std::runtime_error);
}

TEST_CASE("profile CSV carries the fixed header") {
    const Grid g = Grid::make(2, 65, 1.0);
    const ScalarField u = harmonic(g, 1);
    const CutoffSpec cut{0.8, false};
    const auto radii = scan_radii(g, cut, 0.3, 0.6, 1.2);
    const RadialProfile prof = corrected_frequency_scan(u, kQuad, radii, 1.0, 0.5, cut);
    const std::string csv = profile_csv(prof);
    CHECK(csv.rfind("r,H,D0,Dl,D,G,A,B,N,g,Ncorr,defect_H,defect_outer,defect_inner,env_outer,"
                    "env_inner,doubling,cs_gap\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(prof.rows.size()));
}
