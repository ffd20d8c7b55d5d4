#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uclab/grid.hpp"

namespace uclab {

enum class CubeClass : std::uint8_t { subdivided, excess, height, residual };
std::string cube_class_name(CubeClass c);

// Ternary cube tree over [-1,1]^d. A cube at level j has half-side
// l = 3^{1-j} and center num * 3^{1-j} with integer num, so centers and
// ancestry are exact. The criterion ball is B_L = B_{3l}(center).
struct CubeNode {
    std::array<std::int64_t, 3> num{0, 0, 0};
    int level = 1;
    int parent = -1;
    int first_child = -1;  // 3^d consecutive children when subdivided
    CubeClass cls = CubeClass::subdivided;
    double excess_integral = 0.0;  // int_{B_L} |grad u|^2  (cube coordinates)
    double height_integral = 0.0;  // int_{B_L} u^2
};

class WhitneyDecomposition {
public:
    int d = 2;
    double C0 = 1.0;
    double alpha = 0.25;
    int max_depth = 5;
    double scale = 1.0;  // physical length of one cube unit: R / (3 sqrt d)
    std::vector<CubeNode> nodes;

    double half_side(const CubeNode& c) const { return std::pow(3.0, 1 - c.level); }
    Vec3 center_cube(const CubeNode& c) const {
        Vec3 p{0, 0, 0};
        const double s = half_side(c);
        for (int a = 0; a < d; ++a) p[a] = static_cast<double>(c.num[a]) * s;
        return p;
    }
    std::vector<int> leaves() const;
    std::vector<int> residual() const;        // the Gamma approximation
    double residual_volume_fraction() const;  // |Gamma| / 2^d
};

// Classifies in the excess -> height -> subdivide order with the >= criteria
//   excess: int_{B_L} |grad u|^2 >= C0 l^{d+2 alpha}
//   height: int_{B_L} u^2      >= C0 l^{d+2+2 alpha}
// Integrals are midpoint sums in cube coordinates y = x / scale with
// scale = R / (3 sqrt d), clipped to the lattice ball.
WhitneyDecomposition decompose(const ScalarField& u, const VectorField& grad, double C0,
                               double alpha, int max_depth);
WhitneyDecomposition decompose(const ScalarField& u, double C0, double alpha, int max_depth);

std::vector<int> residual_set(const WhitneyDecomposition& w);

struct WhitneyVerification {
    bool partition_ok = false;  // leaf interiors disjoint, union = [-1,1]^d (exact)
    bool criteria_ok = false;   // every class matches its defining inequalities
    // Father estimates, maxima over classified leaves with a father:
    double excess_C_u = 0.0;     // int_{B_H} u^2 / (l(L)^2 int_{B_L} |grad u|^2)
    double excess_C_grad = 0.0;  // int_{B_H} |grad u|^2 / int_{B_L} |grad u|^2
    double height_C_u = 0.0;     // int_{B_H} u^2 / int_{B_L} u^2
    double height_C_grad = 0.0;  // l(L)^2 int_{B_H} |grad u|^2 / int_{B_L} u^2
    // Contact set: every residual cube must contain a node with
    // |u| <= tol_u and |grad u| <= tol_g (physical units).
    bool contact_ok = false;
    double contact_worst = 0.0;  // max over residual cubes of min-node max ratio
    int residual_count = 0;
    int excess_count = 0, height_count = 0, subdivided_count = 0;
};

WhitneyVerification verify_decomposition(const WhitneyDecomposition& w, const ScalarField& u,
                                         const VectorField& grad, double contact_tol_u,
                                         double contact_tol_g);

struct CubeSupReport {
    double measured_C = 0.0;  // max over W-cubes meeting B_r of (sup|u| + sup|grad u|) / D0^lambda
    bool violation = false;   // D0 = 0 with a nonzero sup
    int cubes = 0;
};

// Lemma-style sup bound over classified cubes meeting B_r (physical).
CubeSupReport cube_sup_check(const WhitneyDecomposition& w, const ScalarField& u,
                             const VectorField& grad, double D0_r, double r, double lambda);

}  // namespace uclab
