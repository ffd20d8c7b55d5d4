#include "uclab/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "uclab/reduce.hpp"

namespace uclab {

std::string cube_class_name(CubeClass c) {
    switch (c) {
        case CubeClass::subdivided: return "subdivided";
        case CubeClass::excess: return "excess";
        case CubeClass::height: return "height";
        case CubeClass::residual: return "residual";
    }
    return "?";
}

std::vector<int> WhitneyDecomposition::leaves() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].cls != CubeClass::subdivided) out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> WhitneyDecomposition::residual() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].cls == CubeClass::residual) out.push_back(static_cast<int>(i));
    return out;
}

double WhitneyDecomposition::residual_volume_fraction() const {
    // Each residual leaf sits at max_depth and covers 3^{-d(max_depth-1)} of
    // the cube; the count is exact, the fraction a double.
    std::int64_t count = 0;
    for (const CubeNode& c : nodes)
        if (c.cls == CubeClass::residual) ++count;
    double cell = 1.0;
    for (int j = 1; j < max_depth; ++j) cell /= std::pow(3.0, d);
    return static_cast<double>(count) * cell;
}

namespace {

struct BallIntegrals {
    double excess = 0.0, height = 0.0;  // cube-coordinate integrals over B_L
    std::int64_t nodes = 0;
};

// Midpoint sum over lattice nodes inside the physical image of B_L, clipped
// to the mask; converts to cube coordinates (y = x/scale) so the excess
// integrand carries scale^2 and both measures carry scale^-d.
BallIntegrals ball_integrals(const Grid& g, const ScalarField& u, const VectorField& grad,
                             const Vec3& center_phys, double radius_phys, double scale) {
    const int d = g.dim();
    const double h = g.spacing();
    const auto& uv = u.values();

    Index3 lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        const int c = g.center_index();
        lo[a] = std::max(0, static_cast<int>(std::floor((center_phys[a] - radius_phys) / h)) + c);
        hi[a] = std::min(g.extent() - 1,
                         static_cast<int>(std::ceil((center_phys[a] + radius_phys) / h)) + c);
        if (lo[a] > hi[a]) return {};
    }
    std::array<std::size_t, 3> span{1, 1, 1};
    for (int a = 0; a < d; ++a) span[a] = static_cast<std::size_t>(hi[a] - lo[a] + 1);
    std::size_t total = 1;
    for (int a = 0; a < d; ++a) total *= span[a];

    const double r2 = radius_phys * radius_phys * (1.0 + 1e-12);
    std::int64_t cnt = 0;
    auto node_of = [&](std::size_t t) {
        Index3 ix = lo;
        if (d == 2) {
            ix[0] = lo[0] + static_cast<int>(t / span[1]);
            ix[1] = lo[1] + static_cast<int>(t % span[1]);
        } else {
            ix[0] = lo[0] + static_cast<int>(t / (span[1] * span[2]));
            const std::size_t rem = t % (span[1] * span[2]);
            ix[1] = lo[1] + static_cast<int>(rem / span[2]);
            ix[2] = lo[2] + static_cast<int>(rem % span[2]);
        }
        return ix;
    };
    auto inside = [&](std::size_t t, std::size_t& k) {
        const Index3 ix = node_of(t);
        k = g.flatten(ix);
        if (!g.in_ball(k)) return false;
        const Vec3 x = g.position(ix);
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) dist2 += (x[a] - center_phys[a]) * (x[a] - center_phys[a]);
        return dist2 <= r2;
    };

    const double exc = det_sum(total, [&](std::size_t t) -> double {
        std::size_t k;
        return inside(t, k) ? norm2(grad.at(k), d) : 0.0;
    });
    const double hgt = det_sum(total, [&](std::size_t t) -> double {
        std::size_t k;
        return inside(t, k) ? uv[k] * uv[k] : 0.0;
    });
#pragma omp parallel for schedule(static) reduction(+ : cnt)
    for (long long t = 0; t < static_cast<long long>(total); ++t) {
        std::size_t k;
        if (inside(static_cast<std::size_t>(t), k)) ++cnt;
    }

    const double hd = std::pow(h, d);
    BallIntegrals out;
    out.nodes = cnt;
    out.height = hgt * hd / std::pow(scale, d);
    out.excess = exc * hd * scale * scale / std::pow(scale, d);
    return out;
}

struct Builder {
    const Grid& g;
    const ScalarField& u;
    const VectorField& grad;
    WhitneyDecomposition& w;
    std::int64_t min_nodes = 0;

    void classify(int node_index) {
        CubeNode& c0 = w.nodes[node_index];
        const double ell = w.half_side(c0);
        Vec3 center{0, 0, 0};
        for (int a = 0; a < w.d; ++a)
            center[a] = static_cast<double>(c0.num[a]) * ell * w.scale;
        const BallIntegrals bi =
            ball_integrals(g, u, grad, center, 3.0 * ell * w.scale, w.scale);
        if (bi.nodes < min_nodes) throw std::runtime_error("depth exceeds resolution");
        c0.excess_integral = bi.excess;
        c0.height_integral = bi.height;

        const double exc_threshold = w.C0 * std::pow(ell, w.d + 2.0 * w.alpha);
        const double hgt_threshold = w.C0 * std::pow(ell, w.d + 2.0 + 2.0 * w.alpha);
        if (bi.excess >= exc_threshold) {
            c0.cls = CubeClass::excess;
            return;
        }
        if (bi.height >= hgt_threshold) {
            c0.cls = CubeClass::height;
            return;
        }
        if (c0.level >= w.max_depth) {
            c0.cls = CubeClass::residual;
            return;
        }
        c0.cls = CubeClass::subdivided;
        const int first = static_cast<int>(w.nodes.size());
        w.nodes[node_index].first_child = first;
        const int nsons = w.d == 2 ? 9 : 27;
        const auto num = w.nodes[node_index].num;
        const int level = w.nodes[node_index].level;
        for (int s = 0; s < nsons; ++s) {
            CubeNode son;
            int t = s;
            for (int a = w.d - 1; a >= 0; --a) {
                const int delta = t % 3 - 1;  // -1, 0, 1 in lexicographic order
                t /= 3;
                son.num[a] = 3 * num[a] + 2 * delta;
            }
            son.level = level + 1;
            son.parent = node_index;
            w.nodes.push_back(son);
        }
        for (int s = 0; s < nsons; ++s) classify(first + s);
    }
};

}  // namespace

WhitneyDecomposition decompose(const ScalarField& u, const VectorField& grad, double C0,
                               double alpha, int max_depth) {
    const Grid& g = u.grid();
    const int d = g.dim();
    if (!(C0 > 0.0)) throw std::invalid_argument("C0 must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("alpha must be in (0, 1/2)");
    if (max_depth < 1 || max_depth > 8) throw std::invalid_argument("max_depth must be in [1,8]");

    WhitneyDecomposition w;
    w.d = d;
    w.C0 = C0;
    w.alpha = alpha;
    w.max_depth = max_depth;
    w.scale = g.radius() / (3.0 * std::sqrt(static_cast<double>(d)));

    // The smallest ball ever integrated sits at level max_depth with radius
    // 3^{2-max_depth} cube units; refuse outright when it cannot hold the
    // 4^d-node quadrature floor.
    const double h_cube = g.spacing() / w.scale;
    if (std::pow(3.0, 2 - max_depth) / h_cube < 2.0)
        throw std::runtime_error("depth exceeds resolution");

    CubeNode root;
    w.nodes.push_back(root);
    Builder b{g, u, grad, w, d == 2 ? 16 : 64};
    b.classify(0);
    return w;
}

WhitneyDecomposition decompose(const ScalarField& u, double C0, double alpha, int max_depth) {
    return decompose(u, gradient(u), C0, alpha, max_depth);
}

std::vector<int> residual_set(const WhitneyDecomposition& w) { return w.residual(); }

WhitneyVerification verify_decomposition(const WhitneyDecomposition& w, const ScalarField& u,
                                         const VectorField& grad, double contact_tol_u,
                                         double contact_tol_g) {
    const Grid& g = u.grid();
    const int d = w.d;
    WhitneyVerification rep;

    // (1) Partition: mark the finest-level integer cells each leaf covers;
    // every cell must be covered exactly once. Exact integer arithmetic.
    {
        const int per_axis_pow = w.max_depth - 1;
        std::int64_t cells_per_axis = 1;
        for (int j = 0; j < per_axis_pow; ++j) cells_per_axis *= 3;
        std::size_t total = 1;
        for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(cells_per_axis);
        std::vector<std::uint8_t> cover(total, 0);
        bool ok = true;
        for (const CubeNode& c : w.nodes) {
            if (c.cls == CubeClass::subdivided) continue;
            // Cube at level j covers 3^{max_depth-j} cells per axis starting at
            // (num - 1) * 3^{max_depth-j-1}... derive from exact center:
            // center = num * 3^{1-j}, half-side 3^{1-j}; in units of the finest
            // cell size 2 * 3^{1-max_depth}, the cube spans
            // [(num-1) * 3^{max_depth-j}, (num+1) * 3^{max_depth-j}] / 2 shifted
            // by cells_per_axis/2... use direct integer bounds:
            std::int64_t span = 1;
            for (int j = c.level; j < w.max_depth; ++j) span *= 3;
            bool bad = false;
            std::array<std::int64_t, 3> lo{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                // lowest covered cell index: (num[a]-1)*span/2 + cells/2
                const std::int64_t two_lo = (c.num[a] - 1) * span + cells_per_axis;
                if (two_lo % 2 != 0) {
                    bad = true;
                    break;
                }
                lo[a] = two_lo / 2;
                if (lo[a] < 0 || lo[a] + span > cells_per_axis) {
                    bad = true;
                    break;
                }
            }
            if (bad) {
                ok = false;
                continue;
            }
            std::array<std::int64_t, 3> it{0, 0, 0};
            const std::int64_t sweep = d == 2 ? span * span : span * span * span;
            for (std::int64_t t = 0; t < sweep; ++t) {
                std::int64_t rem = t;
                for (int a = d - 1; a >= 0; --a) {
                    it[a] = lo[a] + rem % span;
                    rem /= span;
                }
                std::size_t idx = static_cast<std::size_t>(it[0]);
                for (int a = 1; a < d; ++a)
                    idx = idx * static_cast<std::size_t>(cells_per_axis) +
                          static_cast<std::size_t>(it[a]);
                if (cover[idx]) ok = false;
                cover[idx]++;
            }
        }
        for (std::uint8_t v : cover)
            if (v != 1) ok = false;
        rep.partition_ok = ok;
    }

    // (2) Criteria: recompute both integrals per node; the quadrature is
    // deterministic, so classified nodes must reproduce their inequalities
    // exactly and internal nodes must fail both.
    {
        bool ok = true;
        for (const CubeNode& c : w.nodes) {
            const double ell = w.half_side(c);
            Vec3 center{0, 0, 0};
            for (int a = 0; a < d; ++a)
                center[a] = static_cast<double>(c.num[a]) * ell * w.scale;
            const BallIntegrals bi =
                ball_integrals(g, u, grad, center, 3.0 * ell * w.scale, w.scale);
            const double exc_thr = w.C0 * std::pow(ell, d + 2.0 * w.alpha);
            const double hgt_thr = w.C0 * std::pow(ell, d + 2.0 + 2.0 * w.alpha);
            if (bi.excess != c.excess_integral || bi.height != c.height_integral) ok = false;
            switch (c.cls) {
                case CubeClass::excess:
                    if (!(bi.excess >= exc_thr)) ok = false;
                    break;
                case CubeClass::height:
                    if (bi.excess >= exc_thr || !(bi.height >= hgt_thr)) ok = false;
                    break;
                case CubeClass::subdivided:
                case CubeClass::residual:
                    if (bi.excess >= exc_thr || bi.height >= hgt_thr) ok = false;
                    break;
            }
            switch (c.cls) {
                case CubeClass::excess: rep.excess_count++; break;
                case CubeClass::height: rep.height_count++; break;
                case CubeClass::subdivided: rep.subdivided_count++; break;
                case CubeClass::residual: rep.residual_count++; break;
            }
        }
        rep.criteria_ok = ok;
    }

    // (3) Father estimates for classified leaves.
    for (const CubeNode& c : w.nodes) {
        if (c.parent < 0) continue;
        const CubeNode& f = w.nodes[static_cast<std::size_t>(c.parent)];
        const double ell = w.half_side(c);
        if (c.cls == CubeClass::excess && c.excess_integral > 0.0) {
            rep.excess_C_u = std::max(rep.excess_C_u,
                                      f.height_integral / (ell * ell * c.excess_integral));
            rep.excess_C_grad = std::max(rep.excess_C_grad,
                                         f.excess_integral / c.excess_integral);
        }
        if (c.cls == CubeClass::height && c.height_integral > 0.0) {
            rep.height_C_u = std::max(rep.height_C_u, f.height_integral / c.height_integral);
            rep.height_C_grad = std::max(rep.height_C_grad,
                                         ell * ell * f.excess_integral / c.height_integral);
        }
    }

    // (4) Contact set: every residual cube contains a node with
    // |u| <= tol_u and |grad u| <= tol_g.
    {
        bool ok = true;
        double worst = 0.0;
        const auto& uv = u.values();
        for (const CubeNode& c : w.nodes) {
            if (c.cls != CubeClass::residual) continue;
            const double ell = w.half_side(c);
            const double ell_phys = ell * w.scale;
            Vec3 center{0, 0, 0};
            for (int a = 0; a < d; ++a)
                center[a] = static_cast<double>(c.num[a]) * ell * w.scale;
            double best = std::numeric_limits<double>::infinity();
            Index3 lo{0, 0, 0}, hi{0, 0, 0};
            const double h = g.spacing();
            for (int a = 0; a < d; ++a) {
                lo[a] = std::max(0, static_cast<int>(std::ceil((center[a] - ell_phys) / h)) +
                                        g.center_index());
                hi[a] = std::min(g.extent() - 1,
                                 static_cast<int>(std::floor((center[a] + ell_phys) / h)) +
                                     g.center_index());
            }
            Index3 ix{0, 0, 0};
            for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
                for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
                    for (int i2 = (d == 3 ? lo[2] : 0); i2 <= (d == 3 ? hi[2] : 0); ++i2) {
                        ix = {i0, i1, i2};
                        const std::size_t k = g.flatten(ix);
                        if (!g.in_ball(k)) continue;
                        const double ru = std::fabs(uv[k]) / contact_tol_u;
                        const double rg = norm(grad.at(k), d) / contact_tol_g;
                        best = std::min(best, std::max(ru, rg));
                    }
            if (!std::isfinite(best)) {
                // No node inside the residual cube; fall back to the nearest node.
                Index3 cc{0, 0, 0};
                for (int a = 0; a < d; ++a)
                    cc[a] = std::clamp(static_cast<int>(std::lround(center[a] / h)) +
                                           g.center_index(),
                                       0, g.extent() - 1);
                const std::size_t k = g.flatten(cc);
                best = std::max(std::fabs(uv[k]) / contact_tol_u,
                                norm(grad.at(k), d) / contact_tol_g);
            }
            worst = std::max(worst, best);
            if (best > 1.0) ok = false;
        }
        rep.contact_ok = ok;
        rep.contact_worst = worst;
    }
    return rep;
}

CubeSupReport cube_sup_check(const WhitneyDecomposition& w, const ScalarField& u,
                             const VectorField& grad, double D0_r, double r, double lambda) {
    const Grid& g = u.grid();
    const int d = w.d;
    const auto& uv = u.values();
    CubeSupReport rep;
    const double h = g.spacing();

    for (const CubeNode& c : w.nodes) {
        if (c.cls != CubeClass::excess && c.cls != CubeClass::height) continue;
        const double ell_phys = w.half_side(c) * w.scale;
        Vec3 center{0, 0, 0};
        for (int a = 0; a < d; ++a)
            center[a] = static_cast<double>(c.num[a]) * w.half_side(c) * w.scale;
        // Distance from the cube (a box) to the origin.
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) {
            const double gap = std::max(std::fabs(center[a]) - ell_phys, 0.0);
            dist2 += gap * gap;
        }
        if (dist2 > r * r) continue;
        ++rep.cubes;

        double sup = 0.0;
        Index3 lo{0, 0, 0}, hi{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            lo[a] = std::max(0, static_cast<int>(std::ceil((center[a] - ell_phys) / h)) +
                                    g.center_index());
            hi[a] = std::min(g.extent() - 1,
                             static_cast<int>(std::floor((center[a] + ell_phys) / h)) +
                                 g.center_index());
        }
        for (int i0 = lo[0]; i0 <= hi[0]; ++i0)
            for (int i1 = lo[1]; i1 <= hi[1]; ++i1)
                for (int i2 = (d == 3 ? lo[2] : 0); i2 <= (d == 3 ? hi[2] : 0); ++i2) {
                    const std::size_t k = g.flatten({i0, i1, i2});
                    if (!g.in_ball(k)) continue;
                    sup = std::max(sup, std::fabs(uv[k]) + norm(grad.at(k), d));
                }
        if (D0_r <= 0.0) {
            if (sup > 0.0) rep.violation = true;
            continue;
        }
        rep.measured_C = std::max(rep.measured_C, sup / std::pow(D0_r, lambda));
    }
    return rep;
}

}  // namespace uclab
