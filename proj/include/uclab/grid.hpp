#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace uclab {

// Runtime-dimensional point/vector; unused trailing components stay 0.
using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

inline double dot(const Vec3& a, const Vec3& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}
inline double norm2(const Vec3& a, int d) { return dot(a, a, d); }
inline double norm(const Vec3& a, int d) { return std::sqrt(norm2(a, d)); }

// Uniform lattice over the cube [-R,R]^d; the active domain is the closed
// ball |x| <= R. n is odd so the origin is a lattice node (the frequency
// center must be a node). Copies are cheap: the in-ball mask is shared.
class Grid {
public:
    static Grid make(int d, int n, double R);

    int dim() const { return d_; }
    int extent() const { return n_; }
    double radius() const { return R_; }
    double spacing() const { return h_; }
    std::size_t node_count() const { return count_; }
    int center_index() const { return center_; }

    // coord(center_index()) is exactly 0.
    double coord(int i) const { return (i - center_) * h_; }

    std::size_t flatten(const Index3& ix) const {
        std::size_t k = static_cast<std::size_t>(ix[0]);
        for (int a = 1; a < d_; ++a) k = k * n_ + static_cast<std::size_t>(ix[a]);
        return k;
    }
    Index3 unflatten(std::size_t k) const {
        Index3 ix{0, 0, 0};
        for (int a = d_ - 1; a >= 0; --a) {
            ix[a] = static_cast<int>(k % n_);
            k /= n_;
        }
        return ix;
    }
    Vec3 position(const Index3& ix) const {
        Vec3 p{0.0, 0.0, 0.0};
        for (int a = 0; a < d_; ++a) p[a] = coord(ix[a]);
        return p;
    }
    Vec3 position(std::size_t k) const { return position(unflatten(k)); }

    bool index_valid(const Index3& ix) const {
        for (int a = 0; a < d_; ++a)
            if (ix[a] < 0 || ix[a] >= n_) return false;
        return true;
    }
    bool in_ball(std::size_t k) const { return (*mask_)[k] != 0; }
    bool in_ball(const Index3& ix) const { return in_ball(flatten(ix)); }
    const std::vector<std::uint8_t>& mask() const { return *mask_; }

    bool same_layout(const Grid& o) const {
        return d_ == o.d_ && n_ == o.n_ && R_ == o.R_;
    }

private:
    Grid() = default;
    int d_ = 0, n_ = 0, center_ = 0;
    double R_ = 0.0, h_ = 0.0;
    std::size_t count_ = 0;
    std::shared_ptr<const std::vector<std::uint8_t>> mask_;
};

// Immutable nodewise samples on a Grid. Out-of-ball nodes hold 0 and never
// contribute to integrals.
class ScalarField {
public:
    ScalarField(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t k) const { return values_[k]; }
    double at(const Index3& ix) const { return values_[grid_.flatten(ix)]; }
    double sup_abs() const;  // max |u| over in-ball nodes (cached)

private:
    Grid grid_;
    std::vector<double> values_;
    double sup_abs_ = 0.0;
};

// d component arrays, one value per node; zero at out-of-ball nodes.
class VectorField {
public:
    VectorField(Grid grid, std::array<std::vector<double>, 3> comps)
        : grid_(std::move(grid)), comps_(std::move(comps)) {}

    const Grid& grid() const { return grid_; }
    const std::vector<double>& component(int a) const { return comps_[a]; }
    Vec3 at(std::size_t k) const {
        Vec3 v{0.0, 0.0, 0.0};
        for (int a = 0; a < grid_.dim(); ++a) v[a] = comps_[a][k];
        return v;
    }

private:
    Grid grid_;
    std::array<std::vector<double>, 3> comps_;
};

// Radial cutoff phi with ramp parameter upsilon in (0,1).
// Default (continuous) variant: 1 on (0,upsilon], linear ramp on (upsilon,1],
// 0 beyond; upsilon -> 1 recovers the indicator of [0,1]. literal_paper
// switches to the ramp supported on (1-upsilon,1], which is discontinuous at
// 1-upsilon unless upsilon = 1/2; kept for comparison only.
struct CutoffSpec {
    double upsilon = 0.9;
    bool literal_paper = false;

    double ramp_start() const { return literal_paper ? 1.0 - upsilon : upsilon; }
    double phi(double t) const {
        if (t <= ramp_start()) return 1.0;
        if (t <= 1.0) return (1.0 - t) / (1.0 - upsilon);
        return 0.0;
    }
    double minus_phi_prime(double t) const {
        if (t > ramp_start() && t <= 1.0) return 1.0 / (1.0 - upsilon);
        return 0.0;
    }
};

// f(position, d) sampled at every in-ball node; throws on a non-finite value,
// naming the node.
ScalarField sample_field(const Grid& grid, const std::function<double(const Vec3&, int)>& f);

// Central differences at interior nodes, one-sided where an axis neighbor
// leaves the ball; zero where no in-ball neighbor exists along an axis.
VectorField gradient(const ScalarField& field);

// Per-node, per-axis stencil of gradient(); shared with the solver so the
// discrete energy gradient and el_residual use identical difference operators.
enum class Stencil : std::uint8_t { none = 0, central, fwd, bwd };
Stencil stencil_kind(const Grid& g, const Index3& ix, int axis);

// Flat binary layout: int32 d, int32 n, float64 R (little-endian), then n^d
// float64 samples in row-major order.
void write_field(const std::string& path, const ScalarField& field);
ScalarField read_field(const std::string& path);

}  // namespace uclab
