#include "uclab/grid.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "uclab/reduce.hpp"

static_assert(std::endian::native == std::endian::little,
              "field serialization assumes a little-endian host");

namespace uclab {

Grid Grid::make(int d, int n, double R) {
    if (d != 2 && d != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
    if (n % 2 == 0) throw std::invalid_argument("even lattice size: origin would be off-lattice");
    if (n < 33) throw std::invalid_argument("lattice size below 33: quadrature unreliable");
    if (!(R > 0.0)) throw std::invalid_argument("radius must be positive");

    Grid g;
    g.d_ = d;
    g.n_ = n;
    g.R_ = R;
    g.h_ = 2.0 * R / (n - 1);
    g.center_ = (n - 1) / 2;
    g.count_ = 1;
    for (int a = 0; a < d; ++a) g.count_ *= static_cast<std::size_t>(n);

    auto mask = std::make_shared<std::vector<std::uint8_t>>(g.count_, 0);
    const double r2cap = R * R * (1.0 + 1e-12);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(g.count_); ++k) {
        const Vec3 x = g.position(static_cast<std::size_t>(k));
        (*mask)[static_cast<std::size_t>(k)] = (norm2(x, d) <= r2cap) ? 1 : 0;
    }
    g.mask_ = std::move(mask);
    return g;
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.node_count())
        throw std::invalid_argument("sample count does not match grid");
    sup_abs_ = det_max(values_.size(), [&](std::size_t k) {
        return grid_.in_ball(k) ? std::fabs(values_[k]) : 0.0;
    });
}

double ScalarField::sup_abs() const { return sup_abs_; }

ScalarField sample_field(const Grid& grid, const std::function<double(const Vec3&, int)>& f) {
    std::vector<double> v(grid.node_count(), 0.0);
    const int d = grid.dim();
    std::size_t bad = std::numeric_limits<std::size_t>::max();
#pragma omp parallel for schedule(static) reduction(min : bad)
    for (long long k = 0; k < static_cast<long long>(grid.node_count()); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        if (!grid.in_ball(ks)) continue;
        const double val = f(grid.position(ks), d);
        if (!std::isfinite(val)) {
            bad = std::min(bad, ks);
            continue;
        }
        v[ks] = val;
    }
    if (bad != std::numeric_limits<std::size_t>::max()) {
        const Index3 ix = grid.unflatten(bad);
        const Vec3 x = grid.position(bad);
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "non-finite sample at node (%d,%d,%d), x = (%g,%g,%g)", ix[0], ix[1],
                      grid.dim() == 3 ? ix[2] : 0, x[0], x[1], x[2]);
        throw std::invalid_argument(msg);
    }
    return ScalarField(grid, std::move(v));
}

Stencil stencil_kind(const Grid& g, const Index3& ix, int axis) {
    if (!g.in_ball(ix)) return Stencil::none;
    Index3 up = ix, dn = ix;
    up[axis] += 1;
    dn[axis] -= 1;
    const bool has_up = g.index_valid(up) && g.in_ball(up);
    const bool has_dn = g.index_valid(dn) && g.in_ball(dn);
    if (has_up && has_dn) return Stencil::central;
    if (has_up) return Stencil::fwd;
    if (has_dn) return Stencil::bwd;
    return Stencil::none;
}

VectorField gradient(const ScalarField& field) {
    const Grid& g = field.grid();
    const int d = g.dim();
    const double h = g.spacing();
    const auto& u = field.values();
    std::array<std::vector<double>, 3> comps;
    for (int a = 0; a < d; ++a) comps[a].assign(g.node_count(), 0.0);

#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(g.node_count()); ++k) {
        const auto ks = static_cast<std::size_t>(k);
        if (!g.in_ball(ks)) continue;
        const Index3 ix = g.unflatten(ks);
        for (int a = 0; a < d; ++a) {
            Index3 up = ix, dn = ix;
            up[a] += 1;
            dn[a] -= 1;
            double v = 0.0;
            switch (stencil_kind(g, ix, a)) {
                case Stencil::central:
                    v = (u[g.flatten(up)] - u[g.flatten(dn)]) / (2.0 * h);
                    break;
                case Stencil::fwd:
                    v = (u[g.flatten(up)] - u[ks]) / h;
                    break;
                case Stencil::bwd:
                    v = (u[ks] - u[g.flatten(dn)]) / h;
                    break;
                case Stencil::none:
                    v = 0.0;
                    break;
            }
            comps[a][ks] = v;
        }
    }
    return VectorField(g, std::move(comps));
}

void write_field(const std::string& path, const ScalarField& field) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    const std::int32_t d = field.grid().dim();
    const std::int32_t n = field.grid().extent();
    const double R = field.grid().radius();
    out.write(reinterpret_cast<const char*>(&d), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&R), 8);
    out.write(reinterpret_cast<const char*>(field.values().data()),
              static_cast<std::streamsize>(field.values().size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

ScalarField read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::int32_t d = 0, n = 0;
    double R = 0.0;
    in.read(reinterpret_cast<char*>(&d), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    in.read(reinterpret_cast<char*>(&R), 8);
    if (!in) throw std::runtime_error("truncated field header: " + path);
    Grid g = Grid::make(d, n, R);
    std::vector<double> v(g.node_count());
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated field payload: " + path);
    return ScalarField(std::move(g), std::move(v));
}

}  // namespace uclab
