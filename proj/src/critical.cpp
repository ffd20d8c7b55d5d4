#include "uclab/critical.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "uclab/reduce.hpp"

namespace uclab {

std::uint64_t field_fingerprint(const ScalarField& u) {
    // FNV-1a over the raw sample bytes.
    std::uint64_t h = 1469598103934665603ull;
    const auto& v = u.values();
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < v.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

CriticalSet detect_critical(const ScalarField& u, const VectorField& grad, double tol_u,
                            double tol_g) {
    if (!(tol_u > 0.0 && tol_g > 0.0)) throw std::invalid_argument("tolerances must be positive");
    const Grid& g = u.grid();
    const int d = g.dim();
    const auto& uv = u.values();
    CriticalSet set;
    set.tol_u = tol_u;
    set.tol_g = tol_g;
    set.field_fingerprint = field_fingerprint(u);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.in_ball(k)) continue;
        // Mask-pole nodes with no in-ball neighbor along some axis have a
        // degenerate (zero) gradient slot rather than a measurement; skip
        // them rather than report noise.
        const Index3 ix = g.unflatten(k);
        bool degenerate = false;
        for (int a = 0; a < d && !degenerate; ++a)
            degenerate = stencil_kind(g, ix, a) == Stencil::none;
        if (degenerate) continue;
        if (std::fabs(uv[k]) <= tol_u && norm(grad.at(k), d) <= tol_g) set.nodes.push_back(k);
    }
    return set;
}

CriticalSet detect_critical(const ScalarField& u, double tol_u, double tol_g) {
    return detect_critical(u, gradient(u), tol_u, tol_g);
}

BoxDimension box_dimension(const CriticalSet& set, const Grid& g,
                           const std::vector<double>& scales) {
    if (scales.size() < 3) throw std::invalid_argument("need at least 3 box scales");
    for (double s : scales)
        if (s < 2.0 * g.spacing()) throw std::invalid_argument("box scale under-resolved");

    BoxDimension out;
    out.scales = scales;
    if (set.nodes.empty()) {
        out.empty = true;
        return out;
    }

    const int d = g.dim();
    const double R = g.radius();
    for (double s : scales) {
        std::vector<std::uint64_t> ids;
        ids.reserve(set.nodes.size());
        for (std::size_t k : set.nodes) {
            const Vec3 x = g.position(k);
            std::uint64_t id = 0;
            for (int a = 0; a < d; ++a) {
                const auto box = static_cast<std::uint64_t>(
                    std::min(std::floor((x[a] + R) / s), std::floor(2.0 * R / s)));
                id = id * 4096 + box;
            }
            ids.push_back(id);
        }
        std::sort(ids.begin(), ids.end());
        out.counts.push_back(
            static_cast<std::int64_t>(std::unique(ids.begin(), ids.end()) - ids.begin()));
    }

    // Keep well-populated scales; fall back to the full list when too few.
    std::vector<std::pair<double, std::int64_t>> rows;
    for (std::size_t i = 0; i < scales.size(); ++i)
        if (out.counts[i] >= 2) rows.push_back({scales[i], out.counts[i]});
    if (rows.size() >= 3) {
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        rows.resize(3);
    } else {
        rows.clear();
        for (std::size_t i = 0; i < scales.size(); ++i)
            rows.push_back({scales[i], out.counts[i]});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& [s, c] : rows) {
        const double x = std::log(1.0 / s);
        const double y = std::log(static_cast<double>(c));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    out.dim = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    return out;
}

double zero_set_volume(const ScalarField& u, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const Grid& g = u.grid();
    const auto& uv = u.values();
    const double hits = det_sum(g.node_count(), [&](std::size_t k) -> double {
        if (!g.in_ball(k)) return 0.0;
        return std::fabs(uv[k]) <= tol ? 1.0 : 0.0;
    });
    const double total = det_sum(g.node_count(), [&](std::size_t k) -> double {
        return g.in_ball(k) ? 1.0 : 0.0;
    });
    return hits / total;
}

}  // namespace uclab
