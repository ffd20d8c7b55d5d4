#pragma once

#include <cstdint>
#include <vector>

#include "uclab/grid.hpp"

namespace uclab {

// Lattice nodes where |u| <= tol_u and |grad u| <= tol_g, in lexicographic
// (row-major) order.
struct CriticalSet {
    std::vector<std::size_t> nodes;
    double tol_u = 0.0, tol_g = 0.0;
    std::uint64_t field_fingerprint = 0;
};

CriticalSet detect_critical(const ScalarField& u, const VectorField& grad, double tol_u,
                            double tol_g);
CriticalSet detect_critical(const ScalarField& u, double tol_u, double tol_g);

struct BoxDimension {
    bool empty = false;
    double dim = 0.0;
    std::vector<double> scales;        // box sizes actually supplied
    std::vector<std::int64_t> counts;  // occupied boxes per scale
};

// Upper box-counting estimate: least-squares slope of log(count) against
// log(1/size). Scales with fewer than 2 occupied boxes are discarded; when
// at least 3 well-populated scales remain, the three largest of them are
// used, otherwise all supplied scales are (slope 0 for a single box).
BoxDimension box_dimension(const CriticalSet& set, const Grid& g,
                           const std::vector<double>& scales);

// Fraction of in-ball nodes with |u| <= tol, the weak-unique-continuation
// probe.
double zero_set_volume(const ScalarField& u, double tol);

std::uint64_t field_fingerprint(const ScalarField& u);

}  // namespace uclab
