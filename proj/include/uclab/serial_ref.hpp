#pragma once

#include "uclab/grid.hpp"
#include "uclab/quadrature.hpp"

namespace uclab::serial {

// Straight-line single-threaded reference kernels. Same semantics as the
// parallel versions but plain left-to-right accumulation; tests compare the
// two within rounding, the benchmark compares their speed.

double weighted_integral(const ScalarField& expr, Weight w, double r, const CutoffSpec& cut);
VectorField gradient(const ScalarField& field);
double ball_mean_square(const ScalarField& u, const Vec3& x0, double r);

}  // namespace uclab::serial
