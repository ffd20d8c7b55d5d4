// Timing harness comparing the OpenMP kernels against the serial reference
// implementations on the hot paths: cutoff-weighted quadrature, the nodal
// gradient sweep and the ball mean square. Usage: bench_kernels [n] [reps]

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "uclab/quadrature.hpp"
#include "uclab/serial_ref.hpp"

using namespace uclab;
using clk = std::chrono::steady_clock;

namespace {

template <class F>
double time_ms(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = clk::now();
        f();
        const auto t1 = clk::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

volatile double sink;

}  // namespace

int main(int argc, char** argv) {
    const int n = argc > 1 ? std::atoi(argv[1]) : 257;
    const int reps = argc > 2 ? std::atoi(argv[2]) : 5;

    const Grid g = Grid::make(2, n, 1.0);
    const ScalarField u =
        sample_field(g, [](const Vec3& x, int) { return std::sin(3.0 * x[0]) * x[1] + x[0]; });
    const CutoffSpec cut{0.9, false};
    const double r = 0.6;

    std::printf("n = %d, nodes = %zu, threads = %d, reps = %d (best-of)\n", n, g.node_count(),
                omp_get_max_threads(), reps);
    std::printf("%-28s %10s %10s %9s %12s\n", "kernel", "serial ms", "omp ms", "speedup",
                "max |diff|");

    {
        double vs = 0.0, vp = 0.0;
        const double ts =
            time_ms(reps, [&] { vs = serial::weighted_integral(u, Weight::phi, r, cut); });
        const double tp = time_ms(reps, [&] { vp = weighted_integral(u, Weight::phi, r, cut); });
        sink = vs + vp;
        std::printf("%-28s %10.3f %10.3f %8.2fx %12.3e\n", "weighted_integral(phi)", ts, tp,
                    ts / tp, std::fabs(vs - vp));
    }
    {
        double vs = 0.0, vp = 0.0;
        const double ts = time_ms(
            reps, [&] { vs = serial::weighted_integral(u, Weight::minus_phi_prime, r, cut); });
        const double tp =
            time_ms(reps, [&] { vp = weighted_integral(u, Weight::minus_phi_prime, r, cut); });
        sink = vs + vp;
        std::printf("%-28s %10.3f %10.3f %8.2fx %12.3e\n", "weighted_integral(-phi')", ts, tp,
                    ts / tp, std::fabs(vs - vp));
    }
    {
        const double ts = time_ms(reps, [&] {
            const VectorField v = serial::gradient(u);
            sink = v.at(0)[0];
        });
        const double tp = time_ms(reps, [&] {
            const VectorField v = gradient(u);
            sink = v.at(0)[0];
        });
        const VectorField a = serial::gradient(u), b = gradient(u);
        double diff = 0.0;
        for (std::size_t k = 0; k < g.node_count(); ++k)
            for (int c = 0; c < 2; ++c)
                diff = std::max(diff, std::fabs(a.component(c)[k] - b.component(c)[k]));
        std::printf("%-28s %10.3f %10.3f %8.2fx %12.3e\n", "gradient", ts, tp, ts / tp, diff);
    }
    {
        double vs = 0.0, vp = 0.0;
        const double ts =
            time_ms(reps, [&] { vs = serial::ball_mean_square(u, Vec3{0, 0, 0}, r); });
        const double tp = time_ms(reps, [&] { vp = ball_mean_square(u, Vec3{0, 0, 0}, r); });
        sink = vs + vp;
        std::printf("%-28s %10.3f %10.3f %8.2fx %12.3e\n", "ball_mean_square", ts, tp, ts / tp,
                    std::fabs(vs - vp));
    }
    return 0;
}
