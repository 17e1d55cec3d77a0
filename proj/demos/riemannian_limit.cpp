// One covector under the penalty flows lambda = 1, 2, 10 and the sR flow.
// lambda = 1 is the round metric: a great circle with two theta0 oscillations.
#include <cmath>
#include <cstdio>

#include "hopfsr/integrator.hpp"

int main()
{
    using namespace hopfsr;
    const PhaseState s{0.6, 0.0, 0.0, 0.5, 0.3, -0.4};
    const double t_end = two_pi / std::sqrt(2.0 * hamiltonian(s).h1);
    IntegratorOptions opt;
    opt.h = 1e-3;

    std::printf("%10s %14s %14s %6s\n", "flow", "plane resid", "gap", "osc");
    for (double lambda : {1.0, 2.0, 10.0}) {
        const Trajectory tr = integrate(s, t_end, opt, Flow::penalty(lambda));
        std::printf("penalty %2g %14.3e %14.3e %6d\n", lambda, great_circle_residual(tr),
                    phase_gap(s, tr.back().state), count_theta0_oscillations(tr));
    }
    const Trajectory sr = integrate(s, t_end, opt);
    std::printf("%10s %14.3e %14.3e %6d\n", "sR", great_circle_residual(sr), phase_gap(s, sr.back().state),
                count_theta0_oscillations(sr));
    return 0;
}
