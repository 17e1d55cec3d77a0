#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hopfsr/integrator.hpp"
#include "hopfsr/length_spectrum.hpp"

using namespace hopfsr;

namespace {

std::mt19937_64 rng(4242);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

PhaseState one_fifth() { return synthesize_initial_conditions({1, 5}, 0.6, 0.7); }

IntegratorOptions with_step(double h)
{
    IntegratorOptions o;
    o.h = h;
    return o;
}

PhaseState random_case3()
{
    auto momentum = [] { return (uniform(0, 1) < 0.5 ? -1.0 : 1.0) * uniform(0.2, 2.0); };
    return {uniform(0.3, 1.27), uniform(0, two_pi), uniform(0, two_pi), momentum(), momentum(), momentum()};
}

} // namespace

TEST(Integrate, SamplesIncreaseAndStepBounded)
{
    const Trajectory tr = integrate(one_fifth(), 1.0, with_step(1e-3));
    ASSERT_GT(tr.samples.size(), 900u);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        EXPECT_GT(tr.samples[i].t, tr.samples[i - 1].t);
        EXPECT_LE(tr.samples[i].t - tr.samples[i - 1].t, 1e-3 * (1 + 1e-12));
    }
    EXPECT_DOUBLE_EQ(tr.back().t, 1.0);
    EXPECT_FALSE(tr.rejected);
    for (const Sample& s : tr.samples) {
        EXPECT_EQ(s.state.xi1, 0.6);
        EXPECT_EQ(s.state.xi2, 0.7);
        EXPECT_NEAR(s.euclid.norm2(), 1.0, 1e-12);
    }
}

TEST(Integrate, HopfFiberCloses)
{
    const PhaseState s{pi / 4, 0, 0, 0, 1, -1};
    const Trajectory tr = integrate(s, pi, with_step(1e-3));
    EXPECT_LE(phase_gap(s, tr.back().state), 1e-8);
    EXPECT_NEAR(sr_arc_length(tr), two_pi, 1e-12);
    EXPECT_NEAR(sr_arc_length_quadrature(tr), two_pi, 1e-8);
    EXPECT_TRUE(self_intersection_audit(tr));
}

TEST(Integrate, MeridianClosesWithBounces)
{
    const PhaseState s{0.3, 0.2, 1.1, 1.0, 0, 0};
    const Trajectory tr = integrate(s, two_pi, with_step(1e-3));
    EXPECT_LE(phase_gap(s, tr.back().state), 1e-8);
    EXPECT_NEAR(sr_arc_length(tr), two_pi, 1e-12);
    EXPECT_EQ(event_times(tr, EventKind::theta0_bounce_low).size(), 2u);
    EXPECT_EQ(event_times(tr, EventKind::theta0_bounce_high).size(), 2u);
    EXPECT_TRUE(self_intersection_audit(tr));
    EXPECT_THROW(measure_theta0_period(tr), error);
    // exact bounce times: theta0 = 0.3 + t
    const std::vector<double> high = event_times(tr, EventKind::theta0_bounce_high);
    EXPECT_NEAR(high[0], half_pi - 0.3, 1e-12);
    EXPECT_NEAR(high[1], 3 * half_pi - 0.3, 1e-12);
}

TEST(Integrate, DegenerateHasZeroLength)
{
    const PhaseState s{pi / 4, 0, 0, 0, 1, 1};
    const Trajectory tr = integrate(s, 1.0, with_step(1e-2));
    EXPECT_NEAR(sr_arc_length(tr), 0.0, 1e-14);
}

TEST(Integrate, BoundaryCaseBouncesSmoothly)
{
    // xi1 = 0: theta0 passes through 0 in the extended chart
    const PhaseState s{0.4, 0.3, 0.2, -1.0, 0.0, 0.7};
    const double period = theta0_period_analytic(s);
    const Trajectory tr = integrate(s, 3 * period, with_step(1e-4));
    const std::vector<double> low = event_times(tr, EventKind::theta0_bounce_low);
    ASSERT_GE(low.size(), 2u);
    EXPECT_LE(tr.conserved_drift, 1e-10);
    EXPECT_NEAR(measure_theta0_period(tr), period, 1e-8 * period);
    // embedded velocity is continuous across each bounce
    for (double tb : low) {
        std::size_t k = 1;
        while (k + 2 < tr.samples.size() && tr.samples[k].t < tb) {
            ++k;
        }
        if (k < 3 || k + 2 >= tr.samples.size()) {
            continue;
        }
        auto vel = [&](std::size_t i) {
            return ((tr.samples[i].euclid.vec() - tr.samples[i - 1].euclid.vec()) /
                    (tr.samples[i].t - tr.samples[i - 1].t))
                .eval();
        };
        EXPECT_LE((vel(k + 1) - vel(k - 1)).norm(), 1e-2);
        EXPECT_LE((vel(k + 1) - vel(k)).norm() - (vel(k + 2) - vel(k + 1)).norm(), 1e-6);
    }
}

TEST(Integrate, SingularApproach)
{
    // a state on the boundary with the offending momentum nonzero is rejected up front
    EXPECT_THROW(integrate({0.0, 0, 0, 1, 1, 1}, 1.0, with_step(1e-3)), error);
}

TEST(Integrate, InvalidArguments)
{
    EXPECT_THROW(integrate(one_fifth(), 0.0, with_step(1e-3)), error);
    EXPECT_THROW(integrate(one_fifth(), 1.0, with_step(-1)), error);
    EXPECT_THROW(integrate(one_fifth(), 1.0, with_step(1e-3), Flow::penalty(0.5)), error);
}

TEST(Integrate, StepRejectedAtFloor)
{
    IntegratorOptions o = with_step(0.5);
    o.max_halvings = 0;
    o.local_error_budget = 1e-14;
    try {
        (void)integrate(one_fifth(), 1.0, o);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::step_rejected);
    }
}

TEST(Integrate, DriftFlagsRejection)
{
    IntegratorOptions o = with_step(0.05);
    o.local_error_budget = 1.0;
    o.drift_budget = 1e-12;
    const Trajectory tr = integrate(one_fifth(), 1.0, o);
    EXPECT_TRUE(tr.rejected);
    EXPECT_GT(tr.conserved_drift, 1e-12);
}

TEST(Period, OneFifthMeasured)
{
    const PhaseState s = one_fifth();
    const Trajectory tr = integrate(s, 5 * pi / 6.5, with_step(1e-4));
    EXPECT_NEAR(measure_theta0_period(tr), pi / 6.5, 1e-8 * pi / 6.5);
}

TEST(Period, RandomCase3Measured)
{
    for (int i = 0; i < 5; ++i) {
        const PhaseState s = random_case3();
        const double period = theta0_period_analytic(s);
        const Trajectory tr = integrate(s, 3.2 * period, with_step(1e-4));
        EXPECT_NEAR(measure_theta0_period(tr), period, 1e-8 * period);
        EXPECT_NEAR(theta0_period_quadrature(s), period, 1e-7 * period);
        // Generic3 never bounces
        EXPECT_TRUE(event_times(tr, EventKind::theta0_bounce_low).empty());
        EXPECT_TRUE(event_times(tr, EventKind::theta0_bounce_high).empty());
    }
}

TEST(Period, ConvergenceOrder)
{
    // fixed steps: error in the measured period falls like h^4
    const PhaseState s = one_fifth();
    const double exact = pi / 6.5;
    auto error_at = [&](double h) {
        IntegratorOptions o = with_step(h);
        o.local_error_budget = 1.0;
        return std::fabs(measure_theta0_period(integrate(s, 5 * pi / 6.5, o)) - exact);
    };
    const double ratio = error_at(2e-3) / error_at(1e-3);
    EXPECT_GE(ratio, 8.0);
    EXPECT_LE(ratio, 40.0);
}

TEST(Closure, OneFifth)
{
    const PhaseState s = one_fifth();
    const ClosureTestResult hit = closure_test(s, pi / 1.3, with_step(1e-4));
    EXPECT_TRUE(hit.closed);
    EXPECT_LE(hit.position_gap, 1e-6);
    ASSERT_TRUE(hit.return_time.has_value());
    EXPECT_NEAR(*hit.return_time, 5 * pi / 6.5, 1e-12);

    EXPECT_TRUE(closure_test(s, 5 * pi / 1.3, with_step(1e-4)).closed);

    const ClosureTestResult miss = closure_test(s, pi / 6.5, with_step(1e-4));
    EXPECT_FALSE(miss.closed);
    EXPECT_FALSE(miss.return_time.has_value());
    EXPECT_GT(miss.position_gap, 1e-2);
}

TEST(Closure, IrrationalRatioNeverCloses)
{
    // r = 1/sqrt(2): xi0^2 = (xi1 + xi2)^2 * 2 - (|xi1| + |xi2|)^2 at the synthesis angle
    const double xi1 = 0.6, xi2 = 0.7;
    const PhaseState s{std::atan2(std::sqrt(xi1), std::sqrt(xi2)), 0, 0, 1.3, xi1, xi2};
    EXPECT_NEAR(hamiltonian(s).r, 1 / std::sqrt(2.0), 1e-14);
    const double period = theta0_period_analytic(s);
    const Trajectory tr = integrate(s, 50.5 * period, with_step(2e-3));
    double best = 1e300;
    for (int k = 1; k <= 50; ++k) {
        const double target = k * period;
        const Sample* nearest = &tr.samples.front();
        for (const Sample& smp : tr.samples) {
            if (std::fabs(smp.t - target) < std::fabs(nearest->t - target)) {
                nearest = &smp;
            }
        }
        // compare at the exact multiple
        const PhaseState end = integrate(nearest->state, target - nearest->t > 0 ? target - nearest->t : 1e-300,
                                         with_step(2e-3)).back().state;
        best = std::min(best, phase_gap(s, std::fabs(target - nearest->t) < 1e-12 ? nearest->state : end));
    }
    EXPECT_GT(best, 1e-6);
}

TEST(Closure, ReversibilityReturnsToStart)
{
    const PhaseState s = one_fifth();
    const ClosureTestResult one = closure_test(s, pi / 1.3, with_step(1e-3));
    const Trajectory fwd = integrate(s, 1.7, with_step(1e-3));
    PhaseState back = fwd.back().state;
    back.xi0 = -back.xi0;
    back.xi1 = -back.xi1;
    back.xi2 = -back.xi2;
    const PhaseState ret = integrate(back, 1.7, with_step(1e-3)).back().state;
    const PhaseState restored{ret.theta0, ret.theta1, ret.theta2, -ret.xi0, -ret.xi1, -ret.xi2};
    EXPECT_LE(phase_gap(s, restored), 10 * std::max(one.position_gap, 1e-9));
}

TEST(Length, OneFifth)
{
    const Trajectory tr = integrate(one_fifth(), pi / 1.3, with_step(1e-4));
    EXPECT_NEAR(sr_arc_length(tr), pi * std::sqrt(24.0), 1e-6 * pi * std::sqrt(24.0));
    EXPECT_NEAR(sr_arc_length(tr), 15.3905979619423691, 1e-9);
    EXPECT_NEAR(sr_arc_length_quadrature(tr), sr_arc_length(tr), 1e-6 * sr_arc_length(tr));
    EXPECT_EQ(count_theta0_oscillations(tr), 5);
    EXPECT_THROW(sr_arc_length(integrate(one_fifth(), 0.1, 1e-3, Flow::penalty(2.0))), error);
}

TEST(Conservation, DriftAndOrder)
{
    const PhaseState s = one_fifth();
    const double period = pi / 1.3;
    IntegratorOptions fine = with_step(1e-4);
    const Trajectory tr = integrate(s, period, fine);
    EXPECT_LE(tr.conserved_drift, 1e-9);
    IntegratorOptions coarse = with_step(2e-4);
    const double ratio = integrate(s, period, coarse).conserved_drift / tr.conserved_drift;
    EXPECT_GE(ratio, 8.0);
    EXPECT_LE(ratio, 32.0);
}

TEST(Simplicity, ClosedExamplesAndDoubled)
{
    const PhaseState s = one_fifth();
    const Trajectory one = integrate(s, pi / 1.3, with_step(1e-3));
    EXPECT_TRUE(self_intersection_audit(one));

    Trajectory doubled = integrate(s, 2 * pi / 1.3, with_step(1e-3));
    EXPECT_FALSE(self_intersection_audit(doubled));

    // a figure that crosses itself: concatenate two different great circles through one point
    Trajectory cross;
    for (int i = 0; i <= 400; ++i) {
        const double a = two_pi * i / 400.0;
        cross.samples.push_back({static_cast<double>(i), {}, {std::cos(a), std::sin(a), 0, 0}});
    }
    for (int i = 1; i <= 400; ++i) {
        const double a = two_pi * i / 400.0;
        cross.samples.push_back({400.0 + i, {}, {std::cos(a), 0, std::sin(a), 0}});
    }
    EXPECT_FALSE(self_intersection_audit(cross));
}

TEST(GreatCircle, PenaltyOneFlow)
{
    for (int i = 0; i < 5; ++i) {
        const PhaseState s = random_case3();
        const double t = two_pi / std::sqrt(2 * hamiltonian(s).h1);
        const Trajectory tr = integrate(s, t, with_step(1e-3), Flow::penalty(1.0));
        EXPECT_LE(great_circle_residual(tr), 1e-8);
        EXPECT_EQ(count_theta0_oscillations(tr), 2);
        EXPECT_LE(phase_gap(s, tr.back().state), 1e-6);
    }
    // the sR flow is not a great circle in general
    const Trajectory sr = integrate(one_fifth(), 1.0, with_step(1e-3));
    EXPECT_GT(great_circle_residual(sr), 1e-3);
}
