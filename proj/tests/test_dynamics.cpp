#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hopfsr/dynamics.hpp"

using namespace hopfsr;

namespace {

std::mt19937_64 rng(77);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// (0.6, 0.7) with closure ratio 1/5; digits from a 30-digit evaluation
constexpr double fig_theta0 = 0.746898593069036519800;
constexpr double fig_xi0 = 6.36867333123626305531;
const PhaseState fig_state{fig_theta0, 0.0, 0.0, fig_xi0, 0.6, 0.7};

PhaseState random_case3()
{
    double xi1 = uniform(-2, 2);
    double xi2 = uniform(-2, 2);
    return {uniform(0.1, half_pi - 0.1), uniform(0, two_pi), uniform(0, two_pi), uniform(-2, 2), xi1, xi2};
}

} // namespace

TEST(Hamiltonian, Examples)
{
    EnergyReport e = hamiltonian({pi / 4, 0.2, 0.3, 0.0, 1.0, 1.0});
    EXPECT_NEAR(e.h, 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(e.h_v, 2.0);
    EXPECT_NEAR(e.h1, 2.0, 1e-15);
    EXPECT_NEAR(e.r, 1.0, 1e-15);

    e = hamiltonian({pi / 4, 0.0, 0.0, 0.0, 1.0, -1.0});
    EXPECT_NEAR(e.h, 2.0, 1e-15);
    EXPECT_EQ(e.h_v, 0.0);
    EXPECT_NEAR(e.h1, 2.0, 1e-15);
    EXPECT_EQ(e.r, 0.0);

    e = hamiltonian(fig_state);
    EXPECT_NEAR(e.h, 20.28, 1e-12);
    EXPECT_NEAR(e.h1, 21.125, 1e-12);
    EXPECT_NEAR(e.r, 0.2, 1e-14);
}

TEST(Hamiltonian, IdentitiesAndHomogeneity)
{
    for (int i = 0; i < 200; ++i) {
        const PhaseState s = random_case3();
        const EnergyReport e = hamiltonian(s);
        EXPECT_LE(std::fabs(e.h1 - e.h - e.h_v), 1e-13 * e.h1);
        if (e.h1 > 0) {
            EXPECT_NEAR(e.r, std::sqrt(1.0 - e.h / e.h1), 1e-12 / std::max(e.r, 1e-3));
        }
        const double c = uniform(0.1, 10);
        const EnergyReport scaled = hamiltonian({s.theta0, s.theta1, s.theta2, c * s.xi0, c * s.xi1, c * s.xi2});
        EXPECT_NEAR(scaled.h, c * c * e.h, 1e-12 * c * c * (1 + e.h));
        EXPECT_NEAR(scaled.r, e.r, 1e-13);
    }
}

TEST(Hamiltonian, BoundaryChart)
{
    EXPECT_THROW(hamiltonian({0.0, 0, 0, 1, 1, 1}), error);
    EXPECT_THROW(hamiltonian({half_pi, 0, 0, 1, 1, 1}), error);
    // finite Case-4 limits
    EXPECT_NEAR(hamiltonian({0.0, 0, 0, 1, 0, 2}).h, 0.5, 1e-15);
    EXPECT_NEAR(hamiltonian({half_pi, 0, 0, 1, 2, 0}).h, 0.5, 1e-15);
}

TEST(VectorField, Examples)
{
    PhaseDerivative d = sr_vector_field({pi / 4, 0, 0, 0, 1, -1});
    EXPECT_NEAR(d.theta0, 0, 1e-15);
    EXPECT_NEAR(d.theta1, 2, 1e-15);
    EXPECT_NEAR(d.theta2, -2, 1e-15);
    EXPECT_NEAR(d.xi0, 0, 1e-14);
    EXPECT_EQ(d.xi1, 0);
    EXPECT_EQ(d.xi2, 0);
    EXPECT_NEAR(std::hypot(d.theta1, d.theta2), std::sqrt(8.0), 1e-15);

    for (double t0 : {0.1, 0.7, 1.4}) {
        d = sr_vector_field({t0, 0.3, 0.4, 1.7, 0, 0});
        EXPECT_EQ(d.theta0, 1.7);
        EXPECT_EQ(d.theta1, 0);
        EXPECT_EQ(d.theta2, 0);
        EXPECT_EQ(d.xi0, 0);
    }
}

TEST(VectorField, ReflectionSymmetry)
{
    for (int i = 0; i < 50; ++i) {
        const PhaseState s = random_case3();
        const PhaseState mirror{half_pi - s.theta0, 0, 0, s.xi0, s.xi2, s.xi1};
        EXPECT_NEAR(sr_vector_field(mirror).xi0, -sr_vector_field(s).xi0, 1e-11 * (1 + std::fabs(sr_vector_field(s).xi0)));
    }
}

TEST(VectorField, MatchesHamiltonianGradient)
{
    // dtheta/dt = dH/dxi and dxi/dt = -dH/dtheta by central differences
    const double h = 1e-6;
    for (int i = 0; i < 30; ++i) {
        const PhaseState s = random_case3();
        const PhaseDerivative d = sr_vector_field(s);
        auto H = [](PhaseState x) { return hamiltonian(x).h; };
        PhaseState p = s, m = s;
        p.theta0 += h;
        m.theta0 -= h;
        EXPECT_NEAR(d.xi0, -(H(p) - H(m)) / (2 * h), 1e-6 * (1 + std::fabs(d.xi0)));
        p = s, m = s;
        p.xi1 += h;
        m.xi1 -= h;
        EXPECT_NEAR(d.theta1, (H(p) - H(m)) / (2 * h), 1e-6 * (1 + std::fabs(d.theta1)));
        p = s, m = s;
        p.xi2 += h;
        m.xi2 -= h;
        EXPECT_NEAR(d.theta2, (H(p) - H(m)) / (2 * h), 1e-6 * (1 + std::fabs(d.theta2)));
        EXPECT_EQ(d.theta0, s.xi0);
    }
}

TEST(VectorField, SingularField)
{
    try {
        (void)sr_vector_field({0.0, 0, 0, 1, 1, 0});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::singular_field);
    }
    EXPECT_THROW(sr_vector_field({half_pi, 0, 0, 1, 0, 1}), error);
    EXPECT_NO_THROW(sr_vector_field({0.0, 0, 0, 1, 0, 1}));
    EXPECT_NO_THROW(sr_vector_field({half_pi, 0, 0, 1, 1, 0}));
}

TEST(PenaltyField, RoundLimitAndSrLimit)
{
    PhaseDerivative d = penalty_vector_field({pi / 4, 0, 0, 0, 1, 0}, 1.0);
    EXPECT_NEAR(d.theta1, 2.0, 1e-15);
    EXPECT_NEAR(d.theta2, 0.0, 1e-15);
    for (int i = 0; i < 20; ++i) {
        const PhaseState s = random_case3();
        const double c2 = std::cos(s.theta0) * std::cos(s.theta0);
        const double s2 = std::sin(s.theta0) * std::sin(s.theta0);
        d = penalty_vector_field(s, 1.0);
        EXPECT_NEAR(d.theta1, s.xi1 / s2, 1e-12 * (1 + std::fabs(d.theta1)));
        EXPECT_NEAR(d.theta2, s.xi2 / c2, 1e-12 * (1 + std::fabs(d.theta2)));
        const PhaseDerivative big = penalty_vector_field(s, 1e8);
        const PhaseDerivative sr = sr_vector_field(s);
        EXPECT_LE(max_abs(big - sr), 1e-12);
    }
}

TEST(Splitting, SrIsH1MinusHv)
{
    for (int i = 0; i < 50; ++i) {
        const PhaseState s = random_case3();
        const PhaseDerivative diff = h1_vector_field(s) - hv_vector_field(s) - sr_vector_field(s);
        EXPECT_LE(max_abs(diff), 1e-12 * (1 + max_abs(sr_vector_field(s))));
    }
}

TEST(Potential, MinimizerExamples)
{
    PotentialMinimum m = potential_minimum(0.1, 0.2);
    EXPECT_NEAR(std::tan(m.theta0) * std::tan(m.theta0), 0.5, 1e-14);
    EXPECT_NEAR(m.value, 0.0, 1e-16);
    EXPECT_NEAR(potential_u(m.theta0, 0.1, 0.2), 0.0, 1e-16);

    m = potential_minimum(0.1, -0.2);
    EXPECT_NEAR(std::tan(m.theta0) * std::tan(m.theta0), 0.5, 1e-14);
    EXPECT_NEAR(m.value, 0.04, 1e-15);
    // fine grid oracle
    double best = 1e300;
    for (int i = 1; i < 200000; ++i) {
        best = std::min(best, potential_u(half_pi * i / 200000.0, 0.1, -0.2));
    }
    EXPECT_NEAR(best, 0.04, 1e-9);
    EXPECT_NEAR(potential_u(m.theta0, 0.1, -0.2), 0.04, 1e-15);
}

TEST(Potential, BoundaryCaseMonotone)
{
    double prev = -1;
    for (int i = 1; i < 100; ++i) {
        const double t = half_pi * i / 100.0;
        const double u = potential_u(t, 0.0, 1.3);
        EXPECT_NEAR(u, 0.5 * std::tan(t) * std::tan(t) * 1.69, 1e-12 * (1 + u));
        EXPECT_GT(u, prev);
        prev = u;
    }
    EXPECT_THROW(potential_u(0.0, 1.0, 1.0), error);
}

TEST(TurningPoints, OneFifthState)
{
    const TurningPoints tp = turning_points(fig_state);
    EXPECT_NEAR(tp.x_a, 0.991378430575566747, 1e-13);
    EXPECT_NEAR(tp.x_b, 0.0116984925013563300, 1e-13);
    EXPECT_NEAR(tp.a, 0.0929863492264432341, 1e-12);
    EXPECT_NEAR(tp.b, 1.46242475523100906, 1e-12);
    const double h = hamiltonian(fig_state).h;
    for (double t : {tp.a, tp.b}) {
        EXPECT_NEAR(0.5 * fig_xi0 * 0 + potential_u(t, 0.6, 0.7), h, 1e-10);
    }
    // the quadratic itself
    const double A = -2 * h - 1.69, B = 2 * (h + 0.42 + 0.49), C = -0.49;
    EXPECT_NEAR(A, -42.25, 1e-12);
    EXPECT_NEAR(B, 42.38, 1e-12);
    for (double x : {tp.x_a, tp.x_b}) {
        EXPECT_NEAR(A * x * x + B * x + C, 0.0, 1e-12);
    }
}

TEST(TurningPoints, BoundaryCaseExact)
{
    const TurningPoints tp = turning_points({0.5, 0, 0, 1.0, 0.0, 0.8});
    EXPECT_EQ(tp.x_a, 1.0);
    EXPECT_EQ(tp.a, 0.0);
    EXPECT_TRUE(tp.a_on_boundary);
    EXPECT_NEAR(potential_u(tp.b, 0.0, 0.8), hamiltonian({0.5, 0, 0, 1.0, 0.0, 0.8}).h, 1e-10);

    const TurningPoints tq = turning_points({0.5, 0, 0, 1.0, 0.8, 0.0});
    EXPECT_EQ(tq.x_b, 0.0);
    EXPECT_EQ(tq.b, half_pi);
    EXPECT_TRUE(tq.b_on_boundary);
}

TEST(TurningPoints, RandomConsistency)
{
    for (int i = 0; i < 100; ++i) {
        PhaseState s = random_case3();
        if (s.xi0 == 0) {
            continue;
        }
        const TurningPoints tp = turning_points(s);
        const double h = hamiltonian(s).h;
        EXPECT_LE(tp.a, s.theta0 + 1e-12);
        EXPECT_GE(tp.b, s.theta0 - 1e-12);
        EXPECT_LE(tp.x_b, tp.x_a);
        EXPECT_NEAR(potential_u(tp.a, s.xi1, s.xi2), h, 1e-10 * (1 + h));
        EXPECT_NEAR(potential_u(tp.b, s.xi1, s.xi2), h, 1e-10 * (1 + h));
    }
}

TEST(TurningPoints, NoOscillation)
{
    EXPECT_THROW(turning_points({pi / 4, 0, 0, 0, 1, -1}), error);
    EXPECT_THROW(turning_points({0.3, 0, 0, 0.5, 0, 0}), error);
    try {
        (void)turning_points({0.3, 0, 0, 0.5, 0, 0});
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::no_oscillation);
    }
}

TEST(Period, AnalyticExamples)
{
    EXPECT_NEAR(theta0_period_analytic(fig_state), pi / 6.5, 1e-14);
    EXPECT_NEAR(theta0_period_analytic(fig_state), 0.483321946706122, 1e-14);
    // H1 = 1/2
    const PhaseState unit{pi / 4, 0, 0, 0.6, 0.4, 0.4};
    EXPECT_NEAR(hamiltonian(unit).h1, 0.5, 1e-15);
    EXPECT_NEAR(theta0_period_analytic(unit), pi, 1e-14);
}

TEST(Period, QuadratureMatchesAnalytic)
{
    EXPECT_NEAR(theta0_period_quadrature(fig_state), pi / 6.5, 1e-7);
    int checked = 0;
    while (checked < 20) {
        PhaseState s = random_case3();
        if (std::fabs(s.xi0) < 0.05 || std::fabs(s.xi1) < 0.05 || std::fabs(s.xi2) < 0.05) {
            continue;
        }
        const double analytic = theta0_period_analytic(s);
        EXPECT_NEAR(theta0_period_quadrature(s), analytic, 1e-7 * analytic);
        ++checked;
    }
}

TEST(Period, QuadratureScaling)
{
    for (double c : {0.3, 2.0, 7.5}) {
        const PhaseState s{fig_theta0, 0, 0, c * fig_xi0, c * 0.6, c * 0.7};
        EXPECT_NEAR(c * theta0_period_quadrature(s), pi / 6.5, 1e-7);
    }
}

TEST(Period, QuadratureBoundaryCase)
{
    for (const PhaseState& s : {PhaseState{0.6, 0, 0, 1.1, 0.0, 0.9}, PhaseState{0.6, 0, 0, -0.4, 1.7, 0.0}}) {
        EXPECT_NEAR(theta0_period_quadrature(s), theta0_period_analytic(s), 1e-7);
    }
}

TEST(Poisson, H1HvCommute)
{
    for (int i = 0; i < 100; ++i) {
        const PhaseState s = random_case3();
        EXPECT_LE(std::fabs(poisson_bracket_h1_hv(s)), 1e-12);
    }
    EXPECT_EQ(poisson_bracket_h1_hv({0.4, 0, 0, 1, 0.3, -0.3}), 0.0);
    const PhaseState s = random_case3();
    EXPECT_EQ(poisson_bracket(h_gradient(s), h_gradient(s)), 0.0);
}
