#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hopfsr/classifier.hpp"
#include "hopfsr/integrator.hpp"

using namespace hopfsr;

TEST(Classify, HopfFiber)
{
    const GeodesicClass c = classify({pi / 4, 0, 0, 0, 1, -1});
    EXPECT_EQ(c.kind, GeodesicCase::HopfFiber1b);
    EXPECT_NEAR(c.cube_speed, 2 * std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(c.period, pi, 1e-15);
}

TEST(Classify, Meridian)
{
    const GeodesicClass c = classify({0.3, 0, 0, 0.5, 0, 0});
    EXPECT_EQ(c.kind, GeodesicCase::Meridian2);
    EXPECT_EQ(c.xi0, 0.5);
}

TEST(Classify, GenericWithMinimizer)
{
    const GeodesicClass c = classify({0.7, 0, 0, 0, 0.6, 0.7});
    EXPECT_EQ(c.kind, GeodesicCase::Generic3);
    EXPECT_NEAR(std::pow(std::tan(c.u_minimizer), 2), 6.0 / 7.0, 1e-14);
    ASSERT_TRUE(c.turning.has_value());
    EXPECT_LT(c.turning->a, 0.7 + 1e-12);
    EXPECT_FALSE(c.fixed_point);
}

TEST(Classify, DegenerateAtMinimizer)
{
    // same-sign momenta at the U minimizer: H = 0
    const double t = std::atan2(std::sqrt(0.6), std::sqrt(0.7));
    const PhaseState s{t, 0, 0, 0, 0.6, 0.7};
    EXPECT_EQ(classify(s).kind, GeodesicCase::Degenerate1a);
    EXPECT_NEAR(hamiltonian(s).h, 0.0, 1e-15);
    EXPECT_EQ(classify({0.2, 0, 0, 0, 0, 0}).kind, GeodesicCase::Degenerate1a);
    // same momenta away from the minimizer oscillate
    EXPECT_EQ(classify({t + 0.1, 0, 0, 0, 0.6, 0.7}).kind, GeodesicCase::Generic3);
}

TEST(Classify, EqualSquaresOffMinimizerIsGeneric)
{
    const GeodesicClass c = classify({0.5, 0, 0, 0, 1, -1});
    EXPECT_EQ(c.kind, GeodesicCase::Generic3);
    EXPECT_TRUE(c.turning.has_value());
}

TEST(Classify, OppositeSignFixedPoint)
{
    const double t = std::atan2(std::sqrt(0.3), std::sqrt(0.9));
    const GeodesicClass c = classify({t, 0, 0, 0, 0.3, -0.9});
    EXPECT_EQ(c.kind, GeodesicCase::Generic3);
    EXPECT_TRUE(c.fixed_point);
    EXPECT_FALSE(c.turning.has_value());
}

TEST(Classify, Boundary)
{
    GeodesicClass c = classify({0.5, 0, 0, 0.3, 0, 0.8});
    EXPECT_EQ(c.kind, GeodesicCase::Boundary4);
    EXPECT_EQ(c.vanishing, VanishingMomentum::xi1);
    EXPECT_EQ(c.bounce_plane, 0.0);
    ASSERT_TRUE(c.turning.has_value());
    EXPECT_EQ(c.turning->a, 0.0);

    c = classify({0.5, 0, 0, 0.0, 0.8, 0});
    EXPECT_EQ(c.vanishing, VanishingMomentum::xi2);
    EXPECT_EQ(c.bounce_plane, half_pi);

    // sitting at the boundary fixed point
    c = classify({0.0, 0, 0, 0.0, 0.0, 0.8});
    EXPECT_EQ(c.kind, GeodesicCase::Boundary4);
    EXPECT_FALSE(c.turning.has_value());
}

TEST(Classify, AmbiguousZero)
{
    try {
        (void)classify({0.5, 0, 0, 0.3, 1e-15, 0.8});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::ambiguous_zero);
    }
    ClassifierOptions loose;
    loose.deadband = 0.0;
    EXPECT_EQ(classify({0.5, 0, 0, 0.3, 1e-15, 0.8}, loose).kind, GeodesicCase::Generic3);
}

TEST(Classify, PartitionOverSnappedRandomStates)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2);
    std::uniform_real_distribution<double> angle(0.01, half_pi - 0.01);
    std::uniform_int_distribution<int> snap(0, 3);
    int counts[5] = {};
    for (int i = 0; i < 100000; ++i) {
        double xi[3];
        for (double& x : xi) {
            x = snap(rng) == 0 ? 0.0 : u(rng);
            if (std::fabs(x) < 1e-6) {
                x = 0.0;
            }
        }
        const PhaseState s{angle(rng), 0, 0, xi[0], xi[1], xi[2]};
        const GeodesicClass c = classify(s);
        ++counts[static_cast<int>(c.kind)];
        const bool z1 = s.xi1 == 0, z2 = s.xi2 == 0;
        if (z1 && z2) {
            ASSERT_TRUE(c.kind == GeodesicCase::Meridian2 || c.kind == GeodesicCase::Degenerate1a);
        } else if (z1 != z2) {
            ASSERT_EQ(c.kind, GeodesicCase::Boundary4);
        } else {
            ASSERT_TRUE(c.kind == GeodesicCase::Generic3 || s.xi0 == 0.0);
        }
    }
    EXPECT_GT(counts[static_cast<int>(GeodesicCase::Generic3)], 0);
    EXPECT_GT(counts[static_cast<int>(GeodesicCase::Boundary4)], 0);
    EXPECT_GT(counts[static_cast<int>(GeodesicCase::Meridian2)], 0);
}

TEST(Classify, BoundaryStatesBounceGenericDoNot)
{
    const PhaseState b{0.5, 0, 0, 0.3, 0, 0.8};
    const Trajectory tb = integrate(b, theta0_period_analytic(b), 1e-3);
    EXPECT_FALSE(event_times(tb, EventKind::theta0_bounce_low).empty());
    const PhaseState g{0.5, 0, 0, 0.3, 0.05, 0.8};
    const Trajectory tg = integrate(g, theta0_period_analytic(g), 1e-4);
    EXPECT_TRUE(event_times(tg, EventKind::theta0_bounce_low).empty());
    EXPECT_TRUE(event_times(tg, EventKind::theta0_bounce_high).empty());
}

TEST(Portrait, ArcsAroundMinimizer)
{
    const std::vector<PortraitLevel> levels = reduced_portrait(0.1, 0.2, {1e-3, 0.01});
    ASSERT_EQ(levels.size(), 2u);
    const double tmin = potential_minimum(0.1, 0.2).theta0;
    for (const PortraitLevel& l : levels) {
        ASSERT_EQ(l.upper.size(), 201u);
        EXPECT_LT(l.upper.front().first, tmin);
        EXPECT_GT(l.upper.back().first, tmin);
        EXPECT_NEAR(l.upper.front().second, 0.0, 1e-6);
        EXPECT_NEAR(l.upper.back().second, 0.0, 1e-6);
        for (std::size_t i = 0; i < l.upper.size(); ++i) {
            const auto [t, xi0] = l.upper[i];
            EXPECT_GE(xi0, 0.0);
            EXPECT_EQ(l.lower[i].second, -xi0);
            EXPECT_NEAR(0.5 * xi0 * xi0 + potential_u(t, 0.1, 0.2), l.energy, 1e-12);
        }
    }
    // the lower level is the shorter arc
    EXPECT_LT(levels[0].upper.back().first - levels[0].upper.front().first,
              levels[1].upper.back().first - levels[1].upper.front().first);
}

TEST(Portrait, Errors)
{
    try {
        (void)reduced_portrait(0.1, -0.2, {0.03});
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::empty_level);
    }
    EXPECT_NO_THROW(reduced_portrait(0.1, -0.2, {0.05}));
    EXPECT_THROW(reduced_portrait(0, 0, {1.0}), error);
}
