/**
 * @file classifier.hpp
 * @brief Sorting initial covectors into the disjoint geodesic cases, and
 *        level sets of the reduced (theta0, xi0) problem.
 */
#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "hopfsr/dynamics.hpp"
#include "hopfsr/error.hpp"
#include "hopfsr/hopf_core.hpp"

namespace hopfsr {

enum class GeodesicCase { Degenerate1a, HopfFiber1b, Meridian2, Generic3, Boundary4 };

constexpr std::string_view to_string(GeodesicCase c) noexcept
{
    switch (c) {
    case GeodesicCase::Degenerate1a: return "Degenerate1a";
    case GeodesicCase::HopfFiber1b: return "HopfFiber1b";
    case GeodesicCase::Meridian2: return "Meridian2";
    case GeodesicCase::Generic3: return "Generic3";
    case GeodesicCase::Boundary4: return "Boundary4";
    }
    return "Unknown";
}

enum class VanishingMomentum { xi1, xi2 };

struct GeodesicClass {
    GeodesicCase kind = GeodesicCase::Generic3;

    // HopfFiber1b
    double cube_speed = 0.0; ///< speed in the flat (theta0, theta1, theta2) cube
    double period = 0.0;     ///< 2 pi / |xi1 - xi2|

    // Meridian2
    double xi0 = 0.0;

    // Generic3
    std::optional<TurningPoints> turning; ///< absent at a reduced fixed point
    double u_minimizer = 0.0;             ///< theta0 with tan^2 = |xi1 / xi2|
    double u_minimum = 0.0;
    bool fixed_point = false; ///< reduced fixed point with xi1^2 != xi2^2 (theta0 constant)

    // Boundary4
    std::optional<VanishingMomentum> vanishing;
    double bounce_plane = 0.0; ///< 0 when xi1 = 0, pi/2 when xi2 = 0
};

struct ClassifierOptions {
    /// Momenta with 0 < |xi| < deadband raise AmbiguousZero.
    double deadband = 1e-13;
    /// Relative threshold on |dU/dtheta0| for the reduced fixed point.
    double fixed_point_tol = 1e-12;
};

/**
 * Classify an initial covector.
 *
 * Branches on exact zeros of xi0, xi1, xi2. The reduced fixed point (Case 1)
 * needs xi0 = 0 and theta0 at the minimizer of U; among those, equal-sign
 * momenta (H = 0) are degenerate and xi1 = -xi2 gives the closed Hopf-type
 * circle of length 2 pi.
 */
inline GeodesicClass classify(const PhaseState& s, const ClassifierOptions& opt = {})
{
    for (double m : {s.xi0, s.xi1, s.xi2}) {
        if (m != 0.0 && std::fabs(m) < opt.deadband) {
            throw error(errc::ambiguous_zero, "momentum inside the zero deadband");
        }
    }

    GeodesicClass out;
    if (s.xi1 == 0.0 && s.xi2 == 0.0) {
        if (s.xi0 == 0.0) {
            out.kind = GeodesicCase::Degenerate1a; // zero covector
            return out;
        }
        out.kind = GeodesicCase::Meridian2;
        out.xi0 = s.xi0;
        return out;
    }
    if (s.xi1 == 0.0 || s.xi2 == 0.0) {
        out.kind = GeodesicCase::Boundary4;
        out.vanishing = s.xi1 == 0.0 ? VanishingMomentum::xi1 : VanishingMomentum::xi2;
        out.bounce_plane = s.xi1 == 0.0 ? 0.0 : half_pi;
        if (s.xi0 != 0.0 || s.theta0 != (s.xi1 == 0.0 ? 0.0 : half_pi)) {
            out.turning = turning_points(s);
        }
        return out;
    }

    const PotentialMinimum umin = potential_minimum(s.xi1, s.xi2);
    out.u_minimizer = umin.theta0;
    out.u_minimum = umin.value;

    if (s.xi0 == 0.0) {
        const detail::ChartTerms t(s.theta0);
        if (t.sin_zero || t.cos_zero) {
            throw error(errc::boundary_chart, "Case 3 momenta on the chart boundary");
        }
        const double du = potential_derivative(s.theta0, s.xi1, s.xi2);
        const double scale = s.xi1 * s.xi1 + s.xi2 * s.xi2;
        if (std::fabs(du) <= opt.fixed_point_tol * scale) {
            if ((s.xi1 > 0.0) == (s.xi2 > 0.0)) {
                out.kind = GeodesicCase::Degenerate1a;
                return out;
            }
            if (s.xi1 == -s.xi2) {
                out.kind = GeodesicCase::HopfFiber1b;
                const double diff = std::fabs(s.xi1 - s.xi2);
                out.cube_speed = std::sqrt(2.0) * diff;
                out.period = two_pi / diff;
                return out;
            }
            out.kind = GeodesicCase::Generic3;
            out.fixed_point = true;
            return out;
        }
    }
    out.kind = GeodesicCase::Generic3;
    out.turning = turning_points(s);
    return out;
}

// ---------------------------------------------------------------------------
// Reduced phase portrait

struct PortraitLevel {
    double energy = 0.0;
    std::vector<std::pair<double, double>> upper; ///< (theta0, +xi0), from a to b
    std::vector<std::pair<double, double>> lower; ///< (theta0, -xi0), from a to b
};

/**
 * Level curves xi0 = +-sqrt(2 (H - U(theta0))) of the reduced energy for fixed
 * (xi1, xi2), sampled on the allowed interval. Nodes follow a sin^2 spacing
 * so both turning points are resolved. EmptyLevel for H below min U.
 */
inline std::vector<PortraitLevel> reduced_portrait(double xi1, double xi2, const std::vector<double>& energies,
                                                   int points = 201)
{
    if (xi1 == 0.0 && xi2 == 0.0) {
        throw error(errc::no_oscillation, "U vanishes identically; no potential well to portray");
    }
    if (points < 2) {
        throw error(errc::invalid_argument, "reduced_portrait needs at least two points per branch");
    }
    const PotentialMinimum umin = potential_minimum(xi1, xi2);
    std::vector<PortraitLevel> levels;
    levels.reserve(energies.size());
    for (double energy : energies) {
        if (energy < umin.value) {
            throw error(errc::empty_level, "energy below the minimum of U");
        }
        PortraitLevel level;
        level.energy = energy;
        if (energy == umin.value) {
            level.upper.emplace_back(umin.theta0, 0.0);
            level.lower.emplace_back(umin.theta0, 0.0);
            levels.push_back(std::move(level));
            continue;
        }
        // A state on this level: at the minimizer with xi0 from the energy.
        PhaseState probe{umin.theta0, 0.0, 0.0, std::sqrt(2.0 * (energy - umin.value)), xi1, xi2};
        const TurningPoints tp = turning_points(probe);
        for (int i = 0; i < points; ++i) {
            const double phi = half_pi * static_cast<double>(i) / (points - 1);
            const double sn = std::sin(phi);
            const double theta = tp.a + (tp.b - tp.a) * sn * sn;
            double kinetic = 0.0;
            const detail::ChartTerms t(theta);
            if (!t.singular(xi1, xi2)) {
                const double w = t.w(xi1, xi2);
                kinetic = std::max(0.0, 2.0 * energy - w * w);
            }
            const double xi0 = std::sqrt(kinetic);
            level.upper.emplace_back(theta, xi0);
            level.lower.emplace_back(theta, -xi0);
        }
        levels.push_back(std::move(level));
    }
    return levels;
}

} // namespace hopfsr
