/**
 * @file dynamics.hpp
 * @brief Hamiltonians, Hamiltonian vector fields and the reduced
 *        one-dimensional problem for the sR geodesic flow on S^3.
 *
 * Momenta (xi0, xi1, xi2) are conjugate to (theta0, theta1, theta2). The sR
 * Hamiltonian is H = xi0^2/2 + (cot(theta0) xi1 - tan(theta0) xi2)^2/2, the
 * vertical energy H_V = (xi1 + xi2)^2/2 and the round energy H1 = H + H_V.
 *
 * Everything here is a pure function of its arguments.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hopfsr/error.hpp"
#include "hopfsr/hopf_core.hpp"

namespace hopfsr {

struct PhaseState {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double xi0 = 0.0;
    double xi1 = 0.0;
    double xi2 = 0.0;

    [[nodiscard]] HopfPoint position() const noexcept { return {theta0, theta1, theta2}; }
    [[nodiscard]] std::array<double, 6> as_array() const noexcept { return {theta0, theta1, theta2, xi0, xi1, xi2}; }

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

/// Time derivative of a PhaseState; same layout.
using PhaseDerivative = PhaseState;

inline PhaseState operator+(const PhaseState& a, const PhaseState& b) noexcept
{
    return {a.theta0 + b.theta0, a.theta1 + b.theta1, a.theta2 + b.theta2,
            a.xi0 + b.xi0,       a.xi1 + b.xi1,       a.xi2 + b.xi2};
}

inline PhaseState operator*(double k, const PhaseState& a) noexcept
{
    return {k * a.theta0, k * a.theta1, k * a.theta2, k * a.xi0, k * a.xi1, k * a.xi2};
}

inline PhaseState operator-(const PhaseState& a, const PhaseState& b) noexcept { return a + (-1.0) * b; }

inline double max_abs(const PhaseState& a) noexcept
{
    const auto v = a.as_array();
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::fabs(x));
    }
    return m;
}

struct EnergyReport {
    double h = 0.0;   ///< sR energy
    double h1 = 0.0;  ///< round (Riemannian) energy, h + h_v
    double h_v = 0.0; ///< vertical energy
    double r = 0.0;   ///< closure ratio |xi1 + xi2| / sqrt(2 h1); 0 when h1 = 0
};

struct TurningPoints {
    double a = 0.0; ///< lower turning point (larger cos^2)
    double b = 0.0; ///< upper turning point
    double x_a = 0.0;
    double x_b = 0.0;
    bool a_on_boundary = false; ///< a = 0 exactly (xi1 = 0)
    bool b_on_boundary = false; ///< b = pi/2 exactly (xi2 = 0)
};

namespace detail {

inline constexpr double boundary_eps = 1e-15;

/// sin/cos of theta0 with the two one-sided singular terms. A term whose
/// momentum is exactly zero is dropped, which gives the finite Case-4 limit on
/// the boundary and keeps the extended chart smooth.
struct ChartTerms {
    double s;
    double c;
    bool sin_zero;
    bool cos_zero;

    explicit ChartTerms(double theta0) noexcept
        : s(std::sin(theta0)), c(std::cos(theta0)),
          sin_zero(theta0 == 0.0 || std::fabs(s) < boundary_eps),
          cos_zero(theta0 == half_pi || std::fabs(c) < boundary_eps)
    {}

    [[nodiscard]] bool singular(double xi1, double xi2) const noexcept
    {
        return (sin_zero && xi1 != 0.0) || (cos_zero && xi2 != 0.0);
    }

    // cot(theta0) xi1 - tan(theta0) xi2
    [[nodiscard]] double w(double xi1, double xi2) const noexcept
    {
        const double left = xi1 != 0.0 ? (c / s) * xi1 : 0.0;
        const double right = xi2 != 0.0 ? (s / c) * xi2 : 0.0;
        return left - right;
    }

    // d/dtheta0 of w
    [[nodiscard]] double dw(double xi1, double xi2) const noexcept
    {
        const double left = xi1 != 0.0 ? xi1 / (s * s) : 0.0;
        const double right = xi2 != 0.0 ? xi2 / (c * c) : 0.0;
        return -left - right;
    }
};

inline double hv_energy(double xi1, double xi2) noexcept { return 0.5 * (xi1 + xi2) * (xi1 + xi2); }

} // namespace detail

/// Energies of a state. Throws BoundaryChart on the boundary unless the
/// offending momentum is zero.
inline EnergyReport hamiltonian(const PhaseState& s)
{
    const detail::ChartTerms t(s.theta0);
    if (t.singular(s.xi1, s.xi2)) {
        throw error(errc::boundary_chart, "Hamiltonian is singular on the chart boundary");
    }
    const double w = t.w(s.xi1, s.xi2);
    EnergyReport e;
    e.h = 0.5 * s.xi0 * s.xi0 + 0.5 * w * w;
    e.h_v = detail::hv_energy(s.xi1, s.xi2);
    e.h1 = e.h + e.h_v;
    e.r = e.h1 > 0.0 ? std::fabs(s.xi1 + s.xi2) / std::sqrt(2.0 * e.h1) : 0.0;
    return e;
}

/// Penalty Hamiltonian H + (xi1 + xi2)^2 / (2 lambda^2).
inline double penalty_hamiltonian(const PhaseState& s, double lambda)
{
    return hamiltonian(s).h + detail::hv_energy(s.xi1, s.xi2) / (lambda * lambda);
}

/// Hamilton's equations for H.
inline PhaseDerivative sr_vector_field(const PhaseState& s)
{
    const detail::ChartTerms t(s.theta0);
    if (t.singular(s.xi1, s.xi2)) {
        throw error(errc::singular_field, "sR field singular: boundary reached with nonzero momentum");
    }
    PhaseDerivative d;
    d.theta0 = s.xi0;
    d.theta1 = (s.xi1 != 0.0 ? (t.c * t.c) / (t.s * t.s) * s.xi1 : 0.0) - s.xi2;
    d.theta2 = (s.xi2 != 0.0 ? (t.s * t.s) / (t.c * t.c) * s.xi2 : 0.0) - s.xi1;
    const double pull = s.xi1 != 0.0 ? t.c / (t.s * t.s * t.s) * s.xi1 * s.xi1 : 0.0;
    const double push = s.xi2 != 0.0 ? t.s / (t.c * t.c * t.c) * s.xi2 * s.xi2 : 0.0;
    d.xi0 = pull - push;
    return d;
}

/// Hamilton's equations for the penalty Hamiltonian H_lambda.
inline PhaseDerivative penalty_vector_field(const PhaseState& s, double lambda)
{
    PhaseDerivative d = sr_vector_field(s);
    const double shift = (s.xi1 + s.xi2) / (lambda * lambda);
    d.theta1 += shift;
    d.theta2 += shift;
    return d;
}

/// Hamiltonian field of H_V: a Hopf-fiber rotation.
inline PhaseDerivative hv_vector_field(const PhaseState& s) noexcept
{
    const double k = s.xi1 + s.xi2;
    return {0.0, k, k, 0.0, 0.0, 0.0};
}

/// Hamiltonian field of H1 (the round geodesic flow).
inline PhaseDerivative h1_vector_field(const PhaseState& s) { return penalty_vector_field(s, 1.0); }

// ---------------------------------------------------------------------------
// Reduced problem in (theta0, xi0)

inline double potential_u(double theta0, double xi1, double xi2)
{
    const detail::ChartTerms t(theta0);
    if (t.singular(xi1, xi2)) {
        throw error(errc::boundary_chart, "potential evaluated on the chart boundary");
    }
    const double w = t.w(xi1, xi2);
    return 0.5 * w * w;
}

/// dU/dtheta0.
inline double potential_derivative(double theta0, double xi1, double xi2)
{
    const detail::ChartTerms t(theta0);
    if (t.singular(xi1, xi2)) {
        throw error(errc::boundary_chart, "potential evaluated on the chart boundary");
    }
    return t.w(xi1, xi2) * t.dw(xi1, xi2);
}

struct PotentialMinimum {
    double theta0 = 0.0;
    double value = 0.0;
};

/**
 * Location and value of min U. The minimizer satisfies tan^2(theta0) =
 * |xi1 / xi2|; with xi1 = 0 (resp. xi2 = 0) it sits on the boundary theta0 = 0
 * (resp. pi/2) with value 0. Throws NoOscillation when U vanishes identically.
 */
inline PotentialMinimum potential_minimum(double xi1, double xi2)
{
    if (xi1 == 0.0 && xi2 == 0.0) {
        throw error(errc::no_oscillation, "U vanishes identically (xi1 = xi2 = 0)");
    }
    if (xi1 == 0.0) {
        return {0.0, 0.0};
    }
    if (xi2 == 0.0) {
        return {half_pi, 0.0};
    }
    const double theta0 = std::atan2(std::sqrt(std::fabs(xi1)), std::sqrt(std::fabs(xi2)));
    if ((xi1 > 0.0) == (xi2 > 0.0)) {
        return {theta0, 0.0};
    }
    // Opposite signs: cot xi1 and -tan xi2 share a sign, w = sign(xi1) 2 sqrt|xi1 xi2|.
    const double w = 2.0 * std::sqrt(std::fabs(xi1 * xi2));
    return {theta0, 0.5 * w * w};
}

/**
 * Turning points of the theta0 oscillation: roots of
 *   [-2H - (xi1+xi2)^2] x^2 + 2 (H + xi1 xi2 + xi2^2) x - xi2^2 = 0,  x = cos^2(theta0).
 *
 * Boundary turning points are reported exactly (x = 1 when xi1 = 0, x = 0 when
 * xi2 = 0). Throws NoOscillation for reduced fixed points and for U = 0.
 */
inline TurningPoints turning_points(const PhaseState& s)
{
    if (s.xi1 == 0.0 && s.xi2 == 0.0) {
        throw error(errc::no_oscillation, "free case: U vanishes identically");
    }
    const double h = hamiltonian(s).h;
    const double sum = s.xi1 + s.xi2;
    const double qa = -2.0 * h - sum * sum;
    const double qb = 2.0 * (h + s.xi1 * s.xi2 + s.xi2 * s.xi2);
    const double qc = -s.xi2 * s.xi2;

    TurningPoints tp;
    if (s.xi1 == 0.0) {
        tp.x_a = 1.0;
        tp.x_b = qc / qa;
        tp.a_on_boundary = true;
    } else if (s.xi2 == 0.0) {
        tp.x_b = 0.0;
        tp.x_a = -qb / qa;
        tp.b_on_boundary = true;
    } else {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc <= 4.0 * std::numeric_limits<double>::epsilon() * qb * qb) {
            throw error(errc::no_oscillation, "reduced fixed point: theta0 does not oscillate");
        }
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        const double r1 = q / qa;
        const double r2 = qc / q;
        tp.x_a = std::max(r1, r2);
        tp.x_b = std::min(r1, r2);
    }
    if (!(tp.x_a > tp.x_b)) {
        throw error(errc::no_oscillation, "degenerate turning points");
    }
    tp.x_a = std::clamp(tp.x_a, 0.0, 1.0);
    tp.x_b = std::clamp(tp.x_b, 0.0, 1.0);

    auto to_angle = [](double x) { return std::atan2(std::sqrt(1.0 - x), std::sqrt(x)); };
    tp.a = tp.a_on_boundary ? 0.0 : to_angle(tp.x_a);
    tp.b = tp.b_on_boundary ? half_pi : to_angle(tp.x_b);

    // Newton polish on 2H - w(theta)^2 = 0 for interior turning points.
    auto polish = [&](double theta) {
        for (int i = 0; i < 3; ++i) {
            const detail::ChartTerms t(theta);
            const double w = t.w(s.xi1, s.xi2);
            const double g = 2.0 * h - w * w;
            const double dg = -2.0 * w * t.dw(s.xi1, s.xi2);
            if (dg == 0.0 || g == 0.0) {
                break;
            }
            const double next = theta - g / dg;
            const detail::ChartTerms tn(next);
            const double wn = tn.w(s.xi1, s.xi2);
            if (!(std::fabs(2.0 * h - wn * wn) < std::fabs(g))) {
                break;
            }
            theta = next;
        }
        return theta;
    };
    if (!tp.a_on_boundary) {
        tp.a = polish(tp.a);
    }
    if (!tp.b_on_boundary) {
        tp.b = polish(tp.b);
    }
    return tp;
}

/// Period of the (folded) theta0 oscillation, pi / sqrt(2 H1). This is half the
/// period of the round geodesic flow through the same covector.
inline double theta0_period_analytic(const PhaseState& s)
{
    (void)turning_points(s); // validates that theta0 oscillates
    return pi / std::sqrt(2.0 * hamiltonian(s).h1);
}

/**
 * Period of theta0 by direct quadrature of 2 int_a^b dtheta / sqrt(2(H - U)).
 *
 * With x = cos^2(theta) the kinetic term factors through the turning-point
 * quadratic:
 *   2(H - U) = |A| sin(theta - a) sin(theta + a) sin(b - theta) sin(b + theta) / (sin^2 cos^2),
 * and theta = a + (b - a) sin^2(phi) removes both inverse square roots. Both
 * distances to the turning points are formed directly from phi, so nothing
 * cancels near the ends. Integrated with adaptive Gauss-Kronrod; throws
 * QuadratureFailure if the error estimate exceeds tol.
 */
inline double theta0_period_quadrature(const PhaseState& s, double tol = 1e-9)
{
    const TurningPoints tp = turning_points(s);
    const double h = hamiltonian(s).h;
    const double sum = s.xi1 + s.xi2;
    const double lead = 2.0 * h + sum * sum;
    const double a = tp.a;
    const double b = tp.b;
    const double span = b - a;

    // u / sqrt(sin(span u^2)), continuous at u = 0
    auto edge = [span](double u) {
        if (u == 0.0) {
            return 1.0 / std::sqrt(span);
        }
        return u / std::sqrt(std::sin(span * u * u));
    };

    auto integrand = [&](double phi) {
        const double sn = std::sin(phi);
        const double cs = std::cos(phi);
        const double theta = sn < cs ? a + span * sn * sn : b - span * cs * cs;
        const double st = std::sin(theta);
        const double ct = std::cos(theta);
        const double low = tp.a_on_boundary ? std::sqrt(st) : st / std::sqrt(std::sin(theta + a));
        const double high = tp.b_on_boundary ? std::sqrt(ct) : ct / std::sqrt(std::sin(b + theta));
        return 4.0 * span * edge(sn) * edge(cs) * low * high / std::sqrt(lead);
    };

    double err = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, half_pi, 20, 1e-13, &err);
    if (!std::isfinite(value) || err > tol) {
        throw error(errc::quadrature_failure, "period quadrature did not reach the requested tolerance");
    }
    return value;
}

// ---------------------------------------------------------------------------
// Poisson brackets

struct PhaseGradient {
    std::array<double, 3> d_theta{};
    std::array<double, 3> d_xi{};
};

/// {F, G} = sum_j dF/dtheta_j dG/dxi_j - dF/dxi_j dG/dtheta_j.
inline double poisson_bracket(const PhaseGradient& f, const PhaseGradient& g) noexcept
{
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
        sum += f.d_theta[j] * g.d_xi[j] - f.d_xi[j] * g.d_theta[j];
    }
    return sum;
}

inline PhaseGradient h1_gradient(const PhaseState& s)
{
    const detail::ChartTerms t(s.theta0);
    if (t.sin_zero || t.cos_zero) {
        throw error(errc::boundary_chart, "H1 gradient on the chart boundary");
    }
    const double csc2 = 1.0 / (t.s * t.s);
    const double sec2 = 1.0 / (t.c * t.c);
    PhaseGradient g;
    g.d_theta[0] = -(t.c / t.s) * csc2 * s.xi1 * s.xi1 + (t.s / t.c) * sec2 * s.xi2 * s.xi2;
    g.d_xi = {s.xi0, csc2 * s.xi1, sec2 * s.xi2};
    return g;
}

inline PhaseGradient hv_gradient(const PhaseState& s) noexcept
{
    PhaseGradient g;
    g.d_xi = {0.0, s.xi1 + s.xi2, s.xi1 + s.xi2};
    return g;
}

inline PhaseGradient h_gradient(const PhaseState& s)
{
    const detail::ChartTerms t(s.theta0);
    if (t.sin_zero || t.cos_zero) {
        throw error(errc::boundary_chart, "H gradient on the chart boundary");
    }
    const double w = t.w(s.xi1, s.xi2);
    PhaseGradient g;
    g.d_theta[0] = w * t.dw(s.xi1, s.xi2);
    g.d_xi = {s.xi0, w * t.c / t.s, -w * t.s / t.c};
    return g;
}

/// {H1, H_V} evaluated from explicit partial derivatives.
inline double poisson_bracket_h1_hv(const PhaseState& s) { return poisson_bracket(h1_gradient(s), hv_gradient(s)); }

} // namespace hopfsr
