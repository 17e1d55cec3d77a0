/**
 * @file hopf_core.hpp
 * @brief Hopf coordinates on the three-sphere: chart folding, the embedding
 *        into R^4, the orthonormal frame (V, E1, E2) and the metric tensors.
 *
 * Chart convention: x1 + i y1 = sin(theta0) e^{i theta1},
 *                   x2 + i y2 = cos(theta0) e^{i theta2},
 * with the Hopf cube [0, pi/2] x [0, 2pi) x [0, 2pi) as fundamental domain.
 */
#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "hopfsr/error.hpp"

namespace hopfsr {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double half_pi = 0.5 * std::numbers::pi;

/// Default accuracy used by the structural audits.
inline constexpr double default_tolerance = 1e-12;

struct HopfPoint {
    double theta0 = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;

    /// True on the chart boundary, where the theta1 (or theta2) direction collapses.
    [[nodiscard]] bool on_boundary() const noexcept { return theta0 == 0.0 || theta0 == half_pi; }
};

struct EuclideanPoint {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    [[nodiscard]] Eigen::Vector4d vec() const noexcept { return {x1, y1, x2, y2}; }
    [[nodiscard]] double norm2() const noexcept { return x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2; }

    static EuclideanPoint from(const Eigen::Vector4d& v) noexcept { return {v[0], v[1], v[2], v[3]}; }
};

/// Reduce an angle into [0, 2pi). Negative zero maps to +0.
inline double wrap_angle(double angle) noexcept
{
    double r = std::fmod(angle, two_pi);
    if (r < 0.0) {
        r += two_pi;
    }
    if (r >= two_pi) { // -tiny + 2pi rounds up to 2pi
        r = 0.0;
    }
    return r + 0.0;
}

/// Result of folding a raw triple back into the Hopf cube.
struct FoldResult {
    HopfPoint point;
    /// Number of reflections applied to theta0 (rules (ii) and (iii) combined).
    /// The conjugate momentum xi0 changes sign once per reflection.
    int reflections = 0;
};

/**
 * Fold an arbitrary angle triple into the fundamental domain.
 *
 * theta0 is first reduced modulo 2pi into [-pi/2, 3pi/2) (the embedding is
 * 2pi-periodic in theta0). Then, if theta0 > pi/2 the identification
 * (theta0, theta1, theta2) ~ (pi - theta0, theta1, theta2 + pi) is applied,
 * and if theta0 < 0 the identification (theta0, theta1, theta2) ~ (-theta0,
 * theta1 + pi, theta2). At most two reflections happen. theta1 and theta2 are
 * wrapped into [0, 2pi) last.
 */
inline FoldResult fold_with_parity(double theta0, double theta1, double theta2) noexcept
{
    FoldResult out;
    double t0 = std::fmod(theta0 + half_pi, two_pi);
    if (t0 < 0.0) {
        t0 += two_pi;
    }
    t0 -= half_pi;
    if (t0 > half_pi) {
        t0 = pi - t0;
        theta2 += pi;
        ++out.reflections;
    }
    if (t0 < 0.0) {
        t0 = -t0;
        theta1 += pi;
        ++out.reflections;
    }
    out.point = HopfPoint{t0 + 0.0, wrap_angle(theta1), wrap_angle(theta2)};
    return out;
}

inline HopfPoint fold(double theta0, double theta1, double theta2) noexcept
{
    return fold_with_parity(theta0, theta1, theta2).point;
}

inline HopfPoint fold(const HopfPoint& raw) noexcept { return fold(raw.theta0, raw.theta1, raw.theta2); }

/// Embedding into R^4. Valid for any real angles; the result has unit norm.
inline EuclideanPoint hopf_to_euclidean(const HopfPoint& p) noexcept
{
    const double s0 = std::sin(p.theta0);
    const double c0 = std::cos(p.theta0);
    return {std::cos(p.theta1) * s0, std::sin(p.theta1) * s0, std::cos(p.theta2) * c0, std::sin(p.theta2) * c0};
}

/// Inverse chart. On the boundary circles the collapsed angle is reported as 0.
inline HopfPoint euclidean_to_hopf(const EuclideanPoint& e) noexcept
{
    const double r1 = std::hypot(e.x1, e.y1);
    const double r2 = std::hypot(e.x2, e.y2);
    const double theta1 = r1 > 0.0 ? wrap_angle(std::atan2(e.y1, e.x1)) : 0.0;
    const double theta2 = r2 > 0.0 ? wrap_angle(std::atan2(e.y2, e.x2)) : 0.0;
    double theta0 = std::atan2(r1, r2);
    if (theta0 > half_pi) {
        theta0 = half_pi;
    }
    return {theta0, theta1, theta2};
}

// ---------------------------------------------------------------------------
// Frame fields

struct Frame {
    // Components along (d/dtheta0, d/dtheta1, d/dtheta2).
    Eigen::Vector3d v;
    Eigen::Vector3d e1;
    Eigen::Vector3d e2;
    // Components along (d/dx1, d/dy1, d/dx2, d/dy2).
    Eigen::Vector4d v4;
    Eigen::Vector4d e1_4;
    Eigen::Vector4d e2_4;
};

struct EuclideanFrame {
    Eigen::Vector4d v;
    Eigen::Vector4d e1;
    Eigen::Vector4d e2;
};

inline EuclideanFrame euclidean_frame(const EuclideanPoint& e) noexcept
{
    return {
        {-e.y1, e.x1, -e.y2, e.x2},
        {-e.x2, e.y2, e.x1, -e.y1},
        {-e.y2, -e.x2, e.y1, e.x1},
    };
}

/// Frame in both component systems. Throws BoundaryChart on theta0 in {0, pi/2}
/// because cot/tan are undefined there; use euclidean_frame() instead.
inline Frame frame_at(const HopfPoint& p)
{
    if (p.on_boundary()) {
        throw error(errc::boundary_chart, "Hopf frame components undefined at theta0 = 0 or pi/2");
    }
    const double sum = p.theta1 + p.theta2;
    const double cs = std::cos(sum);
    const double sn = std::sin(sum);
    const double cot0 = std::cos(p.theta0) / std::sin(p.theta0);
    const double tan0 = std::sin(p.theta0) / std::cos(p.theta0);

    const EuclideanFrame ef = euclidean_frame(hopf_to_euclidean(p));
    Frame f;
    f.v = {0.0, 1.0, 1.0};
    f.e1 = {-cs, sn * cot0, -sn * tan0};
    f.e2 = {-sn, -cs * cot0, cs * tan0};
    f.v4 = ef.v;
    f.e1_4 = ef.e1;
    f.e2_4 = ef.e2;
    return f;
}

// ---------------------------------------------------------------------------
// Linear vector fields on R^4, stored as the matrix A of x |-> A x.

using LinearField = Eigen::Matrix4d;

inline LinearField v_field()
{
    LinearField a = LinearField::Zero();
    a(0, 1) = -1.0; // dx1 = -y1
    a(1, 0) = 1.0;  // dy1 =  x1
    a(2, 3) = -1.0; // dx2 = -y2
    a(3, 2) = 1.0;  // dy2 =  x2
    return a;
}

inline LinearField e1_field()
{
    LinearField a = LinearField::Zero();
    a(0, 2) = -1.0;
    a(1, 3) = 1.0;
    a(2, 0) = 1.0;
    a(3, 1) = -1.0;
    return a;
}

inline LinearField e2_field()
{
    LinearField a = LinearField::Zero();
    a(0, 3) = -1.0;
    a(1, 2) = -1.0;
    a(2, 1) = 1.0;
    a(3, 0) = 1.0;
    return a;
}

/// Vector-field bracket of X = A x and Y = B x: [X, Y](x) = (B A - A B) x.
/// Integer-valued inputs give exact results.
inline LinearField lie_bracket(const LinearField& a, const LinearField& b) { return b * a - a * b; }

// ---------------------------------------------------------------------------
// Metrics in (theta0, theta1, theta2) coordinates

enum class MetricKind { round, sub_riemannian, penalty };

struct MetricMatrix {
    Eigen::Matrix3d entries;
    MetricKind kind = MetricKind::round;
    double lambda = 1.0;
};

namespace detail {

inline Eigen::Matrix3d round_metric(double theta0)
{
    const double s = std::sin(theta0);
    const double c = std::cos(theta0);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = s * s;
    g(2, 2) = c * c;
    return g;
}

inline Eigen::Matrix3d sr_metric(double theta0)
{
    const double s = std::sin(theta0);
    const double c = std::cos(theta0);
    const double w = c * c * s * s;
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = w;
    g(1, 2) = -w;
    g(2, 1) = -w;
    g(2, 2) = w;
    return g;
}

inline Eigen::Matrix3d penalty_metric(double theta0, double lambda)
{
    const double s2 = std::sin(theta0) * std::sin(theta0);
    const double c2 = std::cos(theta0) * std::cos(theta0);
    const double k = lambda * lambda - 1.0;
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = k * s2 * s2 + s2;
    g(1, 2) = k * c2 * s2;
    g(2, 1) = k * c2 * s2;
    g(2, 2) = k * c2 * c2 + c2;
    return g;
}

inline void require_interior(const HopfPoint& p, const char* what)
{
    if (p.on_boundary()) {
        throw error(errc::boundary_chart, what);
    }
}

} // namespace detail

/**
 * Metric tensor at p. The round metric is defined everywhere; the sR and
 * penalty kinds throw BoundaryChart on the chart boundary, where they
 * degenerate.
 */
inline MetricMatrix metric(MetricKind kind, const HopfPoint& p, double lambda = 1.0)
{
    switch (kind) {
    case MetricKind::round:
        return {detail::round_metric(p.theta0), kind, 1.0};
    case MetricKind::sub_riemannian:
        detail::require_interior(p, "sR metric requested on the chart boundary");
        return {detail::sr_metric(p.theta0), kind, 1.0};
    case MetricKind::penalty:
        detail::require_interior(p, "penalty metric requested on the chart boundary");
        if (!(lambda >= 1.0)) {
            throw error(errc::invalid_argument, "penalty metric needs lambda >= 1");
        }
        return {detail::penalty_metric(p.theta0, lambda), kind, lambda};
    }
    throw error(errc::invalid_argument, "unknown metric kind");
}

/// Closed-form inverse of the penalty metric.
inline Eigen::Matrix3d penalty_inverse(const HopfPoint& p, double lambda)
{
    detail::require_interior(p, "penalty inverse requested on the chart boundary");
    const double t = std::tan(p.theta0);
    const double il2 = 1.0 / (lambda * lambda);
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = 1.0 / (t * t) + il2;
    g(1, 2) = il2 - 1.0;
    g(2, 1) = il2 - 1.0;
    g(2, 2) = t * t + il2;
    return g;
}

/// Closed-form determinant lambda^2 cos^2 sin^2 of the penalty metric.
inline double penalty_determinant(const HopfPoint& p, double lambda) noexcept
{
    const double sc = std::sin(p.theta0) * std::cos(p.theta0);
    return lambda * lambda * sc * sc;
}

/// g(a, b) for the round metric at p.
inline double round_inner(const HopfPoint& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b)
{
    return a.dot(detail::round_metric(p.theta0) * b);
}

} // namespace hopfsr
