/**
 * @file eigenvalues.hpp
 * @brief Eigenvalue tables of the round Laplacian, the subLaplacian and the
 *        penalty Laplacians on S^3, and a finite-difference check of the
 *        Gaussian-beam eigenfunction sin^k(theta0) cos(k theta1).
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "hopfsr/error.hpp"
#include "hopfsr/hopf_core.hpp"

namespace hopfsr {

struct EigenIndex {
    std::int64_t m = 0;
    std::int64_t j = 0;

    [[nodiscard]] bool valid() const noexcept { return m >= 0 && j >= 0 && j <= m; }
};

namespace detail {

inline void require_index(const EigenIndex& ix)
{
    if (!ix.valid()) {
        throw error(errc::invalid_argument, "eigen index needs 0 <= j <= m");
    }
}

} // namespace detail

/// m (m + 2)
inline std::int64_t laplace_eigenvalue(std::int64_t m)
{
    if (m < 0) {
        throw error(errc::invalid_argument, "m must be non-negative");
    }
    return m * (m + 2);
}

/// 4 m j - 4 j^2 + 2 m
inline std::int64_t sublaplace_eigenvalue(const EigenIndex& ix)
{
    detail::require_index(ix);
    return 4 * ix.m * ix.j - 4 * ix.j * ix.j + 2 * ix.m;
}

/// (1 - lambda^-2) 4 j (m - j) + m (2 + lambda^-2 m)
inline double penalty_eigenvalue(const EigenIndex& ix, double lambda)
{
    detail::require_index(ix);
    if (!(lambda >= 1.0)) {
        throw error(errc::invalid_argument, "penalty eigenvalue needs lambda >= 1");
    }
    const double il2 = 1.0 / (lambda * lambda);
    const auto m = static_cast<double>(ix.m);
    const auto j = static_cast<double>(ix.j);
    return (1.0 - il2) * 4.0 * j * (m - j) + m * (2.0 + il2 * m);
}

struct EigenRow {
    EigenIndex index;
    std::int64_t laplace = 0;
    std::int64_t sublaplace = 0;
    std::vector<double> penalty; ///< one entry per requested lambda
};

inline std::vector<EigenRow> eigen_table(std::int64_t m_max, const std::vector<double>& lambdas)
{
    if (m_max < 0) {
        throw error(errc::invalid_argument, "m_max must be non-negative");
    }
    std::vector<EigenRow> rows;
    for (std::int64_t m = 0; m <= m_max; ++m) {
        for (std::int64_t j = 0; j <= m; ++j) {
            EigenRow row;
            row.index = {m, j};
            row.laplace = laplace_eigenvalue(m);
            row.sublaplace = sublaplace_eigenvalue(row.index);
            for (double lambda : lambdas) {
                row.penalty.push_back(penalty_eigenvalue(row.index, lambda));
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Gaussian beam

/// Sample grid for the beam check: theta0 within half_width of pi/4.
struct BeamGrid {
    double half_width = 0.1;
    int theta0_points = 5;
    int theta1_points = 8;
    std::array<double, 2> theta2_values{0.0, 1.0};
};

namespace detail {

inline void require_stencil(double h, const BeamGrid& grid)
{
    if (!(h > 0.0)) {
        throw error(errc::invalid_argument, "grid spacing must be positive");
    }
    const double lo = 0.25 * pi - grid.half_width - h;
    const double hi = 0.25 * pi + grid.half_width + h;
    if (!(lo > 0.0 && hi < half_pi)) {
        throw error(errc::stencil_out_of_domain, "stencil leaves (0, pi/2)");
    }
}

/**
 * Second-order central differences of
 *   d0^2 + 2 cot(2 theta0) d0 + cot^2 d1^2 - 2 d1 d2 + tan^2 d2^2
 * applied to f at (t0, t1, t2).
 */
template <class F>
double sr_laplacian_stencil(const F& f, double t0, double t1, double t2, double h)
{
    const double h2 = h * h;
    const double centre = f(t0, t1, t2);
    const double d00 = (f(t0 + h, t1, t2) - 2.0 * centre + f(t0 - h, t1, t2)) / h2;
    const double d0 = (f(t0 + h, t1, t2) - f(t0 - h, t1, t2)) / (2.0 * h);
    const double d11 = (f(t0, t1 + h, t2) - 2.0 * centre + f(t0, t1 - h, t2)) / h2;
    const double d22 = (f(t0, t1, t2 + h) - 2.0 * centre + f(t0, t1, t2 - h)) / h2;
    const double d12 = (f(t0, t1 + h, t2 + h) - f(t0, t1 + h, t2 - h) - f(t0, t1 - h, t2 + h)
                        + f(t0, t1 - h, t2 - h))
                       / (4.0 * h2);
    const double tn = std::tan(t0);
    const double cot2 = 1.0 / std::tan(2.0 * t0);
    return d00 + 2.0 * cot2 * d0 + d11 / (tn * tn) - 2.0 * d12 + tn * tn * d22;
}

/// Central difference of V = d1 + d2.
template <class F>
double v_derivative_stencil(const F& f, double t0, double t1, double t2, double h)
{
    return (f(t0, t1 + h, t2 + h) - f(t0, t1 - h, t2 - h)) / (2.0 * h);
}

template <class Visit>
void for_each_grid_point(const BeamGrid& grid, Visit&& visit)
{
    for (int a = 0; a < grid.theta0_points; ++a) {
        const double frac = grid.theta0_points == 1 ? 0.5 : static_cast<double>(a) / (grid.theta0_points - 1);
        const double t0 = 0.25 * pi - grid.half_width + 2.0 * grid.half_width * frac;
        for (int b = 0; b < grid.theta1_points; ++b) {
            const double t1 = two_pi * static_cast<double>(b) / grid.theta1_points;
            for (double t2 : grid.theta2_values) {
                visit(t0, t1, t2);
            }
        }
    }
}

} // namespace detail

/// sin^k(theta0) cos(k theta1)
inline double gaussian_beam(int k, double theta0, double theta1) noexcept
{
    return std::pow(std::sin(theta0), k) * std::cos(k * theta1);
}

/**
 * max |(Delta_sR,h + 2k) f| / max |f| over the sample grid, with
 * f = sin^k(theta0) cos(k theta1). O(h^2) as h -> 0.
 */
inline double gaussian_beam_residual(int k, double h, const BeamGrid& grid = {})
{
    if (k < 1) {
        throw error(errc::invalid_argument, "beam order k must be >= 1");
    }
    detail::require_stencil(h, grid);
    auto f = [k](double t0, double t1, double) { return gaussian_beam(k, t0, t1); };
    double worst = 0.0;
    double scale = 0.0;
    detail::for_each_grid_point(grid, [&](double t0, double t1, double t2) {
        const double value = f(t0, t1, t2);
        const double lap = detail::sr_laplacian_stencil(f, t0, t1, t2, h);
        worst = std::max(worst, std::fabs(lap + 2.0 * k * value));
        scale = std::max(scale, std::fabs(value));
    });
    return worst / scale;
}

/**
 * max |Delta_sR,h (V_h f) - V_h (Delta_sR,h f)| / max |f| on the beam family.
 * Both stencils are translation-invariant in (theta1, theta2) with
 * theta0-only coefficients, so the result is at round-off level.
 */
inline double beam_commutator_residual(int k, double h, const BeamGrid& grid = {})
{
    if (k < 1) {
        throw error(errc::invalid_argument, "beam order k must be >= 1");
    }
    detail::require_stencil(h, grid);
    auto f = [k](double t0, double t1, double) { return gaussian_beam(k, t0, t1); };
    auto vf = [&](double t0, double t1, double t2) { return detail::v_derivative_stencil(f, t0, t1, t2, h); };
    auto lf = [&](double t0, double t1, double t2) { return detail::sr_laplacian_stencil(f, t0, t1, t2, h); };
    double worst = 0.0;
    double scale = 0.0;
    detail::for_each_grid_point(grid, [&](double t0, double t1, double t2) {
        const double lv = detail::sr_laplacian_stencil(vf, t0, t1, t2, h);
        const double vl = detail::v_derivative_stencil(lf, t0, t1, t2, h);
        worst = std::max(worst, std::fabs(lv - vl));
        scale = std::max(scale, std::fabs(f(t0, t1, t2)));
    });
    return worst / scale;
}

} // namespace hopfsr
