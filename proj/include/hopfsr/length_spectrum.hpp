/**
 * @file length_spectrum.hpp
 * @brief Closure ratios, initial-condition synthesis and the exact length
 *        spectrum {2 pi sqrt(n)} of closed sR geodesics.
 *
 * A geodesic with closure ratio r = |xi1 + xi2| / sqrt(2 H1) = p/q in lowest
 * terms closes after the least pair (p', q') proportional to (p, q) with p', q'
 * of equal parity. Its squared length over pi^2 is eps (q^2 - p^2) with
 * eps = 1 for p, q both odd and eps = 4 otherwise. All arithmetic on lengths is
 * done in integers.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string_view>
#include <thread>
#include <vector>

#include "hopfsr/dynamics.hpp"
#include "hopfsr/error.hpp"
#include "hopfsr/hopf_core.hpp"

namespace hopfsr {

struct Rational {
    std::int64_t p = 0;
    std::int64_t q = 1;

    [[nodiscard]] double value() const noexcept { return static_cast<double>(p) / static_cast<double>(q); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/**
 * Smallest-denominator fraction p/q with q <= q_max and |r - p/q| <= tol.
 *
 * Walks the continued-fraction convergents of r and, between consecutive
 * convergents, the intermediate fractions, which together contain every
 * best approximation. Returns nullopt if nothing qualifies or if the result
 * would be 0 or 1.
 */
inline std::optional<Rational> detect_rational(double r, std::int64_t q_max = 1000, double tol = 1e-9)
{
    if (!(r > 0.0 && r < 1.0) || q_max < 1) {
        return std::nullopt;
    }
    auto accept = [&](std::int64_t p, std::int64_t q) -> std::optional<Rational> {
        if (q > q_max || std::fabs(r - static_cast<double>(p) / static_cast<double>(q)) > tol) {
            return std::nullopt;
        }
        if (p <= 0 || p >= q) {
            return std::nullopt;
        }
        return Rational{p, q};
    };

    // h_{k-2}/k_{k-2} = 0/1, h_{k-1}/k_{k-1} = 1/0
    std::int64_t p_prev2 = 0, q_prev2 = 1;
    std::int64_t p_prev1 = 1, q_prev1 = 0;
    double x = r;
    for (int depth = 0; depth < 64; ++depth) {
        const double a_real = std::floor(x);
        if (a_real > static_cast<double>(q_max) + 1.0) {
            break;
        }
        const auto a = static_cast<std::int64_t>(a_real);
        // intermediate fractions (p_prev2 + j p_prev1) / (q_prev2 + j q_prev1), j = 1..a
        for (std::int64_t j = (depth == 0 ? a : 1); j <= a; ++j) {
            const std::int64_t p = p_prev2 + j * p_prev1;
            const std::int64_t q = q_prev2 + j * q_prev1;
            if (q > q_max) {
                return std::nullopt;
            }
            if (q == 0) {
                continue;
            }
            if (std::fabs(r - static_cast<double>(p) / static_cast<double>(q)) <= tol) {
                return accept(p, q);
            }
        }
        const std::int64_t p_next = a * p_prev1 + p_prev2;
        const std::int64_t q_next = a * q_prev1 + q_prev2;
        p_prev2 = p_prev1;
        q_prev2 = q_prev1;
        p_prev1 = p_next;
        q_prev1 = q_next;
        const double frac = x - a_real;
        if (frac <= 0.0) {
            break;
        }
        x = 1.0 / frac;
    }
    return std::nullopt;
}

enum class ParityClass { both_odd, mixed };

constexpr std::string_view to_string(ParityClass c) noexcept
{
    return c == ParityClass::both_odd ? "both_odd" : "mixed";
}

struct ClosureData {
    std::int64_t p = 0; ///< coprime closure ratio numerator
    std::int64_t q = 1; ///< coprime closure ratio denominator
    int epsilon = 1;
    ParityClass parity = ParityClass::both_odd;
    Rational r;
    std::int64_t flow_p = 0; ///< least equal-parity pair: (p, q) or (2p, 2q)
    std::int64_t flow_q = 1;
    double period = 0.0;                ///< flow_q * pi / sqrt(2 H1)
    std::int64_t length_squared_pi = 0; ///< length^2 / pi^2 = eps (q^2 - p^2)
    std::int64_t n = 0;                 ///< length = 2 pi sqrt(n)
    double length = 0.0;
};

/// n with length 2 pi sqrt(n) for the closed geodesic of coprime ratio p/q.
inline std::int64_t closed_length(std::int64_t p, std::int64_t q)
{
    if (!(0 < p && p < q)) {
        throw error(errc::invalid_argument, "closed_length needs 0 < p < q");
    }
    if (std::gcd(p, q) != 1) {
        throw error(errc::not_coprime, "closed_length needs gcd(p, q) = 1");
    }
    const std::int64_t diff = q * q - p * p;
    if (p % 2 == 1 && q % 2 == 1) {
        return diff / 4; // q^2 - p^2 = 0 mod 8 for odd p, q
    }
    return diff;
}

struct ClosureOptions {
    std::int64_t q_max = 1000;
    double tol = 1e-9;
};

/**
 * Closure data for an oscillating (Case 3 or 4) state. NotOscillating for
 * reduced fixed points and the free case, NotClosed when r is not rational
 * within tolerance.
 */
inline ClosureData closure_data(const PhaseState& s, const ClosureOptions& opt = {})
{
    try {
        (void)turning_points(s);
    } catch (const error& e) {
        if (e.code() == errc::no_oscillation) {
            throw error(errc::not_oscillating, "theta0 does not oscillate (Case 1 or Case 2)");
        }
        throw;
    }
    const EnergyReport e = hamiltonian(s);
    if (!(e.h1 > 0.0) || !(e.h_v > 0.0)) {
        throw error(errc::invalid_argument, "closure ratio needs H1 > 0 and H_V > 0");
    }
    const double r = std::fabs(s.xi1 + s.xi2) / std::sqrt(2.0 * e.h1);
    const std::optional<Rational> found = detect_rational(r, opt.q_max, opt.tol);
    if (!found) {
        throw error(errc::not_closed, "closure ratio is not rational within tolerance");
    }
    ClosureData d;
    d.r = *found;
    d.p = found->p;
    d.q = found->q;
    if (d.p % 2 == 1 && d.q % 2 == 1) {
        d.parity = ParityClass::both_odd;
        d.epsilon = 1;
        d.flow_p = d.p;
        d.flow_q = d.q;
    } else {
        d.parity = ParityClass::mixed;
        d.epsilon = 4;
        d.flow_p = 2 * d.p;
        d.flow_q = 2 * d.q;
    }
    d.period = static_cast<double>(d.flow_q) * pi / std::sqrt(2.0 * e.h1);
    d.length_squared_pi = d.epsilon * (d.q * d.q - d.p * d.p);
    d.n = closed_length(d.p, d.q);
    d.length = two_pi * std::sqrt(static_cast<double>(d.n));
    return d;
}

/**
 * Initial covector with closure ratio r for the given (xi1, xi2): theta0 at
 * tan^2(theta0) = |xi1 / xi2| (the maximizer of the admissible xi0^2), theta1 =
 * theta2 = 0, and xi0 >= 0 from
 *   xi0^2 = (xi1 + xi2)^2 / r^2 - csc^2 xi1^2 - sec^2 xi2^2
 *         = (xi1 + xi2)^2 / r^2 - (|xi1| + |xi2|)^2   at that theta0.
 * InfeasibleRatio when the right-hand side is not positive.
 */
inline PhaseState synthesize_initial_conditions(Rational r, double xi1, double xi2)
{
    if (!(0 < r.p && r.p < r.q)) {
        throw error(errc::invalid_argument, "closure ratio must lie in (0, 1)");
    }
    if (xi1 == 0.0 && xi2 == 0.0) {
        throw error(errc::infeasible_ratio, "xi1 and xi2 both vanish");
    }
    const double ratio = static_cast<double>(r.q) / static_cast<double>(r.p);
    const double sum = xi1 + xi2;
    const double abs_sum = std::fabs(xi1) + std::fabs(xi2);
    const double rhs = sum * sum * ratio * ratio - abs_sum * abs_sum;
    if (!(rhs > 0.0)) {
        throw error(errc::infeasible_ratio, "no real xi0 for this ratio: need |xi1+xi2|/(|xi1|+|xi2|) > r");
    }
    const double theta0 = std::atan2(std::sqrt(std::fabs(xi1)), std::sqrt(std::fabs(xi2)));
    return {theta0, 0.0, 0.0, std::sqrt(rhs), xi1, xi2};
}

// ---------------------------------------------------------------------------
// Spectrum

enum class Realization { hopf_fiber, both_odd, mixed };

constexpr std::string_view to_string(Realization r) noexcept
{
    switch (r) {
    case Realization::hopf_fiber: return "HopfFiber";
    case Realization::both_odd: return "both_odd";
    case Realization::mixed: return "mixed";
    }
    return "Unknown";
}

struct SpectrumEntry {
    std::int64_t n = 1;
    double length = two_pi;
    Realization realization = Realization::hopf_fiber;
    std::int64_t p = 0; ///< coprime pair realizing n (0 for the Hopf fiber)
    std::int64_t q = 0;
    int epsilon = 0;
};

/// Canonical closed geodesic of length 2 pi sqrt(n).
inline SpectrumEntry realize_length(std::int64_t n)
{
    if (n < 1) {
        throw error(errc::invalid_argument, "realize_length needs n >= 1");
    }
    SpectrumEntry e;
    e.n = n;
    e.length = two_pi * std::sqrt(static_cast<double>(n));
    if (n == 1) {
        return e;
    }
    if (n % 2 == 0) {
        e.realization = Realization::both_odd;
        e.p = n - 1;
        e.q = n + 1;
        e.epsilon = 1;
    } else {
        e.realization = Realization::mixed;
        e.p = (n - 1) / 2;
        e.q = (n + 1) / 2;
        e.epsilon = 4;
    }
    if (std::gcd(e.p, e.q) != 1 || closed_length(e.p, e.q) != n) {
        throw error(errc::not_coprime, "internal: canonical realization failed");
    }
    return e;
}

/**
 * All n = eps (q^2 - p^2) / 4 over coprime 0 < p < q <= q_bound. The Hopf
 * fiber value n = 1 is not produced by any pair and is not included.
 */
inline std::set<std::int64_t> spectrum_bruteforce_oracle(std::int64_t q_bound, unsigned jobs = 1)
{
    if (q_bound < 2) {
        throw error(errc::invalid_argument, "spectrum oracle needs q_bound >= 2");
    }
    jobs = std::max(1u, jobs);
    std::vector<std::set<std::int64_t>> partial(jobs);
    auto work = [&](unsigned worker) {
        for (std::int64_t q = 2 + worker; q <= q_bound; q += jobs) {
            for (std::int64_t p = 1; p < q; ++p) {
                if (std::gcd(p, q) == 1) {
                    partial[worker].insert(closed_length(p, q));
                }
            }
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < jobs; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    std::set<std::int64_t> out;
    for (const auto& part : partial) {
        out.insert(part.begin(), part.end());
    }
    return out;
}

/// Spectrum rows for n = 1..n_max.
inline std::vector<SpectrumEntry> spectrum_table(std::int64_t n_max)
{
    if (n_max < 1) {
        throw error(errc::invalid_argument, "spectrum table needs n_max >= 1");
    }
    std::vector<SpectrumEntry> rows;
    rows.reserve(static_cast<std::size_t>(n_max));
    for (std::int64_t n = 1; n <= n_max; ++n) {
        rows.push_back(realize_length(n));
    }
    return rows;
}

} // namespace hopfsr
