/**
 * @file integrator.hpp
 * @brief Fixed-step RK4 integration of the sR and penalty geodesic flows,
 *        event detection, closure tests, arc length and a simplicity audit.
 *
 * States are integrated in the extended chart: theta0 is not folded back into
 * [0, pi/2] during the run. When the singular momentum on a boundary vanishes
 * the equations are smooth across it, so Case-2 and Case-4 geodesics pass
 * through the chart boundary without special handling; bounce events are logged
 * where the folded theta0 would reflect.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "hopfsr/dynamics.hpp"
#include "hopfsr/error.hpp"
#include "hopfsr/hopf_core.hpp"

namespace hopfsr {

enum class FlowKind { sub_riemannian, penalty };

struct Flow {
    FlowKind kind = FlowKind::sub_riemannian;
    double lambda = 1.0;

    static Flow sub_riemannian() { return {}; }
    static Flow penalty(double lambda) { return {FlowKind::penalty, lambda}; }

    [[nodiscard]] PhaseDerivative field(const PhaseState& s) const
    {
        return kind == FlowKind::sub_riemannian ? sr_vector_field(s) : penalty_vector_field(s, lambda);
    }

    [[nodiscard]] double energy(const PhaseState& s) const
    {
        return kind == FlowKind::sub_riemannian ? hamiltonian(s).h : penalty_hamiltonian(s, lambda);
    }
};

enum class EventKind { xi0_zero_crossing, theta0_bounce_low, theta0_bounce_high };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::xi0_zero_crossing;
    /// For xi0 crossings: +1 at a minimum of the folded theta0, -1 at a maximum.
    /// Zero for bounces.
    int direction = 0;
};

struct Sample {
    double t = 0.0;
    PhaseState state;       ///< extended-chart state
    EuclideanPoint euclid;
};

struct IntegratorOptions {
    double h = 1e-3;                  ///< maximal step (h_max)
    int max_halvings = 12;            ///< rejected steps are halved down to h / 2^max_halvings
    double local_error_budget = 1e-8; ///< step-doubling error estimate, relative to max(1, |y|)
    double drift_budget = 1e-6;       ///< relative energy drift above which the run is flagged
    int record_every = 1;             ///< keep every n-th step as a sample
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<Event> events;
    double conserved_drift = 0.0;
    bool rejected = false;
    Flow flow;

    [[nodiscard]] const Sample& front() const { return samples.front(); }
    [[nodiscard]] const Sample& back() const { return samples.back(); }
};

struct ClosureTestResult {
    bool closed = false;
    std::optional<double> return_time;
    double position_gap = 0.0;
};

/// Folded chart representation of an extended state. The momentum xi0 flips
/// sign once per theta0 reflection; xi1 and xi2 are unchanged.
inline PhaseState fold_state(const PhaseState& s) noexcept
{
    const FoldResult f = fold_with_parity(s.theta0, s.theta1, s.theta2);
    const double sign = (f.reflections % 2 == 0) ? 1.0 : -1.0;
    return {f.point.theta0, f.point.theta1, f.point.theta2, sign * s.xi0, s.xi1, s.xi2};
}

/// Phase-space gap between two states modulo the chart identifications:
/// positions through the embedding, momenta in the folded chart (sup norm).
inline double phase_gap(const PhaseState& a, const PhaseState& b) noexcept
{
    const Eigen::Vector4d ea = hopf_to_euclidean(a.position()).vec();
    const Eigen::Vector4d eb = hopf_to_euclidean(b.position()).vec();
    const PhaseState fa = fold_state(a);
    const PhaseState fb = fold_state(b);
    double gap = (ea - eb).cwiseAbs().maxCoeff();
    gap = std::max(gap, std::fabs(fa.xi0 - fb.xi0));
    gap = std::max(gap, std::fabs(fa.xi1 - fb.xi1));
    gap = std::max(gap, std::fabs(fa.xi2 - fb.xi2));
    return gap;
}

namespace detail {

inline PhaseState rk4_step(const Flow& flow, const PhaseState& y, double dt)
{
    const PhaseDerivative k1 = flow.field(y);
    const PhaseDerivative k2 = flow.field(y + (0.5 * dt) * k1);
    const PhaseDerivative k3 = flow.field(y + (0.5 * dt) * k2);
    const PhaseDerivative k4 = flow.field(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline int boundary_index(double theta0) noexcept { return static_cast<int>(std::floor(theta0 / half_pi)); }

inline void check_singular_approach(const PhaseState& y)
{
    constexpr double guard = 1e-8;
    const double s = std::sin(y.theta0);
    const double c = std::cos(y.theta0);
    if ((std::fabs(s) < guard && y.xi1 != 0.0) || (std::fabs(c) < guard && y.xi2 != 0.0)) {
        throw error(errc::singular_approach, "theta0 approached the chart boundary with nonzero singular momentum");
    }
}

/// Root of g(t) on [t0, t1] for a state propagated from y0 at t0 with short
/// RK4 substeps; starts from guess and applies Newton with dg/dt supplied.
template <class G, class DG>
double polish_root(const Flow& flow, const PhaseState& y0, double t0, double t1, double guess, G g, DG dg)
{
    double t = std::clamp(guess, t0, t1);
    for (int it = 0; it < 4; ++it) {
        const PhaseState y = detail::rk4_step(flow, y0, t - t0);
        const double slope = dg(y, flow.field(y));
        if (slope == 0.0) {
            break;
        }
        const double next = std::clamp(t - g(y) / slope, t0, t1);
        const double delta = std::fabs(next - t);
        t = next;
        if (delta <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t))) {
            break;
        }
    }
    return t;
}

/// Inverse quadratic interpolation for the zero of f through three points;
/// falls back to the secant on the last bracket when the estimate leaves it.
inline double iqi_zero(std::array<double, 3> t, std::array<double, 3> f) noexcept
{
    const double secant = t[1] - f[1] * (t[2] - t[1]) / (f[2] - f[1]);
    if (f[0] == f[1] || f[0] == f[2] || f[1] == f[2]) {
        return secant;
    }
    const double est = t[0] * f[1] * f[2] / ((f[0] - f[1]) * (f[0] - f[2])) +
                       t[1] * f[0] * f[2] / ((f[1] - f[0]) * (f[1] - f[2])) +
                       t[2] * f[0] * f[1] / ((f[2] - f[0]) * (f[2] - f[1]));
    const double lo = std::min(t[1], t[2]);
    const double hi = std::max(t[1], t[2]);
    return (est >= lo && est <= hi && std::isfinite(est)) ? est : secant;
}

} // namespace detail

/**
 * Integrate the flow from s0 over [0, t_end].
 *
 * Each step of size dt <= h is taken as two RK4 half steps and compared with a
 * single full step; when the difference exceeds the local error budget the step
 * is retried at half size, down to the configured floor (StepRejected beyond
 * it). xi0 zero crossings and chart bounces are located inside each step.
 */
inline Trajectory integrate(const PhaseState& s0, double t_end, const IntegratorOptions& opt = {},
                            const Flow& flow = Flow::sub_riemannian())
{
    if (!(t_end > 0.0) || !(opt.h > 0.0)) {
        throw error(errc::invalid_argument, "integrate needs t_end > 0 and h > 0");
    }
    if (flow.kind == FlowKind::penalty && !(flow.lambda >= 1.0)) {
        throw error(errc::invalid_argument, "penalty flow needs lambda >= 1");
    }
    (void)flow.field(s0); // SingularField for invalid boundary states

    Trajectory tr;
    tr.flow = flow;
    const double e0 = flow.energy(s0);
    const double e_scale = e0 != 0.0 ? std::fabs(e0) : 1.0;
    const int stride = std::max(1, opt.record_every);

    tr.samples.push_back({0.0, s0, hopf_to_euclidean(s0.position())});

    // Last three accepted (t, xi0) pairs for the crossing interpolation.
    std::array<double, 3> hist_t{0.0, 0.0, 0.0};
    std::array<double, 3> hist_xi{0.0, 0.0, s0.xi0};
    int hist_n = 1;

    PhaseState y = s0;
    double t = 0.0;
    std::int64_t step = 0;
    const double t_tol = 1e-12 * std::max(1.0, t_end);

    while (t_end - t > t_tol) {
        double dt = std::min(opt.h, t_end - t);
        PhaseState next;
        for (int halvings = 0;; ++halvings) {
            const PhaseState full = detail::rk4_step(flow, y, dt);
            const PhaseState mid = detail::rk4_step(flow, y, 0.5 * dt);
            const PhaseState half = detail::rk4_step(flow, mid, 0.5 * dt);
            const double err = max_abs(full - half) / 15.0;
            if (std::isfinite(err) && err <= opt.local_error_budget * std::max(1.0, max_abs(half))) {
                next = half;
                break;
            }
            if (halvings >= opt.max_halvings) {
                throw error(errc::step_rejected, "local error above budget at the minimal step size");
            }
            dt *= 0.5;
        }
        const double t_next = (t_end - (t + dt) <= t_tol) ? t_end : t + dt;
        const double dt_taken = t_next - t;
        detail::check_singular_approach(next);

        // xi0 zero crossing
        if (y.xi0 != 0.0 && (next.xi0 == 0.0 || (y.xi0 < 0.0) != (next.xi0 < 0.0))) {
            double guess = 0.0;
            if (hist_n >= 2) {
                guess = detail::iqi_zero({hist_t[1], t, t_next}, {hist_xi[1], y.xi0, next.xi0});
            } else {
                guess = t - y.xi0 * dt_taken / (next.xi0 - y.xi0);
            }
            const double te = detail::polish_root(
                flow, y, t, t_next, guess, [](const PhaseState& s) { return s.xi0; },
                [](const PhaseState&, const PhaseDerivative& d) { return d.xi0; });
            const PhaseState at = detail::rk4_step(flow, y, te - t);
            const int ext_dir = next.xi0 > y.xi0 ? 1 : -1;
            const int parity = fold_with_parity(at.theta0, 0.0, 0.0).reflections % 2;
            tr.events.push_back({te, EventKind::xi0_zero_crossing, parity == 0 ? ext_dir : -ext_dir});
        }

        // chart bounces
        const int k_prev = detail::boundary_index(y.theta0);
        const int k_next = detail::boundary_index(next.theta0);
        if (k_prev != k_next) {
            const int lo = std::min(k_prev, k_next);
            const int hi = std::max(k_prev, k_next);
            for (int k = lo + 1; k <= hi; ++k) {
                const double level = k * half_pi;
                const double guess = t + (level - y.theta0) * dt_taken / (next.theta0 - y.theta0);
                const double te = detail::polish_root(
                    flow, y, t, t_next, guess, [level](const PhaseState& s) { return s.theta0 - level; },
                    [](const PhaseState&, const PhaseDerivative& d) { return d.theta0; });
                const EventKind kind = (k % 2 == 0) ? EventKind::theta0_bounce_low : EventKind::theta0_bounce_high;
                tr.events.push_back({te, kind, 0});
            }
        }

        y = next;
        t = t_next;
        ++step;

        hist_t = {hist_t[1], hist_t[2], t};
        hist_xi = {hist_xi[1], hist_xi[2], y.xi0};
        hist_n = std::min(hist_n + 1, 3);

        double drift = std::fabs(flow.energy(y) - e0) / e_scale;
        drift = std::max(drift, std::fabs(y.xi1 - s0.xi1));
        drift = std::max(drift, std::fabs(y.xi2 - s0.xi2));
        tr.conserved_drift = std::max(tr.conserved_drift, drift);

        if (step % stride == 0 || t == t_end) {
            tr.samples.push_back({t, y, hopf_to_euclidean(y.position())});
        }
    }
    if (tr.samples.back().t != t) {
        tr.samples.push_back({t, y, hopf_to_euclidean(y.position())});
    }
    std::sort(tr.events.begin(), tr.events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
    tr.rejected = tr.conserved_drift > opt.drift_budget;
    return tr;
}

/// Convenience overload matching (s0, t_end, h, flow).
inline Trajectory integrate(const PhaseState& s0, double t_end, double h, const Flow& flow = Flow::sub_riemannian())
{
    IntegratorOptions opt;
    opt.h = h;
    return integrate(s0, t_end, opt, flow);
}

/// Events of one kind, optionally filtered by folded direction.
inline std::vector<double> event_times(const Trajectory& tr, EventKind kind, int direction = 0)
{
    std::vector<double> out;
    for (const Event& e : tr.events) {
        if (e.kind == kind && (direction == 0 || e.direction == direction)) {
            out.push_back(e.t);
        }
    }
    return out;
}

/// Number of maxima of the folded theta0 (one per theta0 oscillation).
inline int count_theta0_oscillations(const Trajectory& tr)
{
    return static_cast<int>(event_times(tr, EventKind::xi0_zero_crossing, -1).size());
}

/// Mean time between successive same-direction xi0 crossings of the folded
/// chart. Throws InsufficientEvents when neither direction has two crossings.
inline double measure_theta0_period(const Trajectory& tr)
{
    const std::vector<double> maxima = event_times(tr, EventKind::xi0_zero_crossing, -1);
    const std::vector<double> minima = event_times(tr, EventKind::xi0_zero_crossing, 1);
    const std::vector<double>& use = maxima.size() >= minima.size() ? maxima : minima;
    if (use.size() < 2) {
        throw error(errc::insufficient_events, "need two same-direction xi0 crossings");
    }
    return (use.back() - use.front()) / static_cast<double>(use.size() - 1);
}

/// sR length sqrt(2H) * elapsed time.
inline double sr_arc_length(const Trajectory& tr)
{
    if (tr.flow.kind != FlowKind::sub_riemannian) {
        throw error(errc::invalid_argument, "sr_arc_length needs an sR trajectory");
    }
    if (tr.samples.size() < 2) {
        return 0.0;
    }
    const double h = hamiltonian(tr.front().state).h;
    return std::sqrt(2.0 * h) * (tr.back().t - tr.front().t);
}

/// Trapezoidal quadrature of sqrt(v^T S v) over the recorded samples, with v
/// the chart velocity from the flow field. Independent cross-check of
/// sr_arc_length.
inline double sr_arc_length_quadrature(const Trajectory& tr)
{
    auto speed = [&](const PhaseState& s) {
        const PhaseDerivative d = tr.flow.field(s);
        const Eigen::Vector3d v{d.theta0, d.theta1, d.theta2};
        const double q = v.dot(detail::sr_metric(s.theta0) * v);
        return std::sqrt(std::max(0.0, q));
    };
    double sum = 0.0;
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const double dt = tr.samples[i].t - tr.samples[i - 1].t;
        sum += 0.5 * dt * (speed(tr.samples[i - 1].state) + speed(tr.samples[i].state));
    }
    return sum;
}

/// Integrate to predicted_T and compare start and end modulo identifications.
inline ClosureTestResult closure_test(const PhaseState& s0, double predicted_t, const IntegratorOptions& opt = {},
                                      double tolerance = 1e-6, const Flow& flow = Flow::sub_riemannian())
{
    if (!(predicted_t > 0.0)) {
        throw error(errc::invalid_argument, "closure_test needs predicted_T > 0");
    }
    IntegratorOptions run = opt;
    run.record_every = std::numeric_limits<int>::max();
    const Trajectory tr = integrate(s0, predicted_t, run, flow);
    ClosureTestResult out;
    out.position_gap = phase_gap(s0, tr.back().state);
    out.closed = out.position_gap <= tolerance;
    if (out.closed) {
        out.return_time = tr.back().t;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simplicity audit

namespace detail {

/// Squared distance between segments [p0, p1] and [q0, q1] in R^4.
inline double segment_distance2(const Eigen::Vector4d& p0, const Eigen::Vector4d& p1, const Eigen::Vector4d& q0,
                                const Eigen::Vector4d& q1)
{
    const Eigen::Vector4d d1 = p1 - p0;
    const Eigen::Vector4d d2 = q1 - q0;
    const Eigen::Vector4d r = p0 - q0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    constexpr double tiny = 1e-300;
    double s = 0.0;
    double t = 0.0;
    if (a <= tiny && e <= tiny) {
        return r.squaredNorm();
    }
    if (a <= tiny) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= tiny) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return (p0 + s * d1 - (q0 + t * d2)).squaredNorm();
}

struct CellKey {
    std::array<std::int64_t, 4> c;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept
    {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : k.c) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace detail

struct SimplicityOptions {
    double collision_radius = 1e-4;
    int window = 10; ///< segments closer than this many steps (cyclically) are not compared
};

/**
 * True when the embedded polyline does not come within collision_radius of
 * itself, ignoring pairs of segments that are close in parameter (including
 * across the start/end seam of a closed curve).
 */
inline bool self_intersection_audit(const Trajectory& tr, const SimplicityOptions& opt = {})
{
    const std::size_t n_pts = tr.samples.size();
    if (n_pts < 3) {
        return true;
    }
    const std::size_t n_seg = n_pts - 1;
    std::vector<Eigen::Vector4d> pts(n_pts);
    double max_len = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n_pts; ++i) {
        pts[i] = tr.samples[i].euclid.vec();
        if (i > 0) {
            const double len = (pts[i] - pts[i - 1]).norm();
            max_len = std::max(max_len, len);
            total += len;
        }
    }
    // Widen the window so that it always spans a few collision radii of arc.
    const double mean_len = total / static_cast<double>(n_seg);
    std::size_t window = static_cast<std::size_t>(std::max(opt.window, 1));
    if (mean_len > 0.0) {
        window = std::max(window, static_cast<std::size_t>(std::ceil(4.0 * opt.collision_radius / mean_len)) + 1);
    }
    if (2 * window >= n_seg) {
        return true;
    }

    const double cell = std::max(opt.collision_radius, max_len + opt.collision_radius);
    auto key_of = [cell](const Eigen::Vector4d& p) {
        detail::CellKey k;
        for (int d = 0; d < 4; ++d) {
            k.c[d] = static_cast<std::int64_t>(std::floor(p[d] / cell));
        }
        return k;
    };
    std::unordered_map<detail::CellKey, std::vector<std::size_t>, detail::CellHash> grid;
    grid.reserve(n_seg);
    std::vector<detail::CellKey> keys(n_seg);
    for (std::size_t i = 0; i < n_seg; ++i) {
        keys[i] = key_of(0.5 * (pts[i] + pts[i + 1]));
        grid[keys[i]].push_back(i);
    }

    const double r2 = opt.collision_radius * opt.collision_radius;
    for (std::size_t i = 0; i < n_seg; ++i) {
        const detail::CellKey& base = keys[i];
        for (int code = 0; code < 81; ++code) {
            detail::CellKey k = base;
            int rem = code;
            for (int d = 0; d < 4; ++d) {
                k.c[d] += (rem % 3) - 1;
                rem /= 3;
            }
            const auto it = grid.find(k);
            if (it == grid.end()) {
                continue;
            }
            for (std::size_t j : it->second) {
                if (j <= i) {
                    continue;
                }
                const std::size_t gap = j - i;
                if (gap <= window || n_seg - gap <= window) {
                    continue;
                }
                if (detail::segment_distance2(pts[i], pts[i + 1], pts[j], pts[j + 1]) < r2) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Largest distance of the embedded samples from their best-fit 2-plane
/// through the origin (zero for a great circle).
inline double great_circle_residual(const Trajectory& tr)
{
    Eigen::Matrix4d scatter = Eigen::Matrix4d::Zero();
    for (const Sample& s : tr.samples) {
        const Eigen::Vector4d e = s.euclid.vec();
        scatter += e * e.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(scatter);
    // Eigenvalues ascending: columns 0, 1 span the normal space.
    const Eigen::Matrix<double, 4, 2> normal = eig.eigenvectors().leftCols<2>();
    double worst = 0.0;
    for (const Sample& s : tr.samples) {
        worst = std::max(worst, (normal.transpose() * s.euclid.vec()).norm());
    }
    return worst;
}

} // namespace hopfsr
