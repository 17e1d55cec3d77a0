/**
 * @file acceptance.hpp
 * @brief The end-to-end verification suite: ten numbered checks with a
 *        deterministic pass/fail report.
 */
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hopfsr/classifier.hpp"
#include "hopfsr/dynamics.hpp"
#include "hopfsr/eigenvalues.hpp"
#include "hopfsr/hopf_core.hpp"
#include "hopfsr/integrator.hpp"
#include "hopfsr/length_spectrum.hpp"

namespace hopfsr {

struct AcceptanceConfig {
    std::uint64_t seed = 20240611;
    double drift_budget = 1e-9; ///< relative H drift allowed over one closure period at h = 1e-4
    unsigned jobs = 1;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;    ///< wall time, reported separately from the deterministic text
    double time_limit = 0.0; ///< 0 means no limit
};

namespace detail {

inline std::string fmt(const char* format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

inline std::string sci(double v) { return fmt("%.3e", v); }

/// Scale the momenta so that sqrt(2 H1) = 1; theta0 periods become pi.
inline PhaseState unit_speed(const PhaseState& s)
{
    const double k = 1.0 / std::sqrt(2.0 * hamiltonian(s).h1);
    return {s.theta0, s.theta1, s.theta2, k * s.xi0, k * s.xi1, k * s.xi2};
}

inline IntegratorOptions fixed_step(double h)
{
    IntegratorOptions o;
    o.h = h;
    o.local_error_budget = 1.0; // no halving: a clean fixed-step run
    return o;
}

inline PhaseState realized_state(std::int64_t n)
{
    if (n == 1) {
        return {0.25 * pi, 0.0, 0.0, 0.0, 0.5, -0.5};
    }
    const SpectrumEntry e = realize_length(n);
    return unit_speed(synthesize_initial_conditions({e.p, e.q}, 0.6, 0.7));
}

inline double realized_period(std::int64_t n, const PhaseState& s)
{
    if (n == 1) {
        return two_pi / std::fabs(s.xi1 - s.xi2);
    }
    return closure_data(s).period;
}

/// Run body(i) for i in [0, count) on up to jobs threads.
inline void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body)
{
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += jobs) {
                body(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

inline CriterionResult spectrum_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{1, "length spectrum {2 pi sqrt(n)} for n <= 100", false, "", 0.0, 60.0};
    std::set<std::int64_t> found = spectrum_bruteforce_oracle(101, cfg.jobs);
    found.insert(1);
    std::set<std::int64_t> upto;
    for (std::int64_t n : found) {
        if (n <= 100) {
            upto.insert(n);
        }
    }
    bool oracle_ok = upto.size() == 100 && *upto.begin() == 1 && *upto.rbegin() == 100;

    constexpr std::size_t count = 20;
    std::vector<double> gaps(count, 1e300);
    std::vector<double> rel(count, 1e300);
    std::vector<int> ok(count, 0);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
        const auto n = static_cast<std::int64_t>(i + 1);
        const PhaseState s = realized_state(n);
        const double period = realized_period(n, s);
        const Trajectory tr = integrate(s, period, fixed_step(1e-3));
        const double target = two_pi * std::sqrt(static_cast<double>(n));
        gaps[i] = phase_gap(s, tr.back().state);
        rel[i] = std::max(std::fabs(sr_arc_length(tr) - target), std::fabs(sr_arc_length_quadrature(tr) - target)) /
                 target;
        ok[i] = gaps[i] <= 1e-6 && rel[i] <= 1e-6;
    });
    const bool dyn_ok = std::accumulate(ok.begin(), ok.end(), 0) == static_cast<int>(count);
    r.passed = oracle_ok && dyn_ok;
    r.detail = std::string("oracle(q<=101) covers 1..100: ") + (oracle_ok ? "yes" : "no") +
               "; n<=20 max gap " + sci(*std::max_element(gaps.begin(), gaps.end())) + ", max length error " +
               sci(*std::max_element(rel.begin(), rel.end()));
    return r;
}

inline CriterionResult one_fifth_criterion()
{
    CriterionResult r{2, "r = 1/5, xi1 = 0.6, xi2 = 0.7 closed geodesic", false, "", 0.0, 5.0};
    const PhaseState s = synthesize_initial_conditions({1, 5}, 0.6, 0.7);
    const double xi0_sq_err = std::fabs(s.xi0 * s.xi0 - 40.56);
    const double period = 5.0 * pi / 6.5; // = pi / 1.3
    const IntegratorOptions opt = fixed_step(1e-4);
    const Trajectory tr = integrate(s, period, opt);
    const double gap = phase_gap(s, tr.back().state);
    const double gap5 = closure_test(s, 5.0 * pi / 1.3, opt).position_gap;
    const int osc = count_theta0_oscillations(tr);
    const double target = pi * std::sqrt(24.0);
    const double len_err =
        std::max(std::fabs(sr_arc_length(tr) - target), std::fabs(sr_arc_length_quadrature(tr) - target)) / target;
    r.passed = xi0_sq_err <= 1e-12 && gap <= 1e-6 && gap5 <= 1e-6 && osc == 5 && len_err <= 1e-6;
    r.detail = "|xi0^2 - 40.56| " + sci(xi0_sq_err) + "; gap at 5pi/6.5 " + sci(gap) + ", at 5pi/1.3 " + sci(gap5) +
               "; oscillations " + std::to_string(osc) + "; length error " + sci(len_err);
    return r;
}

inline PhaseState random_case3(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> mag(0.2, 2.0);
    std::uniform_real_distribution<double> angle(0.3, 1.27);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::bernoulli_distribution sign(0.5);
    auto momentum = [&] { return (sign(rng) ? -1.0 : 1.0) * mag(rng); };
    const double t0 = angle(rng);
    const double t1 = phase(rng);
    const double t2 = phase(rng);
    const double xi0 = momentum();
    const double xi1 = momentum();
    const double xi2 = momentum();
    return {t0, t1, t2, xi0, xi1, xi2};
}

inline CriterionResult period_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{3, "theta0 period pi / sqrt(2 H1)", false, "", 0.0, 30.0};
    std::mt19937_64 rng(cfg.seed);
    constexpr std::size_t count = 20;
    std::vector<PhaseState> states;
    for (std::size_t i = 0; i < count; ++i) {
        states.push_back(random_case3(rng));
    }
    std::vector<double> meas(count, 1e300);
    std::vector<double> quad(count, 1e300);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
        const PhaseState& s = states[i];
        const double period = theta0_period_analytic(s);
        IntegratorOptions opt;
        opt.h = 1e-4;
        const Trajectory tr = integrate(s, 3.2 * period, opt);
        meas[i] = std::fabs(measure_theta0_period(tr) - period) / period;
        quad[i] = std::fabs(theta0_period_quadrature(s) - period) / period;
    });
    const double worst_meas = *std::max_element(meas.begin(), meas.end());
    const double worst_quad = *std::max_element(quad.begin(), quad.end());
    r.passed = worst_meas <= 1e-8 && worst_quad <= 1e-7;
    r.detail = "20 states: max measured error " + sci(worst_meas) + ", max quadrature error " + sci(worst_quad);
    return r;
}

inline CriterionResult conservation_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{4, "energy drift and 4th-order convergence", false, "", 0.0, 0.0};
    const PhaseState s = synthesize_initial_conditions({1, 5}, 0.6, 0.7);
    const double period = closure_data(s).period;
    const Trajectory fine = integrate(s, period, fixed_step(1e-4));
    const Trajectory coarse = integrate(s, period, fixed_step(2e-4));
    const double ratio = coarse.conserved_drift / fine.conserved_drift;
    r.passed = fine.conserved_drift <= cfg.drift_budget && ratio >= 8.0 && ratio <= 32.0;
    r.detail = "drift at h=1e-4 " + sci(fine.conserved_drift) + " (budget " + sci(cfg.drift_budget) +
               "); drift(2e-4)/drift(1e-4) = " + fmt("%.2f", ratio);
    return r;
}

inline CriterionResult special_criterion()
{
    CriterionResult r{5, "Hopf fiber and meridian close with length 2 pi", false, "", 0.0, 0.0};
    const PhaseState fiber{0.25 * pi, 0.0, 0.0, 0.0, 1.0, -1.0};
    const PhaseState meridian{0.3, 0.2, 1.1, 1.0, 0.0, 0.0};
    const GeodesicClass c1 = classify(fiber);
    const GeodesicClass c2 = classify(meridian);
    IntegratorOptions opt;
    opt.h = 1e-3;
    const Trajectory t1 = integrate(fiber, c1.period, opt);
    const Trajectory t2 = integrate(meridian, two_pi / std::fabs(meridian.xi0), opt);
    double worst_gap = std::max(phase_gap(fiber, t1.back().state), phase_gap(meridian, t2.back().state));
    double worst_len = 0.0;
    for (const Trajectory* t : {&t1, &t2}) {
        worst_len = std::max(worst_len, std::fabs(sr_arc_length(*t) - two_pi));
        worst_len = std::max(worst_len, std::fabs(sr_arc_length_quadrature(*t) - two_pi));
    }
    r.passed = c1.kind == GeodesicCase::HopfFiber1b && c2.kind == GeodesicCase::Meridian2 && worst_gap <= 1e-8 &&
               worst_len <= 1e-8;
    r.detail = "max gap " + sci(worst_gap) + ", max |length - 2pi| " + sci(worst_len);
    return r;
}

inline CriterionResult riemannian_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{6, "lambda = 1 flow: great circles, two theta0 oscillations", false, "", 0.0, 0.0};
    std::mt19937_64 rng(cfg.seed ^ 0x5eedu);
    constexpr std::size_t count = 10;
    std::vector<PhaseState> states;
    for (std::size_t i = 0; i < count; ++i) {
        states.push_back(unit_speed(random_case3(rng)));
    }
    std::vector<double> resid(count, 1e300);
    std::vector<double> gaps(count, 1e300);
    std::vector<int> osc(count, 0);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
        const PhaseState& s = states[i];
        IntegratorOptions opt;
        opt.h = 1e-3;
        const Trajectory tr = integrate(s, two_pi, opt, Flow::penalty(1.0));
        resid[i] = great_circle_residual(tr);
        gaps[i] = phase_gap(s, tr.back().state);
        osc[i] = count_theta0_oscillations(tr);
    });
    const double worst = *std::max_element(resid.begin(), resid.end());
    const double worst_gap = *std::max_element(gaps.begin(), gaps.end());
    const bool two = std::all_of(osc.begin(), osc.end(), [](int k) { return k == 2; });
    r.passed = worst <= 1e-8 && worst_gap <= 1e-6 && two;
    r.detail = "10 states: max plane residual " + sci(worst) + ", max closure gap " + sci(worst_gap) +
               "; oscillations per orbit all 2: " + (two ? "yes" : "no");
    return r;
}

inline CriterionResult eigen_criterion()
{
    CriterionResult r{7, "eigenvalue tables", false, "", 0.0, 0.0};
    bool round_ok = true;
    bool limit_ok = true;
    bool sym_ok = true;
    for (std::int64_t m = 0; m <= 50; ++m) {
        for (std::int64_t j = 0; j <= m; ++j) {
            const EigenIndex ix{m, j};
            round_ok = round_ok && penalty_eigenvalue(ix, 1.0) == static_cast<double>(laplace_eigenvalue(m));
            sym_ok = sym_ok && sublaplace_eigenvalue(ix) == sublaplace_eigenvalue({m, m - j});
            for (double lambda : {2.0, 10.0, 1e3, 1e6}) {
                const double diff = std::fabs(penalty_eigenvalue(ix, lambda) - static_cast<double>(sublaplace_eigenvalue(ix)));
                limit_ok = limit_ok && diff <= static_cast<double>(m * m) / (lambda * lambda) + 1e-9;
            }
        }
    }
    r.passed = round_ok && limit_ok && sym_ok;
    r.detail = std::string("penalty(1) = m(m+2): ") + (round_ok ? "yes" : "no") +
               "; |penalty - sub| <= m^2/lambda^2: " + (limit_ok ? "yes" : "no") +
               "; sub(m,j) = sub(m,m-j): " + (sym_ok ? "yes" : "no");
    return r;
}

inline CriterionResult beam_criterion()
{
    CriterionResult r{8, "Gaussian beam residual, k = 3", false, "", 0.0, 0.0};
    const double r1 = gaussian_beam_residual(3, 1e-2);
    const double r2 = gaussian_beam_residual(3, 5e-3);
    const double ratio = r1 / r2;
    r.passed = r1 <= 1e-3 && ratio >= 3.5 && ratio <= 4.5;
    r.detail = "residual(1e-2) " + sci(r1) + ", residual(5e-3) " + sci(r2) + ", ratio " + fmt("%.3f", ratio);
    return r;
}

inline CriterionResult structure_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{9, "frame, metric, bracket and Poisson identities", false, "", 0.0, 0.0};
    std::mt19937_64 rng(cfg.seed ^ 0xabcdu);
    std::uniform_real_distribution<double> angle(0.05, half_pi - 0.05);
    std::uniform_real_distribution<double> phase(0.0, two_pi);
    std::uniform_real_distribution<double> mom(-2.0, 2.0);
    std::uniform_real_distribution<double> lam(1.0, 20.0);
    double frame = 0.0, kernel = 0.0, inverse = 0.0, det = 0.0, poisson = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double t0 = angle(rng);
        const double t1 = phase(rng);
        const double t2 = phase(rng);
        const HopfPoint p{t0, t1, t2};
        const Frame f = frame_at(p);
        const Eigen::Vector3d fields[] = {f.v, f.e1, f.e2};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                frame = std::max(frame, std::fabs(round_inner(p, fields[a], fields[b]) - (a == b ? 1.0 : 0.0)));
            }
        }
        kernel = std::max(kernel, (metric(MetricKind::sub_riemannian, p).entries * f.v).cwiseAbs().maxCoeff());
        const double lambda = lam(rng);
        const Eigen::Matrix3d g = metric(MetricKind::penalty, p, lambda).entries;
        inverse = std::max(inverse, (g * penalty_inverse(p, lambda) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
        // entries grow like lambda^2, so the determinant is compared on that scale
        det = std::max(det, std::fabs(g.determinant() - penalty_determinant(p, lambda)) / (lambda * lambda));
        const double xi0 = mom(rng);
        const double xi1 = mom(rng);
        const double xi2 = mom(rng);
        poisson = std::max(poisson, std::fabs(poisson_bracket_h1_hv({t0, t1, t2, xi0, xi1, xi2})));
    }
    const LinearField v = v_field();
    const LinearField e1 = e1_field();
    const LinearField e2 = e2_field();
    const bool brackets = lie_bracket(v, e1) == -2.0 * e2 && lie_bracket(e2, v) == -2.0 * e1 &&
                          lie_bracket(e1, e2) == -2.0 * v;
    const double worst = std::max({frame, kernel, inverse, det, poisson});
    r.passed = brackets && worst <= 1e-12;
    r.detail = "brackets exact: " + std::string(brackets ? "yes" : "no") + "; max deviation " + sci(worst) +
               " (frame " + sci(frame) + ", kernel " + sci(kernel) + ", inverse " + sci(inverse) + ", det " +
               sci(det) + ", {H1,HV} " + sci(poisson) + ")";
    return r;
}

inline CriterionResult simplicity_criterion(const AcceptanceConfig& cfg)
{
    CriterionResult r{10, "closed geodesics with n <= 10 are simple", false, "", 0.0, 0.0};
    constexpr std::size_t count = 10;
    std::vector<int> simple(count, 0);
    parallel_for(count, cfg.jobs, [&](std::size_t i) {
        const auto n = static_cast<std::int64_t>(i + 1);
        const PhaseState s = realized_state(n);
        IntegratorOptions opt;
        opt.h = 1e-3;
        const Trajectory tr = integrate(s, realized_period(n, s), opt);
        simple[i] = self_intersection_audit(tr);
    });
    const int good = std::accumulate(simple.begin(), simple.end(), 0);
    r.passed = good == static_cast<int>(count);
    r.detail = std::to_string(good) + "/10 simple";
    return r;
}

template <class F>
CriterionResult timed(F&& run)
{
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = run();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.time_limit > 0.0 && r.seconds > r.time_limit) {
        r.passed = false;
        r.detail += "; over the time limit";
    }
    return r;
}

} // namespace detail

inline std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg = {})
{
    using namespace detail;
    std::vector<CriterionResult> out;
    auto add = [&](int id, std::string title, auto run) {
        CriterionResult r = timed(run);
        r.id = id;
        if (r.title.empty()) {
            r.title = std::move(title);
        }
        out.push_back(std::move(r));
    };
    add(1, "length spectrum", [&] { return spectrum_criterion(cfg); });
    add(2, "r = 1/5 closed geodesic", [] { return one_fifth_criterion(); });
    add(3, "theta0 period", [&] { return period_criterion(cfg); });
    add(4, "conservation", [&] { return conservation_criterion(cfg); });
    add(5, "special geodesics", [] { return special_criterion(); });
    add(6, "Riemannian limit", [&] { return riemannian_criterion(cfg); });
    add(7, "eigenvalue tables", [] { return eigen_criterion(); });
    add(8, "Gaussian beam", [] { return beam_criterion(); });
    add(9, "structural identities", [&] { return structure_criterion(cfg); });
    add(10, "simplicity", [&] { return simplicity_criterion(cfg); });
    return out;
}

/// One line per criterion; byte-identical for identical configurations.
inline void write_acceptance_report(std::ostream& os, const std::vector<CriterionResult>& results)
{
    int passed = 0;
    for (const CriterionResult& r : results) {
        char head[32];
        std::snprintf(head, sizeof head, "[%2d] %s  ", r.id, r.passed ? "PASS" : "FAIL");
        os << head << r.title << ": " << r.detail << '\n';
        passed += r.passed ? 1 : 0;
    }
    os << passed << '/' << results.size() << " criteria passed\n";
}

inline void write_acceptance_timings(std::ostream& os, const std::vector<CriterionResult>& results)
{
    for (const CriterionResult& r : results) {
        char line[96];
        if (r.time_limit > 0.0) {
            std::snprintf(line, sizeof line, "[%2d] %.2f s (limit %.0f s)\n", r.id, r.seconds, r.time_limit);
        } else {
            std::snprintf(line, sizeof line, "[%2d] %.2f s\n", r.id, r.seconds);
        }
        os << line;
    }
}

inline bool all_passed(const std::vector<CriterionResult>& results)
{
    return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

} // namespace hopfsr
