// hopfsr_cli: trace, classify and synthesize sR geodesics on S^3, tabulate the
// length spectrum and Laplacian eigenvalues, run the verification suite.
//
//   hopfsr_cli trace --theta0 0.7853981633974483 --xi1 1 --xi2 -1 --t-end 3.141592653589793
//   hopfsr_cli trace --r 1/5 --xi1 0.6 --xi2 0.7 --periods 1 --out one_fifth.csv
//   hopfsr_cli classify --r 1/5 --xi1 0.6 --xi2 0.7
//   hopfsr_cli spectrum --n-max 5
//   hopfsr_cli eigs --m-max 2 --lambda 1,10
//   hopfsr_cli verify --seed 42
//
// Exit codes: 0 ok, 1 verification failed, 2 usage, 3 numerical failure.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hopfsr/acceptance.hpp"
#include "hopfsr/classifier.hpp"
#include "hopfsr/io.hpp"
#include "hopfsr/length_spectrum.hpp"

namespace {

using namespace hopfsr;

enum exit_code : int { ok = 0, verification_failed = 1, usage = 2, numerical = 3 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct verification_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_plain(const std::string& text, const std::string& flag)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw usage_error(flag + ": not a number: '" + text + "'");
    }
    return v;
}

// decimal or a/b
double parse_real(const std::string& text, const std::string& flag)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return parse_plain(text, flag);
    }
    const double num = parse_plain(text.substr(0, slash), flag);
    const double den = parse_plain(text.substr(slash + 1), flag);
    if (den == 0.0) {
        throw usage_error(flag + ": zero denominator in '" + text + "'");
    }
    return num / den;
}

std::int64_t parse_integer(const std::string& text, const std::string& flag)
{
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw usage_error(flag + ": not an integer: '" + text + "'");
    }
    return v;
}

// p/q with integer parts only, reduced to lowest terms
Rational parse_ratio(const std::string& text)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        throw usage_error("--r takes an exact fraction p/q, got '" + text + "'");
    }
    const std::int64_t p = parse_integer(text.substr(0, slash), "--r");
    const std::int64_t q = parse_integer(text.substr(slash + 1), "--r");
    if (!(0 < p && p < q)) {
        throw usage_error("--r must satisfy 0 < p < q");
    }
    const std::int64_t g = std::gcd(p, q);
    return {p / g, q / g};
}

std::string pi_multiple(std::int64_t n)
{
    // 2 pi sqrt(n), pulling out a perfect square
    auto k = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (k * k == n) {
        return (k == 1 ? "" : std::to_string(2 * k)) + std::string(k == 1 ? "2π" : "π");
    }
    return "2π√" + std::to_string(n);
}

struct Global {
    std::string out = "-";
    std::string format = "csv";
    unsigned jobs = 1;
    std::uint64_t seed = AcceptanceConfig{}.seed;
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (path != "-") {
            file_.open(path);
            if (!file_) {
                throw usage_error("cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

struct StateFlags {
    std::string theta0 = "0", theta1 = "0", theta2 = "0", xi0 = "0", xi1 = "0", xi2 = "0";
    std::string r;
    CLI::Option* theta0_opt = nullptr;
    CLI::Option* xi0_opt = nullptr;

    void attach(CLI::App* cmd)
    {
        theta0_opt = cmd->add_option("--theta0", theta0, "theta0 (radians)");
        cmd->add_option("--theta1", theta1, "theta1 (radians)");
        cmd->add_option("--theta2", theta2, "theta2 (radians)");
        xi0_opt = cmd->add_option("--xi0", xi0, "momentum conjugate to theta0");
        cmd->add_option("--xi1", xi1, "momentum conjugate to theta1");
        cmd->add_option("--xi2", xi2, "momentum conjugate to theta2");
        cmd->add_option("--r", r, "closure ratio p/q: synthesize theta0 and xi0 from it and xi1, xi2");
        // radians only
        cmd->add_flag_callback("--degrees", [] { throw usage_error("--degrees is not supported: angles are radians"); })
            ->group("");
    }

    [[nodiscard]] PhaseState state() const
    {
        const double m1 = parse_real(xi1, "--xi1");
        const double m2 = parse_real(xi2, "--xi2");
        if (!r.empty()) {
            if (theta0_opt->count() > 0 || xi0_opt->count() > 0) {
                throw usage_error("--r synthesizes theta0 and xi0; do not pass them");
            }
            return synthesize_initial_conditions(parse_ratio(r), m1, m2);
        }
        return {parse_real(theta0, "--theta0"), parse_real(theta1, "--theta1"), parse_real(theta2, "--theta2"),
                parse_real(xi0, "--xi0"),       m1,                             m2};
    }
};

struct DetectFlags {
    std::int64_t q_max = 1000;
    std::string tol = "1e-9";

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--q-max", q_max, "largest denominator tried when detecting a rational r");
        cmd->add_option("--rational-tol", tol, "tolerance for rational detection");
    }

    [[nodiscard]] ClosureOptions options() const
    {
        ClosureOptions o;
        o.q_max = q_max;
        o.tol = parse_real(tol, "--rational-tol");
        if (q_max < 1 || !(o.tol > 0.0)) {
            throw usage_error("--q-max and --rational-tol must be positive");
        }
        return o;
    }
};

// -- trace -------------------------------------------------------------------

struct TraceArgs {
    StateFlags state;
    DetectFlags detect;
    std::string t_end, h = "1e-3", periods, lambda = "1", drift = "1e-6";
    std::string flow = "sr";
    int record_every = 1;
    bool raw = false;
};

double closed_period(const PhaseState& s, const TraceArgs& a)
{
    if (a.flow == "penalty") {
        if (parse_real(a.lambda, "--lambda") != 1.0) {
            throw usage_error("--periods with --flow penalty needs --lambda 1; use --t-end");
        }
        const double h1 = hamiltonian(s).h1;
        if (!(h1 > 0.0)) {
            throw usage_error("zero momentum: nothing to trace");
        }
        return two_pi / std::sqrt(2.0 * h1);
    }
    const GeodesicClass c = classify(s);
    switch (c.kind) {
    case GeodesicCase::Degenerate1a: throw usage_error("degenerate state does not move; no period");
    case GeodesicCase::HopfFiber1b: return c.period;
    case GeodesicCase::Meridian2: return two_pi / std::fabs(c.xi0);
    default: break;
    }
    try {
        return closure_data(s, a.detect.options()).period;
    } catch (const error& e) {
        if (e.code() == errc::not_closed || e.code() == errc::not_oscillating) {
            throw usage_error(std::string("--periods needs a closed geodesic: ") + e.what() + "; use --t-end");
        }
        throw;
    }
}

int run_trace(const Global& g, const TraceArgs& a)
{
    const PhaseState s = a.state.state();
    if (a.t_end.empty() == a.periods.empty()) {
        throw usage_error("give exactly one of --t-end and --periods");
    }
    Flow flow;
    if (a.flow == "penalty") {
        const double lambda = parse_real(a.lambda, "--lambda");
        if (!(lambda > 0.0)) {
            throw usage_error("--lambda must be positive");
        }
        flow = Flow::penalty(lambda);
    }
    IntegratorOptions opt;
    opt.h = parse_real(a.h, "--h");
    opt.drift_budget = parse_real(a.drift, "--drift-budget");
    opt.record_every = a.record_every;
    if (!(opt.h > 0.0) || !(opt.drift_budget > 0.0) || opt.record_every < 1) {
        throw usage_error("--h, --drift-budget and --record-every must be positive");
    }
    const double t_end =
        a.t_end.empty() ? parse_real(a.periods, "--periods") * closed_period(s, a) : parse_real(a.t_end, "--t-end");
    if (!(t_end > 0.0)) {
        throw usage_error("integration time must be positive");
    }

    const Trajectory tr = integrate(s, t_end, opt, flow);
    const TrajectoryExport ex{!a.raw};
    Output out(g.out);
    if (g.format == "json") {
        out.stream() << trajectory_json(tr, ex).dump(2) << '\n';
    } else {
        write_trajectory_csv(out.stream(), tr, ex);
    }
    if (tr.rejected) {
        std::cerr << "energy drift " << format_double(tr.conserved_drift) << " exceeds --drift-budget\n";
        return numerical;
    }
    return ok;
}

// -- classify ----------------------------------------------------------------

struct ClassifyArgs {
    StateFlags state;
    DetectFlags detect;
};

int run_classify(const Global& g, const ClassifyArgs& a)
{
    const PhaseState s = a.state.state();
    const EnergyReport en = hamiltonian(s);
    const GeodesicClass c = classify(s);

    std::optional<ClosureData> closure;
    std::string summary = std::string(to_string(c.kind));
    switch (c.kind) {
    case GeodesicCase::Degenerate1a: summary += ", constant curve"; break;
    case GeodesicCase::HopfFiber1b:
    case GeodesicCase::Meridian2: summary += ", length 2π"; break;
    case GeodesicCase::Generic3:
    case GeodesicCase::Boundary4:
        try {
            closure = closure_data(s, a.detect.options());
            summary += ", closed, p=" + std::to_string(closure->p) + " q=" + std::to_string(closure->q) +
                       ", length = " + pi_multiple(closure->n);
        } catch (const error& e) {
            if (e.code() == errc::not_closed) {
                summary += ", not closed";
            } else if (e.code() == errc::not_oscillating) {
                summary += ", no theta0 oscillation";
            } else {
                throw;
            }
        }
        break;
    }

    Output out(g.out);
    if (g.format == "json") {
        json j{{"state", s},
               {"classification", c},
               {"energies", json{{"H", en.h}, {"H1", en.h1}, {"HV", en.h_v}}},
               {"r", en.r},
               {"summary", summary}};
        if (closure) {
            j["closure"] = json{{"p", closure->p},
                                {"q", closure->q},
                                {"epsilon", closure->epsilon},
                                {"parity", std::string(to_string(closure->parity))},
                                {"period", closure->period},
                                {"n", closure->n},
                                {"length", closure->length}};
        }
        out.stream() << j.dump(2) << '\n';
        return ok;
    }
    std::ostream& os = out.stream();
    os << summary << '\n';
    os << "H = " << format_double(en.h) << ", H1 = " << format_double(en.h1) << ", HV = " << format_double(en.h_v)
       << '\n';
    os << "r = " << format_double(en.r) << '\n';
    if (c.kind == GeodesicCase::HopfFiber1b) {
        os << "period = " << format_double(c.period) << '\n';
    } else if (c.kind == GeodesicCase::Meridian2) {
        os << "period = " << format_double(two_pi / std::fabs(c.xi0)) << '\n';
    }
    if (closure) {
        os << "p = " << closure->p << ", q = " << closure->q << ", epsilon = " << closure->epsilon << " ("
           << to_string(closure->parity) << ")\n";
        os << "period = " << format_double(closure->period) << '\n';
        os << "length = 2*pi*sqrt(" << closure->n << ") = " << format_double(closure->length) << '\n';
    }
    return ok;
}

// -- synthesize --------------------------------------------------------------

struct SynthesizeArgs {
    std::string r, xi1, xi2;
    bool unit_speed = false;
};

int run_synthesize(const Global& g, const SynthesizeArgs& a)
{
    PhaseState s = synthesize_initial_conditions(parse_ratio(a.r), parse_real(a.xi1, "--xi1"),
                                                 parse_real(a.xi2, "--xi2"));
    if (a.unit_speed) {
        s = detail::unit_speed(s);
    }
    Output out(g.out);
    if (g.format == "json") {
        out.stream() << json(s).dump(2) << '\n';
        return ok;
    }
    out.stream() << "theta0,theta1,theta2,xi0,xi1,xi2\n";
    const auto v = s.as_array();
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.stream() << (i ? "," : "") << format_double(v[i]);
    }
    out.stream() << '\n';
    return ok;
}

// -- spectrum ----------------------------------------------------------------

struct SpectrumArgs {
    std::optional<std::int64_t> n_max, q_bound;
    bool check = false;
};

int run_spectrum(const Global& g, const SpectrumArgs& a)
{
    if (a.n_max.has_value() == a.q_bound.has_value()) {
        throw usage_error("give exactly one of --n-max and --q-bound");
    }
    if (a.n_max) {
        if (*a.n_max < 1) {
            throw usage_error("--n-max must be >= 1");
        }
        if (a.check) {
            throw usage_error("--check goes with --q-bound");
        }
        const auto rows = spectrum_table(*a.n_max);
        Output out(g.out);
        if (g.format == "json") {
            out.stream() << spectrum_json(rows).dump(2) << '\n';
        } else {
            write_spectrum_csv(out.stream(), rows);
        }
        return ok;
    }

    const std::int64_t q_bound = *a.q_bound;
    if (q_bound < 2) {
        throw usage_error("--q-bound must be >= 2");
    }
    std::set<std::int64_t> found = spectrum_bruteforce_oracle(q_bound, g.jobs);
    found.insert(1); // Hopf fiber
    Output out(g.out);
    if (g.format == "json") {
        json j = json::array();
        for (std::int64_t n : found) {
            j.push_back(json{{"n", n}, {"length_decimal", two_pi * std::sqrt(static_cast<double>(n))}});
        }
        out.stream() << j.dump(2) << '\n';
    } else {
        out.stream() << "n,length,length_decimal\n";
        for (std::int64_t n : found) {
            out.stream() << n << ",2*pi*sqrt(" << n << ")," << format_double(two_pi * std::sqrt(static_cast<double>(n)))
                         << '\n';
        }
    }
    if (a.check) {
        std::int64_t missing = 0;
        for (std::int64_t n = 1; n < q_bound; ++n) {
            missing += found.count(n) == 0;
        }
        std::cerr << "check: oracle(q<=" << q_bound << ") contains every n in 1.." << q_bound - 1 << ": "
                  << (missing == 0 ? "yes" : "no, " + std::to_string(missing) + " missing") << '\n';
        if (missing != 0) {
            throw verification_failure("spectrum check failed");
        }
    }
    return ok;
}

// -- eigs --------------------------------------------------------------------

struct EigsArgs {
    std::int64_t m_max = 0;
    std::vector<std::string> lambdas;
};

int run_eigs(const Global& g, const EigsArgs& a)
{
    if (a.m_max < 0) {
        throw usage_error("--m-max must be >= 0");
    }
    std::vector<double> lambdas;
    for (const auto& text : a.lambdas) {
        const double lambda = parse_real(text, "--lambda");
        if (!(lambda >= 1.0)) {
            throw usage_error("--lambda values must be >= 1");
        }
        lambdas.push_back(lambda);
    }
    const auto rows = eigen_table(a.m_max, lambdas);
    Output out(g.out);
    if (g.format == "json") {
        out.stream() << eigen_json(rows, lambdas).dump(2) << '\n';
    } else {
        write_eigen_csv(out.stream(), rows, lambdas);
    }
    return ok;
}

// -- verify ------------------------------------------------------------------

struct VerifyArgs {
    std::string drift_budget = "1e-9";
    bool timings = false;
};

int run_verify(const Global& g, const VerifyArgs& a)
{
    AcceptanceConfig cfg;
    cfg.seed = g.seed;
    cfg.jobs = g.jobs;
    cfg.drift_budget = parse_real(a.drift_budget, "--drift-budget");
    if (!(cfg.drift_budget > 0.0)) {
        throw usage_error("--drift-budget must be positive");
    }
    const auto results = run_acceptance(cfg);
    Output out(g.out);
    write_acceptance_report(out.stream(), results);
    if (a.timings) {
        write_acceptance_timings(std::cerr, results);
    }
    return all_passed(results) ? ok : verification_failed;
}

bool is_usage(errc code)
{
    switch (code) {
    case errc::invalid_argument:
    case errc::infeasible_ratio:
    case errc::not_coprime:
    case errc::boundary_chart:
    case errc::singular_field:
    case errc::ambiguous_zero:
    case errc::stencil_out_of_domain: return true;
    default: return false;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Sub-Riemannian geodesics on S^3 in Hopf coordinates"};
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    app.add_option("--out,-o", g.out, "output file, - for stdout")->capture_default_str();
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads for independent runs")->check(CLI::Range(1u, 1024u));
    app.add_option("--seed", g.seed, "seed for randomized checks")->capture_default_str();

    TraceArgs trace;
    auto* trace_cmd = app.add_subcommand("trace", "integrate one geodesic and write its samples");
    trace_cmd->set_help_flag("--help", "print this help and exit");
    trace.state.attach(trace_cmd);
    trace.detect.attach(trace_cmd);
    trace_cmd->add_option("--t-end", trace.t_end, "integration time");
    trace_cmd->add_option("--periods", trace.periods, "integration time in closure periods");
    trace_cmd->add_option("--h", trace.h, "maximal step")->capture_default_str();
    trace_cmd->add_option("--flow", trace.flow, "sr or penalty")->check(CLI::IsMember({"sr", "penalty"}));
    trace_cmd->add_option("--lambda", trace.lambda, "penalty parameter")->capture_default_str();
    trace_cmd->add_option("--drift-budget", trace.drift, "relative energy drift allowed")->capture_default_str();
    trace_cmd->add_option("--record-every", trace.record_every, "keep every n-th step");
    trace_cmd->add_flag("--raw", trace.raw, "write the extended chart instead of folded coordinates");

    ClassifyArgs cls;
    auto* classify_cmd = app.add_subcommand("classify", "report case, energies and closure data of a state");
    cls.state.attach(classify_cmd);
    cls.detect.attach(classify_cmd);

    SynthesizeArgs syn;
    auto* synth_cmd = app.add_subcommand("synthesize", "initial state with a prescribed closure ratio");
    synth_cmd->add_option("--r", syn.r, "closure ratio p/q")->required();
    synth_cmd->add_option("--xi1", syn.xi1, "momentum conjugate to theta1")->required();
    synth_cmd->add_option("--xi2", syn.xi2, "momentum conjugate to theta2")->required();
    synth_cmd->add_flag("--unit-speed", syn.unit_speed, "rescale momenta so that 2 H1 = 1");

    SpectrumArgs spectrum_args;
    auto* spectrum_cmd = app.add_subcommand("spectrum", "closed geodesic lengths 2 pi sqrt(n)");
    spectrum_cmd->add_option("--n-max", spectrum_args.n_max, "table for n = 1..N");
    spectrum_cmd->add_option("--q-bound", spectrum_args.q_bound, "brute-force set over 0 < p < q <= Q");
    spectrum_cmd->add_flag("--check", spectrum_args.check, "require every n < Q in the brute-force set");

    EigsArgs eigs;
    auto* eigs_cmd = app.add_subcommand("eigs", "eigenvalue table of the three Laplacians");
    eigs_cmd->add_option("--m-max", eigs.m_max, "largest m")->required();
    eigs_cmd->add_option("--lambda", eigs.lambdas, "penalty parameters")->delimiter(',');

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance checks");
    verify_cmd->add_option("--drift-budget", ver.drift_budget, "relative H drift allowed")->capture_default_str();
    verify_cmd->add_flag("--timings", ver.timings, "print wall times to stderr");

    try {
        app.parse(argc, argv);
        if (trace_cmd->parsed()) {
            return run_trace(g, trace);
        }
        if (classify_cmd->parsed()) {
            return run_classify(g, cls);
        }
        if (synth_cmd->parsed()) {
            return run_synthesize(g, syn);
        }
        if (spectrum_cmd->parsed()) {
            return run_spectrum(g, spectrum_args);
        }
        if (eigs_cmd->parsed()) {
            return run_eigs(g, eigs);
        }
        if (verify_cmd->parsed()) {
            return run_verify(g, ver);
        }
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const verification_failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return verification_failed;
    } catch (const error& e) {
        std::cerr << e.what() << '\n';
        return is_usage(e.code()) ? usage : numerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical;
    }
    return usage;
}
