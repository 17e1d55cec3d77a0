/**
 * @file io.hpp
 * @brief CSV and JSON export of points, trajectories, classifications and
 *        tables. Doubles are written with 17 significant digits.
 */
#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopfsr/classifier.hpp"
#include "hopfsr/eigenvalues.hpp"
#include "hopfsr/hopf_core.hpp"
#include "hopfsr/integrator.hpp"
#include "hopfsr/length_spectrum.hpp"

namespace hopfsr {

using json = nlohmann::json;

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const HopfPoint& p)
{
    j = json{{"theta0", p.theta0}, {"theta1", p.theta1}, {"theta2", p.theta2}};
}

inline void from_json(const json& j, HopfPoint& p)
{
    j.at("theta0").get_to(p.theta0);
    j.at("theta1").get_to(p.theta1);
    j.at("theta2").get_to(p.theta2);
}

inline void to_json(json& j, const EuclideanPoint& e)
{
    j = json{{"x1", e.x1}, {"y1", e.y1}, {"x2", e.x2}, {"y2", e.y2}};
}

inline void from_json(const json& j, EuclideanPoint& e)
{
    j.at("x1").get_to(e.x1);
    j.at("y1").get_to(e.y1);
    j.at("x2").get_to(e.x2);
    j.at("y2").get_to(e.y2);
}

inline void to_json(json& j, const PhaseState& s)
{
    j = json{{"theta0", s.theta0}, {"theta1", s.theta1}, {"theta2", s.theta2},
             {"xi0", s.xi0},       {"xi1", s.xi1},       {"xi2", s.xi2}};
}

inline void to_json(json& j, const TurningPoints& tp)
{
    j = json{{"a", tp.a}, {"b", tp.b}};
}

inline void to_json(json& j, const GeodesicClass& c)
{
    json detail = json::object();
    switch (c.kind) {
    case GeodesicCase::Degenerate1a:
        break;
    case GeodesicCase::HopfFiber1b:
        detail["cube_speed"] = c.cube_speed;
        detail["period"] = c.period;
        detail["length"] = two_pi;
        break;
    case GeodesicCase::Meridian2:
        detail["xi0"] = c.xi0;
        detail["length"] = two_pi;
        break;
    case GeodesicCase::Generic3:
        detail["u_minimizer"] = c.u_minimizer;
        detail["u_minimum"] = c.u_minimum;
        detail["fixed_point"] = c.fixed_point;
        if (c.turning) {
            detail["turning_points"] = *c.turning;
        }
        break;
    case GeodesicCase::Boundary4:
        detail["vanishing"] = c.vanishing == VanishingMomentum::xi1 ? "xi1" : "xi2";
        detail["bounce_plane"] = c.bounce_plane;
        if (c.turning) {
            detail["turning_points"] = *c.turning;
        }
        break;
    }
    j = json{{"case", std::string(to_string(c.kind))}, {"detail", detail}};
}

inline const char* event_name(EventKind k) noexcept
{
    switch (k) {
    case EventKind::xi0_zero_crossing: return "xi0_zero_crossing";
    case EventKind::theta0_bounce_low: return "theta0_bounce_low";
    case EventKind::theta0_bounce_high: return "theta0_bounce_high";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Trajectories

struct TrajectoryExport {
    bool folded = true; ///< fold theta and xi0 into the Hopf cube; false writes the extended chart
};

inline PhaseState export_state(const Sample& s, const TrajectoryExport& opt)
{
    return opt.folded ? fold_state(s.state) : s.state;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const TrajectoryExport& opt = {})
{
    os << "t,theta0,theta1,theta2,xi0,xi1,xi2,x1,y1,x2,y2\n";
    for (const Sample& s : tr.samples) {
        const PhaseState st = export_state(s, opt);
        const double row[] = {s.t,      st.theta0,    st.theta1,    st.theta2,    st.xi0,       st.xi1,
                              st.xi2,   s.euclid.x1, s.euclid.y1, s.euclid.x2, s.euclid.y2};
        bool first = true;
        for (double v : row) {
            if (!first) {
                os << ',';
            }
            os << format_double(v);
            first = false;
        }
        os << '\n';
    }
}

inline json trajectory_json(const Trajectory& tr, const TrajectoryExport& opt = {})
{
    json samples = json::array();
    for (const Sample& s : tr.samples) {
        const PhaseState st = export_state(s, opt);
        samples.push_back(json{{"t", s.t},
                               {"theta0", st.theta0},
                               {"theta1", st.theta1},
                               {"theta2", st.theta2},
                               {"xi0", st.xi0},
                               {"xi1", st.xi1},
                               {"xi2", st.xi2},
                               {"x1", s.euclid.x1},
                               {"y1", s.euclid.y1},
                               {"x2", s.euclid.x2},
                               {"y2", s.euclid.y2}});
    }
    json events = json::array();
    for (const Event& e : tr.events) {
        events.push_back(json{{"t", e.t}, {"kind", event_name(e.kind)}, {"direction", e.direction}});
    }
    return json{{"flow", tr.flow.kind == FlowKind::sub_riemannian ? "sub_riemannian" : "penalty"},
                {"lambda", tr.flow.lambda},
                {"conserved_drift", tr.conserved_drift},
                {"rejected", tr.rejected},
                {"samples", samples},
                {"events", events}};
}

// ---------------------------------------------------------------------------
// Tables

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectrumEntry>& rows)
{
    os << "n,length,p,q,epsilon,realization,length_decimal\n";
    for (const SpectrumEntry& e : rows) {
        os << e.n << ",2*pi*sqrt(" << e.n << "),";
        if (e.realization == Realization::hopf_fiber) {
            os << ",,";
        } else {
            os << e.p << ',' << e.q << ',' << e.epsilon;
        }
        os << ',' << to_string(e.realization) << ',' << format_double(e.length) << '\n';
    }
}

inline json spectrum_json(const std::vector<SpectrumEntry>& rows)
{
    json out = json::array();
    for (const SpectrumEntry& e : rows) {
        json row{{"n", e.n},
                 {"length", "2*pi*sqrt(" + std::to_string(e.n) + ")"},
                 {"length_decimal", e.length},
                 {"realization", std::string(to_string(e.realization))}};
        if (e.realization != Realization::hopf_fiber) {
            row["p"] = e.p;
            row["q"] = e.q;
            row["epsilon"] = e.epsilon;
        }
        out.push_back(row);
    }
    return out;
}

inline void write_eigen_csv(std::ostream& os, const std::vector<EigenRow>& rows, const std::vector<double>& lambdas)
{
    os << "m,j,laplace,sublaplace";
    for (double lambda : lambdas) {
        os << ",penalty(" << format_double(lambda) << ')';
    }
    os << '\n';
    for (const EigenRow& r : rows) {
        os << r.index.m << ',' << r.index.j << ',' << r.laplace << ',' << r.sublaplace;
        for (double v : r.penalty) {
            os << ',' << format_double(v);
        }
        os << '\n';
    }
}

inline json eigen_json(const std::vector<EigenRow>& rows, const std::vector<double>& lambdas)
{
    json out = json::array();
    for (const EigenRow& r : rows) {
        json pen = json::array();
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            pen.push_back(json{{"lambda", lambdas[i]}, {"value", r.penalty[i]}});
        }
        out.push_back(json{{"m", r.index.m},
                           {"j", r.index.j},
                           {"laplace", r.laplace},
                           {"sublaplace", r.sublaplace},
                           {"penalty", pen}});
    }
    return out;
}

} // namespace hopfsr
