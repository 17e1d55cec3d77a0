// Canonical closed geodesic for each n <= 12, integrated and measured.
#include <cmath>
#include <cstdio>

#include "hopfsr/acceptance.hpp"

int main()
{
    using namespace hopfsr;
    std::printf("%3s %10s %5s %5s %3s %18s %18s %10s\n", "n", "kind", "p", "q", "eps", "2 pi sqrt(n)", "measured",
                "gap");
    for (std::int64_t n = 1; n <= 12; ++n) {
        const SpectrumEntry e = realize_length(n);
        const PhaseState s = detail::realized_state(n);
        const Trajectory tr = integrate(s, detail::realized_period(n, s), detail::fixed_step(1e-3));
        std::printf("%3lld %10s %5lld %5lld %3d %18.12f %18.12f %10.2e\n", static_cast<long long>(n),
                    std::string(to_string(e.realization)).c_str(), static_cast<long long>(e.p),
                    static_cast<long long>(e.q), e.epsilon, e.length, sr_arc_length(tr),
                    phase_gap(s, tr.back().state));
    }
    return 0;
}
