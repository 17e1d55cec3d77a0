// Finite-difference residual of (subLaplacian + 2k) on sin^k(theta0) cos(k theta1).
#include <cstdio>

#include "hopfsr/eigenvalues.hpp"

int main()
{
    using namespace hopfsr;
    for (int k = 1; k <= 4; ++k) {
        double prev = 0.0;
        for (double h : {4e-2, 2e-2, 1e-2, 5e-3, 2.5e-3}) {
            const double res = gaussian_beam_residual(k, h);
            if (prev > 0.0) {
                std::printf("k=%d h=%-7g residual %.3e  ratio %.3f\n", k, h, res, prev / res);
            } else {
                std::printf("k=%d h=%-7g residual %.3e\n", k, h, res);
            }
            prev = res;
        }
        std::printf("k=%d commutator with V at h=1e-2: %.3e\n", k, beam_commutator_residual(k, 1e-2));
    }
    return 0;
}
