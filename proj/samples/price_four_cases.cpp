// Optimal barriers and values at the strike for all four put/call and
// jump-side combinations, with the classical barriers for comparison.

#include <cmath>
#include <cstdio>

#include "perex/perex.hpp"

int main() {
    using namespace perex;
    const double r = 0.05, delta = 0.03, K = 50.0, lambda = 1.0;

    for (JumpSide side : {JumpSide::SpectrallyNegative, JumpSide::SpectrallyPositive}) {
        const LevyModel model{side, 0.2, calibrate_drift(0.2, 1.0, 2.0, side, r, delta), 1.0, 2.0};
        for (OptionKind kind : {OptionKind::Put, OptionKind::Call}) {
            const PeriodicPricer pricer(model, {kind, K, r, lambda});
            const BarrierSolution sol = pricer.solve_barrier();
            std::printf("%-6s barrier %9.4f  classical %9.4f  V(K) %8.4f\n",
                        std::string(to_string(sol.case_tag)).c_str(), sol.barrier,
                        std::exp(pricer.classical_log_barrier()), pricer.value(sol.log_barrier, std::log(K)));
        }
    }
    return 0;
}
