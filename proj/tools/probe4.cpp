// Scratch probes, round 4: LJ branches, fold, and the alpha_+ spectrum.
#include "choreo/lj.hpp"
#include "choreo/spectrum.hpp"

#include <cstdio>

using namespace choreo;

int main() {
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    const auto& ab = lj_alpha_branches();
    printf("T_min = %.5f (expect 14.479), fold params = (%.5f, %.5f, %.5f)\n", ab.t_min,
           ab.fold_params[0], ab.fold_params[1], ab.fold_params[2]);

    PeriodicSolution am = lj_figure_eight(20.0, -1);
    PeriodicSolution ap = lj_figure_eight(20.0, +1);
    printf("alpha- T=20: (%.5f, %.5f, %.5f) S=%.6f E=%.6f d=%.2e\n", am.params[0], am.params[1],
           am.params[2], am.action, conserved(lj, am.state0).energy, am.indices.d);
    printf("alpha+ T=20: (%.5f, %.5f, %.5f) S=%.6f E=%.6f d=%.2e\n", ap.params[0], ap.params[1],
           ap.params[2], ap.action, conserved(lj, ap.state0).energy, ap.indices.d);

    try {
        lj_figure_eight(14.3, -1);
        printf("T=14.3: unexpectedly solved!\n");
    } catch (const NonexistenceError& e) {
        printf("T=14.3: nonexistence as expected (%s)\n", e.what());
    }

    // Morse indices along both branches at a few periods
    for (int sign : {-1, +1}) {
        for (double T : {14.55, 14.7, 14.85, 15.0, 16.0, 16.5, 17.0, 17.5, 18.0, 19.0, 20.0}) {
            try {
                PeriodicSolution s = lj_figure_eight(T, sign);
                HessianOperator op = build_hessian(lj, s, 264);
                auto vals = hessian_eigenvalues(op);
                auto rep = count_morse_index(vals);
                printf("alpha%c T=%.2f: N=%d zeros=%d low=[%.5g %.5g %.5g %.5g %.5g %.5g]\n",
                       sign < 0 ? '-' : '+', T, rep.index, rep.zero_mode_count, vals[0], vals[1],
                       vals[2], vals[3], vals[4], vals[5]);
            } catch (const Error& e) {
                printf("alpha%c T=%.2f: %s\n", sign < 0 ? '-' : '+', T, e.what());
            }
        }
    }

    // Fig 8 check: alpha_+ at T=18.337 has eigenvalues 0.0027783 and -0.023907
    {
        PeriodicSolution s = lj_figure_eight(18.337, +1);
        HessianOperator op = build_hessian(lj, s, 264);
        auto vals = hessian_eigenvalues(op);
        printf("alpha+ T=18.337 lowest 10: ");
        for (int i = 0; i < 10; ++i) printf("%.6g ", vals[i]);
        printf("\n");
    }
    return 0;
}
