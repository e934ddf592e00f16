// Scratch probes, round 3: spectrum of the second-variation operator.
#include "choreo/spectrum.hpp"

#include <cstdio>

using namespace choreo;

int main() {
    const PotentialSpec h1 = PotentialSpec::homogeneous(1.0);

    // free particles: eigenvalues (2 pi n / T)^2, multiplicity 6 (12 for n>0)
    {
        std::vector<Vec6> qs(24, (Vec6() << 1, 0, -1, 0, 0, 1).finished());
        auto m = assemble_hessian(PotentialSpec::homogeneous(0.0), qs, 2.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        printf("free: lowest 8: ");
        for (int i = 0; i < 8; ++i) printf("%.6f ", es.eigenvalues()[i]);
        printf(" expect 0 x6 then (pi)^2=9.8696 x12\n");
        printf("free: ev[6]=%.8f ev[17]=%.8f ev[18]=%.8f\n", es.eigenvalues()[6],
               es.eigenvalues()[17], es.eigenvalues()[18]);
    }

    PeriodicSolution eight = figure_eight_homogeneous(1.0, 1.0);

    for (int ng : {132, 264}) {
        HessianOperator op = build_hessian(h1, eight, ng);
        EigenSystem sys = eigen_decompose(op, 20);
        printf("a=1 ng=%d lowest 12: ", ng);
        for (int i = 0; i < 12; ++i) printf("%.6g ", sys.eigenvalues[i]);
        printf("\n");
        auto rep = morse_index(sys);
        printf("  N=%d zeros=%d ambig=%d zero_tol=%.2e\n", rep.index, rep.zero_mode_count,
               rep.ambiguous, rep.zero_tol);
        auto zm = conservation_zero_modes(op);
        for (int i = 0; i < 4; ++i) {
            const double r = (op.matrix * zm[i].data).norm() * std::sqrt(op.period / ng);
            printf("  |H zmode%d| = %.2e\n", i, r);
        }
    }

    // degenerate pair at a=1: rotation action of the choreography operator
    {
        HessianOperator op = build_hessian(h1, eight, 264);
        EigenSystem sys = eigen_decompose(op, 12);
        // find the pair closest to each other above zero modes
        int p = -1;
        for (const auto& g : sys.degeneracy_groups)
            if (g.size() == 2 && std::abs(sys.eigenvalues[g[0]]) > 1e-3) {
                p = g[0];
                break;
            }
        printf("pair index %d: lambda = %.6f, %.6f\n", p, sys.eigenvalues[p],
               sys.eigenvalues[p + 1]);
        GridFunction p1 = sys.eigenfunction(p), p2 = sys.eigenfunction(p + 1);
        GridFunction c1 = choreography_apply(p1), c2 = choreography_apply(p2);
        Eigen::Matrix2d m;
        m << grid_inner(p1, c1), grid_inner(p1, c2), grid_inner(p2, c1), grid_inner(p2, c2);
        printf("C projection: [%.6f %.6f; %.6f %.6f] det=%.6f tr=%.6f\n", m(0, 0), m(0, 1),
               m(1, 0), m(1, 1), m.determinant(), m.trace());
        // eigenfunction residuals
        printf("residuals: %.2e %.2e\n", eigen_residual(op, sys, p), eigen_residual(op, sys, p + 1));
        // C q = q for the eight
        GridFunction qf(264, 1.0);
        for (int k = 0; k < 264; ++k) qf.set_node(k, op.orbit_q[k]);
        GridFunction cq = choreography_apply(qf);
        printf("|Cq - q| = %.2e\n", (cq.data - qf.data).norm() / qf.data.norm());
    }

    // a = 1.345 pair (the one that vanishes at a = 1.3424)
    {
        PeriodicSolution e2 = figure_eight_homogeneous(1.345, 1.0);
        HessianOperator op = build_hessian(PotentialSpec::homogeneous(1.345), e2, 264);
        EigenSystem sys = eigen_decompose(op, 12);
        printf("a=1.345 lowest 12: ");
        for (int i = 0; i < 12; ++i) printf("%.6g ", sys.eigenvalues[i]);
        printf("\n");
    }
    return 0;
}
