// Scratch probes, round 2: the c2 matching conditions and caption cross-checks.
#include "choreo/shooting.hpp"

#include <cstdio>

using namespace choreo;

static void show_state(const char* tag, const PhaseState& s) {
    printf("%s q=(%.5f %.5f | %.5f %.5f | %.5f %.5f) v=(%.5f %.5f | %.5f %.5f | %.5f %.5f)\n",
           tag, s.q[0], s.q[1], s.q[2], s.q[3], s.q[4], s.q[5], s.v[0], s.v[1], s.v[2], s.v[3],
           s.v[4], s.v[5]);
}

int main() {
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    const PotentialSpec h1 = PotentialSpec::homogeneous(1.0);

    // --- c2 caption start, state at T/6 and T/2
    {
        PhaseState s0 = euler_initial(1.4638, 0.11916, 0.30699);
        show_state("c2 t=0  :", s0);
        PhaseState s6 = flow(lj, s0, 20.0 / 6.0);
        show_state("c2 t=T/6:", s6);
        printf("b1 at origin: q1=%.4e q2=%.4e cross(印)=%.4e\n", s6.q[0], s6.q[1],
               s6.v[0] * s6.v[5] - s6.v[1] * s6.v[4]);
        printf("b2 at origin: q3=%.4e q4=%.4e\n", s6.q[2], s6.q[3]);
        printf("b3 at origin: q5=%.4e q6=%.4e\n", s6.q[4], s6.q[5]);
    }

    // --- side solutions of the 0.9966 bifurcation: continue dxy branch in a.
    {
        Eigen::VectorXd p(3);
        p << 0.158004, 0.096587, 2.132123;  // converged H at a=1
        for (double a : {0.99, 0.9866, 0.9766}) {
            try {
                auto sol = newton_solve(PotentialSpec::homogeneous(a), Family::Dxy, 1.0, p);
                p = sol.params;
                if (a == 0.9766)
                    printf("dxy a=0.9766: (%.5f, %.5f, %.5f; %.6f)  [caption (0.15533, 0.12092, "
                           "1.79372; 0.025027)]\n",
                           sol.params[0], sol.params[1], sol.params[2], sol.indices.d);
            } catch (const Error& e) {
                printf("a=%.4f fail: %s\n", a, e.what());
            }
        }
        p << 0.158004, 0.096587, 2.132123;
        for (double a : {1.0066, 1.0166}) {
            try {
                auto sol = newton_solve(PotentialSpec::homogeneous(a), Family::Dxy, 1.0, p);
                p = sol.params;
                if (a == 1.0166)
                    printf("dxy a=1.0166: (%.5f, %.5f, %.5f; %.6f)  [caption (0.15886, 0.072493, "
                           "2.58066; -0.042498)]\n",
                           sol.params[0], sol.params[1], sol.params[2], sol.indices.d);
            } catch (const Error& e) {
                printf("a=%.4f fail: %s\n", a, e.what());
            }
        }
    }

    // --- dx / d2 captions at a=1.3425, T=1
    {
        Eigen::VectorXd pdx(4);
        pdx << 0.16872, 0.11111, 2.8874, 0.000035433;
        try {
            auto sol = newton_solve(PotentialSpec::homogeneous(1.3425), Family::Dx, 1.0, pdx);
            printf("dx a=1.3425: (%.5f, %.5f, %.5f, %.3e) d=%.5f  [caption (0.16872, 0.11111, "
                   "2.8874, 3.5433e-05)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.params[3], sol.indices.d);
        } catch (const Error& e) {
            printf("dx a=1.3425 fail: %s\n", e.what());
        }
        Eigen::VectorXd pd2(3);
        pd2 << 0.39375, 0.57707, 1.1697;
        try {
            auto sol = newton_solve(PotentialSpec::homogeneous(1.3425), Family::D2, 1.0, pd2);
            printf("d2 a=1.3425: (%.5f, %.5f, %.5f) dI=%.5f  [caption (0.39375, 0.57707, 1.1697; "
                   "-0.11584)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.indices.delta_i);
        } catch (const Error& e) {
            printf("d2 a=1.3425 fail: %s\n", e.what());
        }
    }

    // --- LJ caption Newton polishing: do converged params match captions?
    struct Case {
        const char* name;
        Family fam;
        std::vector<double> p;
    };
    const std::vector<Case> cases = {
        {"dxy R16.878", Family::Dxy, {0.77903, 0.54721, 0.59844}},
        {"dx  16.111", Family::Dx, {0.78752, 0.54620, 0.59854, 0.0028781}},
        {"d2  16.111", Family::D2, {1.3362, 0.16921, 0.34182}},
        {"d2  14.861", Family::D2, {1.5333, 0.061120, 0.33256}},
        {"cx  14.595", Family::Cx, {0.76038, 0.73802, 0.49633, 0.096581}},
        {"c2  18.615", Family::C2, {1.4638, 0.11916, 0.30699}},
        {"cy  17.132", Family::Cy, {1.4167, 0.42115, -0.19613, 0.27560, -0.52564, 0.089593}},
    };
    for (const auto& c : cases) {
        Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(c.p.data(), c.p.size());
        try {
            auto sol = newton_solve(lj, c.fam, 20.0, p);
            printf("%-11s ->", c.name);
            for (int i = 0; i < sol.params.size(); ++i) printf(" %.6g", sol.params[i]);
            printf("  (d=%.4g l=%.4g dI=%.4g)\n", sol.indices.d, sol.indices.l,
                   sol.indices.delta_i);
        } catch (const Error& e) {
            printf("%-11s FAIL: %s\n", c.name, e.what());
        }
    }
    return 0;
}
