// Scratch numerical probes used while developing; not part of the test suite.
#include "choreo/shooting.hpp"

#include <cstdio>

using namespace choreo;

int main() {
    const PotentialSpec h1 = PotentialSpec::homogeneous(1.0);
    const PotentialSpec lj = PotentialSpec::lennard_jones();

    // 1. bootstrap the a=1 figure-eight
    PeriodicSolution eight = figure_eight_homogeneous(1.0, 1.0);
    const auto cq = conserved(h1, eight.state0);
    printf("eight a=1: x=%.8f y=%.8f v=%.8f  E=%.6f  d=%.3e res=%.2e\n", eight.params[0],
           eight.params[1], eight.params[2], cq.energy, eight.indices.d, eight.residual_norm);

    // 2. residual at the known dxy (H) parameters, a=1 T=1
    Eigen::Vector3d hp{0.15800, 0.096588, 2.2321};
    auto r = residual(h1, {Family::Dxy, hp, 1.0});
    printf("H residual at caption params: %.3e %.3e  norm=%.3e\n", r[0], r[1], r.norm());

    // 3. newton from caption params
    PeriodicSolution hsol = newton_solve(h1, Family::Dxy, 1.0, hp);
    printf("H solved: x=%.6f y=%.6f v=%.6f d=%.7f l=%.2e dI=%.2e S=%.8f\n", hsol.params[0],
           hsol.params[1], hsol.params[2], hsol.indices.d, hsol.indices.l, hsol.indices.delta_i,
           hsol.action);

    // 3b. map condition question: q2 vs q3 at T/4 for the H solution
    {
        PhaseState s0 = hsol.state0;
        s0.t = 0;
        PhaseState q4 = flow(h1, s0, 0.25);
        printf("H at T/4: q2=%.6e q3=%.6e q4=%.6e (body1 y vs body2 x,y)\n", q4.q[1], q4.q[2],
               q4.q[3]);
    }

    // 4. LJ T=20 caption parameter residual checks
    struct Case {
        const char* name;
        Family fam;
        std::vector<double> p;
    };
    const std::vector<Case> cases = {
        {"dxy right of 16.878", Family::Dxy, {0.77903, 0.54721, 0.59844}},
        {"dxy left  of 16.878", Family::Dxy, {0.73650, 0.54718, 0.59824}},
        {"dxy right of 14.836", Family::Dxy, {0.74968, 0.76413, 0.45966}},
        {"dxy left  of 14.836", Family::Dxy, {0.75349, 0.56442, 0.64295}},
        {"dx  from 16.111", Family::Dx, {0.78752, 0.54620, 0.59854, 0.0028781}},
        {"dx  from 14.861", Family::Dx, {0.75744, 0.72602, 0.52093, 0.027042}},
        {"d2  from 16.111", Family::D2, {1.3362, 0.16921, 0.34182}},
        {"d2  from 14.861", Family::D2, {1.5333, 0.061120, 0.33256}},
        {"cx  from 14.595", Family::Cx, {0.76038, 0.73802, 0.49633, 0.096581}},
        {"c2  from 18.615", Family::C2, {1.4638, 0.11916, 0.30699}},
    };
    for (const auto& c : cases) {
        Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(c.p.data(), c.p.size());
        try {
            auto rr = residual(lj, {c.fam, p, 20.0});
            printf("%-22s |r| = %.3e\n", c.name, rr.norm());
        } catch (const Error& e) {
            printf("%-22s error: %s\n", c.name, e.what());
        }
    }

    // 5. Cy: integrate caption start to T/6 and print every matching relation
    {
        const double x = 1.4167, y = 0.42115, u = -0.19613, v = 0.27560, w = -0.52564,
                     yp = 0.089593;
        PhaseState s0 = cy_initial(x, y, u, v, w, yp);
        const double s_vel = s0.v[4];
        PhaseState sm = flow(lj, s0, 20.0 / 6.0);
        printf("cy t=T/6: q = %.5f %.5f %.5f %.5f %.5f %.5f\n", sm.q[0], sm.q[1], sm.q[2], sm.q[3],
               sm.q[4], sm.q[5]);
        printf("cy positions: q1=%.3e q3+x=%.3e q4-y=%.3e q2-y'=%.3e\n", sm.q[0], sm.q[2] + x,
               sm.q[3] - y, sm.q[1] - yp);
        printf("cy printed vel conds: v4+u=%.3e v5-v=%.3e\n", sm.v[3] + u, sm.v[4] - v);
        printf("cy shifted vel conds: v3+u=%.3e v4-v=%.3e\n", sm.v[2] + u, sm.v[3] - v);
        printf("cy full target (no TR): v1+s=%.3e v2-w=%.3e v5-(u+s)=%.3e v6+(v+w)=%.3e\n",
               sm.v[0] + s_vel, sm.v[1] - w, sm.v[4] - (u + s_vel), sm.v[5] + (v + w));
        printf("cy conserved: l=%.3e\n", conserved(lj, s0).angular_momentum);
    }

    // 6. continuation to a=6 (crosses a=2)
    try {
        PeriodicSolution e6 = figure_eight_homogeneous(6.0, 1.0);
        printf("eight a=6: x=%.6f y=%.6f v=%.6f E=%.6f\n", e6.params[0], e6.params[1],
               e6.params[2], conserved(PotentialSpec::homogeneous(6.0), e6.state0).energy);
    } catch (const Error& e) {
        printf("a=6 continuation FAILED: %s\n", e.what());
    }
    return 0;
}
