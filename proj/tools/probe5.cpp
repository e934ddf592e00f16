// Scratch probes, round 5: end-to-end bifurcation analysis, homogeneous side.
#include "choreo/bifurcation.hpp"

#include <cstdio>

using namespace choreo;

static void print_record(const BifurcationRecord& rec) {
    printf("xi0=%.5f dN=%d g=%d Q=%s side=%s N_B=%d counts=[", rec.xi0, rec.delta_n,
           rec.degeneracy, q_symmetry_name(rec.q_symmetry), side_name(rec.side), rec.n_b);
    for (int c : rec.congruent_counts) printf("%d ", c);
    printf("] thetas=%zu lambdaA=%.5f ledger=%s(%s)\n", rec.critical_thetas.size(),
           rec.lambda_at_analysis, rec.ledger.counts_ok ? "ok" : "FAIL",
           rec.ledger.detail.c_str());
    for (const auto& c : rec.candidates) {
        printf("  side=%+d th=%.4f fam=%s cls=%d params=(", c.side, c.theta,
               family_name(c.solution.family), c.congruence_class);
        for (int i = 0; i < c.solution.params.size(); ++i)
            printf("%.5f%s", c.solution.params[i], i + 1 < c.solution.params.size() ? ", " : "");
        printf(") d=%.5f dI=%.4f dS=%.3e\n", c.solution.indices.d, c.solution.indices.delta_i,
               c.delta_s);
    }
}

int main() {
    const BranchId homog = BranchId::homogeneous_family();

    printf("== crossing near 0.9966 ==\n");
    BifurcationRecord r1 = locate_crossing(homog, 0.95, 1.05);
    printf("located: xi0=%.5f dN=%d g=%d\n", r1.xi0, r1.delta_n, r1.degeneracy);
    r1 = analyze_crossing(homog, r1);
    print_record(r1);
    auto sig1 = check_sign_relations(r1);
    printf("sign relations: lambda %d side %d (checked %d)\n", sig1.lambda_relation_ok,
           sig1.side_relation_ok, sig1.checked);

    // follow the right-side dxy branch to a = 1.0166 and the left to 0.9766
    for (const auto& c : r1.candidates) {
        if (c.side > 0 && c.congruence_class == 0) {
            auto sol = follow_family(homog, c.solution, c.xi, 1.0166);
            printf("follow right -> a=1.0166: (%.5f, %.5f, %.5f) d=%.6f [caption (0.15886, "
                   "0.072493, 2.58066; -0.042498)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.indices.d);
            break;
        }
    }
    for (const auto& c : r1.candidates) {
        if (c.side < 0 && c.congruence_class == 0) {
            auto sol = follow_family(homog, c.solution, c.xi, 0.9766);
            printf("follow left  -> a=0.9766: (%.5f, %.5f, %.5f) d=%.6f [caption (0.15533, "
                   "0.12092, 1.79372; 0.025027)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.indices.d);
            break;
        }
    }

    printf("== crossing near 1.3424 ==\n");
    BifurcationRecord r2 = locate_crossing(homog, 1.30, 1.40);
    printf("located: xi0=%.5f dN=%d g=%d\n", r2.xi0, r2.delta_n, r2.degeneracy);
    r2 = analyze_crossing(homog, r2);
    print_record(r2);
    auto sig2 = check_sign_relations(r2);
    printf("sign relations: lambda %d side %d (checked %d)\n", sig2.lambda_relation_ok,
           sig2.side_relation_ok, sig2.checked);

    // follow one dx and one d2 to a = 1.3425
    bool done_dx = false, done_d2 = false;
    for (const auto& c : r2.candidates) {
        if (c.side > 0 && c.solution.family == Family::Dx && !done_dx) {
            auto sol = follow_family(homog, c.solution, c.xi, 1.3425);
            printf("follow dx -> a=1.3425: (%.5f, %.5f, %.5f, %.3e) [caption (0.16872, 0.11111, "
                   "2.8874, 3.5433e-05)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.params[3]);
            done_dx = true;
        }
        if (c.side > 0 && c.solution.family == Family::D2 && !done_d2) {
            auto sol = follow_family(homog, c.solution, c.xi, 1.3425);
            printf("follow d2 -> a=1.3425: (%.5f, %.5f, %.5f) dI=%.5f [caption (0.39375, "
                   "0.57707, 1.1697; -0.11584)]\n",
                   sol.params[0], sol.params[1], sol.params[2], sol.indices.delta_i);
            done_d2 = true;
        }
    }
    return 0;
}
