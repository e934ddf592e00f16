#pragma once

#include "choreo/core.hpp"
#include "choreo/dop853.hpp"
#include "choreo/potential.hpp"

#include <memory>
#include <vector>

namespace choreo {

/// Right-hand side of the equations of motion, with a hard minimum-distance
/// guard (no regularization; close encounters abort the step).
struct ThreeBodyRhs {
    PotentialSpec spec;
    double collision_guard = 1e-6;

    Vec12 operator()(double /*t*/, const Vec12& y) const {
        const Vec6 q = y.head<6>();
        if (min_pair_distance(q) < collision_guard)
            throw DomainError("close encounter below collision guard");
        Vec12 dy;
        dy.head<6>() = y.tail<6>();
        dy.tail<6>() = -potential_gradient(spec, q);
        return dy;
    }
};

/// Trajectory of the three-body flow: uniform samples over [t0, t0+span]
/// backed by the integrator's dense interpolant.
struct Trajectory {
    PotentialSpec spec;
    double t0 = 0.0;
    double span = 0.0;
    std::vector<PhaseState> samples;  // n_samples+1 states, endpoints included
    std::shared_ptr<const DenseSolution> dense;
    int interpolation_order = 7;

    int sample_count() const { return static_cast<int>(samples.size()) - 1; }

    PhaseState at(double t) const { return PhaseState::unpack(dense->at(t), t); }
    PhaseState front() const { return samples.front(); }
    PhaseState back() const { return samples.back(); }
};

/// Integrate from `state` over `t_span` (signed). Energy and momenta are
/// conserved to integrator accuracy; callers may assert via `conserved`.
inline Trajectory integrate(const PotentialSpec& spec, const PhaseState& state, double t_span,
                            const IntegrationOptions& opt = {}, int n_samples = 256) {
    if (opt.rtol <= 0.0 || opt.rtol > 1e-3)
        throw DomainError("integrate: tolerance must be in (0, 1e-3]");
    if (t_span == 0.0) throw DomainError("integrate: zero span");
    Trajectory traj;
    traj.spec = spec;
    traj.t0 = state.t;
    traj.span = t_span;
    ThreeBodyRhs rhs{spec};
    traj.dense = std::make_shared<DenseSolution>(
        integrate_dense(rhs, state.packed(), state.t, state.t + t_span, opt));
    traj.samples.reserve(n_samples + 1);
    for (int k = 0; k <= n_samples; ++k) {
        const double t = state.t + t_span * k / n_samples;
        traj.samples.push_back(PhaseState::unpack(traj.dense->at(t), t));
    }
    return traj;
}

/// Convenience: single end state of a flow.
inline PhaseState flow(const PotentialSpec& spec, const PhaseState& state, double t_span,
                       const IntegrationOptions& opt = {}) {
    ThreeBodyRhs rhs{spec};
    const DenseSolution sol =
        integrate_dense(rhs, state.packed(), state.t, state.t + t_span, opt);
    return PhaseState::unpack(sol.at(state.t + t_span), state.t + t_span);
}

/// Action integral of one period: S = int_0^T (|v|^2/2 - U(q)) dt, evaluated
/// by the periodic rectangle rule on the stored uniform samples (spectrally
/// accurate for a periodic trajectory).
inline double action(const PotentialSpec& spec, const Trajectory& traj) {
    const int n = traj.sample_count();
    if (n < 2) throw DomainError("action: trajectory has too few samples");
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const PhaseState& st = traj.samples[k];
        s += 0.5 * st.v.squaredNorm() - potential_energy(spec, st.q);
    }
    return s * traj.span / n;
}

}  // namespace choreo
