#pragma once

#include "choreo/core.hpp"
#include "choreo/potential.hpp"
#include "choreo/trajectory.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

namespace choreo {

// ---------------------------------------------------------------------------
// Families and their symmetry-reduced parameterizations
// ---------------------------------------------------------------------------

enum class Family { FigureEight, Dxy, Dx, D2, Cx, C2, Cy };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::FigureEight: return "figure-eight";
        case Family::Dxy: return "dxy";
        case Family::Dx: return "dx";
        case Family::D2: return "d2";
        case Family::Cx: return "cx";
        case Family::C2: return "c2";
        case Family::Cy: return "cy";
    }
    return "?";
}

inline std::optional<Family> family_from_name(const std::string& s) {
    for (Family f : {Family::FigureEight, Family::Dxy, Family::Dx, Family::D2, Family::Cx,
                     Family::C2, Family::Cy})
        if (s == family_name(f)) return f;
    return std::nullopt;
}

inline int family_param_count(Family f) {
    switch (f) {
        case Family::FigureEight:
        case Family::Dxy:
        case Family::D2:
        case Family::C2: return 3;
        case Family::Dx:
        case Family::Cx: return 4;
        case Family::Cy: return 6;
    }
    return 0;
}

/// Fraction of the period integrated before applying the matching conditions.
inline double family_match_fraction(Family f) {
    switch (f) {
        case Family::FigureEight:
        case Family::Dxy: return 0.25;
        case Family::Dx:
        case Family::D2: return 0.5;
        default: return 1.0 / 6.0;
    }
}

/// Isosceles-triangle start: body 2 on the x axis at (-2x, 0), bodies 1 and 3
/// at (x, +-y); speeds fixed by v and the angular-momentum parameter l.
/// Center of mass and total linear momentum vanish identically, and the total
/// angular momentum equals l exactly.
inline PhaseState triangle_initial(double x, double y, double v, double l = 0.0) {
    if (v == 0.0) throw DomainError("triangle_initial: degenerate parameter v = 0");
    if (x == 0.0 && y == 0.0) throw DomainError("triangle_initial: (x, y) = 0");
    const double rho = l / (2.0 * v * std::sqrt(9.0 * x * x + y * y));
    if (std::abs(rho) >= 1.0)
        throw DomainError("triangle_initial: angular momentum too large for speed");
    const double theta = std::atan2(y, 3.0 * x) - std::asin(rho);
    PhaseState s;
    s.q << x, y, -2.0 * x, 0.0, x, -y;
    s.v << -std::cos(theta), -std::sin(theta), 0.0, 2.0 * std::sin(theta), std::cos(theta),
        -std::sin(theta);
    s.v *= v;
    return s;
}

/// Collinear (Euler) start: bodies at (x,0), (-x,0), (0,0); velocities
/// (u,v,u,v,-2u,-2v). Angular momentum is exactly zero.
inline PhaseState euler_initial(double x, double u, double v) {
    if (x == 0.0) throw DomainError("euler_initial: x = 0 is a triple collision");
    PhaseState s;
    s.q << x, 0.0, -x, 0.0, 0.0, 0.0;
    s.v << u, v, u, v, -2.0 * u, -2.0 * v;
    return s;
}

/// Start with body 3 on the y axis; the dependent velocity s is fixed by
/// requiring zero total angular momentum.
inline PhaseState cy_initial(double x, double y, double u, double v, double w, double yp) {
    const double denom = 2.0 * yp + y;
    if (denom == 0.0) throw DomainError("cy_initial: singular parameterization (2y' + y = 0)");
    const double s_vel = (2.0 * (x * v - y * u) + x * w - yp * u) / denom;
    PhaseState s;
    s.q << x, y, -x, -y - yp, 0.0, yp;
    s.v << u, v, -u - s_vel, -v - w, s_vel, w;
    return s;
}

struct ShootingParams {
    Family family = Family::Dxy;
    Eigen::VectorXd values;  // family-specific, see initial_state
    double period = 1.0;
};

inline PhaseState initial_state(const ShootingParams& p) {
    const auto& u = p.values;
    if (u.size() != family_param_count(p.family))
        throw DomainError("initial_state: wrong parameter count for family");
    switch (p.family) {
        case Family::FigureEight:
        case Family::Dxy: return triangle_initial(u[0], u[1], u[2], 0.0);
        case Family::Dx:
        case Family::Cx: return triangle_initial(u[0], u[1], u[2], u[3]);
        case Family::D2:
        case Family::C2: return euler_initial(u[0], u[1], u[2]);
        case Family::Cy: return cy_initial(u[0], u[1], u[2], u[3], u[4], u[5]);
    }
    throw DomainError("initial_state: unknown family");
}

/// Matching conditions at the family's matching time. The residual dimension
/// equals the parameter dimension; the period is held fixed.
inline Eigen::VectorXd residual(const PotentialSpec& spec, const ShootingParams& p,
                                const IntegrationOptions& opt = {}) {
    const PhaseState s0 = initial_state(p);
    const double tm = family_match_fraction(p.family) * p.period;
    const PhaseState sm = flow(spec, s0, tm, opt);
    const Vec6& q = sm.q;
    const Vec6& v = sm.v;
    Eigen::VectorXd r(family_param_count(p.family));
    switch (p.family) {
        case Family::FigureEight:
        case Family::Dxy:
            // body 2 at the origin, velocities of bodies 1 and 3 parallel
            r << q[2], q[3], v[0] * v[5] - v[1] * v[4];
            break;
        case Family::Dx:
            // body 2 back on the x axis, bodies 1 and 3 mirror-matched
            r << q[3], v[2], q[0] - q[4], v[1] - v[5];
            break;
        case Family::D2:
            // body 3 at the origin, velocities of bodies 1 and 2 parallel
            r << q[4], q[5], v[0] * v[3] - v[1] * v[2];
            break;
        case Family::Cx:
            // body 3 on the x axis, bodies 1 and 2 mirror-matched
            r << q[5], v[4], q[0] - q[2], v[1] - v[3];
            break;
        case Family::C2:
            // body 2 at the origin, velocities of bodies 1 and 3 parallel
            r << q[2], q[3], v[0] * v[5] - v[1] * v[4];
            break;
        case Family::Cy: {
            // state at T/6 equals the y-mirrored, cyclically relabeled start:
            // body 1 lands on the y axis, body 2 takes body 1's mirrored
            // position and velocity, body 1 takes body 3's mirrored position
            const auto& u = p.values;
            r.resize(6);
            r << q[0], q[2] + u[0], q[3] - u[1], v[2] + u[2], v[3] - u[3], q[1] - u[5];
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Damped Newton with forward-difference Jacobian
// ---------------------------------------------------------------------------

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 50;
    int max_halvings = 8;
    double fd_step = 1e-7;  // scaled by (1 + |param|)
};

struct NewtonResult {
    Eigen::VectorXd x;
    double residual_norm = std::numeric_limits<double>::infinity();
    std::vector<double> history;  // residual norms per accepted iterate
    bool converged = false;
};

inline NewtonResult damped_newton(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                  Eigen::VectorXd x, const NewtonOptions& opt = {}) {
    NewtonResult res;
    Eigen::VectorXd r;
    try {
        r = f(x);
    } catch (const Error&) {
        return res;
    }
    double rn = r.norm();
    res.history.push_back(rn);
    const int m = static_cast<int>(r.size());

    for (int it = 0; it < opt.max_iter; ++it) {
        if (rn < opt.tol) {
            res.x = x;
            res.residual_norm = rn;
            res.converged = true;
            return res;
        }
        Eigen::MatrixXd jac(m, x.size());
        for (int j = 0; j < x.size(); ++j) {
            const double h = opt.fd_step * (1.0 + std::abs(x[j]));
            Eigen::VectorXd xp = x;
            xp[j] += h;
            Eigen::VectorXd rp;
            try {
                rp = f(xp);
            } catch (const Error&) {
                res.x = x;
                res.residual_norm = rn;
                return res;
            }
            jac.col(j) = (rp - r) / h;
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
        if (qr.rank() < std::min<long>(m, x.size()))
            throw SingularJacobianError("damped_newton: rank-deficient Jacobian");
        const Eigen::VectorXd step = qr.solve(-r);

        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k <= opt.max_halvings; ++k, lambda *= 0.5) {
            const Eigen::VectorXd xt = x + lambda * step;
            Eigen::VectorXd rt;
            try {
                rt = f(xt);
            } catch (const Error&) {
                continue;
            }
            const double rtn = rt.norm();
            if (rtn < rn || rtn < opt.tol) {
                x = xt;
                r = rt;
                rn = rtn;
                res.history.push_back(rn);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    res.x = x;
    res.residual_norm = rn;
    res.converged = rn < opt.tol;
    return res;
}

// ---------------------------------------------------------------------------
// Periodic solutions
// ---------------------------------------------------------------------------

struct DistinguishingIndices {
    double d = std::numeric_limits<double>::quiet_NaN();
    double l = 0.0;
    double delta_i = 0.0;
};

struct PeriodicSolution {
    PotentialSpec spec;
    Family family = Family::Dxy;
    Eigen::VectorXd params;
    double period = 0.0;
    PhaseState state0;
    DistinguishingIndices indices;
    double residual_norm = 0.0;
    double action = 0.0;
    double frame_rotation = 0.0;  // theta2_rotation bookkeeping
    std::vector<double> newton_history;

    ShootingParams shooting_params() const { return {family, params, period}; }
};

/// Full-period trajectory of a converged solution.
inline Trajectory orbit(const PeriodicSolution& sol, int n_samples = 256,
                        const IntegrationOptions& opt = {}) {
    PhaseState s0 = sol.state0;
    s0.t = 0.0;
    return integrate(sol.spec, s0, sol.period, opt, n_samples);
}

/// y coordinate of body 1 at its first crossing of the y axis in (0, T/6).
inline double compute_index_d(const PotentialSpec& spec, const PhaseState& state0, double period,
                              const IntegrationOptions& opt = {}) {
    PhaseState s0 = state0;
    s0.t = 0.0;
    ThreeBodyRhs rhs{spec};
    const DenseSolution sol = integrate_dense(rhs, s0.packed(), 0.0, period / 6.0, opt);
    const auto root =
        first_sign_change(sol, [](const Vec12& y) { return y[0]; }, 0.0, period / 6.0);
    if (!root) throw ClassificationError("compute_index_d: body 1 never crosses the y axis");
    return sol.at(*root)[1];
}

inline double compute_index_d(const PeriodicSolution& sol, const IntegrationOptions& opt = {}) {
    return compute_index_d(sol.spec, sol.state0, sol.period, opt);
}

/// Moment-of-inertia difference I(T/2) - I(0).
inline double compute_index_deltaI(const PotentialSpec& spec, const PhaseState& state0,
                                   double period, const IntegrationOptions& opt = {}) {
    PhaseState s0 = state0;
    s0.t = 0.0;
    const PhaseState half = flow(spec, s0, 0.5 * period, opt);
    return half.q.squaredNorm() - s0.q.squaredNorm();
}

inline double compute_index_deltaI(const PeriodicSolution& sol,
                                   const IntegrationOptions& opt = {}) {
    return compute_index_deltaI(sol.spec, sol.state0, sol.period, opt);
}

constexpr double kFigureEightIndexTol = 1e-6;

inline bool indices_are_figure_eight(const DistinguishingIndices& ix,
                                     double tol = kFigureEightIndexTol) {
    return std::isfinite(ix.d) && std::abs(ix.d) < tol && std::abs(ix.l) < tol &&
           std::abs(ix.delta_i) < tol;
}

inline PeriodicSolution make_solution(const PotentialSpec& spec, Family family,
                                      const Eigen::VectorXd& params, double period,
                                      double residual_norm, std::vector<double> history = {},
                                      const IntegrationOptions& opt = {}) {
    PeriodicSolution sol;
    sol.spec = spec;
    sol.family = family;
    sol.params = params;
    sol.period = period;
    sol.state0 = initial_state({family, params, period});
    sol.residual_norm = residual_norm;
    sol.newton_history = std::move(history);
    sol.indices.l = conserved(spec, sol.state0).angular_momentum;
    sol.indices.delta_i = compute_index_deltaI(spec, sol.state0, period, opt);
    try {
        sol.indices.d = compute_index_d(spec, sol.state0, period, opt);
    } catch (const ClassificationError&) {
        sol.indices.d = std::numeric_limits<double>::quiet_NaN();
    }
    sol.action = action(spec, orbit(sol, 256, opt));
    // converged figure-eight seeds solved through the Dxy conditions keep
    // their own label
    if (family == Family::Dxy && indices_are_figure_eight(sol.indices))
        sol.family = Family::FigureEight;
    return sol;
}

/// Damped Newton on the family's matching conditions. Throws ConvergenceError
/// if the residual cannot be brought below tolerance.
inline PeriodicSolution newton_solve(const PotentialSpec& spec, Family family, double period,
                                     const Eigen::VectorXd& seed, const NewtonOptions& nopt = {},
                                     const IntegrationOptions& iopt = {}) {
    if (seed.size() != family_param_count(family))
        throw DomainError("newton_solve: wrong seed dimension");
    auto fn = [&](const Eigen::VectorXd& x) {
        return residual(spec, {family, x, period}, iopt);
    };
    const NewtonResult res = damped_newton(fn, seed, nopt);
    if (!res.converged)
        throw ConvergenceError("newton_solve: no convergence for family " +
                                   std::string(family_name(family)),
                               res.residual_norm);
    return make_solution(spec, family, res.x, period, res.residual_norm, res.history, iopt);
}

// ---------------------------------------------------------------------------
// Figure-eight bootstrap and continuation (homogeneous potentials, T = 1)
// ---------------------------------------------------------------------------

/// Scale a homogeneous-potential solution from period T to period c^((a+2)/2) T.
inline Eigen::VectorXd scale_triangle_params(const Eigen::VectorXd& params, double a,
                                             double length_factor) {
    Eigen::VectorXd out = params;
    out[0] *= length_factor;
    out[1] *= length_factor;
    out[2] *= std::pow(length_factor, -0.5 * a);
    if (out.size() > 3) out[3] *= std::pow(length_factor, 1.0 - 0.5 * a);
    return out;
}

namespace detail {

/// Deterministic coarse search for the figure-eight at a = 1, T = 1: scan a
/// parameter box for small matching residuals, then polish with Newton and
/// keep the first candidate whose d index vanishes.
inline Eigen::Vector3d bootstrap_eight_unit() {
    const PotentialSpec spec = PotentialSpec::homogeneous(1.0);
    IntegrationOptions coarse;
    coarse.rtol = 1e-9;
    coarse.atol = 1e-11;

    struct Cand {
        double score;
        Eigen::Vector3d p;
    };
    std::vector<Cand> cands;
    for (int ix = 0; ix <= 10; ++ix)
        for (int iy = 0; iy <= 10; ++iy)
            for (int iv = 0; iv <= 15; ++iv) {
                Eigen::Vector3d p{0.10 + 0.01 * ix, 0.05 + 0.01 * iy, 1.5 + 0.1 * iv};
                try {
                    const auto r = residual(spec, {Family::Dxy, p, 1.0}, coarse);
                    cands.push_back({r.norm(), p});
                } catch (const Error&) {
                }
            }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.score < b.score; });

    for (size_t i = 0; i < std::min<size_t>(cands.size(), 40); ++i) {
        auto fn = [&](const Eigen::VectorXd& x) {
            return residual(spec, {Family::Dxy, x, 1.0});
        };
        NewtonResult res;
        try {
            res = damped_newton(fn, cands[i].p);
        } catch (const SingularJacobianError&) {
            continue;
        }
        if (!res.converged || res.x[2] <= 0.0) continue;
        try {
            const double d = compute_index_d(spec, initial_state({Family::Dxy, res.x, 1.0}), 1.0);
            if (std::abs(d) < kFigureEightIndexTol) return res.x;
        } catch (const Error&) {
        }
    }
    throw ConvergenceError("bootstrap: figure-eight not found in search box");
}

/// Cache of figure-eight parameters (x, y, v) at T = 1 along the homogeneous
/// family, filled by continuation in the exponent from the a = 1 anchor.
inline Eigen::Vector3d homogeneous_eight_params(double a) {
    if (a <= 0.0) throw NonexistenceError("figure-eight requires a > 0 at fixed period");
    static std::mutex mtx;
    static std::map<long long, Eigen::Vector3d> cache;
    std::scoped_lock lock(mtx);

    auto key = [](double x) { return llround(x * 1e8); };
    if (cache.empty()) cache[key(1.0)] = bootstrap_eight_unit();
    if (auto it = cache.find(key(a)); it != cache.end()) return it->second;

    // nearest anchor
    auto it = cache.lower_bound(key(a));
    if (it == cache.end()) --it;
    if (it != cache.begin()) {
        auto prev = std::prev(it);
        if (std::llabs(prev->first - key(a)) < std::llabs(it->first - key(a))) it = prev;
    }
    double a_cur = it->first / 1e8;
    Eigen::Vector3d p = it->second;

    auto solve_at = [&](double ax, const Eigen::Vector3d& seed) -> std::optional<Eigen::Vector3d> {
        const PotentialSpec spec = PotentialSpec::homogeneous(ax);
        auto fn = [&](const Eigen::VectorXd& x) {
            return residual(spec, {Family::Dxy, x, 1.0});
        };
        try {
            const NewtonResult res = damped_newton(fn, seed);
            if (!res.converged) return std::nullopt;
            const double d =
                compute_index_d(spec, initial_state({Family::Dxy, res.x, 1.0}), 1.0);
            if (std::abs(d) > kFigureEightIndexTol) return std::nullopt;
            return Eigen::Vector3d(res.x);
        } catch (const Error&) {
        }
        return std::nullopt;
    };

    double step = 0.01;
    const double dir = (a > a_cur) ? 1.0 : -1.0;
    int failures = 0;
    while (std::abs(a - a_cur) > 1e-12) {
        const double h = std::min(step, std::abs(a - a_cur));
        const double a_next = a_cur + dir * h;
        const auto sol = solve_at(a_next, p);
        if (sol) {
            a_cur = a_next;
            p = *sol;
            cache[key(a_cur)] = p;
            failures = 0;
            if (step < 0.01) step *= 2.0;
        } else if (++failures > 60 || step < 1e-6) {
            // a locally singular point (scaling degeneracy); try stepping over it
            const double a_jump = a_cur + dir * std::min(0.02, std::abs(a - a_cur));
            if (auto hop = solve_at(a_jump, p)) {
                a_cur = a_jump;
                p = *hop;
                cache[key(a_cur)] = p;
                failures = 0;
                step = 0.01;
            } else {
                throw ConvergenceError("figure-eight continuation stalled at a = " +
                                       std::to_string(a_cur));
            }
        } else {
            step *= 0.5;
        }
    }
    return p;
}

}  // namespace detail

/// The homogeneous-potential figure-eight at the given period, by continuation
/// in the exponent from a deterministic bootstrap at a = 1 (periods other than
/// one are reached by exact scaling). The Lennard-Jones case lives in lj.hpp;
/// figure_eight(spec, period) there dispatches to both.
inline PeriodicSolution figure_eight_homogeneous(double a, double period = 1.0) {
    if (period <= 0.0) throw DomainError("figure_eight: period must be positive");
    Eigen::Vector3d p = detail::homogeneous_eight_params(a);
    if (period != 1.0) {
        const double c = std::pow(period, 2.0 / (a + 2.0));
        p = Eigen::Vector3d(scale_triangle_params(p, a, c));
    }
    PeriodicSolution sol = newton_solve(PotentialSpec::homogeneous(a), Family::Dxy, period, p);
    if (!indices_are_figure_eight(sol.indices))
        throw ConvergenceError("figure_eight: converged to a non-choreographic solution");
    sol.family = Family::FigureEight;
    return sol;
}

/// Rotate a two-fold-symmetric solution (D2 or C2) so that the x axis bisects
/// the two collinear configurations. Only the stored initial state rotates;
/// the shooting parameters keep their canonical frame.
inline PeriodicSolution theta2_rotation(const PeriodicSolution& sol,
                                        const IntegrationOptions& opt = {}) {
    if (sol.family != Family::D2 && sol.family != Family::C2)
        throw DomainError("theta2_rotation: only defined for d2 and c2 solutions");
    PhaseState s0 = sol.state0;
    s0.t = 0.0;
    const PhaseState half = flow(sol.spec, s0, 0.5 * sol.period, opt);
    if (half.q[2] == 0.0 && half.q[3] == 0.0)
        throw DomainError("theta2_rotation: undefined rotation (body 2 at the origin)");
    const double theta2 = -0.5 * std::atan(half.q[3] / half.q[2]);
    PeriodicSolution out = sol;
    out.state0 = rotated(sol.state0, theta2);
    out.frame_rotation = sol.frame_rotation + theta2;
    return out;
}

}  // namespace choreo
