#pragma once

#include "choreo/shooting.hpp"

#include <mutex>

namespace choreo {

/// The two Lennard-Jones figure-eight branches joined at the fold period:
/// alpha_minus tends to the a = 6 homogeneous solution as T grows,
/// alpha_plus is the second solution born at the fold.
struct AlphaBranches {
    double t_min = 0.0;
    Eigen::Vector3d fold_params = Eigen::Vector3d::Zero();
    std::vector<std::pair<double, Eigen::Vector3d>> minus_anchors;  // sorted by period
    std::vector<std::pair<double, Eigen::Vector3d>> plus_anchors;
};

namespace detail {

inline std::optional<Eigen::Vector3d> lj_dxy_solve(double period, const Eigen::Vector3d& seed,
                                                   bool require_eight = false) {
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    auto fn = [&](const Eigen::VectorXd& x) { return residual(lj, {Family::Dxy, x, period}); };
    try {
        const NewtonResult res = damped_newton(fn, seed);
        if (!res.converged) return std::nullopt;
        if (require_eight) {
            // reject a slide onto a bifurcated branch through a shooting
            // Jacobian that degenerates at an index-change point
            const double d =
                compute_index_d(lj, initial_state({Family::Dxy, res.x, period}), period);
            if (std::abs(d) > kFigureEightIndexTol) return std::nullopt;
        }
        return Eigen::Vector3d(res.x);
    } catch (const Error&) {
    }
    return std::nullopt;
}

/// One validated continuation step along a figure-eight branch, with a linear
/// predictor from the previous point when available.
inline bool eight_walk(std::vector<std::pair<double, Eigen::Vector3d>>& pts, double target,
                       double step) {
    while (std::abs(pts.back().first - target) > 1e-12) {
        const double t = pts.back().first;
        const double dir = (target > t) ? 1.0 : -1.0;
        double h = std::min(step, std::abs(target - t));
        std::optional<Eigen::Vector3d> next;
        for (int halvings = 0; halvings <= 14 && !next; ++halvings) {
            Eigen::Vector3d seed = pts.back().second;
            if (pts.size() >= 2) {
                const auto& prev = pts[pts.size() - 2];
                const double hp = t - prev.first;
                if (std::abs(hp) > 1e-12)
                    seed += (pts.back().second - prev.second) * (dir * h / hp);
            }
            next = lj_dxy_solve(t + dir * h, seed, true);
            if (!next) h *= 0.5;
        }
        if (!next) return false;
        pts.emplace_back(t + dir * h, *next);
    }
    return true;
}

/// March (params, T) by pseudo-arclength through the fold; returns samples
/// ordered along the curve, entering on alpha_minus and exiting on alpha_plus.
inline std::vector<std::pair<double, Eigen::Vector3d>> lj_fold_march(
    double t_start, const Eigen::Vector3d& p_start, double t_prev,
    const Eigen::Vector3d& p_prev, double t_exit) {
    const PotentialSpec lj = PotentialSpec::lennard_jones();
    using Z = Eigen::Vector4d;  // (x, y, v, T)
    Z z_prev, z;
    z_prev << p_prev, t_prev;
    z << p_start, t_start;

    std::vector<std::pair<double, Eigen::Vector3d>> points;
    points.emplace_back(t_prev, p_prev);
    points.emplace_back(t_start, p_start);

    double ds = (z - z_prev).norm();
    bool passed_fold = false;
    for (int step = 0; step < 4000; ++step) {
        const Z tangent = (z - z_prev) / (z - z_prev).norm();
        const Z pred = z + ds * tangent;
        auto fn = [&](const Eigen::VectorXd& w) {
            Eigen::VectorXd r(4);
            r.head<3>() = residual(lj, {Family::Dxy, w.head<3>(), w[3]});
            r[3] = tangent.dot(w - pred);
            return r;
        };
        NewtonResult res;
        try {
            res = damped_newton(fn, pred);
        } catch (const SingularJacobianError&) {
        }
        if (!res.converged) {
            ds *= 0.5;
            if (ds < 1e-8) throw ConvergenceError("lj fold march stalled");
            continue;
        }
        z_prev = z;
        z = res.x;
        points.emplace_back(z[3], Eigen::Vector3d(z.head<3>()));
        if (z[3] > z_prev[3]) passed_fold = true;
        if (passed_fold && z[3] > t_exit) return points;
        if (!passed_fold && z[3] > t_start + 0.5)
            throw ConvergenceError("lj fold march went the wrong way");
        if (ds < 0.05) ds *= 1.6;
    }
    throw ConvergenceError("lj fold march did not exit");
}

inline AlphaBranches build_alpha_branches() {
    AlphaBranches ab;

    // bootstrap alpha_minus at a period large enough that the r^-12 term is a
    // small correction to the scaled a = 6 solution
    const Eigen::Vector3d p6 = homogeneous_eight_params(6.0);
    std::vector<std::pair<double, Eigen::Vector3d>> minus;
    for (double t_boot : {256.0, 512.0, 1024.0}) {
        const double c = std::pow(t_boot, 0.25);
        const Eigen::Vector3d seed = scale_triangle_params(p6, 6.0, c);
        if (auto boot = lj_dxy_solve(t_boot, seed, true)) {
            minus.emplace_back(t_boot, *boot);
            break;
        }
    }
    if (minus.empty()) throw ConvergenceError("lj bootstrap failed at the large-period anchor");

    // walk down in period, keeping anchors
    if (!eight_walk(minus, 64.0, 16.0) || !eight_walk(minus, 21.0, 2.0) ||
        !eight_walk(minus, 15.0, 0.25) || !eight_walk(minus, 14.62, 0.04))
        throw ConvergenceError("lj minus-branch walk stalled");

    // through the fold
    const auto& last = minus.back();
    const auto& prev = minus[minus.size() - 2];
    auto curve = lj_fold_march(last.first, last.second, prev.first, prev.second, 15.2);

    // locate the fold: parabola through the minimum-period sample and its
    // neighbours in arclength
    size_t imin = 0;
    for (size_t i = 0; i < curve.size(); ++i)
        if (curve[i].first < curve[imin].first) imin = i;
    if (imin == 0 || imin + 1 >= curve.size())
        throw ConvergenceError("lj fold not bracketed by the march");
    {
        auto chord = [&](size_t i, size_t j) {
            double d = curve[i].first - curve[j].first;
            Eigen::Vector4d a, b;
            a << curve[i].second, curve[i].first;
            b << curve[j].second, curve[j].first;
            return (a - b).norm() * (d >= 0 ? 1.0 : 1.0);
        };
        const double s0 = -chord(imin, imin - 1), s1 = 0.0, s2 = chord(imin + 1, imin);
        const double t0 = curve[imin - 1].first, t1 = curve[imin].first,
                     t2 = curve[imin + 1].first;
        // vertex of the interpolating parabola through (s_i, T_i)
        const double d01 = (t1 - t0) / (s1 - s0), d12 = (t2 - t1) / (s2 - s1);
        const double a2 = (d12 - d01) / (s2 - s0);
        const double sv = 0.5 * (s0 + s1 - d01 / a2);
        ab.t_min = t0 + d01 * (sv - s0) + a2 * (sv - s0) * (sv - s1);
        ab.fold_params = curve[imin].second;
    }

    // split the curve at the fold into the two branches
    for (size_t i = 0; i < curve.size(); ++i) {
        if (i <= imin)
            minus.emplace_back(curve[i].first, curve[i].second);
        else
            ab.plus_anchors.emplace_back(curve[i].first, curve[i].second);
    }

    // extend alpha_plus upward in period
    if (!eight_walk(ab.plus_anchors, 21.0, 0.1))
        throw ConvergenceError("lj plus-branch walk stalled");

    std::sort(minus.begin(), minus.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::sort(ab.plus_anchors.begin(), ab.plus_anchors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    ab.minus_anchors = std::move(minus);
    return ab;
}

}  // namespace detail

inline const AlphaBranches& lj_alpha_branches() {
    static std::mutex mtx;
    static std::optional<AlphaBranches> cached;
    std::scoped_lock lock(mtx);
    if (!cached) cached = detail::build_alpha_branches();
    return *cached;
}

/// Figure-eight on one of the LJ branches (branch_sign -1: alpha_minus,
/// +1: alpha_plus). Periods below the fold do not admit a solution.
inline PeriodicSolution lj_figure_eight(double period, int branch_sign = -1) {
    const AlphaBranches& ab = lj_alpha_branches();
    if (period < ab.t_min)
        throw NonexistenceError("no figure-eight below the fold period T_min = " +
                                std::to_string(ab.t_min));
    const auto& anchors = (branch_sign < 0) ? ab.minus_anchors : ab.plus_anchors;
    if (anchors.empty()) throw NumericalError("lj branch anchors missing");
    if (period > anchors.back().first + 1e-9)
        throw DomainError("lj_figure_eight: period beyond the continued branch range");

    // nearest anchor, then validated natural continuation
    size_t best = 0;
    for (size_t i = 1; i < anchors.size(); ++i)
        if (std::abs(anchors[i].first - period) < std::abs(anchors[best].first - period)) best = i;
    std::vector<std::pair<double, Eigen::Vector3d>> walk{anchors[best]};
    if (best > 0) walk.insert(walk.begin(), anchors[best - 1]);
    if (!detail::eight_walk(walk, period, 0.1))
        throw ConvergenceError("lj_figure_eight: continuation stalled near T = " +
                               std::to_string(walk.back().first));
    PeriodicSolution sol =
        newton_solve(PotentialSpec::lennard_jones(), Family::Dxy, period, walk.back().second);
    sol.family = Family::FigureEight;
    return sol;
}

/// The figure-eight choreography at the given period. For the Lennard-Jones
/// potential this is the alpha_minus branch; alpha_plus is reachable through
/// lj_figure_eight(period, +1).
inline PeriodicSolution figure_eight(const PotentialSpec& spec, double period) {
    if (spec.kind == PotentialKind::Homogeneous)
        return figure_eight_homogeneous(spec.exponent, period);
    return lj_figure_eight(period, -1);
}

}  // namespace choreo
