#pragma once

#include "choreo/bifurcation.hpp"

namespace choreo {

// ---------------------------------------------------------------------------
// Two-dimensional search map: with the energy fixed, the isosceles start has
// one free speed; integrating to the first return of body 2 to the x axis
// leaves two matching conditions whose zero curves cross at solutions.
// ---------------------------------------------------------------------------

struct SearchMapPoint {
    double x = 0.0, y = 0.0;
    bool reachable = false;
    double f1 = std::numeric_limits<double>::quiet_NaN();  // body-2 x at the event
    double f2 = std::numeric_limits<double>::quiet_NaN();  // velocity cross condition
    double t_event = std::numeric_limits<double>::quiet_NaN();
};

struct SearchMap {
    double energy = 0.0;
    std::vector<double> xs, ys;
    std::vector<SearchMapPoint> points;  // row-major, ys outer
    std::vector<std::vector<Vec2>> f1_curves, f2_curves;
    std::vector<Vec2> crossings;

    const SearchMapPoint& at(int ix, int iy) const { return points[iy * xs.size() + ix]; }
};

namespace detail {

/// Greedy chaining of marching-squares segments into polylines.
inline std::vector<std::vector<Vec2>> chain_segments(std::vector<std::pair<Vec2, Vec2>> segs,
                                                     double tol) {
    std::vector<std::vector<Vec2>> curves;
    while (!segs.empty()) {
        std::vector<Vec2> cur{segs.back().first, segs.back().second};
        segs.pop_back();
        bool grew = true;
        while (grew) {
            grew = false;
            for (size_t i = 0; i < segs.size(); ++i) {
                auto near = [&](const Vec2& a, const Vec2& b) { return (a - b).norm() < tol; };
                if (near(segs[i].first, cur.back())) {
                    cur.push_back(segs[i].second);
                } else if (near(segs[i].second, cur.back())) {
                    cur.push_back(segs[i].first);
                } else if (near(segs[i].first, cur.front())) {
                    cur.insert(cur.begin(), segs[i].second);
                } else if (near(segs[i].second, cur.front())) {
                    cur.insert(cur.begin(), segs[i].first);
                } else {
                    continue;
                }
                segs.erase(segs.begin() + i);
                grew = true;
                break;
            }
        }
        curves.push_back(std::move(cur));
    }
    return curves;
}

/// Zero-level segments of a scalar field on one grid cell (linear edges).
template <class Field>
inline void cell_segments(const SearchMap& map, Field&& f,
                          std::vector<std::pair<Vec2, Vec2>>& segs, int ix, int iy) {
    const SearchMapPoint* c[4] = {&map.at(ix, iy), &map.at(ix + 1, iy),
                                  &map.at(ix + 1, iy + 1), &map.at(ix, iy + 1)};
    for (int k = 0; k < 4; ++k)
        if (!c[k]->reachable || !std::isfinite(f(*c[k]))) return;
    std::vector<Vec2> pts;
    for (int k = 0; k < 4; ++k) {
        const SearchMapPoint *a = c[k], *b = c[(k + 1) % 4];
        const double fa = f(*a), fb = f(*b);
        if ((fa < 0) == (fb < 0)) continue;
        const double w = fa / (fa - fb);
        pts.emplace_back(a->x + w * (b->x - a->x), a->y + w * (b->y - a->y));
    }
    if (pts.size() == 2) segs.emplace_back(pts[0], pts[1]);
}

inline std::optional<Vec2> segment_intersection(const Vec2& a0, const Vec2& a1, const Vec2& b0,
                                                const Vec2& b1) {
    const Vec2 r = a1 - a0, s = b1 - b0;
    const double den = r.x() * s.y() - r.y() * s.x();
    if (std::abs(den) < 1e-300) return std::nullopt;
    const Vec2 d = b0 - a0;
    const double t = (d.x() * s.y() - d.y() * s.x()) / den;
    const double u = (d.x() * r.y() - d.y() * r.x()) / den;
    if (t < 0 || t > 1 || u < 0 || u > 1) return std::nullopt;
    return Vec2(a0 + t * r);
}

}  // namespace detail

/// Evaluate the two leftover matching conditions over an (x, y) grid at fixed
/// energy, emit their zero contours, and intersect the two curve families.
inline SearchMap emit_search_map(const PotentialSpec& spec, double energy,
                                 const std::vector<double>& xs, const std::vector<double>& ys,
                                 double horizon = 0.0) {
    if (xs.empty() || ys.empty()) throw DomainError("emit_search_map: empty grid");
    SearchMap map;
    map.energy = energy;
    map.xs = xs;
    map.ys = ys;

    for (double y : ys)
        for (double x : xs) {
            SearchMapPoint pt;
            pt.x = x;
            pt.y = y;
            try {
                const double theta = std::atan2(y, 3.0 * x);
                PhaseState probe = triangle_initial(x, y, 1.0, 0.0);
                const double u0 = potential_energy(spec, probe.q);
                const double ke = energy - u0;
                const double vsq = ke / (1.0 + 2.0 * std::sin(theta) * std::sin(theta));
                if (vsq > 0.0) {
                    const double v = std::sqrt(vsq);
                    PhaseState s0 = triangle_initial(x, y, v, 0.0);
                    // time scale of this energy's orbits, for the horizon
                    const double t_scale =
                        horizon > 0.0 ? horizon
                                      : 2.0 * std::pow(std::abs(u0 / energy), 1.5);
                    ThreeBodyRhs rhs{spec};
                    const DenseSolution dense =
                        integrate_dense(rhs, s0.packed(), 0.0, t_scale);
                    const auto root = first_sign_change(
                        dense, [](const Vec12& w) { return w[3]; }, 1e-6 * t_scale, t_scale);
                    if (root) {
                        const Vec12 w = dense.at(*root);
                        pt.reachable = true;
                        pt.t_event = *root;
                        pt.f1 = w[2];
                        pt.f2 = w[6] * w[11] - w[7] * w[10];
                    }
                }
            } catch (const Error&) {
            }
            map.points.push_back(pt);
        }

    const double tol = 1e-9 * (std::abs(xs.back() - xs.front()) + std::abs(ys.back() - ys.front()) + 1.0);
    std::vector<std::pair<Vec2, Vec2>> segs1, segs2;
    for (size_t iy = 0; iy + 1 < ys.size(); ++iy)
        for (size_t ix = 0; ix + 1 < xs.size(); ++ix) {
            detail::cell_segments(map, [](const SearchMapPoint& p) { return p.f1; }, segs1,
                                  static_cast<int>(ix), static_cast<int>(iy));
            detail::cell_segments(map, [](const SearchMapPoint& p) { return p.f2; }, segs2,
                                  static_cast<int>(ix), static_cast<int>(iy));
        }
    for (const auto& s1 : segs1)
        for (const auto& s2 : segs2)
            if (auto x = detail::segment_intersection(s1.first, s1.second, s2.first, s2.second))
                map.crossings.push_back(*x);
    map.f1_curves = detail::chain_segments(std::move(segs1), tol);
    map.f2_curves = detail::chain_segments(std::move(segs2), tol);
    return map;
}

// ---------------------------------------------------------------------------
// One-dimensional slice: freeze one shooting parameter, solve all but one
// matching condition, and report the leftover condition along the sweep.
// Zeros of the curve are solutions of the full system.
// ---------------------------------------------------------------------------

struct SlicePoint {
    double value = 0.0;     // the swept parameter
    double leftover = 0.0;  // the reported residual component
    Eigen::VectorXd rest;   // inner solution of the other parameters
    bool ok = false;
};

struct FamilySlice {
    Family family = Family::Dx;
    int frozen_index = 2;
    int leftover_index = 1;
    std::vector<SlicePoint> points;
    std::vector<double> zeros;  // refined sweep values with leftover = 0
};

namespace detail {

inline std::optional<double> slice_inner(const PotentialSpec& spec, Family fam, double period,
                                         int frozen, int leftout, double value,
                                         Eigen::VectorXd& rest) {
    const int np = family_param_count(fam);
    auto fn = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd full(np);
        int j = 0;
        for (int i = 0; i < np; ++i) full[i] = (i == frozen) ? value : r[j++];
        const Eigen::VectorXd res = residual(spec, {fam, full, period});
        Eigen::VectorXd out(np - 1);
        j = 0;
        for (int i = 0; i < np; ++i)
            if (i != leftout) out[j++] = res[i];
        return out;
    };
    NewtonResult res = damped_newton(fn, rest);
    if (!res.converged) return std::nullopt;
    rest = res.x;
    Eigen::VectorXd full(np);
    int j = 0;
    for (int i = 0; i < np; ++i) full[i] = (i == frozen) ? value : rest[j++];
    return residual(spec, {fam, full, period})[leftout];
}

}  // namespace detail

/// Sweep the frozen parameter over [lo, hi], warm-starting the inner solves
/// from the anchor outward; gaps where the inner solve fails are annotated by
/// missing points. Sign changes are refined by bisection.
inline FamilySlice emit_slice(const PotentialSpec& spec, Family fam, double period,
                              const Eigen::VectorXd& anchor, double lo, double hi, int n_steps,
                              int frozen_index = 2, int leftover_index = 1) {
    const int np = family_param_count(fam);
    if (anchor.size() != np) throw DomainError("emit_slice: bad anchor dimension");
    if (!(hi > lo) || n_steps < 2) throw DomainError("emit_slice: bad sweep range");
    FamilySlice slice;
    slice.family = fam;
    slice.frozen_index = frozen_index;
    slice.leftover_index = leftover_index;
    slice.points.resize(n_steps);

    Eigen::VectorXd rest0(np - 1);
    {
        int j = 0;
        for (int i = 0; i < np; ++i)
            if (i != frozen_index) rest0[j++] = anchor[i];
    }
    const double anchor_v = anchor[frozen_index];
    // march outward from the anchor in both directions
    std::vector<int> order(n_steps);
    for (int i = 0; i < n_steps; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = lo + (hi - lo) * a / (n_steps - 1);
        const double vb = lo + (hi - lo) * b / (n_steps - 1);
        return std::abs(va - anchor_v) < std::abs(vb - anchor_v);
    });
    Eigen::VectorXd rest_up = rest0, rest_dn = rest0;
    for (int idx : order) {
        const double v = lo + (hi - lo) * idx / (n_steps - 1);
        Eigen::VectorXd& rest = (v >= anchor_v) ? rest_up : rest_dn;
        SlicePoint pt;
        pt.value = v;
        Eigen::VectorXd trial = rest;
        const auto f =
            detail::slice_inner(spec, fam, period, frozen_index, leftover_index, v, trial);
        if (f) {
            rest = trial;
            pt.leftover = *f;
            pt.rest = trial;
            pt.ok = true;
        }
        slice.points[idx] = pt;
    }

    // refine zero crossings between adjacent valid points
    for (int i = 0; i + 1 < n_steps; ++i) {
        const SlicePoint &a = slice.points[i], &b = slice.points[i + 1];
        if (!a.ok || !b.ok) continue;
        if ((a.leftover < 0) == (b.leftover < 0)) continue;
        double va = a.value, vb = b.value, fa = a.leftover;
        Eigen::VectorXd rest = a.rest;
        for (int it = 0; it < 60 && vb - va > 1e-12 * (1.0 + std::abs(va)); ++it) {
            const double vm = 0.5 * (va + vb);
            Eigen::VectorXd trial = rest;
            const auto fm = detail::slice_inner(spec, fam, period, frozen_index, leftover_index,
                                                vm, trial);
            if (!fm) break;
            rest = trial;
            if ((*fm < 0) == (fa < 0)) {
                va = vm;
                fa = *fm;
            } else {
                vb = vm;
            }
        }
        slice.zeros.push_back(0.5 * (va + vb));
    }
    return slice;
}

}  // namespace choreo
