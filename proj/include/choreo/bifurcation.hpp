#pragma once
#include <map>

#include "choreo/lj.hpp"
#include "choreo/spectrum.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace choreo {

// ---------------------------------------------------------------------------
// Branches: the figure-eight family parameterized by the exponent a (T = 1)
// or, for Lennard-Jones, by the period T on one of the fold branches.
// ---------------------------------------------------------------------------

struct BranchId {
    PotentialSpec spec;
    int alpha_sign = 0;  // -1 / +1 for the LJ branches, 0 for homogeneous

    bool homogeneous() const { return spec.kind == PotentialKind::Homogeneous; }
    std::string parameter_name() const { return homogeneous() ? "a" : "T"; }

    static BranchId homogeneous_family() { return {PotentialSpec::homogeneous(1.0), 0}; }
    static BranchId alpha(int sign) { return {PotentialSpec::lennard_jones(), sign}; }
};

/// Figure-eight on the branch at parameter value xi.
inline PeriodicSolution branch_solution(const BranchId& id, double xi) {
    if (id.homogeneous()) return figure_eight_homogeneous(xi, 1.0);
    return lj_figure_eight(xi, id.alpha_sign);
}

inline PotentialSpec branch_spec(const BranchId& id, double xi) {
    return id.homogeneous() ? PotentialSpec::homogeneous(xi) : id.spec;
}

inline int default_scan_grid(const BranchId& id) { return id.homogeneous() ? 132 : 264; }

// ---------------------------------------------------------------------------
// Morse-index scans
// ---------------------------------------------------------------------------

struct BranchSample {
    double xi = 0.0;
    PeriodicSolution solution;
    MorseIndexReport report;
    Eigen::VectorXd lowest;  // lowest nonzero eigenvalue traces (10 modes)
};

struct BranchScan {
    BranchId id;
    int grid_size = 0;
    std::vector<BranchSample> samples;
    std::vector<std::string> notes;  // continuation-failure annotations
};

inline Eigen::VectorXd lowest_nonzero_eigenvalues(const Eigen::VectorXd& vals, double zero_tol,
                                                  int count) {
    Eigen::VectorXd out(count);
    int m = 0;
    for (int i = 0; i < vals.size() && m < count; ++i)
        if (std::abs(vals[i]) > zero_tol) out[m++] = vals[i];
    for (; m < count; ++m) out[m] = std::numeric_limits<double>::quiet_NaN();
    return out;
}

/// Continuation solve plus Morse index at every grid value. Failed points are
/// annotated and skipped rather than aborting the scan.
inline BranchScan scan_index(const BranchId& id, const std::vector<double>& grid,
                             int grid_size = 0) {
    if (grid.empty()) throw DomainError("scan_index: empty grid");
    BranchScan scan;
    scan.id = id;
    scan.grid_size = grid_size > 0 ? grid_size : default_scan_grid(id);
    for (double xi : grid) {
        try {
            BranchSample s;
            s.xi = xi;
            s.solution = branch_solution(id, xi);
            HessianOperator op =
                build_hessian(branch_spec(id, xi), s.solution, scan.grid_size);
            const Eigen::VectorXd vals = hessian_eigenvalues(op);
            s.report = count_morse_index(vals);
            s.report.eigenvalues = vals.head(std::min<int>(24, vals.size()));
            s.lowest = lowest_nonzero_eigenvalues(vals, s.report.zero_tol, 10);
            scan.samples.push_back(std::move(s));
        } catch (const Error& e) {
            scan.notes.push_back("xi = " + std::to_string(xi) + ": " + e.what());
        }
    }
    return scan;
}

/// Pairs of adjacent scan samples whose Morse index differs.
inline std::vector<std::pair<double, double>> index_change_brackets(const BranchScan& scan) {
    std::vector<std::pair<double, double>> out;
    for (size_t i = 1; i < scan.samples.size(); ++i)
        if (scan.samples[i].report.index != scan.samples[i - 1].report.index)
            out.emplace_back(scan.samples[i - 1].xi, scan.samples[i].xi);
    return out;
}

// ---------------------------------------------------------------------------
// Crossing location
// ---------------------------------------------------------------------------

enum class BifurcationSide { Unknown, Left, Right, Both };

inline const char* side_name(BifurcationSide s) {
    switch (s) {
        case BifurcationSide::Left: return "left";
        case BifurcationSide::Right: return "right";
        case BifurcationSide::Both: return "both";
        default: return "unknown";
    }
}

enum class QSymmetry { D, Dx, Dy, D2, Dxy, C, Cx, Cy, C2, Cxy };

inline const char* q_symmetry_name(QSymmetry s) {
    switch (s) {
        case QSymmetry::D: return "D";
        case QSymmetry::Dx: return "D_x";
        case QSymmetry::Dy: return "D_y";
        case QSymmetry::D2: return "D_2";
        case QSymmetry::Dxy: return "D_xy";
        case QSymmetry::C: return "C";
        case QSymmetry::Cx: return "C_x";
        case QSymmetry::Cy: return "C_y";
        case QSymmetry::C2: return "C_2";
        case QSymmetry::Cxy: return "C_xy";
    }
    return "?";
}

struct EulerLedgerCheck {
    bool counts_ok = false;
    bool parity_checked = false;
    bool parity_ok = false;
    std::string detail;
};

struct CandidateSolution {
    int side = 0;  // -1 left, +1 right
    double xi = 0.0;
    double theta = std::numeric_limits<double>::quiet_NaN();  // g = 2 provenance
    double h_sign = 1.0;                                      // g = 1 provenance
    QSymmetry q_label = QSymmetry::D;
    PeriodicSolution solution;
    double delta_s = 0.0;   // S(candidate) - S(figure-eight at the same xi)
    int congruence_class = -1;
};

struct BifurcationRecord {
    BranchId branch;
    double xi0 = 0.0;
    int delta_n = 0;
    int degeneracy = 0;
    double lambda_at_analysis = 0.0;
    double xi_analysis = 0.0;
    QSymmetry q_symmetry = QSymmetry::D;
    BifurcationSide side = BifurcationSide::Unknown;
    int n_b = 0;
    EulerLedgerCheck ledger;
    std::vector<CandidateSolution> candidates;
    std::vector<double> critical_thetas;  // ascending, g = 2 only
    std::vector<int> congruent_counts;    // n_i per incongruent class
};

namespace detail {

struct IndexedSpectrum {
    Eigen::VectorXd values;
    MorseIndexReport report;
};

inline IndexedSpectrum spectrum_at(const BranchId& id, double xi, int ng) {
    const PeriodicSolution sol = branch_solution(id, xi);
    HessianOperator op = build_hessian(branch_spec(id, xi), sol, ng);
    IndexedSpectrum s;
    s.values = hessian_eigenvalues(op);
    s.report = count_morse_index(s.values);
    return s;
}

/// Signed value of the eigenvalue cluster nearest zero, excluding the
/// conservation-law zero modes (the four smallest magnitudes).
inline double tracked_eigenvalue(const Eigen::VectorXd& vals, int cluster_size) {
    std::vector<double> v(vals.data(), vals.data() + vals.size());
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    double acc = 0.0;
    int n = 0;
    for (size_t i = 4; i < v.size() && n < cluster_size; ++i, ++n) acc += v[i];
    return acc / std::max(1, n);
}

}  // namespace detail

/// Refine a bracketed index change to the crossing parameter: secant on the
/// tracked near-zero eigenvalue, then the index jump measured just outside.
inline BifurcationRecord locate_crossing(const BranchId& id, double xi_lo, double xi_hi,
                                         int grid_size = 0) {
    const int ng = grid_size > 0 ? grid_size : default_scan_grid(id);
    detail::IndexedSpectrum lo = detail::spectrum_at(id, xi_lo, ng);
    detail::IndexedSpectrum hi = detail::spectrum_at(id, xi_hi, ng);
    if (lo.report.index == hi.report.index)
        throw DomainError("locate_crossing: bracket has no index change");

    // bisect on the index until a single crossing remains plausible
    const double resolution = id.homogeneous() ? 2e-3 : 8e-3;
    while (xi_hi - xi_lo > resolution &&
           std::abs(hi.report.index - lo.report.index) > 0) {
        const double mid = 0.5 * (xi_lo + xi_hi);
        detail::IndexedSpectrum ms = detail::spectrum_at(id, mid, ng);
        if (ms.report.index != lo.report.index) {
            xi_hi = mid;
            hi = std::move(ms);
        } else {
            xi_lo = mid;
            lo = std::move(ms);
        }
    }

    const int jump = hi.report.index - lo.report.index;
    const int g = std::abs(jump);

    // secant refinement on the crossing cluster mean
    double x0 = xi_lo, x1 = xi_hi;
    double f0 = detail::tracked_eigenvalue(lo.values, g);
    double f1 = detail::tracked_eigenvalue(hi.values, g);
    double floor_tol = 1e-8;
    for (int it = 0; it < 40 && std::abs(f1) > floor_tol; ++it) {
        if (f1 == f0) break;
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if (!(x2 > std::min(x0, x1) - resolution && x2 < std::max(x0, x1) + resolution))
            x2 = 0.5 * (x0 + x1);
        detail::IndexedSpectrum ms = detail::spectrum_at(id, x2, ng);
        const double f2 = detail::tracked_eigenvalue(ms.values, g);
        const double zero_floor = [&] {
            std::vector<double> v(ms.values.data(), ms.values.data() + ms.values.size());
            std::sort(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a) < std::abs(b); });
            return std::abs(v[3]);
        }();
        floor_tol = std::max(1e-8, 10.0 * zero_floor);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
    }

    BifurcationRecord rec;
    rec.branch = id;
    rec.xi0 = x1;
    rec.degeneracy = g;
    rec.delta_n = jump;
    return rec;
}

// ---------------------------------------------------------------------------
// Variated orbits Q = q + h (c1 psi1 + c2 psi2)
// ---------------------------------------------------------------------------

struct CrossingModes {
    int degeneracy = 0;
    double lambda = 0.0;  // cluster mean
    GridFunction psi1, psi2, dpsi1, dpsi2;
};

/// Pick the g crossing modes nearest zero with the sign expected from the
/// index jump; gauge: maximize |psi1 component 1 at t = 0|, signs fixed.
inline CrossingModes extract_crossing_modes(const EigenSystem& sys, int g,
                                            double expected_sign = 0.0) {
    if (g < 1 || g > 2) throw DomainError("extract_crossing_modes: unsupported degeneracy");
    std::vector<int> order(sys.eigenvalues.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(sys.eigenvalues[a]) < std::abs(sys.eigenvalues[b]);
    });
    std::vector<int> picked;
    for (size_t i = 4; i < order.size() && static_cast<int>(picked.size()) < g; ++i) {
        if (expected_sign != 0.0 && sys.eigenvalues[order[i]] * expected_sign < 0.0) continue;
        picked.push_back(order[i]);
    }
    if (static_cast<int>(picked.size()) < g)
        throw NumericalError("extract_crossing_modes: crossing cluster not found");

    CrossingModes cm;
    cm.degeneracy = g;
    cm.lambda = 0.0;
    for (int j : picked) cm.lambda += sys.eigenvalues[j];
    cm.lambda /= g;
    cm.psi1 = sys.eigenfunction(picked[0]);
    if (g == 2) {
        cm.psi2 = sys.eigenfunction(picked[1]);
        // rotate the basis so |psi1_1(0)| is maximal, then fix the signs
        const double a = cm.psi1.at(0, 0), b = cm.psi2.at(0, 0);
        const double phi = std::atan2(b, a);
        Eigen::VectorXd p1 = std::cos(phi) * cm.psi1.data + std::sin(phi) * cm.psi2.data;
        Eigen::VectorXd p2 = -std::sin(phi) * cm.psi1.data + std::cos(phi) * cm.psi2.data;
        cm.psi1.data = p1;
        cm.psi2.data = p2;
        if (cm.psi1.at(0, 0) < 0) cm.psi1.data = -cm.psi1.data;
        if (cm.psi2.at(0, 1) < 0) cm.psi2.data = -cm.psi2.data;
        cm.dpsi2 = spectral_derivative(cm.psi2);
    } else {
        if (cm.psi1.at(0, 0) < 0) cm.psi1.data = -cm.psi1.data;
        cm.psi2 = GridFunction(cm.psi1.grid_size, cm.psi1.period);
        cm.dpsi2 = GridFunction(cm.psi1.grid_size, cm.psi1.period);
    }
    cm.dpsi1 = spectral_derivative(cm.psi1);
    return cm;
}

struct VariatedOrbit {
    double period = 0.0;
    int grid_size = 0;
    int degeneracy = 1;
    double h = 0.0;
    double theta = 0.0;          // used when degeneracy = 2
    Eigen::Vector2d coeffs{1, 0};  // (c1, c2), unit norm
    std::vector<Vec6> q, v;      // samples of Q and dQ/dt
    double action_value = 0.0;   // S(Q)
    double base_action = 0.0;    // S(q) on the same grid
};

/// Build Q = q + h sum_k c_k psi_k with velocities from the exact base
/// velocity plus the spectral derivative of the modes, and its action.
inline VariatedOrbit variated_orbit(const PotentialSpec& spec, const HessianOperator& op,
                                    const CrossingModes& cm, double h, double theta) {
    VariatedOrbit vo;
    vo.period = op.period;
    vo.grid_size = op.grid_size;
    vo.degeneracy = cm.degeneracy;
    vo.h = h;
    vo.theta = theta;
    vo.coeffs = (cm.degeneracy == 2)
                    ? Eigen::Vector2d(std::cos(theta), std::sin(theta))
                    : Eigen::Vector2d(1.0, 0.0);
    const int n = op.grid_size;
    vo.q.resize(n);
    vo.v.resize(n);
    double s_q = 0.0, s_base = 0.0;
    for (int k = 0; k < n; ++k) {
        Vec6 dq = vo.coeffs[0] * cm.psi1.node(k);
        Vec6 dv = vo.coeffs[0] * cm.dpsi1.node(k);
        if (cm.degeneracy == 2) {
            dq += vo.coeffs[1] * cm.psi2.node(k);
            dv += vo.coeffs[1] * cm.dpsi2.node(k);
        }
        vo.q[k] = op.orbit_q[k] + h * dq;
        vo.v[k] = op.orbit_v[k] + h * dv;
        s_q += 0.5 * vo.v[k].squaredNorm() - potential_energy(spec, vo.q[k]);
        s_base += 0.5 * op.orbit_v[k].squaredNorm() - potential_energy(spec, op.orbit_q[k]);
    }
    vo.action_value = s_q * op.period / n;
    vo.base_action = s_base * op.period / n;
    return vo;
}

// ---------------------------------------------------------------------------
// Critical points of S(Q) over the mixing angle
// ---------------------------------------------------------------------------

struct ThetaCritical {
    double theta = 0.0;
    bool is_max = false;
    double action = 0.0;
};

/// Sample S(Q)(Theta) over one turn and locate its critical points by local
/// quadratic refinement. The count is 2m by periodicity (alternating kinds).
inline std::vector<ThetaCritical> theta_scan(const PotentialSpec& spec,
                                             const HessianOperator& op, const CrossingModes& cm,
                                             double h, int n_samples = 720) {
    if (cm.degeneracy != 2) throw DomainError("theta_scan: needs a doubly degenerate crossing");
    if (n_samples < 16) throw DomainError("theta_scan: too few samples");
    std::vector<double> s(n_samples);
    for (int i = 0; i < n_samples; ++i)
        s[i] = variated_orbit(spec, op, cm, h, 2.0 * M_PI * i / n_samples).action_value;

    std::vector<ThetaCritical> crit;
    const double dth = 2.0 * M_PI / n_samples;
    for (int i = 0; i < n_samples; ++i) {
        const double sm = s[(i + n_samples - 1) % n_samples], s0 = s[i],
                     sp = s[(i + 1) % n_samples];
        const bool ismax = s0 > sm && s0 >= sp;
        const bool ismin = s0 < sm && s0 <= sp;
        if (!ismax && !ismin) continue;
        // quadratic vertex through the three samples
        const double denom = sm - 2.0 * s0 + sp;
        const double delta = (std::abs(denom) > 0) ? 0.5 * (sm - sp) / denom : 0.0;
        ThetaCritical c;
        c.theta = std::fmod(2.0 * M_PI * i / n_samples + delta * dth + 2.0 * M_PI, 2.0 * M_PI);
        c.is_max = ismax;
        c.action = variated_orbit(spec, op, cm, h, c.theta).action_value;
        crit.push_back(c);
    }
    if (crit.size() < 2)
        throw NumericalError("theta_scan: resolution too low to separate critical points");
    std::sort(crit.begin(), crit.end(),
              [](const ThetaCritical& a, const ThetaCritical& b) { return a.theta < b.theta; });
    return crit;
}

// ---------------------------------------------------------------------------
// Orbit-symmetry classification
// ---------------------------------------------------------------------------

namespace detail {

inline double orbit_extent(const std::vector<Vec6>& q) {
    double m = 0.0;
    for (const auto& qq : q) m = std::max(m, qq.cwiseAbs().maxCoeff());
    return 2.0 * m;
}

/// Does there exist (permutation, time shift, reversal) with
/// M P q(+-t + shift) = q(t) on the grid?
inline bool symmetric_under(const std::vector<Vec6>& q, const Mat2& m, double tol) {
    const int n = static_cast<int>(q.size());
    for (const auto& perm : body_permutations()) {
        // precompute the transformed samples
        std::vector<Vec6> tq(n);
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < 3; ++b)
                tq[k].segment<2>(2 * b) = m * q[k].segment<2>(2 * perm[b]);
        for (int rev = 0; rev < 2; ++rev)
            for (int shift = 0; shift < n; ++shift) {
                bool ok = true;
                for (int k = 0; k < n && ok; ++k) {
                    const int src = rev ? ((shift - k) % n + n) % n : (shift + k) % n;
                    ok = (tq[src] - q[k]).cwiseAbs().maxCoeff() < tol;
                }
                if (ok) return true;
            }
    }
    return false;
}

inline bool choreographic(const std::vector<Vec6>& q, double tol) {
    const int n = static_cast<int>(q.size());
    if (n % 3 != 0) return false;
    const int shift = n / 3;
    for (int k = 0; k < n; ++k) {
        const int ks = ((k - shift) % n + n) % n;
        for (int i = 0; i < 6; ++i)
            if (std::abs(q[ks][(i + 2) % 6] - q[k][i]) >= tol) return false;
    }
    return true;
}

}  // namespace detail

/// Finest symmetry label of a sampled closed path of the three bodies:
/// reflection/point symmetries combined with body exchange and time
/// shift/reversal, and the choreographic cyclic symmetry.
inline QSymmetry classify_q_symmetry(const std::vector<Vec6>& q_samples, double tol = 0.0) {
    if (q_samples.size() < 12) throw DomainError("classify_q_symmetry: too few samples");
    const double eps = (tol > 0.0) ? tol : 1e-4 * detail::orbit_extent(q_samples);
    Mat2 mx, my, m2;
    mx << 1, 0, 0, -1;
    my << -1, 0, 0, 1;
    m2 << -1, 0, 0, -1;
    const bool chor = detail::choreographic(q_samples, eps);
    const bool sx = detail::symmetric_under(q_samples, mx, eps);
    const bool sy = detail::symmetric_under(q_samples, my, eps);
    if (chor) {
        if (sx && sy) return QSymmetry::Cxy;
        if (sx) return QSymmetry::Cx;
        if (sy) return QSymmetry::Cy;
        if (detail::symmetric_under(q_samples, m2, eps)) return QSymmetry::C2;
        return QSymmetry::C;
    }
    if (sx && sy) return QSymmetry::Dxy;
    if (sx) return QSymmetry::Dx;
    if (sy) return QSymmetry::Dy;
    if (detail::symmetric_under(q_samples, m2, eps)) return QSymmetry::D2;
    return QSymmetry::D;
}

inline QSymmetry classify_q_symmetry(const VariatedOrbit& vo, double tol = 0.0) {
    return classify_q_symmetry(vo.q, tol);
}

inline Family family_for_label(QSymmetry s) {
    switch (s) {
        case QSymmetry::Dxy: return Family::Dxy;
        case QSymmetry::Dx: return Family::Dx;
        case QSymmetry::D2: return Family::D2;
        case QSymmetry::Cx: return Family::Cx;
        case QSymmetry::C2: return Family::C2;
        case QSymmetry::Cy: return Family::Cy;
        default: throw ClassificationError("no shooting family for this symmetry label");
    }
}

// ---------------------------------------------------------------------------
// Newton seeds extracted from variated orbits
// ---------------------------------------------------------------------------

namespace detail {

inline PhaseState state_at_sample(const VariatedOrbit& vo, int k) {
    PhaseState s;
    s.q = vo.q[k];
    s.v = vo.v[k];
    return s;
}

}  // namespace detail

/// Extract shooting parameters from the instant of Q that best matches the
/// family's defining configuration (relabeling bodies as needed).
inline ShootingParams seed_from_q(const VariatedOrbit& vo, Family target, double period) {
    const int n = vo.grid_size;
    const double scale = detail::orbit_extent(vo.q);
    double best = std::numeric_limits<double>::infinity();
    PhaseState best_state;

    auto consider = [&](double defect, const PhaseState& st) {
        if (defect < best) {
            best = defect;
            best_state = st;
        }
    };

    if (target == Family::Dxy || target == Family::Dx || target == Family::Cx ||
        target == Family::FigureEight) {
        // isosceles instant: axis body b on the x axis with zero x velocity,
        // the other two mirror-matched; relabel so b -> body 2, upper -> body 1
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < 3; ++b) {
                const PhaseState raw = detail::state_at_sample(vo, k);
                const int p = (b + 1) % 3, m = (b + 2) % 3;
                const double defect = std::abs(raw.q[2 * b + 1]) / scale +
                                      std::abs(raw.v[2 * b]) +
                                      std::abs(raw.q[2 * p] - raw.q[2 * m]) / scale +
                                      std::abs(raw.v[2 * p + 1] - raw.v[2 * m + 1]);
                const int upper = raw.q[2 * p + 1] > raw.q[2 * m + 1] ? p : m;
                const int lower = (upper == p) ? m : p;
                consider(defect, permuted(raw, {upper, b, lower}));
            }
        if (best_state.q[0] + best_state.q[4] < 0.0) best_state = reflected_y(best_state);
        const auto& st = best_state;
        const double x = 0.5 * (st.q[0] + st.q[4]);
        const double y = 0.5 * (st.q[1] - st.q[5]);
        const double v = 0.5 * (st.velocity(0).norm() + st.velocity(2).norm());
        if (target == Family::Dx || target == Family::Cx) {
            const double l = conserved(PotentialSpec::homogeneous(1.0), st).angular_momentum;
            return {target, (Eigen::VectorXd(4) << x, y, v, l).finished(), period};
        }
        return {target, (Eigen::VectorXd(3) << x, y, v).finished(), period};
    }

    if (target == Family::D2 || target == Family::C2) {
        // collinear instant: body b at the origin, its neighbours moving in
        // step; relabel b -> body 3 and rotate the line onto the x axis
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < 3; ++b) {
                const PhaseState raw = detail::state_at_sample(vo, k);
                const int p = (b + 1) % 3, m = (b + 2) % 3;
                const double defect =
                    raw.position(b).norm() / scale +
                    (raw.velocity(p) - raw.velocity(m)).norm();
                consider(defect, permuted(raw, {p, m, b}));
            }
        const double phi = std::atan2(best_state.q[1], best_state.q[0]);
        const PhaseState st = rotated(best_state, -phi);
        const double x = 0.5 * (st.q[0] - st.q[2]);
        const double u = 0.5 * (st.v[0] + st.v[2]);
        const double v = 0.5 * (st.v[1] + st.v[3]);
        return {target, (Eigen::VectorXd(3) << x, u, v).finished(), period};
    }

    if (target == Family::Cy) {
        // body b on the y axis; relabel b -> body 3, positive-x body -> 1
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < 3; ++b) {
                const PhaseState raw = detail::state_at_sample(vo, k);
                const int p = (b + 1) % 3, m = (b + 2) % 3;
                const double defect = std::abs(raw.q[2 * b]) / scale;
                const int pos = raw.q[2 * p] > raw.q[2 * m] ? p : m;
                const int neg = (pos == p) ? m : p;
                consider(defect, permuted(raw, {pos, neg, b}));
            }
        const auto& st = best_state;
        Eigen::VectorXd p(6);
        p << st.q[0], st.q[1], st.v[0], st.v[1], st.v[5], st.q[5];
        return {Family::Cy, p, period};
    }
    throw ClassificationError("seed_from_q: unsupported target family");
}

// ---------------------------------------------------------------------------
// Congruence of orbits
// ---------------------------------------------------------------------------

namespace detail {

/// Signature samples: sorted mutual-distance triples over one period.
inline std::vector<Eigen::Vector3d> distance_signature(const PeriodicSolution& sol, int m) {
    Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(m + 1, 0.0, sol.period);
    const Trajectory traj = orbit(sol, m);
    std::vector<Eigen::Vector3d> sig(m);
    for (int k = 0; k < m; ++k) {
        const Vec6& q = traj.samples[k].q;
        Eigen::Vector3d d{(q.segment<2>(0) - q.segment<2>(2)).norm(),
                          (q.segment<2>(0) - q.segment<2>(4)).norm(),
                          (q.segment<2>(2) - q.segment<2>(4)).norm()};
        std::sort(d.data(), d.data() + 3);
        sig[k] = d;
    }
    return sig;
}

inline double signature_distance(const std::vector<Eigen::Vector3d>& a,
                                 const std::vector<Eigen::Vector3d>& b) {
    const int m = static_cast<int>(a.size());
    double best = std::numeric_limits<double>::infinity();
    for (int rev = 0; rev < 2; ++rev)
        for (int shift = 0; shift < m; ++shift) {
            double worst = 0.0;
            for (int k = 0; k < m && worst < best; ++k) {
                const int src = rev ? ((shift - k) % m + m) % m : (shift + k) % m;
                worst = std::max(worst, (a[src] - b[k]).cwiseAbs().maxCoeff());
            }
            best = std::min(best, worst);
        }
    return best;
}

}  // namespace detail

/// Are the two orbits congruent under planar isometry (including mirror),
/// body relabeling, and time shift/reversal?
inline bool congruent_orbits(const PeriodicSolution& a, const PeriodicSolution& b,
                             double rel_tol = 1e-3) {
    if (std::abs(a.period - b.period) > 1e-9 * std::max(a.period, b.period)) return false;
    const int m = 288;
    const auto sa = detail::distance_signature(a, m);
    const auto sb = detail::distance_signature(b, m);
    double scale = 0.0;
    for (const auto& d : sa) scale = std::max(scale, d.maxCoeff());
    // the signature grid quantizes the time shift; tolerate one grid cell of
    // drift by comparing against the mid-sample slope
    double slope = 0.0;
    for (int k = 0; k + 1 < m; ++k)
        slope = std::max(slope, (sa[k + 1] - sa[k]).cwiseAbs().maxCoeff());
    const double tol = rel_tol * scale + 0.75 * slope;
    return detail::signature_distance(sa, sb) < tol;
}

/// Group candidate solutions by congruence; returns class index per input.
inline std::vector<int> congruence_classes(std::vector<CandidateSolution>& cands) {
    std::vector<int> cls(cands.size(), -1);
    int next = 0;
    for (size_t i = 0; i < cands.size(); ++i) {
        if (cls[i] >= 0) continue;
        cls[i] = next;
        for (size_t j = i + 1; j < cands.size(); ++j)
            if (cls[j] < 0 && congruent_orbits(cands[i].solution, cands[j].solution))
                cls[j] = next;
        ++next;
    }
    for (size_t i = 0; i < cands.size(); ++i) cands[i].congruence_class = cls[i];
    return cls;
}

// ---------------------------------------------------------------------------
// Euler-characteristic ledger
// ---------------------------------------------------------------------------

/// Count restrictions from conservation of the Euler characteristic:
/// |dN| = 1 (one side): n1 = 2 and parity(N1) = parity(N);
/// |dN| = 2 one side: n1 = n2, opposite parities;
/// |dN| = 2 both sides: n1 = n2, equal parities.
inline EulerLedgerCheck euler_ledger_check(int delta_n, BifurcationSide side,
                                           const std::vector<int>& class_counts,
                                           int base_index = -1,
                                           const std::vector<int>& bifurcated_indices = {}) {
    EulerLedgerCheck chk;
    const int g = std::abs(delta_n);
    if (g == 1) {
        chk.counts_ok = (side == BifurcationSide::Left || side == BifurcationSide::Right) &&
                        class_counts.size() == 1 && class_counts[0] == 2;
        chk.detail = chk.counts_ok ? "n1 = 2 on one side" : "expected a single class of 2";
        if (base_index >= 0 && bifurcated_indices.size() == 1) {
            chk.parity_checked = true;
            chk.parity_ok = (bifurcated_indices[0] % 2 + 2) % 2 == (base_index % 2 + 2) % 2;
        }
    } else if (g == 2) {
        chk.counts_ok = class_counts.size() == 2 && class_counts[0] == class_counts[1];
        chk.detail = chk.counts_ok ? "n1 = n2" : "expected two classes of equal size";
        if (base_index >= 0 && bifurcated_indices.size() == 2) {
            chk.parity_checked = true;
            const bool equal =
                (bifurcated_indices[0] % 2 + 2) % 2 == (bifurcated_indices[1] % 2 + 2) % 2;
            chk.parity_ok = (side == BifurcationSide::Both) ? equal : !equal;
        }
    } else {
        chk.detail = "no ledger rule for |dN| > 2";
    }
    if (!chk.parity_checked && chk.counts_ok)
        chk.detail += "; parity unchecked (bifurcated-solution indices not computed)";
    return chk;
}

// ---------------------------------------------------------------------------
// Following a bifurcated family away from the crossing
// ---------------------------------------------------------------------------

/// Continuation of a bifurcated family in the branch parameter (exponent for
/// homogeneous potentials, period for LJ). Pseudo-arclength in (params, xi),
/// so branches leaving a crossing with square-root growth pose no problem;
/// correctors that collapse onto the figure-eight are rejected.
inline PeriodicSolution follow_family(const BranchId& id, const PeriodicSolution& start,
                                      double xi_start, double xi_target, double step0 = 0.0) {
    const Family fam = start.family;
    const double period0 = start.period;
    const int n = static_cast<int>(start.params.size());

    auto res_at = [&](const Eigen::VectorXd& p, double xi) {
        const double period = id.homogeneous() ? period0 : xi;
        return residual(branch_spec(id, xi), {fam, p, period}, {});
    };
    auto is_eight = [&](const Eigen::VectorXd& p, double xi) {
        const double period = id.homogeneous() ? period0 : xi;
        const PotentialSpec spec = branch_spec(id, xi);
        const PhaseState s0 = initial_state({fam, p, period});
        DistinguishingIndices ix;
        ix.l = conserved(spec, s0).angular_momentum;
        ix.delta_i = compute_index_deltaI(spec, s0, period);
        try {
            ix.d = compute_index_d(spec, s0, period);
        } catch (const ClassificationError&) {
        }
        return indices_are_figure_eight(ix);
    };

    const double dir = (xi_target >= xi_start) ? 1.0 : -1.0;
    using Z = Eigen::VectorXd;  // (params, xi)
    Z z(n + 1);
    z << start.params, xi_start;

    // bootstrap a second point with a tiny natural step
    Z z_prev = z;
    {
        double h = std::min(std::abs(xi_target - xi_start),
                            1e-4 * (id.homogeneous() ? 1.0 : 10.0));
        bool ok = false;
        for (int tries = 0; tries < 20 && !ok && h > 1e-13; ++tries, h *= 0.5) {
            const double xi1 = xi_start + dir * h;
            auto fn = [&](const Eigen::VectorXd& p) { return res_at(p, xi1); };
            try {
                const NewtonResult r = damped_newton(fn, start.params);
                if (r.converged && !is_eight(r.x, xi1)) {
                    z << r.x, xi1;
                    ok = true;
                }
            } catch (const SingularJacobianError&) {
            }
        }
        if (!ok)
            throw ConvergenceError("follow_family: cannot leave the starting point at " +
                                   std::to_string(xi_start));
    }

    double ds = (z - z_prev).norm();
    const double ds_max = id.homogeneous() ? 0.2 : 0.5;
    for (int step = 0; step < 5000; ++step) {
        // done when xi reaches the target (final pinned solve at xi_target)
        if ((z[n] - xi_target) * dir >= -1e-12) break;
        Z tangent = (z - z_prev) / (z - z_prev).norm();
        bool advanced = false;
        for (int halvings = 0; halvings <= 20 && !advanced; ++halvings, ds *= 0.5) {
            Z pred = z + ds * tangent;
            if ((pred[n] - xi_target) * dir > 0) {
                // shorten the predictor so the corrector may pin the target
                const double scale = std::abs((xi_target - z[n]) / (pred[n] - z[n]));
                if (std::abs(tangent[n]) > 0.3 && scale < 1.0) {
                    auto fn = [&](const Eigen::VectorXd& p) { return res_at(p, xi_target); };
                    try {
                        Eigen::VectorXd seed =
                            z.head(n) + (pred.head(n) - z.head(n)) * scale;
                        const NewtonResult r = damped_newton(fn, seed);
                        if (r.converged && !is_eight(r.x, xi_target)) {
                            z_prev = z;
                            z.head(n) = r.x;
                            z[n] = xi_target;
                            advanced = true;
                            break;
                        }
                    } catch (const SingularJacobianError&) {
                    }
                }
            }
            auto fn = [&](const Eigen::VectorXd& w) {
                Eigen::VectorXd out(n + 1);
                out.head(n) = res_at(w.head(n), w[n]);
                out[n] = tangent.dot(w - pred);
                return out;
            };
            try {
                const NewtonResult r = damped_newton(fn, pred);
                if (r.converged && !is_eight(r.x.head(n), r.x[n])) {
                    z_prev = z;
                    z = r.x;
                    advanced = true;
                }
            } catch (const SingularJacobianError&) {
            }
        }
        if (!advanced)
            throw ConvergenceError("follow_family: continuation stalled at " +
                                   id.parameter_name() + " = " + std::to_string(z[n]));
        ds = std::min(ds * 3.2, ds_max);
    }

    if (std::abs(z[n] - xi_target) > 1e-10) {
        // the march overshot; pin the exact target from the last point
        auto fn = [&](const Eigen::VectorXd& p) { return res_at(p, xi_target); };
        const NewtonResult r = damped_newton(fn, z.head(n));
        if (!r.converged)
            throw ConvergenceError("follow_family: final solve at the target failed");
        z.head(n) = r.x;
        z[n] = xi_target;
    }
    const double period = id.homogeneous() ? period0 : xi_target;
    return newton_solve(branch_spec(id, xi_target), fam, period, z.head(n));
}

// ---------------------------------------------------------------------------
// Exact parameter representations from configuration events on the orbit
// ---------------------------------------------------------------------------

namespace detail {

inline void push_unique(std::vector<Eigen::VectorXd>& out, const Eigen::VectorXd& p) {
    for (const auto& q : out)
        if (q.size() == p.size() &&
            (q - p).cwiseAbs().maxCoeff() < 1e-6 * (1.0 + p.cwiseAbs().maxCoeff()))
            return;
    out.push_back(p);
}

template <class EventFn, class Extract>
inline void scan_orbit_events(const PeriodicSolution& sol, EventFn&& g, Extract&& extract) {
    PhaseState s0 = sol.state0;
    s0.t = 0.0;
    ThreeBodyRhs rhs{sol.spec};
    const DenseSolution dense = integrate_dense(rhs, s0.packed(), 0.0, sol.period);
    double t = 0.0;
    for (int guard = 0; guard < 64; ++guard) {
        auto root = first_sign_change(dense, g, t + 1e-9 * sol.period, sol.period);
        if (!root) break;
        extract(PhaseState::unpack(dense.at(*root), *root));
        t = *root;
    }
}

}  // namespace detail

/// All caption-style parameter tuples of a converged solution: one per
/// family-defining configuration event along its orbit, mirror-normalized to
/// x > 0. Distinct events of one orbit can give distinct tuples.
inline std::vector<Eigen::VectorXd> representation_tuples(const PeriodicSolution& sol) {
    std::vector<Eigen::VectorXd> out;
    const Family fam = sol.family;
    const double scale = sol.state0.q.cwiseAbs().maxCoeff();
    const PotentialSpec& spec = sol.spec;

    if (fam == Family::Dxy || fam == Family::Dx || fam == Family::Cx ||
        fam == Family::FigureEight) {
        for (int b = 0; b < 3; ++b) {
            detail::scan_orbit_events(
                sol, [b](const Vec12& y) { return y[6 + 2 * b]; },  // body-b x velocity
                [&](const PhaseState& raw) {
                    if (std::abs(raw.q[2 * b + 1]) > 1e-5 * scale) return;  // not on the axis
                    const int p = (b + 1) % 3, m = (b + 2) % 3;
                    if (std::abs(raw.q[2 * p] - raw.q[2 * m]) > 1e-5 * scale) return;
                    const int upper = raw.q[2 * p + 1] > raw.q[2 * m + 1] ? p : m;
                    PhaseState st = permuted(raw, {upper, b, (upper == p) ? m : p});
                    if (st.q[0] < 0) st = reflected_y(st);
                    const double x = 0.5 * (st.q[0] + st.q[4]);
                    const double yv = 0.5 * (st.q[1] - st.q[5]);
                    const double v = 0.5 * (st.velocity(0).norm() + st.velocity(2).norm());
                    if (fam == Family::Dx || fam == Family::Cx) {
                        const double l = conserved(spec, st).angular_momentum;
                        detail::push_unique(out,
                                            (Eigen::VectorXd(4) << x, yv, v, l).finished());
                    } else {
                        detail::push_unique(out, (Eigen::VectorXd(3) << x, yv, v).finished());
                    }
                });
        }
    } else if (fam == Family::D2 || fam == Family::C2) {
        for (int b = 0; b < 3; ++b) {
            detail::scan_orbit_events(
                sol,
                [b](const Vec12& y) {  // radial turning point of body b
                    return y[2 * b] * y[6 + 2 * b] + y[2 * b + 1] * y[7 + 2 * b];
                },
                [&](const PhaseState& raw) {
                    if (raw.position(b).norm() > 1e-5 * scale) return;  // not at the origin
                    const int p = (b + 1) % 3, m = (b + 2) % 3;
                    PhaseState st = permuted(raw, {p, m, b});
                    st = rotated(st, -std::atan2(st.q[1], st.q[0]));
                    const double x = 0.5 * (st.q[0] - st.q[2]);
                    const double u = 0.5 * (st.v[0] + st.v[2]);
                    const double v = 0.5 * (st.v[1] + st.v[3]);
                    detail::push_unique(out, (Eigen::VectorXd(3) << x, u, v).finished());
                });
        }
    } else if (fam == Family::Cy) {
        for (int b = 0; b < 3; ++b) {
            detail::scan_orbit_events(
                sol, [b](const Vec12& y) { return y[2 * b]; },  // body-b x coordinate
                [&](const PhaseState& raw) {
                    const int p = (b + 1) % 3, m = (b + 2) % 3;
                    const int pos = raw.q[2 * p] > raw.q[2 * m] ? p : m;
                    const PhaseState st = permuted(raw, {pos, (pos == p) ? m : p, b});
                    Eigen::VectorXd t(6);
                    t << st.q[0], st.q[1], st.v[0], st.v[1], st.v[5], st.q[5];
                    detail::push_unique(out, t);
                });
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Branch switching at a degenerate crossing (pinned extended system)
// ---------------------------------------------------------------------------

/// Parameter tuple representing the figure-eight itself inside the given
/// family's parameterization (the trivial branch of the pitchfork).
inline Eigen::VectorXd trivial_representation(const PeriodicSolution& eight, Family fam) {
    PeriodicSolution as_fam = eight;
    as_fam.family = fam;
    auto reps = representation_tuples(as_fam);
    if (reps.empty())
        throw ClassificationError("trivial_representation: no family event on the orbit");
    // verify the representation actually reproduces the orbit
    for (const auto& p : reps) {
        const double rn = residual(eight.spec, {fam, p, eight.period}).norm();
        if (rn < 1e-6) return p;
    }
    return reps.front();
}

/// Step off the figure-eight onto a bifurcated family: solve the extended
/// system (matching conditions plus a pinned step along the shooting
/// Jacobian's null direction) in the unknowns (params, xi).
inline std::vector<std::pair<Eigen::VectorXd, double>> branch_switch(
    const BranchId& id, double xi0, Family fam, double period_hint) {
    const PotentialSpec spec0 = branch_spec(id, xi0);
    const double period0 = id.homogeneous() ? period_hint : xi0;
    const PeriodicSolution eight =
        id.homogeneous() ? figure_eight_homogeneous(xi0, period_hint)
                         : lj_figure_eight(xi0, id.alpha_sign);
    const Eigen::VectorXd p0 = trivial_representation(eight, fam);
    const int n = static_cast<int>(p0.size());

    // null direction of the shooting Jacobian at the crossing
    Eigen::MatrixXd jac(n, n);
    const Eigen::VectorXd r0 = residual(spec0, {fam, p0, period0});
    for (int j = 0; j < n; ++j) {
        const double h = 1e-7 * (1.0 + std::abs(p0[j]));
        Eigen::VectorXd pp = p0;
        pp[j] += h;
        jac.col(j) = (residual(spec0, {fam, pp, period0}) - r0) / h;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
    const Eigen::VectorXd phi = svd.matrixV().col(n - 1);

    std::vector<std::pair<Eigen::VectorXd, double>> arms;
    for (double sign : {+1.0, -1.0}) {
        for (double eps : {3e-3, 1e-2, 3e-2, 1e-1}) {
            const double step = sign * eps * (1.0 + p0.cwiseAbs().maxCoeff());
            auto fn = [&](const Eigen::VectorXd& z) {
                const Eigen::VectorXd p = z.head(n);
                const double xi = z[n];
                const PotentialSpec spec = branch_spec(id, xi);
                const double period = id.homogeneous() ? period_hint : xi;
                Eigen::VectorXd out(n + 1);
                out.head(n) = residual(spec, {fam, p, period});
                out[n] = phi.dot(p - p0) - step;
                return out;
            };
            Eigen::VectorXd z0(n + 1);
            z0 << p0 + step * phi, xi0;
            NewtonResult res;
            try {
                res = damped_newton(fn, z0);
            } catch (const SingularJacobianError&) {
                continue;
            }
            if (!res.converged) continue;
            const double xi_land = res.x[n];
            if (std::abs(xi_land - xi0) > (id.homogeneous() ? 0.05 : 0.5)) continue;
            const Eigen::VectorXd p_land = res.x.head(n);
            const double period = id.homogeneous() ? period_hint : xi_land;
            const PhaseState s0 = initial_state({fam, p_land, period});
            DistinguishingIndices ix;
            ix.l = conserved(branch_spec(id, xi_land), s0).angular_momentum;
            ix.delta_i = compute_index_deltaI(branch_spec(id, xi_land), s0, period);
            try {
                ix.d = compute_index_d(branch_spec(id, xi_land), s0, period);
            } catch (const ClassificationError&) {
            }
            if (indices_are_figure_eight(ix)) continue;
            arms.emplace_back(p_land, xi_land);
            break;
        }
    }
    return arms;
}

// ---------------------------------------------------------------------------
// Full analysis of a located crossing
// ---------------------------------------------------------------------------

struct AnalysisOptions {
    double side_delta = 0.0;       // 0 -> spec default per potential
    double h = 0.0;                // 0 -> 0.1 x orbit extent
    double analysis_offset = 0.0;  // 0 -> default
    int seed_grid = 132;           // eigenfunction grid for Newton seeds
    int theta_samples = 720;
};

namespace detail {

inline double default_side_delta(const BranchId& id) { return id.homogeneous() ? 2e-3 : 2e-2; }

struct SideContext {
    double xi = 0.0;
    PeriodicSolution base;
    HessianOperator op;
    EigenSystem sys;
    CrossingModes modes;
};

inline SideContext make_side_context(const BranchId& id, double xi, int g, double mode_sign,
                                     int ng) {
    SideContext ctx;
    ctx.xi = xi;
    ctx.base = branch_solution(id, xi);
    ctx.op = build_hessian(branch_spec(id, xi), ctx.base, ng);
    ctx.sys = eigen_decompose(ctx.op, std::min<int>(24, 6 * ng));
    ctx.modes = extract_crossing_modes(ctx.sys, g, mode_sign);
    return ctx;
}

}  // namespace detail

/// Investigate a located index change: build the variated orbits, classify
/// their symmetry, seed the shooting families on both sides, count
/// incongruent solutions, and check the sign relations and the ledger.
inline BifurcationRecord analyze_crossing(const BranchId& id, const BifurcationRecord& located,
                                          const AnalysisOptions& opts = {}) {
    BifurcationRecord rec = located;
    const int g = rec.degeneracy;
    if (g < 1 || g > 2)
        throw DomainError("analyze_crossing: unsupported degeneracy " + std::to_string(g));
    const double delta = opts.side_delta > 0 ? opts.side_delta : detail::default_side_delta(id);

    // analysis point for the record: just right of the crossing
    rec.xi_analysis = rec.xi0 + (opts.analysis_offset > 0 ? opts.analysis_offset
                                                          : (id.homogeneous() ? 3e-3 : 5e-2));
    // expected eigenvalue sign on each side: dN (xi - xi0) lambda <= 0
    auto mode_sign = [&](double side) { return (rec.delta_n > 0) == (side > 0) ? -1.0 : 1.0; };

    detail::SideContext actx = detail::make_side_context(
        id, rec.xi_analysis, g, mode_sign(+1.0), opts.seed_grid * 2);
    rec.lambda_at_analysis = actx.modes.lambda;

    const double h_def =
        opts.h > 0 ? opts.h : 0.1 * detail::orbit_extent(actx.op.orbit_q);

    // record-level symmetry of Q: the generic label for pairs, the orbit
    // label for simple crossings
    std::vector<double> crit_thetas;
    if (g == 2) {
        auto crit = theta_scan(branch_spec(id, rec.xi_analysis), actx.op, actx.modes, h_def,
                               opts.theta_samples);
        for (const auto& c : crit) crit_thetas.push_back(c.theta);
        rec.critical_thetas = crit_thetas;
        const double generic =
            crit.size() >= 2 ? 0.5 * (crit[0].theta + crit[1].theta) : 0.37;
        rec.q_symmetry = classify_q_symmetry(
            variated_orbit(branch_spec(id, rec.xi_analysis), actx.op, actx.modes, h_def, generic));
    } else {
        rec.q_symmetry = classify_q_symmetry(
            variated_orbit(branch_spec(id, rec.xi_analysis), actx.op, actx.modes, h_def, 0.0));
    }

    // candidate solutions on each side; the branch distance from the base
    // grows like sqrt(|xi - xi0|), so shrink the probe offset until the
    // family is reached from the variated-orbit seeds
    std::map<int, std::vector<std::pair<Eigen::VectorXd, double>>> switch_arms;  // per family
    for (double frac : {1.0, 0.25, 0.05}) {
        const double probe_delta = delta * frac;
        for (int side : {-1, +1}) {
            const double xi_side = rec.xi0 + side * probe_delta;
            detail::SideContext sctx;
            try {
                sctx =
                    detail::make_side_context(id, xi_side, g, mode_sign(side), opts.seed_grid);
            } catch (const Error&) {
                continue;  // side not solvable (e.g. beyond a fold)
            }
            const PotentialSpec sspec = branch_spec(id, xi_side);
            const double h_base =
                opts.h > 0 ? opts.h : 0.1 * detail::orbit_extent(sctx.op.orbit_q);

            struct Probe {
                double theta, h;
                Family fam;
                QSymmetry label;
                bool is_max = false;
                bool filled = false;
            };
            std::vector<Probe> probes;
            {
                struct Raw {
                    double theta, h;
                    bool is_max;
                };
                std::vector<Raw> raw;
                if (g == 2) {
                    auto crit =
                        theta_scan(sspec, sctx.op, sctx.modes, h_base, opts.theta_samples);
                    for (const auto& c : crit) raw.push_back({c.theta, h_base, c.is_max});
                } else {
                    raw.push_back({0.0, h_base, false});
                    raw.push_back({0.0, -h_base, false});
                }
                for (const auto& rw : raw) {
                    const VariatedOrbit q =
                        variated_orbit(sspec, sctx.op, sctx.modes, rw.h, rw.theta);
                    const QSymmetry label = classify_q_symmetry(q);
                    try {
                        probes.push_back({rw.theta, rw.h, family_for_label(label), label,
                                          rw.is_max});
                    } catch (const ClassificationError&) {
                    }
                }
                // when both critical kinds give one family (the D_y pattern)
                // an extremum belongs to the side where its action offset has
                // the crossing eigenvalue's sign: maxima where lambda > 0
                if (g == 2 && !probes.empty()) {
                    bool same_family = true;
                    for (const auto& pr : probes) same_family &= pr.fam == probes[0].fam;
                    if (same_family) {
                        const bool want_max = mode_sign(side) > 0;
                        std::erase_if(probes,
                                      [&](const Probe& pr) { return pr.is_max != want_max; });
                    }
                }
            }

            auto accept = [&](const Probe& pr, PeriodicSolution sol) {
                if (indices_are_figure_eight(sol.indices)) return false;
                if (pr.fam != Family::Cy && sol.params[2] <= 0.0) return false;
                if (std::abs(sol.action - sctx.base.action) >
                    0.02 * std::abs(sctx.base.action))
                    return false;
                CandidateSolution cand;
                cand.side = side;
                cand.xi = xi_side;
                cand.theta = (g == 2) ? pr.theta : std::numeric_limits<double>::quiet_NaN();
                cand.h_sign = pr.h >= 0 ? 1.0 : -1.0;
                cand.q_label = pr.label;
                cand.delta_s = sol.action - sctx.base.action;
                cand.solution = std::move(sol);
                rec.candidates.push_back(std::move(cand));
                return true;
            };

            // direct Newton from the variated-orbit seeds
            for (auto& pr : probes) {
                for (double mult : {1.0, 2.0, 3.5}) {
                    const VariatedOrbit q =
                        variated_orbit(sspec, sctx.op, sctx.modes, pr.h * mult, pr.theta);
                    try {
                        const ShootingParams seed = seed_from_q(q, pr.fam, sctx.base.period);
                        PeriodicSolution sol =
                            newton_solve(sspec, pr.fam, sctx.base.period, seed.values);
                        if (accept(pr, std::move(sol))) {
                            pr.filled = true;
                            break;
                        }
                    } catch (const Error&) {
                    }
                }
            }

            // fallback: step off the crossing onto the family and continue to
            // the probe point
            for (auto& pr : probes) {
                if (pr.filled) continue;
                auto it = switch_arms.find(static_cast<int>(pr.fam));
                if (it == switch_arms.end()) {
                    std::vector<std::pair<Eigen::VectorXd, double>> arms;
                    try {
                        arms = branch_switch(id, rec.xi0, pr.fam, sctx.base.period);
                    } catch (const Error&) {
                    }
                    it = switch_arms.emplace(static_cast<int>(pr.fam), std::move(arms)).first;
                }
                for (const auto& [p_arm, xi_arm] : it->second) {
                    if ((xi_arm - rec.xi0) * side < 0) continue;  // wrong side
                    try {
                        const double period_arm = id.homogeneous() ? sctx.base.period : xi_arm;
                        PeriodicSolution arm_sol = make_solution(
                            branch_spec(id, xi_arm), pr.fam,
                            p_arm, period_arm,
                            residual(branch_spec(id, xi_arm), {pr.fam, p_arm, period_arm})
                                .norm());
                        PeriodicSolution sol =
                            (std::abs(xi_arm - xi_side) < 1e-12)
                                ? arm_sol
                                : follow_family(id, arm_sol, xi_arm, xi_side);
                        if (accept(pr, std::move(sol))) {
                            pr.filled = true;
                            break;
                        }
                    } catch (const Error&) {
                    }
                }
            }
        }
        if (!rec.candidates.empty()) break;
    }

    // side, congruence classes, and counting identity
    const bool has_left = std::any_of(rec.candidates.begin(), rec.candidates.end(),
                                      [](const CandidateSolution& c) { return c.side < 0; });
    const bool has_right = std::any_of(rec.candidates.begin(), rec.candidates.end(),
                                       [](const CandidateSolution& c) { return c.side > 0; });
    rec.side = has_left && has_right ? BifurcationSide::Both
               : has_left            ? BifurcationSide::Left
               : has_right           ? BifurcationSide::Right
                                     : BifurcationSide::Unknown;

    rec.n_b = 0;
    rec.congruent_counts.clear();
    for (int side : {-1, +1}) {
        std::vector<CandidateSolution> side_cands;
        for (const auto& c : rec.candidates)
            if (c.side == side) side_cands.push_back(c);
        if (side_cands.empty()) continue;
        auto cls = congruence_classes(side_cands);
        const int n_classes = 1 + *std::max_element(cls.begin(), cls.end());
        rec.n_b += n_classes;
        std::vector<int> counts(n_classes, 0);
        for (int c : cls) ++counts[c];
        for (int c : counts) rec.congruent_counts.push_back(c);
        // write class ids back (side-local numbering offset by existing)
        size_t j = 0;
        for (auto& c : rec.candidates)
            if (c.side == side) c.congruence_class = cls[j++];
    }
    rec.ledger = euler_ledger_check(rec.delta_n, rec.side, rec.congruent_counts);
    return rec;
}

/// Sign relations around a record: dS lambda >= 0 and dN (xi - xi0) dS <= 0,
/// checked for every converged candidate against a numerical floor.
struct SignRelationReport {
    bool lambda_relation_ok = true;
    bool side_relation_ok = true;
    int checked = 0;
};

inline SignRelationReport check_sign_relations(const BifurcationRecord& rec,
                                               double floor_tol = 1e-12) {
    SignRelationReport rep;
    for (const auto& c : rec.candidates) {
        // lambda on the candidate's side has the sign forced by the jump
        const double lam_sign = ((rec.delta_n > 0) == (c.side > 0)) ? -1.0 : 1.0;
        rep.checked++;
        if (c.delta_s * lam_sign < -floor_tol) rep.lambda_relation_ok = false;
        if (rec.delta_n * (c.xi - rec.xi0) * c.delta_s > floor_tol) rep.side_relation_ok = false;
    }
    return rep;
}

}  // namespace choreo
