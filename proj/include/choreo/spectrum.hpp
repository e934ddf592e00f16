#pragma once

#include "choreo/core.hpp"
#include "choreo/potential.hpp"
#include "choreo/shooting.hpp"

#include <vector>

namespace choreo {

/// A 6-component T-periodic function sampled on a uniform grid of N points,
/// stored as data[6k + i] = component i at time k T / N.
struct GridFunction {
    int grid_size = 0;
    double period = 0.0;
    Eigen::VectorXd data;

    GridFunction() = default;
    GridFunction(int n, double T) : grid_size(n), period(T), data(Eigen::VectorXd::Zero(6 * n)) {}

    double& at(int k, int i) { return data[6 * k + i]; }
    double at(int k, int i) const { return data[6 * k + i]; }
    Vec6 node(int k) const { return data.segment<6>(6 * k); }
    void set_node(int k, const Vec6& v) { data.segment<6>(6 * k) = v; }
};

/// L2 inner product on [0, T] (periodic rectangle rule).
inline double grid_inner(const GridFunction& f, const GridFunction& g) {
    if (f.grid_size != g.grid_size) throw DomainError("grid_inner: size mismatch");
    return f.data.dot(g.data) * f.period / f.grid_size;
}

/// Trigonometric collocation matrix for d^2/dt^2 on T-periodic functions,
/// N even (Fourier differentiation on the uniform grid).
inline Eigen::MatrixXd spectral_second_derivative(int n, double period) {
    if (n < 4 || n % 2 != 0) throw DomainError("spectral_second_derivative: need even n >= 4");
    const double scale = std::pow(2.0 * M_PI / period, 2);
    Eigen::MatrixXd d2(n, n);
    const double h = 2.0 * M_PI / n;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) {
                d2(j, k) = -scale * (n * n / 12.0 + 1.0 / 6.0);
            } else {
                const int m = j - k;
                const double s = std::sin(0.5 * m * h);
                d2(j, k) = -scale * ((m % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
            }
        }
    return d2;
}

/// Spectral first derivative (antisymmetric), for differentiating sampled
/// periodic functions such as eigenfunctions.
inline Eigen::MatrixXd spectral_first_derivative(int n, double period) {
    if (n < 4 || n % 2 != 0) throw DomainError("spectral_first_derivative: need even n >= 4");
    const double scale = 2.0 * M_PI / period;
    Eigen::MatrixXd d1 = Eigen::MatrixXd::Zero(n, n);
    const double h = 2.0 * M_PI / n;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            const int m = j - k;
            d1(j, k) = scale * ((m % 2 == 0) ? 1.0 : -1.0) * 0.5 / std::tan(0.5 * m * h);
        }
    return d1;
}

inline GridFunction spectral_derivative(const GridFunction& f) {
    const Eigen::MatrixXd d1 = spectral_first_derivative(f.grid_size, f.period);
    GridFunction out(f.grid_size, f.period);
    for (int i = 0; i < 6; ++i) {
        Eigen::VectorXd comp(f.grid_size);
        for (int k = 0; k < f.grid_size; ++k) comp[k] = f.at(k, i);
        const Eigen::VectorXd dc = d1 * comp;
        for (int k = 0; k < f.grid_size; ++k) out.at(k, i) = dc[k];
    }
    return out;
}

/// Collocation of the second-variation operator -delta_ij d^2/dt^2 - hess U
/// along a sampled orbit: a 6N x 6N real symmetric matrix.
inline Eigen::MatrixXd assemble_hessian(const PotentialSpec& spec, const std::vector<Vec6>& qs,
                                        double period) {
    const int n = static_cast<int>(qs.size());
    const Eigen::MatrixXd d2 = spectral_second_derivative(n, period);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6 * n, 6 * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const double val = -d2(j, k);
            for (int i = 0; i < 6; ++i) h(6 * j + i, 6 * k + i) = val;
        }
    for (int k = 0; k < n; ++k) h.block<6, 6>(6 * k, 6 * k) -= potential_hessian(spec, qs[k]);
    return h;
}

struct HessianOperator {
    PotentialSpec spec;
    double period = 0.0;
    int grid_size = 0;
    Eigen::MatrixXd matrix;
    std::vector<Vec6> orbit_q;  // solution samples at the grid times
    std::vector<Vec6> orbit_v;
};

/// Sample the solution orbit on n_g uniform times and assemble the operator.
/// n_g must be even; multiples of 12 keep all the matching times on the grid.
inline HessianOperator build_hessian(const PotentialSpec& spec, const PeriodicSolution& sol,
                                     int n_g = 264, const IntegrationOptions& opt = {}) {
    if (n_g < 16) throw DomainError("build_hessian: grid too small");
    const Trajectory traj = orbit(sol, n_g, opt);
    HessianOperator op;
    op.spec = spec;
    op.period = sol.period;
    op.grid_size = n_g;
    op.orbit_q.reserve(n_g);
    op.orbit_v.reserve(n_g);
    for (int k = 0; k < n_g; ++k) {
        op.orbit_q.push_back(traj.samples[k].q);
        op.orbit_v.push_back(traj.samples[k].v);
    }
    op.matrix = assemble_hessian(spec, op.orbit_q, sol.period);
    return op;
}

struct EigenSystem {
    double period = 0.0;
    int grid_size = 0;
    Eigen::VectorXd eigenvalues;     // ascending
    Eigen::MatrixXd eigenfunctions;  // column j: grid samples, (psi,psi) = 1
    std::vector<std::vector<int>> degeneracy_groups;
    double cluster_tol = 0.0;

    GridFunction eigenfunction(int j) const {
        GridFunction f(grid_size, period);
        f.data = eigenfunctions.col(j);
        return f;
    }
};

inline std::vector<std::vector<int>> cluster_eigenvalues(const Eigen::VectorXd& vals,
                                                         double tol) {
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < vals.size(); ++i) {
        if (!groups.empty() && std::abs(vals[i] - vals[groups.back().back()]) < tol)
            groups.back().push_back(i);
        else
            groups.push_back({i});
    }
    return groups;
}

/// Default tolerance scale: the largest magnitude among the lowest 20 modes.
inline double spectrum_scale(const Eigen::VectorXd& vals) {
    const int m = std::min<int>(20, static_cast<int>(vals.size()));
    double s = 1.0;
    for (int i = 0; i < m; ++i) s = std::max(s, std::abs(vals[i]));
    return s;
}

/// k lowest eigenpairs of the collocation operator, continuum-normalized.
inline EigenSystem eigen_decompose(const HessianOperator& op, int k) {
    if (k < 1 || k > op.matrix.rows()) throw DomainError("eigen_decompose: bad count");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix);
    if (es.info() != Eigen::Success)
        throw NumericalError("eigen_decompose: eigensolver failed to converge");
    EigenSystem sys;
    sys.period = op.period;
    sys.grid_size = op.grid_size;
    sys.eigenvalues = es.eigenvalues().head(k);
    const double norm = std::sqrt(op.grid_size / op.period);
    sys.eigenfunctions = es.eigenvectors().leftCols(k) * norm;
    sys.cluster_tol = 1e-5 * spectrum_scale(sys.eigenvalues);
    sys.degeneracy_groups = cluster_eigenvalues(sys.eigenvalues, sys.cluster_tol);
    return sys;
}

/// Eigenvalues only (all of them, ascending); the cheap path for index scans.
inline Eigen::VectorXd hessian_eigenvalues(const HessianOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("hessian_eigenvalues: eigensolver failed to converge");
    return es.eigenvalues();
}

struct MorseIndexReport {
    int index = 0;            // eigenvalues below -zero_tol
    int zero_mode_count = 0;  // |lambda| <= zero_tol
    double lowest_nonzero = 0.0;
    bool ambiguous = false;  // some |lambda| within 10x of zero_tol
    double zero_tol = 0.0;
    Eigen::VectorXd eigenvalues;  // the examined lowest block
};

inline MorseIndexReport count_morse_index(const Eigen::VectorXd& vals, double zero_tol = 0.0,
                                          bool strict = false) {
    MorseIndexReport rep;
    rep.zero_tol = (zero_tol > 0.0) ? zero_tol : 1e-6 * spectrum_scale(vals);
    rep.eigenvalues = vals;
    rep.lowest_nonzero = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vals.size(); ++i) {
        const double lam = vals[i];
        if (lam < -rep.zero_tol)
            ++rep.index;
        else if (std::abs(lam) <= rep.zero_tol)
            ++rep.zero_mode_count;
        if (std::abs(lam) > rep.zero_tol && std::abs(lam) < std::abs(rep.lowest_nonzero))
            rep.lowest_nonzero = lam;
        if (std::abs(lam) > rep.zero_tol && std::abs(lam) <= 10.0 * rep.zero_tol)
            rep.ambiguous = true;
    }
    if (strict && rep.ambiguous)
        throw NumericalError("morse_index: eigenvalue too close to the zero threshold; "
                             "refine the grid or move along the branch");
    return rep;
}

inline MorseIndexReport morse_index(const EigenSystem& sys, double zero_tol = 0.0,
                                    bool strict = false) {
    return count_morse_index(sys.eigenvalues, zero_tol, strict);
}

/// Choreography operator: (Cf)_i(t) = f_{i+2}(t - T/3); exact on grids
/// divisible by 3 (components cycle by one body, time shifts by T/3).
inline GridFunction choreography_apply(const GridFunction& f) {
    const int n = f.grid_size;
    if (n % 3 != 0) throw DomainError("choreography_apply: grid size not divisible by 3");
    GridFunction out(n, f.period);
    const int shift = n / 3;
    for (int k = 0; k < n; ++k) {
        const int ks = ((k - shift) % n + n) % n;
        for (int i = 0; i < 6; ++i) out.at(k, i) = f.at(ks, (i + 2) % 6);
    }
    return out;
}

/// Quadratic form of the second variation: (f, H f).
inline double second_variation(const HessianOperator& op, const GridFunction& f) {
    if (f.grid_size != op.grid_size) throw DomainError("second_variation: grid mismatch");
    const Eigen::VectorXd hf = op.matrix * f.data;
    return f.data.dot(hf) * op.period / op.grid_size;
}

/// Residual norm ||H psi - lambda psi|| in the continuum norm.
inline double eigen_residual(const HessianOperator& op, const EigenSystem& sys, int j) {
    const Eigen::VectorXd r =
        op.matrix * sys.eigenfunctions.col(j) - sys.eigenvalues[j] * sys.eigenfunctions.col(j);
    return r.norm() * std::sqrt(op.period / op.grid_size);
}

/// The four conservation-law zero modes along a solution: two uniform
/// translations, the rotation generator J q(t), and the time shift qdot(t).
inline std::vector<GridFunction> conservation_zero_modes(const HessianOperator& op) {
    const int n = op.grid_size;
    std::vector<GridFunction> modes(4, GridFunction(n, op.period));
    for (int k = 0; k < n; ++k) {
        const Vec6& q = op.orbit_q[k];
        const Vec6& v = op.orbit_v[k];
        Vec6 tx, ty, rot;
        tx << 1, 0, 1, 0, 1, 0;
        ty << 0, 1, 0, 1, 0, 1;
        rot << -q[1], q[0], -q[3], q[2], -q[5], q[4];
        modes[0].set_node(k, tx);
        modes[1].set_node(k, ty);
        modes[2].set_node(k, rot);
        modes[3].set_node(k, v);
    }
    for (auto& m : modes) m.data /= std::sqrt(grid_inner(m, m));
    return modes;
}

}  // namespace choreo
