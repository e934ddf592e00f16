#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace choreo {

using Vec2 = Eigen::Vector2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid input (collision configuration, nonpositive distance, bad grid, ...).
struct DomainError : Error {
    using Error::Error;
};

/// The integrator could not continue; carries the time it reached.
struct IntegrationError : Error {
    double t_reached;
    IntegrationError(const std::string& what, double t) : Error(what), t_reached(t) {}
};

/// Newton or eigensolver failed to converge.
struct ConvergenceError : Error {
    double last_residual;
    explicit ConvergenceError(const std::string& what, double r = 0.0)
        : Error(what), last_residual(r) {}
};

struct SingularJacobianError : Error {
    using Error::Error;
};

/// Requested solution does not exist (e.g. below the fold period).
struct NonexistenceError : Error {
    using Error::Error;
};

struct ClassificationError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

enum class PotentialKind { Homogeneous, LennardJones };

/// Pair interaction: -r^(-a) for Homogeneous (a >= 0), r^(-12) - r^(-6) for LennardJones.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Homogeneous;
    double exponent = 1.0;  // only meaningful for Homogeneous

    static PotentialSpec homogeneous(double a) {
        if (a < 0.0) throw DomainError("homogeneous exponent must be >= 0");
        return {PotentialKind::Homogeneous, a};
    }
    static PotentialSpec lennard_jones() { return {PotentialKind::LennardJones, 0.0}; }

    bool operator==(const PotentialSpec& o) const {
        return kind == o.kind && (kind == PotentialKind::LennardJones || exponent == o.exponent);
    }
};

/// Planar state of three unit-mass bodies: q = (x1,y1,x2,y2,x3,y3), v = dq/dt.
struct PhaseState {
    Vec6 q = Vec6::Zero();
    Vec6 v = Vec6::Zero();
    double t = 0.0;

    Vec2 position(int body) const { return {q[2 * body], q[2 * body + 1]}; }
    Vec2 velocity(int body) const { return {v[2 * body], v[2 * body + 1]}; }

    Vec12 packed() const {
        Vec12 y;
        y.head<6>() = q;
        y.tail<6>() = v;
        return y;
    }
    static PhaseState unpack(const Vec12& y, double t) {
        PhaseState s;
        s.q = y.head<6>();
        s.v = y.tail<6>();
        s.t = t;
        return s;
    }
};

inline Mat2 rotation2(double angle) {
    Mat2 r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
}

/// Apply a 2x2 linear map to every body position and velocity.
inline PhaseState transformed(const PhaseState& s, const Mat2& m) {
    PhaseState out = s;
    for (int b = 0; b < 3; ++b) {
        out.q.segment<2>(2 * b) = m * s.q.segment<2>(2 * b);
        out.v.segment<2>(2 * b) = m * s.v.segment<2>(2 * b);
    }
    return out;
}

inline PhaseState rotated(const PhaseState& s, double angle) {
    return transformed(s, rotation2(angle));
}

inline PhaseState reflected_x(const PhaseState& s) {
    Mat2 m;
    m << 1, 0, 0, -1;
    return transformed(s, m);
}

inline PhaseState reflected_y(const PhaseState& s) {
    Mat2 m;
    m << -1, 0, 0, 1;
    return transformed(s, m);
}

/// Relabel bodies: new body i takes the coordinates of old body perm[i].
inline PhaseState permuted(const PhaseState& s, const std::array<int, 3>& perm) {
    PhaseState out = s;
    for (int b = 0; b < 3; ++b) {
        out.q.segment<2>(2 * b) = s.q.segment<2>(2 * perm[b]);
        out.v.segment<2>(2 * b) = s.v.segment<2>(2 * perm[b]);
    }
    return out;
}

inline const std::array<std::array<int, 3>, 6>& body_permutations() {
    static const std::array<std::array<int, 3>, 6> perms = {{
        {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2},
    }};
    return perms;
}

}  // namespace choreo
