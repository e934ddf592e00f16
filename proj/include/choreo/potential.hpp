#pragma once

#include "choreo/core.hpp"

namespace choreo {

/// Pair interaction u(r) and its first two radial derivatives, analytically.
/// order: 0 -> u, 1 -> u', 2 -> u''.
inline double pair_potential(const PotentialSpec& spec, double r, int order = 0) {
    if (r <= 0.0) throw DomainError("pair_potential: nonpositive distance");
    if (order < 0 || order > 2) throw DomainError("pair_potential: order must be 0, 1 or 2");
    if (spec.kind == PotentialKind::Homogeneous) {
        const double a = spec.exponent;
        switch (order) {
            case 0: return -std::pow(r, -a);
            case 1: return a * std::pow(r, -a - 1.0);
            default: return -a * (a + 1.0) * std::pow(r, -a - 2.0);
        }
    }
    switch (order) {
        case 0: return std::pow(r, -12.0) - std::pow(r, -6.0);
        case 1: return -12.0 * std::pow(r, -13.0) + 6.0 * std::pow(r, -7.0);
        default: return 156.0 * std::pow(r, -14.0) - 42.0 * std::pow(r, -8.0);
    }
}

inline double min_pair_distance(const Vec6& q) {
    double dmin = std::numeric_limits<double>::infinity();
    for (int b = 0; b < 3; ++b)
        for (int c = b + 1; c < 3; ++c) {
            const double dx = q[2 * b] - q[2 * c];
            const double dy = q[2 * b + 1] - q[2 * c + 1];
            dmin = std::min(dmin, std::hypot(dx, dy));
        }
    return dmin;
}

/// U(q) = sum over pairs of u(|r_b - r_c|).
inline double potential_energy(const PotentialSpec& spec, const Vec6& q) {
    double u = 0.0;
    for (int b = 0; b < 3; ++b)
        for (int c = b + 1; c < 3; ++c) {
            const double dx = q[2 * b] - q[2 * c];
            const double dy = q[2 * b + 1] - q[2 * c + 1];
            const double r = std::hypot(dx, dy);
            if (r <= 0.0) throw DomainError("potential_energy: collision configuration");
            u += pair_potential(spec, r, 0);
        }
    return u;
}

inline Vec6 potential_gradient(const PotentialSpec& spec, const Vec6& q) {
    Vec6 g = Vec6::Zero();
    for (int b = 0; b < 3; ++b)
        for (int c = b + 1; c < 3; ++c) {
            const Vec2 d{q[2 * b] - q[2 * c], q[2 * b + 1] - q[2 * c + 1]};
            const double r = d.norm();
            if (r <= 0.0) throw DomainError("potential_gradient: collision configuration");
            const Vec2 f = pair_potential(spec, r, 1) / r * d;
            g.segment<2>(2 * b) += f;
            g.segment<2>(2 * c) -= f;
        }
    return g;
}

/// Hessian of U. Symmetric; annihilates the two uniform-translation vectors.
inline Mat6 potential_hessian(const PotentialSpec& spec, const Vec6& q) {
    Mat6 h = Mat6::Zero();
    for (int b = 0; b < 3; ++b)
        for (int c = b + 1; c < 3; ++c) {
            const Vec2 d{q[2 * b] - q[2 * c], q[2 * b + 1] - q[2 * c + 1]};
            const double r = d.norm();
            if (r <= 0.0) throw DomainError("potential_hessian: collision configuration");
            const Mat2 proj = d * d.transpose() / (r * r);
            const Mat2 blk = pair_potential(spec, r, 2) * proj +
                             pair_potential(spec, r, 1) / r * (Mat2::Identity() - proj);
            h.block<2, 2>(2 * b, 2 * b) += blk;
            h.block<2, 2>(2 * c, 2 * c) += blk;
            h.block<2, 2>(2 * b, 2 * c) -= blk;
            h.block<2, 2>(2 * c, 2 * b) -= blk;
        }
    return h;
}

struct ConservedQuantities {
    double energy = 0.0;
    double angular_momentum = 0.0;
    Vec2 linear_momentum = Vec2::Zero();
    Vec2 center_of_mass = Vec2::Zero();
    double moment_of_inertia = 0.0;
};

inline ConservedQuantities conserved(const PotentialSpec& spec, const PhaseState& s) {
    ConservedQuantities c;
    c.energy = 0.5 * s.v.squaredNorm() + potential_energy(spec, s.q);
    for (int b = 0; b < 3; ++b) {
        const Vec2 r = s.position(b);
        const Vec2 v = s.velocity(b);
        c.angular_momentum += r.x() * v.y() - r.y() * v.x();
        c.linear_momentum += v;
        c.center_of_mass += r;
    }
    c.moment_of_inertia = s.q.squaredNorm();
    return c;
}

}  // namespace choreo
