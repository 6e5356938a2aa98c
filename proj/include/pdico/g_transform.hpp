#pragma once

#include "pdico/inclusion_map.hpp"

namespace pdico {

/// One-step auxiliary mapping that rewrites the discrete parabolic
/// inclusion as an inclusion in the x-direction:
///
///   G(u1,u2,u,u3,u4) = -u1 - th^2 u2 + c0 u - th^2 u3 + (d^2/h) u4 - d^2 F(u)
///
/// with th = delta/sigma and c0 = 2 + 2 th^2 - delta^2/h. Members of G
/// correspond one-to-one with members of F(u) through an affine transform,
/// which carries Hamiltonians, argmax sets and adjoints back and forth.
struct GTransform {
    InclusionMap base;
    double delta = 0, sigma = 0, h = 0;
    double theta = 0;
    double c0 = 0;

    static GTransform make(InclusionMap base, double delta, double sigma,
                           double h) {
        if (!(delta > 0) || !(sigma > 0) || !(h > 0))
            throw error("g-transform: steps must be positive");
        GTransform g{std::move(base), delta, sigma, h, 0, 0};
        g.theta = delta / sigma;
        g.c0 = 2.0 + 2.0 * g.theta * g.theta - delta * delta / h;
        return g;
    }

    /// Coefficient 2/d^2 + 2/s^2 - 1/h of u in the F-side velocity.
    double trans_coeff() const {
        return 2.0 / (delta * delta) + 2.0 / (sigma * sigma) - 1.0 / h;
    }

    /// Affine part -u1 - th^2 u2 + c0 u - th^2 u3 + (d^2/h) u4.
    Vec affine_part(const Vec& u1, const Vec& u2, const Vec& u,
                    const Vec& u3, const Vec& u4) const {
        return -u1 - theta * theta * u2 + c0 * u - theta * theta * u3 +
               (delta * delta / h) * u4;
    }

    /// Maps a G-member v back to the F-side velocity it encodes.
    Vec to_f_velocity(const Vec& u1, const Vec& u2, const Vec& u,
                      const Vec& u3, const Vec& u4, const Vec& v) const {
        const double d2 = delta * delta, s2 = sigma * sigma;
        return trans_coeff() * u + u4 / h - u1 / d2 - u2 / s2 - u3 / s2 -
               v / d2;
    }
};

/// Element of G produced by the selection v in F(u).
inline Vec g_forward(const GTransform& g, const Vec& u1, const Vec& u2,
                     const Vec& u, const Vec& u3, const Vec& u4,
                     const Vec& v) {
    if (!g.base.member(u, v, 1e-9))
        throw precondition_error("g_forward: v is not in F(u)");
    return g.affine_part(u1, u2, u, u3, u4) - g.delta * g.delta * v;
}

/// H_G(u1,u2,u,u3,u4, v*) = <affine part, v*> + d^2 H_F(u, -v*).
inline ExtReal g_hamiltonian(const GTransform& g, const Vec& u1, const Vec& u2,
                             const Vec& u, const Vec& u3, const Vec& u4,
                             const Vec& vstar) {
    ExtReal hf = g.base.hamiltonian(u, -vstar);
    if (!hf.finite) return ExtReal::pos_inf();
    return ExtReal::of(g.affine_part(u1, u2, u, u3, u4).dot(vstar) +
                       g.delta * g.delta * hf.value);
}

/// Point of gph G at which the adjoint is taken.
struct GWitness {
    Vec u1, u2, u, u3, u4, v;
};

/// Adjoint of G expressed through the adjoint of F. The multipliers of the
/// four neighbor arguments are forced:
///   u1* = -v*,  u2* = u3* = -th^2 v*,  u4* = (d^2/h) v*,
/// and the center multiplier set is d^2 (F*(-v*; (u, v_F)) + trans_coeff v*)
/// where v_F is the F-side velocity of the witness.
struct GLamResult {
    bool empty = true;
    Vec u1s, u2s, u3s, u4s;
    Vec ustar;   // representative of the admissible center multipliers
    Vec q;       // polyhedral multiplier when the base map supplies one
};

inline GLamResult g_lam_from_f(const GTransform& g, const Vec& vstar,
                               const GWitness& w, double tol = 1e-9) {
    const Vec vf = g.to_f_velocity(w.u1, w.u2, w.u, w.u3, w.u4, w.v);
    if (!g.base.member(w.u, vf, 10 * tol))
        throw precondition_error("g_lam_from_f: witness is not on gph G");
    GLamResult out;
    out.u1s = -vstar;
    out.u2s = -g.theta * g.theta * vstar;
    out.u3s = out.u2s;
    out.u4s = (g.delta * g.delta / g.h) * vstar;
    LamResult f = g.base.lam(-vstar, w.u, vf, tol);
    if (f.empty()) return out;
    out.empty = false;
    out.ustar = g.delta * g.delta * (f.ustar + g.trans_coeff() * vstar);
    if (f.kind == LamResult::Kind::affine_set) out.q = f.q;
    return out;
}

} // namespace pdico
