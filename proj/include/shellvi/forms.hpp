// Pointwise strain tensors and penalty nonlinearities: the intrinsic
// change-of-metric and change-of-curvature tensors, their classical
// covariant-component counterparts (kept for cross-checks), the monotone
// constraint operator, the obstacle and rotation penalty densities, and
// the stress resultants.

#ifndef SHELLVI_FORMS_HPP
#define SHELLVI_FORMS_HPP

#include <algorithm>
#include <cmath>

#include "shellvi/core.hpp"
#include "shellvi/geometry.hpp"

namespace shellvi {

/// Value and first derivatives of a 3-component field at a point.
struct FieldJet {
    Vec3 value = Vec3::Zero();
    Grad23 grad = Grad23::Zero(); // grad(alpha, i) = d_alpha (field_i)
};

/// Covariant components of a displacement together with the derivatives
/// entering the classical tensor formulas.
struct CovariantJet {
    Vec3 eta = Vec3::Zero();        // eta_i
    Grad23 grad_eta = Grad23::Zero(); // grad_eta(beta, i) = d_beta eta_i
    Mat2 hess_eta3 = Mat2::Zero();  // d_{alpha beta} eta_3
};

// gamma~_{ab}(eta~) = 1/2 (d_a eta~ . a_b + d_b eta~ . a_a)
inline Mat2 gamma_tilde(const GeometryEval& g, const FieldJet& eta)
{
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out(a, b) = 0.5 * (eta.grad.row(a).dot(g.a_cov[b]) + eta.grad.row(b).dot(g.a_cov[a]));
    return out;
}

// rho~_{ab}(eta~, xi~) = -1/2 (d_a eta~ . d_b a_3 + d_b eta~ . d_a a_3
//                              + d_a xi~ . a_b + d_b xi~ . a_a)
//
// The overall sign is fixed by the identity rho~(eta~, xi~) =
// (d_ab eta~ - Gamma^s_ab d_s eta~) . a_3 under the rotation constraint
// xi~ = -(d_a eta~ . a_3) a^a, which also makes rho~ coincide with the
// classical covariant-component tensor. The flexural form is quadratic in
// rho~, so the solution is unaffected by this normalisation.
inline Mat2 rho_tilde(const GeometryEval& g, const FieldJet& eta, const FieldJet& xi)
{
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out(a, b) = -0.5 * (eta.grad.row(a).dot(g.d_normal[b]) + eta.grad.row(b).dot(g.d_normal[a])
                                + xi.grad.row(a).dot(g.a_cov[b]) + xi.grad.row(b).dot(g.a_cov[a]));
    return out;
}

// gamma_{ab}(eta) = 1/2 (d_b eta_a + d_a eta_b) - Gamma^s_{ab} eta_s - b_{ab} eta_3
inline Mat2 gamma_covariant(const GeometryEval& g, const CovariantJet& cj)
{
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Real v = 0.5 * (cj.grad_eta(b, a) + cj.grad_eta(a, b));
            for (int s = 0; s < 2; ++s)
                v -= g.christoffel[s](a, b) * cj.eta(s);
            v -= g.b_lower(a, b) * cj.eta(2);
            out(a, b) = v;
        }
    return out;
}

// Classical change-of-curvature formula in covariant components; needs
// the chart's d_a b^t_b, so the extended geometry data comes along.
inline Mat2 rho_covariant(const GeometryEval& g, const GeometryDerivs& gd, const CovariantJet& cj)
{
    Mat2 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Real v = cj.hess_eta3(a, b);
            for (int s = 0; s < 2; ++s)
                v -= g.christoffel[s](a, b) * cj.grad_eta(s, 2);
            for (int s = 0; s < 2; ++s)
                v -= g.b_mixed(s, a) * g.b_lower(s, b) * cj.eta(2);
            for (int s = 0; s < 2; ++s) {
                Real w = cj.grad_eta(b, s);
                for (int t = 0; t < 2; ++t)
                    w -= g.christoffel[t](b, s) * cj.eta(t);
                v += g.b_mixed(s, a) * w;
            }
            for (int t = 0; t < 2; ++t) {
                Real w = cj.grad_eta(a, t);
                for (int s = 0; s < 2; ++s)
                    w -= g.christoffel[s](a, t) * cj.eta(s);
                v += g.b_mixed(t, b) * w;
            }
            for (int t = 0; t < 2; ++t) {
                Real w = gd.db_mixed[a](t, b);
                for (int s = 0; s < 2; ++s)
                    w += g.christoffel[t](a, s) * g.b_mixed(s, b) - g.christoffel[s](a, b) * g.b_mixed(t, s);
                v += w * cj.eta(t);
            }
            out(a, b) = v;
        }
    return out;
}

// Monotone constraint operator on covariant components:
// beta_i(xi) = min((theta + xi_j a^j) . q, 0) * (a^i . q) / sqrt(sum_l |a^l . q|^2)
inline Vec3 beta_pointwise(const GeometryEval& g, const Vec3& xi_cov, const Vec3& q)
{
    Vec3 aq;
    for (int i = 0; i < 3; ++i)
        aq(i) = g.a_con[i].dot(q);
    const Real denom = aq.norm();
    const Vec3 disp = xi_cov(0) * g.a_con[0] + xi_cov(1) * g.a_con[1] + xi_cov(2) * g.a_con[2];
    const Real gap = (g.theta + disp).dot(q);
    const Real neg = std::min(gap, 0.0);
    return (neg / denom) * aq;
}

// Obstacle penalty density min((theta + zeta~) . q, 0) q and its
// generalized derivative. At the kink the strict-inequality indicator is
// used, so the tangent stays positive semidefinite.
inline void obstacle_penalty(const GeometryEval& g, const FieldJet& zeta, const Vec3& q,
                             Vec3& density, Mat3& tangent)
{
    const Real gap = (g.theta + zeta.value).dot(q);
    if (gap < 0.0) {
        density = gap * q;
        tangent = q * q.transpose();
    } else {
        density = Vec3::Zero();
        tangent = Mat3::Zero();
    }
}

// phi~ + (d_a zeta~ . a_3) a^a, the residual of the rotation constraint
inline Vec3 rotation_penalty(const GeometryEval& g, const FieldJet& zeta, const FieldJet& phi)
{
    Vec3 out = phi.value;
    for (int a = 0; a < 2; ++a)
        out += zeta.grad.row(a).dot(g.a_cov[2]) * g.a_con[a];
    return out;
}

// n^{ab} = eps a^{ab st} gamma_{st},   m^{ab} = (eps^3 / 3) a^{ab st} rho_{st}
inline void stress_resultants(const Elast4& C, const Mat2& gamma, const Mat2& rho, Real eps,
                              Mat2& n, Mat2& m)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("stress_resultants: eps must be positive");
    n = eps * C.contract(gamma);
    m = (eps * eps * eps / 3.0) * C.contract(rho);
}

} // namespace shellvi

#endif
