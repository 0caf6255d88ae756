// Element-wise assembly of the discrete doubly-penalised system: the
// membrane, flexural and rotation-penalty operators, the load vector, the
// nonlinear obstacle term, and its semismooth tangent. Homogeneous
// Dirichlet conditions are enforced by symmetric row/column elimination
// (constrained rows and columns are dropped at emission time).
//
// The area element sqrt(a) weights the elastic forms and the load
// integral but not the two penalty integrals; this matches the discrete
// problem statement exactly and is intentional.

#ifndef SHELLVI_ASSEMBLY_HPP
#define SHELLVI_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "shellvi/core.hpp"
#include "shellvi/forms.hpp"
#include "shellvi/geometry.hpp"
#include "shellvi/loads.hpp"
#include "shellvi/mesh.hpp"
#include "shellvi/quadrature.hpp"

namespace shellvi {

struct ModelParams {
    ImmersionSpec immersion;
    Real eps = 0.001;
    Real lambda = 0.4;
    Real mu = 0.012;
    Real kappa = 1e-2;
    Vec3 q = Vec3(0.0, 0.0, 1.0);
    LoadProfile load = LoadProfile::convergence();
};

inline void validate(const ModelParams& p)
{
    if (!(p.eps > 0.0))
        throw std::invalid_argument("ModelParams: eps must be positive");
    if (!(p.mu > 0.0))
        throw std::invalid_argument("ModelParams: mu must be positive");
    if (p.lambda < 0.0)
        throw std::invalid_argument("ModelParams: lambda must be nonnegative");
    if (!(p.kappa > 0.0))
        throw std::invalid_argument("ModelParams: kappa must be positive");
    if (std::abs(p.q.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("ModelParams: q must have unit norm");
}

/// Nodal coefficients over a DofMap; constrained entries stay zero.
struct State {
    VecX coeffs;

    static State zero(const DofMap& d) { return State{VecX::Zero(d.n_dofs)}; }
};

struct SystemMatrices {
    SpMat A_mem;   // eps * membrane form
    SpMat A_flex;  // (eps^3 / 3) * flexural form on the joint unknowns
    SpMat P_rot;   // (eps / kappa) * rotation-penalty form
    VecX load_vec;
};

using GeometryField = std::function<GeometryEval(const Vec2&)>;

namespace detail {

struct ElementGeometry {
    std::array<int, 3> v;
    std::array<Vec2, 3> p;
    std::array<Vec2, 3> grad; // constant P1 basis gradients
    Real area;
};

inline ElementGeometry element_geometry(const TriMesh& m, std::size_t t)
{
    ElementGeometry e;
    e.v = m.triangles[t];
    for (int k = 0; k < 3; ++k)
        e.p[k] = m.vertices[e.v[k]];
    const Real twoA = (e.p[1](0) - e.p[0](0)) * (e.p[2](1) - e.p[0](1))
                      - (e.p[1](1) - e.p[0](1)) * (e.p[2](0) - e.p[0](0));
    e.area = 0.5 * twoA;
    if (!(e.area > 0.0))
        throw std::runtime_error("assembly: element with nonpositive area");
    e.grad[0] = Vec2(e.p[1](1) - e.p[2](1), e.p[2](0) - e.p[1](0)) / twoA;
    e.grad[1] = Vec2(e.p[2](1) - e.p[0](1), e.p[0](0) - e.p[2](0)) / twoA;
    e.grad[2] = Vec2(e.p[0](1) - e.p[1](1), e.p[1](0) - e.p[0](0)) / twoA;
    return e;
}

// local dof ordering: ldof = 6 * k + f for vertex k, field f
inline int local_count() { return 18; }

enum class FormKind { membrane, flexural, rotation };

// Strain/penalty evaluations of all 18 local basis functions at one point.
struct BasisStrains {
    std::array<Mat2, 18> gam;  // membrane strain (zero for rotation-field dofs)
    std::array<Mat2, 18> rho;
    std::array<Vec3, 18> rot;  // rotation-constraint residual
};

inline void basis_strains(const ElementGeometry& e, const GeometryEval& g, BasisStrains& bs)
{
    for (int k = 0; k < 3; ++k) {
        const Vec2& dpsi = e.grad[k];
        const Vec3 rot_zeta_dir = dpsi(0) * g.a_con[0] + dpsi(1) * g.a_con[1];
        for (int c = 0; c < 3; ++c) {
            const int ld_zeta = 6 * k + c;
            const int ld_phi = 6 * k + 3 + c;
            Mat2 gz, rz, rp;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    gz(a, b) = 0.5 * (dpsi(a) * g.a_cov[b](c) + dpsi(b) * g.a_cov[a](c));
                    // sign convention matches rho_tilde; the flexural form
                    // is quadratic in it either way
                    rz(a, b) = -0.5 * (dpsi(a) * g.d_normal[b](c) + dpsi(b) * g.d_normal[a](c));
                    rp(a, b) = -gz(a, b);
                }
            bs.gam[ld_zeta] = gz;
            bs.gam[ld_phi] = Mat2::Zero();
            bs.rho[ld_zeta] = rz;
            bs.rho[ld_phi] = rp;
            bs.rot[ld_zeta] = g.a_cov[2](c) * rot_zeta_dir;
            bs.rot[ld_phi] = Vec3::Zero(); // filled below with the nodal value
        }
    }
}

} // namespace detail

// Assembles one of the three bilinear forms. A geometry override lets
// tests freeze the chart (e.g. to the flat identity geometry).
inline SpMat assemble_form(const TriMesh& m, const DofMap& d, const ModelParams& p,
                           detail::FormKind kind, const TriQuadRule& rule = quad_degree4(),
                           const GeometryField& geometry = {})
{
    validate(p);
    auto geo = geometry ? geometry
                        : GeometryField([&p](const Vec2& y) { return eval_geometry(p.immersion, y); });

    const Real w_mem = p.eps;
    const Real w_flex = p.eps * p.eps * p.eps / 3.0;
    const Real w_rot = p.eps / p.kappa;

    std::vector<Triplet> trips;
    trips.reserve(m.triangles.size() * 18 * 18 / 2);

    detail::BasisStrains bs;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        Eigen::Matrix<Real, 18, 18> loc;
        loc.setZero();
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            const GeometryEval g = geo(y);
            const Real wq = qp.weight * e.area;

            if (kind == detail::FormKind::rotation) {
                detail::basis_strains(e, g, bs);
                for (int k = 0; k < 3; ++k)
                    for (int c = 0; c < 3; ++c)
                        bs.rot[6 * k + 3 + c] = qp.bary[k] * Vec3::Unit(c);
                const Real w = wq * w_rot; // no sqrt(a) on the penalty
                for (int i = 0; i < 18; ++i)
                    for (int j = 0; j <= i; ++j)
                        loc(i, j) += w * bs.rot[i].dot(bs.rot[j]);
                continue;
            }

            detail::basis_strains(e, g, bs);
            const Elast4 C = elasticity_tensor(g, p.lambda, p.mu);
            const auto& strain = (kind == detail::FormKind::membrane) ? bs.gam : bs.rho;
            const Real w = wq * g.sqrt_a * (kind == detail::FormKind::membrane ? w_mem : w_flex);
            std::array<Mat2, 18> Cs;
            for (int i = 0; i < 18; ++i)
                Cs[i] = C.contract(strain[i]);
            for (int i = 0; i < 18; ++i)
                for (int j = 0; j <= i; ++j)
                    loc(i, j) += w * ddot(Cs[j], strain[i]);
        }
        for (int i = 0; i < 18; ++i) {
            const int gi = d.index(e.v[i / 6], i % 6);
            if (d.is_constrained(gi))
                continue;
            for (int j = 0; j <= i; ++j) {
                const int gj = d.index(e.v[j / 6], j % 6);
                if (d.is_constrained(gj))
                    continue;
                trips.emplace_back(gi, gj, loc(i, j));
                if (gi != gj)
                    trips.emplace_back(gj, gi, loc(i, j));
            }
        }
    }

    SpMat A(d.n_dofs, d.n_dofs);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

inline VecX assemble_load(const TriMesh& m, const DofMap& d, const ModelParams& p,
                          const TriQuadRule& rule = quad_degree4(),
                          const GeometryField& geometry = {})
{
    validate(p);
    auto geo = geometry ? geometry
                        : GeometryField([&p](const Vec2& y) { return eval_geometry(p.immersion, y); });
    VecX load = VecX::Zero(d.n_dofs);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            const Real gcoef = load_coefficient(p.load, p.eps, y);
            if (gcoef == 0.0)
                continue;
            const GeometryEval g = geo(y);
            const Real w = qp.weight * e.area * g.sqrt_a * gcoef;
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c) {
                    const int gi = d.index(e.v[k], c);
                    if (!d.is_constrained(gi))
                        load(gi) += w * qp.bary[k] * g.a_cov[2](c);
                }
        }
    }
    return load;
}

inline SystemMatrices assemble_linear(const TriMesh& m, const DofMap& d, const ModelParams& p,
                                      const TriQuadRule& rule = quad_degree4(),
                                      const GeometryField& geometry = {})
{
    SystemMatrices sys;
    sys.A_mem = assemble_form(m, d, p, detail::FormKind::membrane, rule, geometry);
    sys.A_flex = assemble_form(m, d, p, detail::FormKind::flexural, rule, geometry);
    sys.P_rot = assemble_form(m, d, p, detail::FormKind::rotation, rule, geometry);
    sys.load_vec = assemble_load(m, d, p, rule, geometry);
    return sys;
}

// Nonlinear obstacle term N(u): quadrature of the penalty density against
// the displacement test functions (no sqrt(a), no eps/kappa factor).
inline VecX obstacle_term(const TriMesh& m, const DofMap& d, const ModelParams& p, const State& s,
                          const TriQuadRule& rule = quad_degree4())
{
    VecX N = VecX::Zero(d.n_dofs);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            Vec3 zeta = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c)
                    zeta(c) += qp.bary[k] * s.coeffs(d.index(e.v[k], c));
            const Real gap = (chart_position(p.immersion, y) + zeta).dot(p.q);
            if (gap >= 0.0)
                continue;
            const Real w = qp.weight * e.area * gap;
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c) {
                    const int gi = d.index(e.v[k], c);
                    if (!d.is_constrained(gi))
                        N(gi) += w * qp.bary[k] * p.q(c);
                }
        }
    }
    return N;
}

// Generalized derivative of the obstacle term: q (x) q tested on the
// active quadrature points.
inline SpMat obstacle_tangent(const TriMesh& m, const DofMap& d, const ModelParams& p,
                              const State& s, const TriQuadRule& rule = quad_degree4())
{
    std::vector<Triplet> trips;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            Vec3 zeta = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c)
                    zeta(c) += qp.bary[k] * s.coeffs(d.index(e.v[k], c));
            const Real gap = (chart_position(p.immersion, y) + zeta).dot(p.q);
            if (gap >= 0.0)
                continue;
            const Real w = qp.weight * e.area;
            for (int ki = 0; ki < 3; ++ki)
                for (int ci = 0; ci < 3; ++ci) {
                    const int gi = d.index(e.v[ki], ci);
                    if (d.is_constrained(gi))
                        continue;
                    for (int kj = 0; kj < 3; ++kj)
                        for (int cj = 0; cj < 3; ++cj) {
                            const int gj = d.index(e.v[kj], cj);
                            if (d.is_constrained(gj))
                                continue;
                            trips.emplace_back(gi, gj,
                                               w * qp.bary[ki] * qp.bary[kj] * p.q(ci) * p.q(cj));
                        }
                }
        }
    }
    SpMat T(d.n_dofs, d.n_dofs);
    T.setFromTriplets(trips.begin(), trips.end());
    return T;
}

// Number of quadrature points where the deformed surface penetrates the
// obstacle.
inline int active_set_size(const TriMesh& m, const DofMap& d, const ModelParams& p, const State& s,
                           const TriQuadRule& rule = quad_degree4())
{
    int count = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            Vec3 zeta = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c)
                    zeta(c) += qp.bary[k] * s.coeffs(d.index(e.v[k], c));
            if ((chart_position(p.immersion, y) + zeta).dot(p.q) < 0.0)
                ++count;
        }
    }
    return count;
}

// F(u) = (A_mem + A_flex + P_rot) u + (eps/kappa) N(u) - load
inline VecX residual(const SystemMatrices& sys, const State& s, const TriMesh& m, const DofMap& d,
                     const ModelParams& p)
{
    if (s.coeffs.size() != d.n_dofs)
        throw std::invalid_argument("residual: state dimension mismatch");
    VecX r = sys.A_mem * s.coeffs + sys.A_flex * s.coeffs + sys.P_rot * s.coeffs
             + (p.eps / p.kappa) * obstacle_term(m, d, p, s) - sys.load_vec;
    for (int dof : d.constrained)
        r(dof) = 0.0;
    return r;
}

// J(u) = A_mem + A_flex + P_rot + (eps/kappa) T(u)
inline SpMat jacobian(const SystemMatrices& sys, const State& s, const TriMesh& m, const DofMap& d,
                      const ModelParams& p)
{
    if (s.coeffs.size() != d.n_dofs)
        throw std::invalid_argument("jacobian: state dimension mismatch");
    SpMat J = sys.A_mem + sys.A_flex + sys.P_rot;
    J += (p.eps / p.kappa) * obstacle_tangent(m, d, p, s);
    return J;
}

} // namespace shellvi

#endif
