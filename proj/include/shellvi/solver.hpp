// Semismooth Newton solution of the penalised system, continuation in the
// penalty parameter, nested-mesh prolongation, and H1 error evaluation.

#ifndef SHELLVI_SOLVER_HPP
#define SHELLVI_SOLVER_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "shellvi/assembly.hpp"
#include "shellvi/mesh.hpp"

namespace shellvi {

struct SolveReport {
    bool converged = false;
    int newton_iters = 0;
    Real final_residual_inf = std::numeric_limits<Real>::infinity();
    int active_set_size = 0;
    bool linear_solve_breakdown = false;
    std::vector<Real> residual_history;     // ||F||_inf after each iteration
    std::vector<int> active_set_history;    // active set after each iteration
};

namespace detail {

// Restrict a full-size symmetric operator to the free dofs.
inline SpMat condense(const SpMat& A, const DofMap& d)
{
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(A.nonZeros()));
    for (int col = 0; col < A.outerSize(); ++col) {
        const int fc = d.free_index[col];
        if (fc < 0)
            continue;
        for (SpMat::InnerIterator it(A, col); it; ++it) {
            const int fr = d.free_index[it.row()];
            if (fr >= 0)
                trips.emplace_back(fr, fc, it.value());
        }
    }
    SpMat out(d.n_free, d.n_free);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

inline VecX gather_free(const VecX& full, const DofMap& d)
{
    VecX out(d.n_free);
    for (int dof = 0; dof < d.n_dofs; ++dof)
        if (d.free_index[dof] >= 0)
            out(d.free_index[dof]) = full(dof);
    return out;
}

inline void scatter_free(const VecX& free, const DofMap& d, VecX& full)
{
    for (int dof = 0; dof < d.n_dofs; ++dof)
        full(dof) = (d.free_index[dof] >= 0) ? free(d.free_index[dof]) : 0.0;
}

} // namespace detail

// Newton iteration on a pre-assembled system. Each step solves the
// semismooth tangent system with a sparse LDLT factorization (with one
// refinement pass, the linear residual stays below 1e-10 relative) and
// applies a backtracking line search on the residual norm.
inline std::pair<State, SolveReport> newton_solve_assembled(const TriMesh& m, const DofMap& d,
                                                            const ModelParams& p,
                                                            const SystemMatrices& sys,
                                                            const State& init, Real tol,
                                                            int max_iter)
{
    if (!(tol > 0.0))
        throw std::invalid_argument("newton_solve: tol must be positive");

    State u = init;
    if (u.coeffs.size() != d.n_dofs)
        throw std::invalid_argument("newton_solve: init dimension mismatch");
    for (int dof : d.constrained)
        u.coeffs(dof) = 0.0;

    SolveReport rep;
    const SpMat A_lin = sys.A_mem + sys.A_flex + sys.P_rot;
    const SpMat A_ff = detail::condense(A_lin, d);
    const Real scale = p.eps / p.kappa;

    VecX F = residual(sys, u, m, d, p);
    Real rnorm = F.lpNorm<Eigen::Infinity>();

    for (int it = 1; it <= max_iter; ++it) {
        SpMat J_ff = A_ff + scale * detail::condense(obstacle_tangent(m, d, p, u), d);
        Eigen::SimplicialLDLT<SpMat> ldlt(J_ff);
        if (ldlt.info() != Eigen::Success) {
            rep.linear_solve_breakdown = true;
            break;
        }
        Real J_norm1 = 0.0;
        for (int col = 0; col < J_ff.outerSize(); ++col) {
            Real colsum = 0.0;
            for (SpMat::InnerIterator jt(J_ff, col); jt; ++jt)
                colsum += std::abs(jt.value());
            J_norm1 = std::max(J_norm1, colsum);
        }
        const VecX F_f = detail::gather_free(F, d);
        VecX delta_f = ldlt.solve(-F_f);
        // normwise backward error of the linear solve, kept below 1e-10
        // with one refinement pass
        auto backward_scale = [&](const VecX& dv) { return F_f.norm() + J_norm1 * dv.norm(); };
        VecX lin_res = J_ff * delta_f + F_f;
        if (lin_res.norm() > 1e-10 * backward_scale(delta_f))
            delta_f -= ldlt.solve(lin_res);
        lin_res = J_ff * delta_f + F_f;
        if (lin_res.norm() > 1e-10 * backward_scale(delta_f)) {
            rep.linear_solve_breakdown = true;
            break;
        }

        VecX delta = VecX::Zero(d.n_dofs);
        detail::scatter_free(delta_f, d, delta);

        // backtracking on ||F||_inf, at most 30 halvings; keep the best
        // trial if no strict decrease shows up
        Real t = 1.0;
        Real best_t = 1.0;
        Real best_norm = std::numeric_limits<Real>::infinity();
        VecX best_F;
        State trial{u.coeffs};
        for (int half = 0; half <= 30; ++half) {
            trial.coeffs = u.coeffs + t * delta;
            VecX Ft = residual(sys, trial, m, d, p);
            const Real nt = Ft.lpNorm<Eigen::Infinity>();
            if (nt < best_norm) {
                best_norm = nt;
                best_t = t;
                best_F = std::move(Ft);
            }
            if (nt < rnorm)
                break;
            t *= 0.5;
        }
        u.coeffs += best_t * delta;
        F = std::move(best_F);
        rnorm = best_norm;

        rep.newton_iters = it;
        rep.residual_history.push_back(rnorm);
        rep.active_set_history.push_back(active_set_size(m, d, p, u));
        if (rnorm <= tol)
            break;
    }

    rep.final_residual_inf = rnorm;
    rep.converged = !rep.linear_solve_breakdown && rnorm <= tol;
    rep.active_set_size = active_set_size(m, d, p, u);
    return {u, rep};
}

inline std::pair<State, SolveReport> newton_solve(const TriMesh& m, const DofMap& d,
                                                  const ModelParams& p, const State& init,
                                                  Real tol = 1e-12, int max_iter = 50)
{
    const SystemMatrices sys = assemble_linear(m, d, p);
    return newton_solve_assembled(m, d, p, sys, init, tol, max_iter);
}

// H1 norm of the 3-component field stored in fields
// [field_begin, field_begin + 3) of a coefficient vector.
inline Real h1_norm(const TriMesh& m, const DofMap& d, const VecX& coeffs, int field_begin = 0)
{
    const auto& rule = quad_degree4();
    Real acc = 0.0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        Vec3 grad_sq_sum = Vec3::Zero();
        for (int c = 0; c < 3; ++c) {
            Vec2 gradc = Vec2::Zero();
            for (int k = 0; k < 3; ++k)
                gradc += coeffs(d.index(e.v[k], field_begin + c)) * e.grad[k];
            grad_sq_sum(c) = gradc.squaredNorm();
        }
        Real elem = 0.0;
        for (const auto& qp : rule.points) {
            Real val_sq = 0.0;
            for (int c = 0; c < 3; ++c) {
                Real v = 0.0;
                for (int k = 0; k < 3; ++k)
                    v += qp.bary[k] * coeffs(d.index(e.v[k], field_begin + c));
                val_sq += v * v;
            }
            elem += qp.weight * (val_sq + grad_sq_sum.sum());
        }
        acc += elem * e.area;
    }
    return std::sqrt(acc);
}

// Exact P1 prolongation of a coefficient vector from a mesh to one of its
// refinement descendants. The refinement chain is reconstructed (the
// refinement procedure is deterministic), each new vertex evaluating the
// parent element's affine function at its actual position; boundary
// midpoints projected onto the circle are handled by affine extension.
inline VecX prolong(const TriMesh& coarse, const VecX& coeffs, const TriMesh& fine)
{
    if (fine.vertices.size() < coarse.vertices.size())
        throw std::invalid_argument("prolong: target mesh is coarser than the source");

    TriMesh cur = coarse;
    VecX values = coeffs;
    while (cur.vertices.size() < fine.vertices.size()) {
        std::vector<RefineVertexOrigin> origins;
        TriMesh next = refine_with_provenance(cur, &origins);
        const int nold = static_cast<int>(cur.vertices.size());
        VecX next_values(DofMap::fields_per_vertex * next.vertices.size());
        next_values.head(values.size()) = values;
        for (std::size_t i = 0; i < origins.size(); ++i) {
            const int nv = nold + static_cast<int>(i);
            const auto& tri = cur.triangles[origins[i].parent_tri];
            // affine (possibly extended) barycentric coordinates
            const Vec2& p0 = cur.vertices[tri[0]];
            const Vec2& p1 = cur.vertices[tri[1]];
            const Vec2& p2 = cur.vertices[tri[2]];
            Mat2 Amat;
            Amat.col(0) = p1 - p0;
            Amat.col(1) = p2 - p0;
            const Vec2 lam12 = Amat.inverse() * (next.vertices[nv] - p0);
            const Real lam[3] = {1.0 - lam12(0) - lam12(1), lam12(0), lam12(1)};
            for (int f = 0; f < DofMap::fields_per_vertex; ++f) {
                Real v = 0.0;
                for (int k = 0; k < 3; ++k)
                    v += lam[k] * values(DofMap::fields_per_vertex * tri[k] + f);
                next_values(DofMap::fields_per_vertex * nv + f) = v;
            }
        }
        cur = std::move(next);
        values = std::move(next_values);
    }

    if (cur.triangles.size() != fine.triangles.size())
        throw std::invalid_argument("prolong: meshes are not nested");
    for (std::size_t v = 0; v < fine.vertices.size(); ++v)
        if ((cur.vertices[v] - fine.vertices[v]).norm() > 1e-14 * (1.0 + fine.radius))
            throw std::invalid_argument("prolong: meshes are not nested");
    return values;
}

// || zeta_coarse - zeta_fine ||_{H1} with the coarse state prolonged onto
// the fine mesh.
inline Real h1_error(const TriMesh& mesh_coarse, const State& s_coarse, const TriMesh& mesh_fine,
                     const State& s_fine)
{
    const VecX prolonged = prolong(mesh_coarse, s_coarse.coeffs, mesh_fine);
    const DofMap d_fine = build_dofmap(mesh_fine);
    if (s_fine.coeffs.size() != d_fine.n_dofs)
        throw std::invalid_argument("h1_error: fine state dimension mismatch");
    return h1_norm(mesh_fine, d_fine, prolonged - s_fine.coeffs, 0);
}

struct KappaStep {
    Real kappa;
    State state;
    Real cauchy_error; // H1 distance of the displacement to the previous step
};

// Successive reduction of the penalty parameter with warm starts. The
// first entry carries an infinite error; the walk stops once the Cauchy
// error of consecutive displacements drops below stop_tol.
inline std::vector<KappaStep> kappa_continuation(
    const TriMesh& m, const DofMap& d, const ModelParams& base, Real kappa0, Real shrink,
    Real stop_tol, int max_steps = 60, Real newton_tol = 1e-12, int newton_max_iter = 50,
    const std::function<void(const KappaStep&)>& on_step = {})
{
    if (!(kappa0 > 0.0))
        throw std::invalid_argument("kappa_continuation: kappa0 must be positive");
    if (!(shrink > 0.0) || !(shrink < 1.0))
        throw std::invalid_argument("kappa_continuation: shrink must lie in (0, 1)");

    ModelParams p = base;
    p.kappa = kappa0;
    SystemMatrices sys = assemble_linear(m, d, p);

    std::vector<KappaStep> steps;
    auto solve_at = [&](const State& init) {
        auto [s, rep] = newton_solve_assembled(m, d, p, sys, init, newton_tol, newton_max_iter);
        if (!rep.converged)
            throw std::runtime_error("kappa_continuation: Newton failed at kappa = "
                                     + std::to_string(p.kappa)
                                     + (rep.linear_solve_breakdown ? " (linear solve breakdown)"
                                                                   : " (max iterations)"));
        return s;
    };

    State prev = solve_at(State::zero(d));
    steps.push_back({p.kappa, prev, std::numeric_limits<Real>::infinity()});
    if (on_step)
        on_step(steps.back());

    for (int step = 0; step < max_steps; ++step) {
        p.kappa *= shrink;
        sys.P_rot /= shrink; // the rotation penalty scales as 1/kappa
        State s = solve_at(prev);
        const Real err = h1_norm(m, d, prev.coeffs - s.coeffs, 0);
        steps.push_back({p.kappa, s, err});
        if (on_step)
            on_step(steps.back());
        prev = std::move(s);
        if (err < stop_tol)
            break;
    }
    return steps;
}

} // namespace shellvi

#endif
