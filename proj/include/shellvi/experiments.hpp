// Experiment drivers: penalty-parameter continuation at fixed mesh,
// nested-mesh convergence under kappa = h^q coupling, and contact-area
// growth under increasing load. Results go to CSV (one header row, one
// comment row with the resolved configuration) and deformed surfaces to
// legacy ASCII VTK.

#ifndef SHELLVI_EXPERIMENTS_HPP
#define SHELLVI_EXPERIMENTS_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "shellvi/assembly.hpp"
#include "shellvi/solver.hpp"

namespace shellvi {

// Geometry and material constants, fixed for all experiments.
inline ModelParams default_model()
{
    ModelParams p;
    p.immersion = spherical_cap_chart(1.0, 0.85);
    p.eps = 0.001;
    p.lambda = 0.4;
    p.mu = 0.012;
    p.kappa = 1e-2;
    p.q = Vec3(0.0, 0.0, 1.0);
    p.load = LoadProfile::convergence();
    return p;
}

struct ExperimentConfig {
    int batch = 1;
    int mesh_level = 2;       // refinements applied to the base mesh
    Real base_h = 0.1;        // target diameter of the level-0 mesh
    Real kappa0 = 1e-2;
    Real shrink = 0.5;
    Real stop_tol = -1.0;     // negative: per-batch default (5e-8 / 6e-5)
    Real q_exp = 0.5;
    int max_pairs = 12;       // batch 2: cap on refinement iterations
    int max_kappa_steps = 60; // batch 1: cap on continuation steps
    std::vector<int> ell = {0, 4, 9, 15, 23, 28};
    std::string out_dir = "out";
    Real newton_tol = 1e-12;
    int newton_max_iter = 50;
    Real contact_tol = -1.0;  // negative: default derived from kappa
};

inline Real batch_stop_tol(const ExperimentConfig& cfg)
{
    if (cfg.stop_tol > 0.0)
        return cfg.stop_tol;
    return cfg.batch == 2 ? 6.0e-5 : 5.0e-8;
}

inline TriMesh mesh_for_level(const ExperimentConfig& cfg)
{
    TriMesh m = disk_mesh(0.5, cfg.base_h);
    for (int i = 0; i < cfg.mesh_level; ++i)
        m = refine(m);
    return m;
}

// Parameter-domain area of the region where the deformed surface sits
// within tol_contact of the obstacle plane, measured as the quadrature-
// point fraction per element.
inline Real contact_area(const TriMesh& m, const DofMap& d, const State& s,
                         const ImmersionSpec& spec, const Vec3& q, Real tol_contact,
                         const TriQuadRule& rule = quad_degree4())
{
    if (tol_contact < 0.0)
        throw std::invalid_argument("contact_area: tol_contact must be nonnegative");
    Real area = 0.0;
    const Real nq = static_cast<Real>(rule.points.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = detail::element_geometry(m, t);
        int hits = 0;
        for (const auto& qp : rule.points) {
            const Vec2 y = qp.bary[0] * e.p[0] + qp.bary[1] * e.p[1] + qp.bary[2] * e.p[2];
            Vec3 zeta = Vec3::Zero();
            for (int k = 0; k < 3; ++k)
                for (int c = 0; c < 3; ++c)
                    zeta(c) += qp.bary[k] * s.coeffs(d.index(e.v[k], c));
            if ((chart_position(spec, y) + zeta).dot(q) <= tol_contact)
                ++hits;
        }
        area += e.area * hits / nq;
    }
    return area;
}

// The penetration depth scales like sqrt(kappa), but a tolerance beyond
// the rest clearance of the surface would count untouched regions as
// contact; cap it at half the minimum rest gap.
inline Real default_contact_tol(const ImmersionSpec& spec, Real kappa)
{
    const Real rim_height = std::sqrt(spec.R * spec.R - spec.domain_radius * spec.domain_radius)
                            - spec.vertical_offset;
    return std::min(std::sqrt(kappa), 0.5 * rim_height);
}

namespace detail {

inline std::string sci(Real x)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

// per-element stress-resultant invariants averaged onto vertices
struct StressFields {
    VecX n_trace, n_frob, m_trace, m_frob;
};

inline StressFields recover_stress(const TriMesh& m, const DofMap& d, const State& s,
                                   const ModelParams& p)
{
    const int nv = d.n_vertices;
    StressFields f{VecX::Zero(nv), VecX::Zero(nv), VecX::Zero(nv), VecX::Zero(nv)};
    VecX weight = VecX::Zero(nv);
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto e = element_geometry(m, t);
        const Vec2 centroid = (e.p[0] + e.p[1] + e.p[2]) / 3.0;
        const GeometryEval g = eval_geometry(p.immersion, centroid);
        FieldJet zeta, phi;
        for (int k = 0; k < 3; ++k)
            for (int c = 0; c < 3; ++c) {
                const Real zc = s.coeffs(d.index(e.v[k], c));
                const Real pc = s.coeffs(d.index(e.v[k], 3 + c));
                zeta.value(c) += zc / 3.0;
                phi.value(c) += pc / 3.0;
                for (int a = 0; a < 2; ++a) {
                    zeta.grad(a, c) += zc * e.grad[k](a);
                    phi.grad(a, c) += pc * e.grad[k](a);
                }
            }
        const Mat2 gam = gamma_tilde(g, zeta);
        const Mat2 rho = rho_tilde(g, zeta, phi);
        const Elast4 C = elasticity_tensor(g, p.lambda, p.mu);
        Mat2 n, mm;
        stress_resultants(C, gam, rho, p.eps, n, mm);
        // invariants via index lowering with the first fundamental form
        const Mat2 n_mixed = n * g.a_lower;
        const Mat2 m_mixed = mm * g.a_lower;
        const Real ntr = n_mixed.trace();
        const Real mtr = m_mixed.trace();
        const Real nfr = std::sqrt(std::max(0.0, (n_mixed * n_mixed).trace()));
        const Real mfr = std::sqrt(std::max(0.0, (m_mixed * m_mixed).trace()));
        for (int k = 0; k < 3; ++k) {
            const int v = e.v[k];
            f.n_trace(v) += e.area * ntr;
            f.n_frob(v) += e.area * nfr;
            f.m_trace(v) += e.area * mtr;
            f.m_frob(v) += e.area * mfr;
            weight(v) += e.area;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (weight(v) > 0.0) {
            f.n_trace(v) /= weight(v);
            f.n_frob(v) /= weight(v);
            f.m_trace(v) /= weight(v);
            f.m_frob(v) /= weight(v);
        }
    return f;
}

} // namespace detail

// Deformed midsurface as a legacy ASCII VTK unstructured grid with the
// displacement magnitude, the gap to the obstacle plane, and stress-
// resultant invariants as point data.
inline void export_vtk(const TriMesh& m, const DofMap& d, const State& s, const ModelParams& p,
                       const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("export_vtk: cannot open '" + path + "'");

    const int nv = d.n_vertices;
    os << "# vtk DataFile Version 2.0\n";
    os << "deformed shell midsurface\n";
    os << "ASCII\n";
    os << "DATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << nv << " double\n";
    std::vector<Real> gap(nv), mag(nv);
    for (int v = 0; v < nv; ++v) {
        Vec3 zeta;
        for (int c = 0; c < 3; ++c)
            zeta(c) = s.coeffs(d.index(v, c));
        const Vec3 pos = chart_position(p.immersion, m.vertices[v]) + zeta;
        gap[v] = pos.dot(p.q);
        mag[v] = zeta.norm();
        os << detail::sci(pos(0)) << " " << detail::sci(pos(1)) << " " << detail::sci(pos(2))
           << "\n";
    }
    const auto nt = m.triangles.size();
    os << "CELLS " << nt << " " << 4 * nt << "\n";
    for (const auto& t : m.triangles)
        os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "CELL_TYPES " << nt << "\n";
    for (std::size_t t = 0; t < nt; ++t)
        os << "5\n";

    const detail::StressFields sf = detail::recover_stress(m, d, s, p);
    os << "POINT_DATA " << nv << "\n";
    auto scalars = [&os, nv](const char* name, auto&& value) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int v = 0; v < nv; ++v)
            os << detail::sci(value(v)) << "\n";
    };
    scalars("displacement_magnitude", [&](int v) { return mag[v]; });
    scalars("gap", [&](int v) { return gap[v]; });
    scalars("membrane_stress_trace", [&](int v) { return sf.n_trace(v); });
    scalars("membrane_stress_norm", [&](int v) { return sf.n_frob(v); });
    scalars("bending_moment_trace", [&](int v) { return sf.m_trace(v); });
    scalars("bending_moment_norm", [&](int v) { return sf.m_frob(v); });
    if (!os)
        throw std::runtime_error("export_vtk: write failed for '" + path + "'");
}

namespace detail {

inline std::string config_comment(const ExperimentConfig& cfg, const ModelParams& p,
                                  const TriMesh& m)
{
    std::ostringstream os;
    os << "# batch=" << cfg.batch << " eps=" << sci(p.eps) << " lambda=" << sci(p.lambda)
       << " mu=" << sci(p.mu) << " R=" << sci(p.immersion.R)
       << " offset=" << sci(p.immersion.vertical_offset) << " q=(" << p.q(0) << "," << p.q(1)
       << "," << p.q(2) << ")"
       << " load=" << to_string(p.load) << " mesh_level=" << cfg.mesh_level
       << " base_h=" << sci(cfg.base_h) << " h=" << sci(m.h)
       << " mesh_hash=" << mesh_content_hash(m) << " kappa0=" << sci(cfg.kappa0)
       << " shrink=" << sci(cfg.shrink) << " stop_tol=" << sci(batch_stop_tol(cfg))
       << " q_exp=" << sci(cfg.q_exp) << " newton_tol=" << sci(cfg.newton_tol)
       << " newton_max_iter=" << cfg.newton_max_iter;
    return os.str();
}

inline std::ofstream open_csv(const std::string& dir, const std::string& name)
{
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open output file '" + path + "'");
    return os;
}

} // namespace detail

struct Batch1Row {
    Real kappa;
    Real cauchy_error;
};

// Penalty-parameter continuation at a fixed mesh; rows are written (and
// flushed) as they are produced, so a failed run leaves a partial CSV.
inline std::vector<Batch1Row> run_batch1(const ExperimentConfig& cfg)
{
    ModelParams p = default_model();
    const TriMesh m = mesh_for_level(cfg);
    const DofMap d = build_dofmap(m);

    std::ofstream os = detail::open_csv(cfg.out_dir, "batch1_level" + std::to_string(cfg.mesh_level) + ".csv");
    os << detail::config_comment(cfg, p, m) << "\n";
    os << "kappa,cauchy_error\n";

    std::vector<Batch1Row> rows;
    auto on_step = [&](const KappaStep& step) {
        if (!std::isfinite(step.cauchy_error))
            return; // the first solve has no predecessor
        rows.push_back({step.kappa, step.cauchy_error});
        os << detail::sci(step.kappa) << "," << detail::sci(step.cauchy_error) << "\n";
        os.flush();
    };
    kappa_continuation(m, d, p, cfg.kappa0, cfg.shrink, batch_stop_tol(cfg), cfg.max_kappa_steps,
                       cfg.newton_tol, cfg.newton_max_iter, on_step);
    return rows;
}

struct Batch2Row {
    Real h_coarse;
    Real h_fine;
    Real error;
};

struct Batch2Result {
    std::vector<Batch2Row> rows;
    int iterations = 0; // mesh pairs evaluated before the stopping criterion fired
    bool stopped = false;
};

// Nested-mesh Cauchy errors under the kappa = h^q coupling. Each mesh is
// solved once with kappa tied to its own diameter; consecutive solutions
// are compared in H1 after exact prolongation.
inline Batch2Result run_batch2(const ExperimentConfig& cfg)
{
    if (!(cfg.q_exp > 0.0) || !(cfg.q_exp < 4.0 / 3.0))
        throw std::invalid_argument("run_batch2: q_exp must lie in (0, 4/3)");
    const Real stop_tol = batch_stop_tol(cfg);

    ModelParams p = default_model();
    std::ostringstream qs;
    qs << cfg.q_exp;
    std::ofstream os = detail::open_csv(cfg.out_dir, "batch2_q" + qs.str() + ".csv");

    TriMesh coarse = mesh_for_level(cfg);
    os << detail::config_comment(cfg, p, coarse) << "\n";
    os << "h_coarse,h_fine,error\n";

    DofMap d_coarse = build_dofmap(coarse);
    p.kappa = std::pow(coarse.h, cfg.q_exp);
    auto [s_coarse, rep0] = newton_solve(coarse, d_coarse, p, State::zero(d_coarse),
                                         cfg.newton_tol, cfg.newton_max_iter);
    if (!rep0.converged)
        throw std::runtime_error("run_batch2: Newton failed on the initial mesh");

    Batch2Result result;
    for (int pair = 1; pair <= cfg.max_pairs; ++pair) {
        TriMesh fine = refine(coarse);
        DofMap d_fine = build_dofmap(fine);
        p.kappa = std::pow(fine.h, cfg.q_exp);
        State warm{prolong(coarse, s_coarse.coeffs, fine)};
        for (int dof : d_fine.constrained)
            warm.coeffs(dof) = 0.0;
        auto [s_fine, rep] = newton_solve(fine, d_fine, p, warm, cfg.newton_tol,
                                          cfg.newton_max_iter);
        if (!rep.converged)
            throw std::runtime_error("run_batch2: Newton failed at h = " + std::to_string(fine.h));

        const Real err = h1_error(coarse, s_coarse, fine, s_fine);
        result.rows.push_back({coarse.h, fine.h, err});
        result.iterations = pair;
        os << detail::sci(coarse.h) << "," << detail::sci(fine.h) << "," << detail::sci(err)
           << "\n";
        os.flush();

        coarse = std::move(fine);
        d_coarse = std::move(d_fine);
        s_coarse = std::move(s_fine);
        if (err < stop_tol) {
            result.stopped = true;
            break;
        }
    }
    return result;
}

struct Batch3Row {
    int ell;
    Real contact;
};

// Contact-area growth under the increasing load family, with one VTK
// snapshot of the deformed surface per load index.
inline std::vector<Batch3Row> run_batch3(const ExperimentConfig& cfg)
{
    ModelParams p = default_model();
    const TriMesh m = mesh_for_level(cfg);
    const DofMap d = build_dofmap(m);
    p.kappa = std::pow(m.h, cfg.q_exp);
    const Real tol_contact = cfg.contact_tol >= 0.0 ? cfg.contact_tol
                                                    : default_contact_tol(p.immersion, p.kappa);

    std::ofstream os = detail::open_csv(cfg.out_dir, "batch3_contact.csv");
    os << detail::config_comment(cfg, p, m) << " contact_tol=" << detail::sci(tol_contact) << "\n";
    os << "ell,contact_area\n";

    std::vector<Batch3Row> rows;
    State init = State::zero(d);
    for (int ell : cfg.ell) {
        if (ell < 0)
            throw std::invalid_argument("run_batch3: ell must be nonnegative");
        p.load = LoadProfile::contact(ell);
        auto [s, rep] = newton_solve(m, d, p, init, cfg.newton_tol, cfg.newton_max_iter);
        if (!rep.converged)
            throw std::runtime_error("run_batch3: Newton failed at ell = " + std::to_string(ell));
        const Real area = contact_area(m, d, s, p.immersion, p.q, tol_contact);
        rows.push_back({ell, area});
        os << ell << "," << detail::sci(area) << "\n";
        os.flush();
        std::filesystem::create_directories(cfg.out_dir);
        export_vtk(m, d, s, p, cfg.out_dir + "/surface_ell" + std::to_string(ell) + ".vtk");
        init = std::move(s); // warm start the next load level
    }
    return rows;
}

// Flat key=value configuration files; unknown keys are rejected so typos
// surface early. Command-line flags override file values.
inline void apply_config_file(const std::string& path, ExperimentConfig& cfg)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: missing '=' on line " + std::to_string(lineno));
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "mesh-level")
            cfg.mesh_level = std::stoi(value);
        else if (key == "base-h")
            cfg.base_h = std::stod(value);
        else if (key == "kappa0")
            cfg.kappa0 = std::stod(value);
        else if (key == "shrink")
            cfg.shrink = std::stod(value);
        else if (key == "stop-tol")
            cfg.stop_tol = std::stod(value);
        else if (key == "q-exp")
            cfg.q_exp = std::stod(value);
        else if (key == "max-pairs")
            cfg.max_pairs = std::stoi(value);
        else if (key == "max-kappa-steps")
            cfg.max_kappa_steps = std::stoi(value);
        else if (key == "newton-tol")
            cfg.newton_tol = std::stod(value);
        else if (key == "newton-max-iter")
            cfg.newton_max_iter = std::stoi(value);
        else if (key == "contact-tol")
            cfg.contact_tol = std::stod(value);
        else if (key == "out")
            cfg.out_dir = value;
        else if (key == "ell") {
            cfg.ell.clear();
            std::stringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                cfg.ell.push_back(std::stoi(tok));
        } else
            throw std::runtime_error("config: unknown key '" + key + "' on line "
                                     + std::to_string(lineno));
    }
}

} // namespace shellvi

#endif
