// P1 triangulations of the parameter disk: deterministic ring-based
// generation, uniform red refinement with boundary projection, degree-of-
// freedom numbering (6 scalar fields per vertex), nodal interpolation,
// and a minimal ASCII exchange format.

#ifndef SHELLVI_MESH_HPP
#define SHELLVI_MESH_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "shellvi/core.hpp"

namespace shellvi {

struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<char> boundary_vertex;
    Real h = 0.0;      // max element diameter
    int level = 0;     // refinement generation
    Real radius = 0.0; // circle radius of the boundary
};

inline Real triangle_signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2)
{
    return 0.5 * ((p1(0) - p0(0)) * (p2(1) - p0(1)) - (p1(1) - p0(1)) * (p2(0) - p0(0)));
}

inline Real mesh_diameter(const TriMesh& m)
{
    Real h = 0.0;
    for (const auto& t : m.triangles) {
        const Vec2& p0 = m.vertices[t[0]];
        const Vec2& p1 = m.vertices[t[1]];
        const Vec2& p2 = m.vertices[t[2]];
        h = std::max(h, (p1 - p0).norm());
        h = std::max(h, (p2 - p1).norm());
        h = std::max(h, (p0 - p2).norm());
    }
    return h;
}

// max over elements of h_T / rho_T, rho_T the diameter of the inscribed circle
inline Real shape_regularity(const TriMesh& m)
{
    Real worst = 0.0;
    for (const auto& t : m.triangles) {
        const Vec2& p0 = m.vertices[t[0]];
        const Vec2& p1 = m.vertices[t[1]];
        const Vec2& p2 = m.vertices[t[2]];
        const Real e0 = (p1 - p0).norm();
        const Real e1 = (p2 - p1).norm();
        const Real e2 = (p0 - p2).norm();
        const Real hT = std::max({e0, e1, e2});
        const Real area = std::abs(triangle_signed_area(p0, p1, p2));
        const Real rhoT = 4.0 * area / (e0 + e1 + e2);
        worst = std::max(worst, hT / rhoT);
    }
    return worst;
}

// max over elements of h / h_T (the inverse-assumption constant)
inline Real inverse_assumption_constant(const TriMesh& m)
{
    Real hmin = std::numeric_limits<Real>::max();
    for (const auto& t : m.triangles) {
        const Vec2& p0 = m.vertices[t[0]];
        const Vec2& p1 = m.vertices[t[1]];
        const Vec2& p2 = m.vertices[t[2]];
        const Real hT = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
        hmin = std::min(hmin, hT);
    }
    return m.h / hmin;
}

// Concentric rings of vertices joined by triangles: ring k carries 6k
// vertices at radius k*(radius/n), so elements are near-equilateral and
// the construction is deterministic for fixed inputs.
inline TriMesh disk_mesh(Real radius, Real target_h)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("disk_mesh: radius must be positive");
    if (!(target_h > 0.0) || !(target_h < radius))
        throw std::invalid_argument("disk_mesh: target_h must lie in (0, radius)");

    const int n = std::max(1, static_cast<int>(std::ceil(1.1 * radius / target_h)));
    const Real dr = radius / n;

    TriMesh m;
    m.radius = radius;
    m.vertices.emplace_back(0.0, 0.0);
    m.boundary_vertex.push_back(0);

    auto ring_start = [](int k) { return 1 + 3 * k * (k - 1); };
    for (int k = 1; k <= n; ++k) {
        const int cnt = 6 * k;
        const Real rk = k * dr;
        for (int jj = 0; jj < cnt; ++jj) {
            const Real ang = 2.0 * M_PI * jj / cnt;
            m.vertices.emplace_back(rk * std::cos(ang), rk * std::sin(ang));
            m.boundary_vertex.push_back(k == n ? 1 : 0);
        }
    }
    // boundary vertices are placed on the exact circle; re-normalize to
    // absorb the trig roundoff
    for (std::size_t v = 0; v < m.vertices.size(); ++v)
        if (m.boundary_vertex[v])
            m.vertices[v] *= radius / m.vertices[v].norm();

    for (int i = 0; i < 6; ++i)
        m.triangles.push_back({ring_start(1) + i, ring_start(1) + (i + 1) % 6, 0});
    for (int k = 2; k <= n; ++k) {
        const int out0 = ring_start(k);
        const int in0 = ring_start(k - 1);
        const int outc = 6 * k;
        const int inc = 6 * (k - 1);
        for (int s = 0; s < 6; ++s) {
            auto O = [&](int i) { return out0 + (s * k + i) % outc; };
            auto I = [&](int i) { return in0 + (s * (k - 1) + i) % inc; };
            for (int i = 0; i < k; ++i)
                m.triangles.push_back({O(i), O(i + 1), I(i)});
            for (int i = 0; i + 1 < k; ++i)
                m.triangles.push_back({I(i), O(i + 1), I(i + 1)});
        }
    }

    m.h = mesh_diameter(m);
    m.level = 0;
    return m;
}

// Provenance of a refinement vertex: the bisected edge and one parent
// triangle containing it (used for exact P1 prolongation).
struct RefineVertexOrigin {
    int v0, v1;
    int parent_tri;
};

inline TriMesh refine_with_provenance(const TriMesh& m, std::vector<RefineVertexOrigin>* origins)
{
    TriMesh out;
    out.radius = m.radius;
    out.level = m.level + 1;
    out.vertices = m.vertices;
    out.boundary_vertex = m.boundary_vertex;

    const auto nv = static_cast<std::int64_t>(m.vertices.size());
    auto edge_key = [nv](int a, int b) {
        return static_cast<std::int64_t>(std::min(a, b)) * nv + std::max(a, b);
    };

    std::unordered_map<std::int64_t, int> edge_count;
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e)
            ++edge_count[edge_key(t[e], t[(e + 1) % 3])];

    std::unordered_map<std::int64_t, int> midpoint;
    if (origins)
        origins->clear();
    auto get_mid = [&](int a, int b, int tri) {
        const auto key = edge_key(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end())
            return it->second;
        Vec2 p = 0.5 * (m.vertices[a] + m.vertices[b]);
        const bool on_boundary = edge_count.at(key) == 1;
        if (on_boundary)
            p *= m.radius / p.norm();
        const int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(p);
        out.boundary_vertex.push_back(on_boundary ? 1 : 0);
        midpoint.emplace(key, idx);
        if (origins)
            origins->push_back({a, b, tri});
        return idx;
    };

    out.triangles.reserve(4 * m.triangles.size());
    for (std::size_t ti = 0; ti < m.triangles.size(); ++ti) {
        const auto& t = m.triangles[ti];
        const int m01 = get_mid(t[0], t[1], static_cast<int>(ti));
        const int m12 = get_mid(t[1], t[2], static_cast<int>(ti));
        const int m20 = get_mid(t[2], t[0], static_cast<int>(ti));
        out.triangles.push_back({t[0], m01, m20});
        out.triangles.push_back({m01, t[1], m12});
        out.triangles.push_back({m20, m12, t[2]});
        out.triangles.push_back({m01, m12, m20});
    }

    out.h = mesh_diameter(out);
    return out;
}

inline TriMesh refine(const TriMesh& m)
{
    return refine_with_provenance(m, nullptr);
}

inline void save_mesh(const TriMesh& m, const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("save_mesh: cannot open '" + path + "'");
    os << "vertices " << m.vertices.size() << " triangles " << m.triangles.size() << "\n";
    char buf[80];
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", m.vertices[v](0), m.vertices[v](1),
                      int(m.boundary_vertex[v]));
        os << buf;
    }
    for (const auto& t : m.triangles)
        os << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!os)
        throw std::runtime_error("save_mesh: write failed for '" + path + "'");
}

inline TriMesh load_mesh(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("load_mesh: cannot open '" + path + "'");
    std::string tag1, tag2;
    std::size_t nv = 0, nt = 0;
    is >> tag1 >> nv >> tag2 >> nt;
    if (tag1 != "vertices" || tag2 != "triangles" || !is)
        throw std::runtime_error("load_mesh: bad header in '" + path + "'");
    TriMesh m;
    m.vertices.resize(nv);
    m.boundary_vertex.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        int flag = 0;
        is >> m.vertices[v](0) >> m.vertices[v](1) >> flag;
        m.boundary_vertex[v] = static_cast<char>(flag);
    }
    m.triangles.resize(nt);
    for (std::size_t t = 0; t < nt; ++t)
        is >> m.triangles[t][0] >> m.triangles[t][1] >> m.triangles[t][2];
    if (!is)
        throw std::runtime_error("load_mesh: truncated file '" + path + "'");
    m.h = mesh_diameter(m);
    for (std::size_t v = 0; v < nv; ++v)
        if (m.boundary_vertex[v])
            m.radius = std::max(m.radius, m.vertices[v].norm());
    return m;
}

// FNV-1a over the raw vertex/triangle data; identifies a mesh in output
// file headers.
inline std::string mesh_content_hash(const TriMesh& m)
{
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& v : m.vertices) {
        const Real c[2] = {v(0), v(1)};
        mix(c, sizeof(c));
    }
    for (const auto& t : m.triangles)
        mix(t.data(), sizeof(int) * 3);
    mix(m.boundary_vertex.data(), m.boundary_vertex.size());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Numbering of the six scalar unknowns per vertex: fields 0-2 hold the
/// displacement components, fields 3-5 the rotation-like field. All six
/// components are clamped on the boundary.
struct DofMap {
    static constexpr int fields_per_vertex = 6;

    int n_vertices = 0;
    int n_dofs = 0;
    int n_free = 0;
    std::vector<int> free_index; // -1 for constrained dofs, else 0-based free numbering
    std::vector<int> constrained;

    int index(int vertex, int field) const { return fields_per_vertex * vertex + field; }
    std::pair<int, int> vertex_field(int dof) const
    {
        return {dof / fields_per_vertex, dof % fields_per_vertex};
    }
    bool is_constrained(int dof) const { return free_index[dof] < 0; }
};

inline DofMap build_dofmap(const TriMesh& m)
{
    DofMap d;
    d.n_vertices = static_cast<int>(m.vertices.size());
    d.n_dofs = DofMap::fields_per_vertex * d.n_vertices;
    d.free_index.assign(d.n_dofs, -1);
    int next = 0;
    for (int v = 0; v < d.n_vertices; ++v)
        for (int f = 0; f < DofMap::fields_per_vertex; ++f) {
            const int dof = d.index(v, f);
            if (m.boundary_vertex[v])
                d.constrained.push_back(dof);
            else
                d.free_index[dof] = next++;
        }
    d.n_free = next;
    return d;
}

// Nodal interpolation of a continuous 3-component field into the fields
// [field_offset, field_offset+3) of a full coefficient vector. Entries at
// boundary vertices receive the field's own boundary value.
inline void interpolate(const TriMesh& m, const DofMap& d,
                        const std::function<Vec3(const Vec2&)>& field, int field_offset,
                        VecX& coeffs)
{
    if (coeffs.size() != d.n_dofs)
        coeffs = VecX::Zero(d.n_dofs);
    for (int v = 0; v < d.n_vertices; ++v) {
        const Vec3 val = field(m.vertices[v]);
        for (int c = 0; c < 3; ++c)
            coeffs(d.index(v, field_offset + c)) = val(c);
    }
}

inline VecX interpolate(const TriMesh& m, const DofMap& d,
                        const std::function<Vec3(const Vec2&)>& zeta_field)
{
    VecX coeffs = VecX::Zero(d.n_dofs);
    interpolate(m, d, zeta_field, 0, coeffs);
    return coeffs;
}

} // namespace shellvi

#endif
