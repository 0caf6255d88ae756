// Analytic midsurface geometry: the spherical-cap chart, its first and
// second fundamental forms, Christoffel symbols, Weingarten map, and the
// shell elasticity tensor. All quantities come from closed-form
// derivatives of the height function; nothing is finite-differenced.

#ifndef SHELLVI_GEOMETRY_HPP
#define SHELLVI_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <stdexcept>

#include "shellvi/core.hpp"

namespace shellvi {

enum class ChartId { spherical_cap };

struct ImmersionSpec {
    ChartId chart_id = ChartId::spherical_cap;
    Real R = 1.0;              // sphere radius
    Real vertical_offset = 0.85;
    Real domain_radius = 0.5;  // r_A = R/2
};

// theta(y) = (y1, y2, sqrt(R^2 - |y|^2) - offset) over the disk of radius R/2.
// The offset must leave the rest surface strictly above the plane {x3 = 0}.
inline ImmersionSpec spherical_cap_chart(Real R, Real offset)
{
    if (!(R > 0.0))
        throw std::invalid_argument("spherical_cap_chart: R must be positive");
    if (!(offset > 0.0))
        throw std::invalid_argument("spherical_cap_chart: offset must be positive");
    // rest height at the rim is sqrt(R^2 - (R/2)^2) - offset; offset >= R
    // already puts the apex at or below the obstacle plane
    if (!(offset < R))
        throw std::invalid_argument("spherical_cap_chart: offset >= R, rest surface would touch or cross the obstacle plane");
    ImmersionSpec spec;
    spec.chart_id = ChartId::spherical_cap;
    spec.R = R;
    spec.vertical_offset = offset;
    spec.domain_radius = 0.5 * R;
    return spec;
}

namespace detail {

// Height function of the cap and its derivatives up to third order.
struct HeightJet3 {
    Real f;
    Vec2 df;                          // df(a) = d_a f
    Mat2 d2f;                         // d2f(a,b)
    std::array<Mat2, 2> d3f;          // d3f[c](a,b) = d_c d_a d_b f
};

inline HeightJet3 cap_height_jet(const ImmersionSpec& spec, const Vec2& y)
{
    const Real r2 = y.squaredNorm();
    const Real w2 = spec.R * spec.R - r2;
    if (!(w2 > 0.0))
        throw std::invalid_argument("eval_geometry: chart height undefined at this point");
    const Real w = std::sqrt(w2);
    const Real w3 = w * w2;
    const Real w5 = w3 * w2;

    HeightJet3 j;
    j.f = w - spec.vertical_offset;
    for (int a = 0; a < 2; ++a)
        j.df(a) = -y(a) / w;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            j.d2f(a, b) = -((a == b ? 1.0 : 0.0) / w + y(a) * y(b) / w3);
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Real kron = (a == b ? y(c) : 0.0) + (a == c ? y(b) : 0.0) + (b == c ? y(a) : 0.0);
                j.d3f[c](a, b) = -kron / w3 - 3.0 * y(a) * y(b) * y(c) / w5;
            }
    return j;
}

} // namespace detail

/// Pointwise geometric data of the midsurface at a parameter point.
struct GeometryEval {
    Vec2 y;
    Vec3 theta;
    std::array<Vec3, 3> a_cov;   // covariant basis a_1, a_2, a_3
    std::array<Vec3, 3> a_con;   // contravariant basis a^1, a^2, a^3
    Mat2 a_lower;                // a_{alpha beta}
    Mat2 a_upper;                // a^{alpha beta}
    Mat2 b_lower;                // b_{alpha beta}
    Mat2 b_mixed;                // b_mixed(s, a) = b^s_a
    std::array<Mat2, 2> christoffel; // christoffel[s](a, b) = Gamma^s_{ab}
    Real sqrt_a;
    std::array<Vec3, 2> d_normal; // d_normal[a] = d_a a_3
    Real gauss_K;
};

inline Vec3 chart_position(const ImmersionSpec& spec, const Vec2& y)
{
    const Real w2 = spec.R * spec.R - y.squaredNorm();
    if (!(w2 > 0.0))
        throw std::invalid_argument("chart_position: point outside the chart");
    return Vec3(y(0), y(1), std::sqrt(w2) - spec.vertical_offset);
}

inline GeometryEval eval_geometry(const ImmersionSpec& spec, const Vec2& y)
{
    const Real rA = spec.domain_radius;
    if (y.norm() > rA * (1.0 + 1e-12))
        throw std::invalid_argument("eval_geometry: point outside the closed parameter disk");

    const detail::HeightJet3 j = detail::cap_height_jet(spec, y);

    GeometryEval g;
    g.y = y;
    g.theta = Vec3(y(0), y(1), j.f);

    g.a_cov[0] = Vec3(1.0, 0.0, j.df(0));
    g.a_cov[1] = Vec3(0.0, 1.0, j.df(1));

    const Real t = j.df.squaredNorm();
    const Real a_det = 1.0 + t;
    g.sqrt_a = std::sqrt(a_det);
    g.a_cov[2] = Vec3(-j.df(0), -j.df(1), 1.0) / g.sqrt_a;

    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            g.a_lower(a, b) = (a == b ? 1.0 : 0.0) + j.df(a) * j.df(b);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            g.a_upper(a, b) = (a == b ? 1.0 : 0.0) - j.df(a) * j.df(b) / a_det;

    // tangential contravariant vectors a^alpha = a^{alpha beta} a_beta
    for (int a = 0; a < 2; ++a)
        g.a_con[a] = g.a_upper(a, 0) * g.a_cov[0] + g.a_upper(a, 1) * g.a_cov[1];
    g.a_con[2] = g.a_cov[2];

    g.b_lower = j.d2f / g.sqrt_a;
    g.b_mixed = g.a_upper * g.b_lower;

    for (int s = 0; s < 2; ++s)
        g.christoffel[s] = j.d2f * (j.df(s) / a_det);

    // Weingarten relation d_a a_3 = -b^s_a a_s
    for (int a = 0; a < 2; ++a)
        g.d_normal[a] = -(g.b_mixed(0, a) * g.a_cov[0] + g.b_mixed(1, a) * g.a_cov[1]);

    g.gauss_K = g.b_lower.determinant() / g.a_lower.determinant();
    return g;
}

/// Higher-order chart data used by the covariant change-of-curvature
/// formula and by cross-check oracles: derivatives of the bases and of
/// the mixed second fundamental form.
struct GeometryDerivs {
    std::array<std::array<Vec3, 3>, 2> d_cov_basis; // d_cov_basis[a][i] = d_a a_i
    std::array<std::array<Vec3, 3>, 2> d_con_basis; // d_con_basis[a][i] = d_a a^i
    std::array<Mat2, 2> db_mixed;                   // db_mixed[a](s, b) = d_a b^s_b
    std::array<std::array<Vec3, 2>, 2> d2_normal;   // d2_normal[a][b] = d_a d_b a_3
};

inline GeometryDerivs eval_geometry_derivs(const ImmersionSpec& spec, const Vec2& y)
{
    const GeometryEval g = eval_geometry(spec, y);
    const detail::HeightJet3 j = detail::cap_height_jet(spec, y);

    const Real a_det = 1.0 + j.df.squaredNorm();
    const Real s = g.sqrt_a;

    Vec2 da;     // da(c) = d_c det(a)
    Vec2 ds;     // ds(c) = d_c sqrt(a)
    for (int c = 0; c < 2; ++c) {
        da(c) = 2.0 * (j.df(0) * j.d2f(0, c) + j.df(1) * j.d2f(1, c));
        ds(c) = 0.5 * da(c) / s;
    }

    GeometryDerivs d;
    for (int c = 0; c < 2; ++c) {
        for (int b = 0; b < 2; ++b)
            d.d_cov_basis[c][b] = Vec3(0.0, 0.0, j.d2f(c, b));
        d.d_cov_basis[c][2] = g.d_normal[c];
    }

    // d_c b_{ab} and d_c a^{ab}
    std::array<Mat2, 2> db_lower, da_upper;
    for (int c = 0; c < 2; ++c) {
        db_lower[c] = j.d3f[c] / s - j.d2f * (ds(c) / (s * s));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                da_upper[c](a, b) = -(j.d2f(a, c) * j.df(b) + j.df(a) * j.d2f(b, c)) / a_det
                                    + j.df(a) * j.df(b) * da(c) / (a_det * a_det);
    }
    for (int c = 0; c < 2; ++c)
        d.db_mixed[c] = da_upper[c] * g.b_lower + g.a_upper * db_lower[c];

    // d_c a^s = -Gamma^s_{ct} a^t + b^s_c a_3
    for (int c = 0; c < 2; ++c) {
        for (int sidx = 0; sidx < 2; ++sidx)
            d.d_con_basis[c][sidx] = -(g.christoffel[sidx](c, 0) * g.a_con[0] + g.christoffel[sidx](c, 1) * g.a_con[1])
                                     + g.b_mixed(sidx, c) * g.a_cov[2];
        d.d_con_basis[c][2] = g.d_normal[c];
    }

    // d_b(d_a a_3) = -(d_b b^s_a) a_s - b^s_a d_b a_s
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Vec3 v = Vec3::Zero();
            for (int sidx = 0; sidx < 2; ++sidx)
                v -= d.db_mixed[b](sidx, a) * g.a_cov[sidx] + g.b_mixed(sidx, a) * d.d_cov_basis[b][sidx];
            d.d2_normal[a][b] = v;
        }
    return d;
}

/// Fourth-order shell elasticity tensor in contravariant components.
struct Elast4 {
    std::array<Real, 16> c{};

    Real& at(int a, int b, int s, int t) { return c[((a * 2 + b) * 2 + s) * 2 + t]; }
    Real at(int a, int b, int s, int t) const { return c[((a * 2 + b) * 2 + s) * 2 + t]; }

    // (C : t)^{ab} = a^{ab st} t_{st}
    Mat2 contract(const Mat2& t) const
    {
        Mat2 out;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Real v = 0.0;
                for (int s = 0; s < 2; ++s)
                    for (int tt = 0; tt < 2; ++tt)
                        v += at(a, b, s, tt) * t(s, tt);
                out(a, b) = v;
            }
        return out;
    }
};

// a^{ab st} = (4 lambda mu / (lambda + 2 mu)) a^{ab} a^{st}
//           + 2 mu (a^{as} a^{bt} + a^{at} a^{bs})
inline Elast4 elasticity_tensor(const GeometryEval& g, Real lambda, Real mu)
{
    if (!(mu > 0.0))
        throw std::invalid_argument("elasticity_tensor: mu must be positive");
    if (lambda < 0.0)
        throw std::invalid_argument("elasticity_tensor: lambda must be nonnegative");
    const Real coef = 4.0 * lambda * mu / (lambda + 2.0 * mu);
    const Mat2& au = g.a_upper;
    Elast4 e;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int s = 0; s < 2; ++s)
                for (int t = 0; t < 2; ++t)
                    e.at(a, b, s, t) = coef * au(a, b) * au(s, t)
                                       + 2.0 * mu * (au(a, s) * au(b, t) + au(a, t) * au(b, s));
    return e;
}

} // namespace shellvi

#endif
