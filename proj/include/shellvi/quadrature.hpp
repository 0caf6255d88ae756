// Symmetric Gauss rules on the reference triangle, in barycentric
// coordinates. Weights sum to one; multiply by the element area.

#ifndef SHELLVI_QUADRATURE_HPP
#define SHELLVI_QUADRATURE_HPP

#include <array>
#include <vector>

#include "shellvi/core.hpp"

namespace shellvi {

struct QuadPoint {
    std::array<Real, 3> bary;
    Real weight;
};

struct TriQuadRule {
    std::vector<QuadPoint> points;
    int degree = 0;
};

// 6-point rule, exact for degree 4.
inline const TriQuadRule& quad_degree4()
{
    static const TriQuadRule rule = [] {
        TriQuadRule r;
        r.degree = 4;
        const Real a = 0.445948490915965;
        const Real wa = 0.223381589678011;
        const Real b = 0.091576213509771;
        const Real wb = 0.109951743655322;
        for (int i = 0; i < 3; ++i) {
            std::array<Real, 3> pa = {a, a, a};
            pa[i] = 1.0 - 2.0 * a;
            r.points.push_back({pa, wa});
            std::array<Real, 3> pb = {b, b, b};
            pb[i] = 1.0 - 2.0 * b;
            r.points.push_back({pb, wb});
        }
        return r;
    }();
    return rule;
}

// 12-point rule, exact for degree 6.
inline const TriQuadRule& quad_degree6()
{
    static const TriQuadRule rule = [] {
        TriQuadRule r;
        r.degree = 6;
        const Real a = 0.249286745170910;
        const Real wa = 0.116786275726379;
        const Real b = 0.063089014491502;
        const Real wb = 0.050844906370207;
        for (int i = 0; i < 3; ++i) {
            std::array<Real, 3> pa = {a, a, a};
            pa[i] = 1.0 - 2.0 * a;
            r.points.push_back({pa, wa});
            std::array<Real, 3> pb = {b, b, b};
            pb[i] = 1.0 - 2.0 * b;
            r.points.push_back({pb, wb});
        }
        const Real c0 = 0.053145049844816;
        const Real c1 = 0.310352451033785;
        const Real c2 = 0.636502499121399;
        const Real wc = 0.082851075618374;
        const std::array<std::array<Real, 3>, 6> perms = {{{c0, c1, c2},
                                                           {c0, c2, c1},
                                                           {c1, c0, c2},
                                                           {c1, c2, c0},
                                                           {c2, c0, c1},
                                                           {c2, c1, c0}}};
        for (const auto& p : perms)
            r.points.push_back({p, wc});
        return r;
    }();
    return rule;
}

} // namespace shellvi

#endif
