// The applied load profiles driving the experiments. The triple (0,0,g)
// is read as contravariant components, so the load field is g * a_3. The
// quadratic profile used by the convergence batches carries its thickness
// factor inside g; the contact-growth profile is multiplied by eps.

#ifndef SHELLVI_LOADS_HPP
#define SHELLVI_LOADS_HPP

#include <stdexcept>
#include <string>

#include "shellvi/core.hpp"

namespace shellvi {

struct LoadProfile {
    enum class Kind { batch12, batch3 };

    Kind kind = Kind::batch12;
    int ell = 0;       // batch3 load index; ell = 0 is the zero load
    Real scale = 1.0;  // overall multiplier, 1 for the production profiles

    static LoadProfile convergence()
    {
        return LoadProfile{Kind::batch12, 0, 1.0};
    }
    static LoadProfile contact(int ell)
    {
        if (ell < 0)
            throw std::invalid_argument("LoadProfile::contact: ell must be nonnegative");
        return LoadProfile{Kind::batch3, ell, 1.0};
    }
    static LoadProfile zero() { return LoadProfile{Kind::batch3, 0, 1.0}; }
};

// Contravariant transverse component multiplying a_3 (the tangential
// components vanish for every profile).
inline Real load_coefficient(const LoadProfile& p, Real eps, const Vec2& y)
{
    const Real r2 = y.squaredNorm();
    switch (p.kind) {
    case LoadProfile::Kind::batch12:
        if (r2 < 0.060)
            return p.scale * (-(eps / 10.0) * (-5.0 * r2 + 0.295));
        return 0.0;
    case LoadProfile::Kind::batch3: {
        const Real threshold = 0.0059 * p.ell;
        if (r2 < threshold)
            return p.scale * eps * 1.0e4 * (r2 - threshold);
        return 0.0;
    }
    }
    return 0.0;
}

inline std::string to_string(const LoadProfile& p)
{
    std::string s = (p.kind == LoadProfile::Kind::batch12) ? "batch12" : ("batch3:ell=" + std::to_string(p.ell));
    if (p.scale != 1.0)
        s += ":scale=" + std::to_string(p.scale);
    return s;
}

} // namespace shellvi

#endif
