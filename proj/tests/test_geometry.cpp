#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shellvi/geometry.hpp"
#include "test_helpers.hpp"

using namespace shellvi;
using shellvi::testing::cap;
using shellvi::testing::random_disk_point;

TEST_CASE("spherical cap chart construction")
{
    const ImmersionSpec spec = spherical_cap_chart(1.0, 0.85);
    CHECK(spec.domain_radius == 0.5);

    const Vec3 center = chart_position(spec, Vec2(0.0, 0.0));
    CHECK(center(0) == 0.0);
    CHECK(center(1) == 0.0);
    CHECK(center(2) == Catch::Approx(0.15).margin(1e-15));

    // third component at |y| = 0.5 by direct substitution
    const Vec3 rim = chart_position(spec, Vec2(0.5, 0.0));
    CHECK(rim(2) == Catch::Approx(std::sqrt(0.75) - 0.85).margin(1e-15));

    CHECK_THROWS_AS(spherical_cap_chart(1.0, 1.2), std::invalid_argument);
    CHECK_THROWS_AS(spherical_cap_chart(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(spherical_cap_chart(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(spherical_cap_chart(1.0, -0.2), std::invalid_argument);
}

TEST_CASE("geometry at the apex")
{
    const GeometryEval g = eval_geometry(cap(), Vec2(0.0, 0.0));
    CHECK((g.a_cov[0] - Vec3(1, 0, 0)).norm() == 0.0);
    CHECK((g.a_cov[1] - Vec3(0, 1, 0)).norm() == 0.0);
    CHECK((g.a_cov[2] - Vec3(0, 0, 1)).norm() == 0.0);
    CHECK((g.a_lower - Mat2::Identity()).norm() == 0.0);
    CHECK(g.sqrt_a == 1.0);
    // Gaussian curvature of a radius-1 sphere
    CHECK(g.gauss_K == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("Gaussian curvature cross-check by finite differences")
{
    // independent oracle: K = det(b)/det(a) built from second-order central
    // differences of the chart itself
    const ImmersionSpec spec = cap();
    const Real h = 1e-5;
    for (const Vec2 y : {Vec2(0.0, 0.0), Vec2(0.25, -0.1), Vec2(-0.3, 0.2)}) {
        std::array<Vec3, 2> t;
        Mat2 a_fd, b_fd;
        std::array<std::array<Vec3, 2>, 2> dd;
        for (int a = 0; a < 2; ++a) {
            Vec2 yp = y, ym = y;
            yp(a) += h;
            ym(a) -= h;
            t[a] = (chart_position(spec, yp) - chart_position(spec, ym)) / (2 * h);
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Vec2 ypp = y, ypm = y, ymp = y, ymm = y;
                ypp(a) += h; ypp(b) += h;
                ypm(a) += h; ypm(b) -= h;
                ymp(a) -= h; ymp(b) += h;
                ymm(a) -= h; ymm(b) -= h;
                dd[a][b] = (chart_position(spec, ypp) - chart_position(spec, ypm)
                            - chart_position(spec, ymp) + chart_position(spec, ymm))
                           / (4 * h * h);
            }
        const Vec3 n = t[0].cross(t[1]).normalized();
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                a_fd(a, b) = t[a].dot(t[b]);
                b_fd(a, b) = dd[a][b].dot(n);
            }
        const Real K_fd = b_fd.determinant() / a_fd.determinant();
        const GeometryEval g = eval_geometry(spec, y);
        CHECK(g.gauss_K == Catch::Approx(K_fd).epsilon(1e-5));
    }
}

TEST_CASE("basis identities on random points")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(101);
    Real worst_dual = 0, worst_inv = 0, worst_sym = 0, worst_wein = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Vec2 y = random_disk_point(rng, 0.5, 1e-6);
        const GeometryEval g = eval_geometry(spec, y);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                worst_dual = std::max(worst_dual,
                                      std::abs(g.a_con[j].dot(g.a_cov[i]) - (i == j ? 1.0 : 0.0)));
        worst_inv = std::max(worst_inv,
                             (g.a_upper * g.a_lower - Mat2::Identity()).lpNorm<Eigen::Infinity>());
        worst_sym = std::max(worst_sym, std::abs(g.b_lower(0, 1) - g.b_lower(1, 0)));
        for (int s = 0; s < 2; ++s)
            worst_sym = std::max(worst_sym,
                                 std::abs(g.christoffel[s](0, 1) - g.christoffel[s](1, 0)));
        for (int a = 0; a < 2; ++a) {
            const Vec3 r = g.d_normal[a] + g.b_mixed(0, a) * g.a_cov[0]
                           + g.b_mixed(1, a) * g.a_cov[1];
            worst_wein = std::max(worst_wein, r.lpNorm<Eigen::Infinity>());
        }
        // a_lower must be SPD
        CHECK(g.a_lower(0, 0) > 0.0);
        CHECK(g.a_lower.determinant() > 0.0);
    }
    CHECK(worst_dual <= 1e-10);
    CHECK(worst_inv <= 1e-10);
    CHECK(worst_sym <= 1e-10);
    CHECK(worst_wein <= 1e-10);
}

TEST_CASE("analytic derivatives of the chart match central differences")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(55);
    const Real h = 1e-5;
    for (int trial = 0; trial < 100; ++trial) {
        const Vec2 y = random_disk_point(rng, 0.5, 0.01);
        const GeometryEval g = eval_geometry(spec, y);
        for (int a = 0; a < 2; ++a) {
            Vec2 yp = y, ym = y;
            yp(a) += h;
            ym(a) -= h;
            const Vec3 fd1 = (chart_position(spec, yp) - chart_position(spec, ym)) / (2 * h);
            CHECK((fd1 - g.a_cov[a]).norm() <= 1e-6 * std::max(1.0, g.a_cov[a].norm()));
            // second derivative d_a a_b via differences of the analytic a_b
            const GeometryEval gp = eval_geometry(spec, yp);
            const GeometryEval gm = eval_geometry(spec, ym);
            for (int b = 0; b < 2; ++b) {
                const Vec3 fd2 = (gp.a_cov[b] - gm.a_cov[b]) / (2 * h);
                const Vec3 analytic = Vec3(0.0, 0.0, g.b_lower(a, b) * g.sqrt_a);
                CHECK((fd2 - analytic).norm() <= 1e-6 * std::max(1.0, analytic.norm()));
            }
        }
    }
}

TEST_CASE("elliptic surface: curvature bounded below on the closed disk")
{
    const ImmersionSpec spec = cap();
    Real K_min = std::numeric_limits<Real>::max();
    Real a_min = std::numeric_limits<Real>::max(), a_max = 0.0;
    for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
            Vec2 y(i / 80.0, j / 80.0);
            if (y.norm() > 0.5)
                y *= 0.5 / y.norm(); // push outside samples onto the rim
            const GeometryEval g = eval_geometry(spec, y);
            K_min = std::min(K_min, g.gauss_K);
            a_min = std::min(a_min, sq(g.sqrt_a));
            a_max = std::max(a_max, sq(g.sqrt_a));
        }
    CHECK(K_min > 0.9); // unit sphere: K = 1 everywhere
    CHECK(a_min >= 1.0 - 1e-12);
    CHECK(a_max <= 4.0 / 3.0 + 1e-12);
}

TEST_CASE("points outside the closed disk are rejected")
{
    CHECK_THROWS_AS(eval_geometry(cap(), Vec2(0.51, 0.0)), std::invalid_argument);
    CHECK_NOTHROW(eval_geometry(cap(), Vec2(0.5, 0.0))); // boundary is allowed
}

TEST_CASE("extended derivatives match finite differences")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(77);
    const Real h = 1e-6;
    Real worst = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Vec2 y = random_disk_point(rng, 0.5, 0.05);
        const GeometryDerivs gd = eval_geometry_derivs(spec, y);
        for (int a = 0; a < 2; ++a) {
            Vec2 yp = y, ym = y;
            yp(a) += h;
            ym(a) -= h;
            const GeometryEval gp = eval_geometry(spec, yp);
            const GeometryEval gm = eval_geometry(spec, ym);
            worst = std::max(worst, ((gp.b_mixed - gm.b_mixed) / (2 * h) - gd.db_mixed[a])
                                        .lpNorm<Eigen::Infinity>());
            for (int b = 0; b < 2; ++b)
                worst = std::max(worst, ((gp.d_normal[b] - gm.d_normal[b]) / (2 * h)
                                         - gd.d2_normal[b][a])
                                            .lpNorm<Eigen::Infinity>());
            for (int i = 0; i < 3; ++i)
                worst = std::max(worst, ((gp.a_con[i] - gm.a_con[i]) / (2 * h)
                                         - gd.d_con_basis[a][i])
                                            .lpNorm<Eigen::Infinity>());
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("elasticity tensor values and symmetries")
{
    const GeometryEval flat = shellvi::testing::flat_geometry(Vec2(0.0, 0.0));
    const Real lambda = 0.4, mu = 0.012;

    SECTION("reference values at the identity metric")
    {
        const Elast4 C = elasticity_tensor(flat, lambda, mu);
        CHECK(C.at(0, 0, 1, 1)
              == Catch::Approx(4.0 * lambda * mu / (lambda + 2.0 * mu)).epsilon(1e-14));
        CHECK(C.at(0, 0, 1, 1) == Catch::Approx(0.045283018867924).epsilon(1e-12));
        CHECK(C.at(0, 1, 0, 1) == Catch::Approx(2.0 * mu).epsilon(1e-14));
    }

    SECTION("lambda = 0 leaves the pure shear part")
    {
        const GeometryEval g = eval_geometry(cap(), Vec2(0.2, 0.3));
        const Elast4 C = elasticity_tensor(g, 0.0, mu);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < 2; ++t)
                        CHECK(C.at(a, b, s, t)
                              == 2.0 * mu
                                     * (g.a_upper(a, s) * g.a_upper(b, t)
                                        + g.a_upper(a, t) * g.a_upper(b, s)));
    }

    SECTION("index symmetries and positive definiteness")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<Real> unif(-1.0, 1.0);
        const GeometryEval g = eval_geometry(cap(), Vec2(-0.31, 0.12));
        const Elast4 C = elasticity_tensor(g, lambda, mu);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < 2; ++t) {
                        CHECK(C.at(a, b, s, t) == C.at(b, a, s, t));
                        CHECK(C.at(a, b, s, t) == C.at(a, b, t, s));
                        CHECK(C.at(a, b, s, t) == C.at(s, t, a, b));
                    }
        const Real lam_min = Eigen::SelfAdjointEigenSolver<Mat2>(g.a_upper).eigenvalues().minCoeff();
        for (int trial = 0; trial < 200; ++trial) {
            Mat2 t;
            t(0, 0) = unif(rng);
            t(1, 1) = unif(rng);
            t(0, 1) = t(1, 0) = unif(rng);
            const Real quad = ddot(C.contract(t), t);
            CHECK(quad >= 2.0 * mu * sq(lam_min) * t.squaredNorm() - 1e-14);
        }
    }

    SECTION("invalid moduli are rejected")
    {
        CHECK_THROWS_AS(elasticity_tensor(flat, 0.4, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(elasticity_tensor(flat, 0.4, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(elasticity_tensor(flat, -0.1, 0.012), std::invalid_argument);
    }
}
