#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "shellvi/forms.hpp"
#include "test_helpers.hpp"

using namespace shellvi;
using namespace shellvi::testing;

TEST_CASE("gamma_tilde basics")
{
    const GeometryEval g = eval_geometry(cap(), Vec2(0.1, -0.2));
    FieldJet zero;
    CHECK(gamma_tilde(g, zero).norm() == 0.0);

    FieldJet constant;
    constant.value = Vec3(0.3, -0.7, 1.1);
    CHECK(gamma_tilde(g, constant).norm() == 0.0);
}

TEST_CASE("coincidence of the intrinsic and covariant metric tensors")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(21);
    Real worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 y = random_disk_point(rng);
        const GeometryEval g = eval_geometry(spec, y);
        const GeometryDerivs gd = eval_geometry_derivs(spec, y);
        const QuadraticField f = QuadraticField::random(rng);
        const Mat2 gt = gamma_tilde(g, f.jet(y));
        const Mat2 gc = gamma_covariant(g, covariant_jet(f, g, gd, y));
        worst = std::max(worst, (gt - gc).lpNorm<Eigen::Infinity>());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("rho_tilde linearity and symmetry")
{
    const GeometryEval g = eval_geometry(cap(), Vec2(0.2, 0.05));
    std::mt19937 rng(5);
    const QuadraticField f1 = QuadraticField::random(rng);
    const QuadraticField f2 = QuadraticField::random(rng);
    const Vec2 y(-0.1, 0.3);

    FieldJet zero;
    CHECK(rho_tilde(g, zero, zero).norm() == 0.0);

    const FieldJet e1 = f1.jet(y), x1 = f2.jet(y);
    const Mat2 r = rho_tilde(g, e1, x1);
    CHECK(r(0, 1) == r(1, 0));

    // homogeneity: scaling both arguments scales the output
    const Real c = -2.75;
    FieldJet ec = e1, xc = x1;
    ec.value *= c;
    ec.grad *= c;
    xc.value *= c;
    xc.grad *= c;
    CHECK((rho_tilde(g, ec, xc) - c * r).lpNorm<Eigen::Infinity>() <= 1e-14);

    // additivity
    const FieldJet e2 = f2.jet(y), x2 = f1.jet(y);
    FieldJet es = e1, xs = x1;
    es.value += e2.value;
    es.grad += e2.grad;
    xs.value += x2.value;
    xs.grad += x2.grad;
    const Mat2 sum = rho_tilde(g, e1, x1) + rho_tilde(g, e2, x2);
    CHECK((rho_tilde(g, es, xs) - sum).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("coincidence of the intrinsic and covariant curvature tensors")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(33);
    Real worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Vec2 y = random_disk_point(rng);
        const GeometryEval g = eval_geometry(spec, y);
        const GeometryDerivs gd = eval_geometry_derivs(spec, y);
        const QuadraticField f = QuadraticField::random(rng);
        const FieldJet eta = f.jet(y);
        const FieldJet xi = compatible_rotation(f, g, gd, y);
        const Mat2 rt = rho_tilde(g, eta, xi);
        const Mat2 rc = rho_covariant(g, gd, covariant_jet(f, g, gd, y));
        worst = std::max(worst, (rt - rc).lpNorm<Eigen::Infinity>());

        // and both agree with the defining expression
        Mat2 rdef;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                Vec3 v = f.deriv2(a, b);
                for (int s = 0; s < 2; ++s)
                    v -= g.christoffel[s](a, b) * f.deriv(y, s);
                rdef(a, b) = v.dot(g.a_cov[2]);
            }
        worst = std::max(worst, (rt - rdef).lpNorm<Eigen::Infinity>());
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("covariant tensors in the flat limit")
{
    const GeometryEval flat = flat_geometry(Vec2(0.0, 0.0));
    const GeometryDerivs no_curvature{}; // all derivative arrays zero

    CovariantJet cj;
    cj.eta = Vec3(0.0, 0.0, 0.0);
    cj.grad_eta << 0.5, -1.0, 0.0, 2.0, 0.25, 0.0;
    cj.hess_eta3 << 1.0, 0.5, 0.5, -2.0;

    const Mat2 gc = gamma_covariant(flat, cj);
    CHECK(gc(0, 0) == Catch::Approx(0.5));
    CHECK(gc(1, 1) == Catch::Approx(0.25));
    CHECK(gc(0, 1) == Catch::Approx(0.5 * (-1.0 + 2.0)));

    GeometryDerivs gd = no_curvature;
    for (auto& per_dir : gd.d_cov_basis)
        for (auto& v : per_dir)
            v = Vec3::Zero();
    for (auto& per_dir : gd.d_con_basis)
        for (auto& v : per_dir)
            v = Vec3::Zero();
    gd.db_mixed = {Mat2::Zero(), Mat2::Zero()};
    for (auto& row : gd.d2_normal)
        for (auto& v : row)
            v = Vec3::Zero();
    const Mat2 rc = rho_covariant(flat, gd, cj);
    CHECK((rc - cj.hess_eta3).lpNorm<Eigen::Infinity>() == 0.0);

    // constant transverse displacement: gamma = -c * b
    const GeometryEval g = eval_geometry(cap(), Vec2(0.15, 0.22));
    CovariantJet transverse;
    transverse.eta = Vec3(0.0, 0.0, 3.5);
    CHECK((gamma_covariant(g, transverse) + 3.5 * g.b_lower).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("beta operator laws")
{
    const ImmersionSpec spec = cap();
    const Vec3 q(0.0, 0.0, 1.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<Real> unif(-0.5, 0.5);

    SECTION("rest configuration gives zero")
    {
        for (int trial = 0; trial < 100; ++trial) {
            const Vec2 y = random_disk_point(rng);
            const GeometryEval g = eval_geometry(spec, y);
            CHECK(beta_pointwise(g, Vec3::Zero(), q).norm() == 0.0);
        }
    }

    SECTION("monotone and 1-Lipschitz on random pairs")
    {
        Real worst_lip = 0.0, worst_mono = 0.0;
        for (int trial = 0; trial < 1000; ++trial) {
            const Vec2 y = random_disk_point(rng);
            const GeometryEval g = eval_geometry(spec, y);
            const Vec3 xi(unif(rng), unif(rng), unif(rng));
            const Vec3 eta(unif(rng), unif(rng), unif(rng));
            const Vec3 bx = beta_pointwise(g, xi, q);
            const Vec3 be = beta_pointwise(g, eta, q);
            worst_lip = std::max(worst_lip, (bx - be).norm() - (xi - eta).norm());
            worst_mono = std::min(worst_mono, (bx - be).dot(xi - eta));
        }
        CHECK(worst_lip <= 1e-12);
        CHECK(worst_mono >= -1e-12);
    }

    SECTION("vanishes whenever the constraint holds")
    {
        for (int trial = 0; trial < 200; ++trial) {
            const Vec2 y = random_disk_point(rng);
            const GeometryEval g = eval_geometry(spec, y);
            const Vec3 xi(unif(rng), unif(rng), unif(rng));
            const Vec3 disp = xi(0) * g.a_con[0] + xi(1) * g.a_con[1] + xi(2) * g.a_con[2];
            if ((g.theta + disp).dot(q) >= 0.0)
                CHECK(beta_pointwise(g, xi, q).norm() == 0.0);
        }
    }
}

TEST_CASE("obstacle penalty density and tangent")
{
    const GeometryEval g = eval_geometry(cap(), Vec2(0.1, 0.1));
    const Vec3 q(0.0, 0.0, 1.0);

    SECTION("inactive above the plane")
    {
        FieldJet zeta;
        zeta.value = Vec3(0.0, 0.0, 0.1 - g.theta(2));
        Vec3 density;
        Mat3 tangent;
        obstacle_penalty(g, zeta, q, density, tangent);
        CHECK(density.norm() == 0.0);
        CHECK(tangent.norm() == 0.0);
    }

    SECTION("active below the plane")
    {
        FieldJet zeta;
        zeta.value = Vec3(0.0, 0.0, -0.2 - g.theta(2));
        Vec3 density;
        Mat3 tangent;
        obstacle_penalty(g, zeta, q, density, tangent);
        CHECK((density - Vec3(0.0, 0.0, -0.2)).lpNorm<Eigen::Infinity>() <= 1e-15);
        Mat3 expected = Mat3::Zero();
        expected(2, 2) = 1.0;
        CHECK((tangent - expected).norm() == 0.0);
    }

    SECTION("1-Lipschitz in the transverse displacement")
    {
        std::mt19937 rng(9);
        std::uniform_real_distribution<Real> unif(-0.4, 0.4);
        Real worst = 0.0;
        for (int trial = 0; trial < 500; ++trial) {
            FieldJet za, zb;
            za.value = Vec3(unif(rng), unif(rng), unif(rng));
            zb.value = Vec3(unif(rng), unif(rng), unif(rng));
            Vec3 da, db;
            Mat3 ta, tb;
            obstacle_penalty(g, za, q, da, ta);
            obstacle_penalty(g, zb, q, db, tb);
            worst = std::max(worst, (da - db).norm() - std::abs((za.value - zb.value).dot(q)));
        }
        CHECK(worst <= 1e-12);
    }

    SECTION("tangent matches finite differences away from the kink")
    {
        std::mt19937 rng(17);
        std::uniform_real_distribution<Real> unif(-0.3, 0.3);
        const Real step = 1e-7;
        Real worst = 0.0;
        int checked = 0;
        for (int trial = 0; trial < 400; ++trial) {
            FieldJet z;
            z.value = Vec3(unif(rng), unif(rng), unif(rng));
            if (std::abs((g.theta + z.value).dot(q)) < 1e-3)
                continue; // stay away from the kink
            ++checked;
            Vec3 d0;
            Mat3 t0;
            obstacle_penalty(g, z, q, d0, t0);
            for (int c = 0; c < 3; ++c) {
                FieldJet zp = z, zm = z;
                zp.value(c) += step;
                zm.value(c) -= step;
                Vec3 dp, dm;
                Mat3 tp, tm;
                obstacle_penalty(g, zp, q, dp, tp);
                obstacle_penalty(g, zm, q, dm, tm);
                const Vec3 fd = (dp - dm) / (2.0 * step);
                const Vec3 an = t0.col(c);
                const Real scale = std::max(1.0, an.norm());
                worst = std::max(worst, (fd - an).norm() / scale);
            }
        }
        REQUIRE(checked > 100);
        CHECK(worst <= 1e-5);
    }

    SECTION("tangent is PSD")
    {
        std::mt19937 rng(23);
        std::uniform_real_distribution<Real> unif(-1.0, 1.0);
        for (int trial = 0; trial < 100; ++trial) {
            FieldJet z;
            z.value = Vec3(unif(rng), unif(rng), unif(rng));
            Vec3 d;
            Mat3 t;
            obstacle_penalty(g, z, q, d, t);
            const Vec3 v(unif(rng), unif(rng), unif(rng));
            CHECK(v.dot(t * v) >= 0.0);
        }
    }
}

TEST_CASE("rotation penalty residual")
{
    const ImmersionSpec spec = cap();
    std::mt19937 rng(29);
    const Vec2 y(0.12, -0.31);
    const GeometryEval g = eval_geometry(spec, y);
    const GeometryDerivs gd = eval_geometry_derivs(spec, y);
    const QuadraticField f = QuadraticField::random(rng);

    SECTION("compatible pair vanishes")
    {
        const FieldJet zeta = f.jet(y);
        const FieldJet phi = compatible_rotation(f, g, gd, y);
        CHECK(rotation_penalty(g, zeta, phi).lpNorm<Eigen::Infinity>() <= 1e-12);
    }

    SECTION("zero displacement returns the rotation itself")
    {
        FieldJet zeta;
        FieldJet phi;
        phi.value = Vec3(0.4, -0.6, 0.9);
        CHECK((rotation_penalty(g, zeta, phi) - phi.value).norm() == 0.0);
    }

    SECTION("additivity")
    {
        const QuadraticField f2 = QuadraticField::random(rng);
        const FieldJet z1 = f.jet(y), z2 = f2.jet(y);
        const FieldJet p1 = f2.jet(y), p2 = f.jet(y);
        FieldJet zs = z1, ps = p1;
        zs.value += z2.value;
        zs.grad += z2.grad;
        ps.value += p2.value;
        ps.grad += p2.grad;
        const Vec3 sum = rotation_penalty(g, z1, p1) + rotation_penalty(g, z2, p2);
        CHECK((rotation_penalty(g, zs, ps) - sum).lpNorm<Eigen::Infinity>() <= 1e-13);
    }
}

TEST_CASE("stress resultants")
{
    const GeometryEval flat = flat_geometry(Vec2(0.0, 0.0));
    const Real mu = 0.012, eps = 0.001;
    const Elast4 C0 = elasticity_tensor(flat, 0.0, mu);

    Mat2 n, m;
    stress_resultants(C0, Mat2::Zero(), Mat2::Zero(), eps, n, m);
    CHECK(n.norm() == 0.0);
    CHECK(m.norm() == 0.0);

    stress_resultants(C0, Mat2::Identity(), Mat2::Zero(), eps, n, m);
    CHECK(n(0, 0) == Catch::Approx(4.8e-5).epsilon(1e-12)); // eps * 4 mu
    CHECK(n(0, 1) == Catch::Approx(0.0).margin(1e-18));

    // eps-homogeneity: n scales linearly, m cubically
    const GeometryEval g = eval_geometry(cap(), Vec2(0.2, -0.1));
    const Elast4 C = elasticity_tensor(g, 0.4, mu);
    Mat2 gam, rho;
    gam << 0.3, -0.1, -0.1, 0.7;
    rho << -0.2, 0.5, 0.5, 0.1;
    Mat2 n1, m1, n2, m2;
    stress_resultants(C, gam, rho, eps, n1, m1);
    stress_resultants(C, gam, rho, 2.0 * eps, n2, m2);
    CHECK((n2 - 2.0 * n1).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK((m2 - 8.0 * m1).lpNorm<Eigen::Infinity>() <= 1e-15);
    CHECK((n1 - n1.transpose()).norm() == 0.0);
    CHECK((m1 - m1.transpose()).norm() == 0.0);

    CHECK_THROWS_AS(stress_resultants(C, gam, rho, 0.0, n1, m1), std::invalid_argument);
}
