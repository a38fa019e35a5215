#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ps/metrics.hpp"
#include "ps/render.hpp"
#include "ps/scene.hpp"
#include "support/oracles.hpp"

using namespace ps;

TEST_CASE("angle_between at the landmarks") {
    const Vector3 ex(1, 0, 0), ey(0, 1, 0);
    CHECK(angle_between(ex, ex) == 0.0);
    CHECK(angle_between(ex, ey) == std::numbers::pi / 2);
    CHECK(angle_between(ex, Vector3(-1, 0, 0)) == std::numbers::pi);
    // scale invariance
    CHECK(angle_between(3.0 * ex, 0.25 * ey) == std::numbers::pi / 2);
    CHECK_THROWS_AS(angle_between(Vector3::Zero(), ex), ValidationError);
    CHECK_THROWS_AS(angle_between(ex, Vector3::Zero()), ValidationError);
}

TEST_CASE("angle_between stays accurate for tiny angles") {
    for (double theta : {1e-6, 1e-9, 1e-12}) {
        const Vector3 a(1, 0, 0);
        const Vector3 b(std::cos(theta), std::sin(theta), 0);
        const double got = angle_between(a, b);
        CHECK(std::abs(got - theta) <= 1e-6 * theta);
    }
    // and for angles near pi, where acos also loses accuracy
    const double eps = 1e-9;
    const Vector3 a(1, 0, 0);
    const Vector3 b(-std::cos(eps), std::sin(eps), 0);
    CHECK(std::abs(angle_between(a, b) - (std::numbers::pi - eps)) <= 1e-14);
}

TEST_CASE("procrustes recovers a planted gauge") {
    oracle::Rng rng(2);
    const Matrix L = oracle::random_unit_lights(rng, 8, 0.3, 1.4);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix3 Q0 = oracle::random_orthogonal(rng);
        const Matrix est = Q0.transpose() * L; // Q0 undoes the gauge exactly

        const AlignmentResult res = procrustes_align(est, L);
        CHECK_FALSE(res.degenerate);
        CHECK(res.residual <= 1e-12 * L.norm());
        CHECK(res.max_angle_rad <= 1e-12);
        CHECK(res.mean_angle_rad <= res.max_angle_rad);
        CHECK((res.Q - Q0).cwiseAbs().maxCoeff() <= 1e-12);
        // orthogonality invariant
        CHECK((res.Q.transpose() * res.Q - Matrix3::Identity())
                  .cwiseAbs()
                  .maxCoeff() <= 1e-12);
    }
}

TEST_CASE("identical sets align with the identity") {
    oracle::Rng rng(9);
    const Matrix L = oracle::random_unit_lights(rng, 6, 0.4, 1.3);
    const AlignmentResult res = procrustes_align(L, L);
    CHECK((res.Q - Matrix3::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(res.residual <= 1e-13 * L.norm());
    CHECK(res.max_angle_rad <= 1e-12);
}

TEST_CASE("procrustes beats random orthogonal competitors") {
    oracle::Rng rng(31);
    const Matrix L = oracle::random_unit_lights(rng, 7, 0.4, 1.3);
    // a noisy estimate in a random gauge
    Matrix est = oracle::random_orthogonal(rng) * L;
    for (int t = 0; t < est.cols(); ++t)
        for (int i = 0; i < 3; ++i) est(i, t) += 0.05 * rng.gaussian();

    const AlignmentResult res = procrustes_align(est, L);
    for (int trial = 0; trial < 200; ++trial) {
        const Matrix3 Q = oracle::random_orthogonal(rng);
        const double competitor = (Q * est - L).norm();
        CHECK(res.residual <= competitor + 1e-12);
    }
}

TEST_CASE("alignment error is invariant under re-gauging the estimate") {
    oracle::Rng rng(12);
    const Matrix L = oracle::random_unit_lights(rng, 9, 0.4, 1.3);
    Matrix est = oracle::random_orthogonal(rng) * L;
    for (int t = 0; t < est.cols(); ++t)
        for (int i = 0; i < 3; ++i) est(i, t) += 0.02 * rng.gaussian();

    const AlignmentResult base = procrustes_align(est, L);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix3 Qp = oracle::random_orthogonal(rng);
        const AlignmentResult re = procrustes_align((Qp * est).eval(), L);
        CHECK(std::abs(re.max_angle_rad - base.max_angle_rad) <= 1e-10);
        CHECK(std::abs(re.residual - base.residual) <= 1e-10);
    }
}

TEST_CASE("reflected gauges are recovered, or refused when restricted") {
    oracle::Rng rng(22);
    const Matrix L = oracle::random_unit_lights(rng, 8, 0.4, 1.3);
    Matrix3 R0 = oracle::random_orthogonal(rng);
    if (R0.determinant() > 0.0) R0.col(2) *= -1.0; // force a reflection
    REQUIRE(R0.determinant() < 0.0);
    const Matrix est = R0.transpose() * L;

    const AlignmentResult full = procrustes_align(est, L, true);
    CHECK(full.residual <= 1e-12 * L.norm());
    CHECK(full.Q.determinant() == doctest::Approx(-1.0).epsilon(1e-12));

    const AlignmentResult rot = procrustes_align(est, L, false);
    CHECK(rot.Q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rot.residual >= full.residual);
    CHECK((rot.Q.transpose() * rot.Q - Matrix3::Identity())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
}

TEST_CASE("degenerate cross-covariances are flagged, not fatal") {
    Matrix L(3, 4);
    for (int t = 0; t < 4; ++t) L.col(t) = Vector3(1, 0, 0); // rank 1
    const AlignmentResult res = procrustes_align(L, L);
    CHECK(res.degenerate);
    CHECK((res.Q.transpose() * res.Q - Matrix3::Identity())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
}

TEST_CASE("procrustes validates its inputs") {
    oracle::Rng rng(3);
    const Matrix L = oracle::random_unit_lights(rng, 4, 0.4, 1.2);
    CHECK_THROWS_AS(procrustes_align(L.leftCols(2).eval(), L), ValidationError);
    CHECK_THROWS_AS(procrustes_align(L, L.leftCols(3).eval()), ValidationError);
    CHECK_THROWS_AS(
        procrustes_align((Matrix::Ones(2, 4)).eval(), L), ValidationError);
    Matrix bad = L;
    bad(1, 1) = std::nan("");
    CHECK_THROWS_AS(procrustes_align(bad, L), ValidationError);
}

TEST_CASE("surface rmse: exact cases") {
    const Grid g = make_grid(12, 10, 2.0);
    const HeightField u = make_surface(g, GaussianBump{0.0, 0.0, 0.3, 0.5});

    CHECK(surface_rmse(u, u, false) == 0.0);
    CHECK(surface_rmse(u, u, true) == 0.0);

    HeightField shifted = u;
    shifted.values.array() += 0.01;
    CHECK(surface_rmse(shifted, u, false) ==
          doctest::Approx(0.01).epsilon(1e-12));
    // normalization divides by the peak reference height
    const double peak = u.values.cwiseAbs().maxCoeff();
    CHECK(surface_rmse(shifted, u, true) ==
          doctest::Approx(0.01 / peak).epsilon(1e-12));
}

TEST_CASE("surface rmse is a metric on a fixed grid") {
    const Grid g = make_grid(10, 10, 1.0);
    oracle::Rng rng(44);
    HeightField a{g, Vector(g.pixel_count())};
    HeightField b{g, Vector(g.pixel_count())};
    HeightField c{g, Vector(g.pixel_count())};
    for (int k = 0; k < g.pixel_count(); ++k) {
        a.values[k] = rng.gaussian();
        b.values[k] = rng.gaussian();
        c.values[k] = rng.gaussian();
    }
    // symmetry
    CHECK(surface_rmse(a, b, false) ==
          doctest::Approx(surface_rmse(b, a, false)).epsilon(1e-14));
    // triangle inequality
    CHECK(surface_rmse(a, c, false) <=
          surface_rmse(a, b, false) + surface_rmse(b, c, false) + 1e-14);
    // identity of indiscernibles
    CHECK(surface_rmse(a, a, false) == 0.0);
}

TEST_CASE("surface rmse validates grids and normalization") {
    const Grid g = make_grid(8, 8, 1.0);
    const Grid g2 = make_grid(8, 9, 1.0);
    const HeightField u{g, Vector::Zero(g.pixel_count())};
    const HeightField v{g2, Vector::Zero(g2.pixel_count())};
    CHECK_THROWS_AS(surface_rmse(u, v, false), ValidationError);

    const HeightField w{g, Vector::Ones(g.pixel_count())};
    CHECK_THROWS_AS(surface_rmse(w, u, true), ValidationError); // zero reference
    CHECK(surface_rmse(w, u, false) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spectrum report captures the numerical rank story") {
    const Grid g = make_grid(40, 40, 2.02);
    const SurfaceField sf = normals_from_height(make_surface(g, MultiPeak{}));
    const LightSet lights = make_light_ring(7, 1.5);
    const ImageStack clean = render(sf, lights, g).stack;

    const SpectrumReport rep = spectrum_report(clean);
    REQUIRE(rep.sigma.size() == 7);
    for (int i = 1; i < 7; ++i) CHECK(rep.sigma(i) <= rep.sigma(i - 1));
    CHECK(rep.ratio_4_1 <= 1e-10);  // Lambertian data has numerical rank 3
    CHECK(rep.ratio_3_1 >= 1e-3);   // and genuinely excites three dimensions

    // energy identity: sum of squared singular values is ||M||_F^2
    CHECK(rep.sigma.squaredNorm() ==
          doctest::Approx(clean.values.squaredNorm()).epsilon(1e-10));

    SUBCASE("ten percent noise lifts the fourth value into the known band") {
        const ImageStack noisy = add_noise(clean, 0.1, 5);
        const SpectrumReport nrep = spectrum_report(noisy);
        CHECK(nrep.ratio_4_1 >= 1e-3);
        CHECK(nrep.ratio_4_1 <= 1e-1);
    }

    SUBCASE("a flat scene is numerically rank one") {
        const SurfaceField flat =
            normals_from_height(make_surface(g, FlatSurface{}));
        const ImageStack stack = render(flat, lights, g).stack;
        const SpectrumReport frep = spectrum_report(stack);
        CHECK(frep.sigma(1) <= 1e-12 * frep.sigma(0));
    }
}
