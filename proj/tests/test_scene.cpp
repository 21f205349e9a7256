#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <specorr/scene.hpp>

using namespace specorr;

TEST_CASE("ball and annulus membership near the edges") {
    Ball<2> b{{0.0, 0.0}, 0.5};
    CHECK(b.contains({0.0, 0.0}));
    CHECK(b.contains({0.5 - 1e-9, 0.0}));
    CHECK_FALSE(b.contains({0.5, 0.0}));  // boundary is outside
    CHECK_FALSE(b.contains({0.5 + 1e-9, 0.0}));

    AnnularRegion<2> a{{0.0, 0.0}, 0.1, 0.3};
    CHECK_FALSE(a.contains({0.1 - 1e-9, 0.0}));
    CHECK(a.contains({0.1, 0.0}));  // inner edge included
    CHECK(a.contains({0.2, 0.0}));
    CHECK(a.contains({0.3 - 1e-9, 0.0}));
    CHECK_FALSE(a.contains({0.3, 0.0}));  // outer edge excluded
}

TEST_CASE("shift field membership and displacement profiles") {
    ShiftField<2> f;
    f.regime = ShiftRegime::Large;
    f.support.push_back({{0.0, 0.0}, 0.1, 0.3});
    f.profile = ShiftProfile::Bump;
    f.amplitude = 2.0;

    CHECK(f.contains({0.2, 0.0}));
    CHECK_FALSE(f.contains({0.05, 0.0}));
    CHECK(f.outer_radius() == 0.3);

    // bump vanishes at both edges, peaks mid-band
    Vec<2> zero_in = f.psi({0.1, 0.0});
    CHECK(std::abs(zero_in[0]) < 1e-14);
    Vec<2> mid = f.psi({0.2, 0.0});
    CHECK(mid[0] == Catch::Approx(2.0).epsilon(1e-13));  // 16 (1/2)^2 (1/2)^2 = 1, doubled
    CHECK(std::abs(mid[1]) < 1e-15);

    // outside the support the displacement is zero
    Vec<2> out = f.psi({0.5, 0.5});
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);
}

TEST_CASE("uniform profile is divergence-free, constant-radial follows (D-1) A / r") {
    ShiftField<2> u;
    u.regime = ShiftRegime::Small;
    u.support.push_back({{0.0, 0.0}, 0.0, 0.4});
    u.profile = ShiftProfile::Uniform;
    u.uniform_dir = {0.0, 1.0};
    u.amplitude = 3.0;
    CHECK(u.divergence({0.1, 0.1}) == 0.0);
    Vec<2> d = u.psi({0.1, 0.1});
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 3.0);

    ShiftField<2> c2;
    c2.regime = ShiftRegime::Small;
    c2.support.push_back({{0.0, 0.0}, 0.1, 0.5});
    c2.profile = ShiftProfile::ConstantRadial;
    c2.amplitude = 1.5;
    CHECK(c2.divergence({0.2, 0.0}) == Catch::Approx(1.5 / 0.2).epsilon(1e-13));

    ShiftField<3> c3;
    c3.regime = ShiftRegime::Small;
    c3.support.push_back({{0.0, 0.0, 0.0}, 0.1, 0.5});
    c3.profile = ShiftProfile::ConstantRadial;
    c3.amplitude = 1.5;
    CHECK(c3.divergence({0.0, 0.2, 0.0}) == Catch::Approx(2.0 * 1.5 / 0.2).epsilon(1e-13));
}

TEST_CASE("bump divergence against a finite-difference oracle") {
    ShiftField<2> f;
    f.regime = ShiftRegime::Small;
    f.support.push_back({{0.1, -0.2}, 0.05, 0.45});
    f.profile = ShiftProfile::Bump;
    f.amplitude = 0.7;

    const double h = 1e-6;
    for (Vec<2> x : {Vec<2>{0.3, -0.2}, Vec<2>{0.1, 0.05}, Vec<2>{-0.15, -0.3}}) {
        if (!f.contains(x)) continue;
        double fd = 0.0;
        for (int a = 0; a < 2; ++a) {
            Vec<2> xp = x, xm = x;
            xp[a] += h;
            xm[a] -= h;
            fd += (f.psi(xp)[a] - f.psi(xm)[a]) / (2.0 * h);
        }
        CHECK(f.divergence(x) == Catch::Approx(fd).margin(1e-6));
    }

    ShiftField<3> f3;
    f3.regime = ShiftRegime::Small;
    f3.support.push_back({{0.0, 0.0, 0.0}, 0.1, 0.5});
    f3.profile = ShiftProfile::Bump;
    f3.amplitude = 1.0;
    Vec<3> x3{0.15, 0.2, -0.1};
    double fd3 = 0.0;
    for (int a = 0; a < 3; ++a) {
        Vec<3> xp = x3, xm = x3;
        xp[a] += h;
        xm[a] -= h;
        fd3 += (f3.psi(xp)[a] - f3.psi(xm)[a]) / (2.0 * h);
    }
    CHECK(f3.divergence(x3) == Catch::Approx(fd3).margin(1e-6));
}

TEST_CASE("behavior at the support center") {
    ShiftField<2> c;
    c.regime = ShiftRegime::Small;
    c.support.push_back({{0.0, 0.0}, 0.0, 0.3});
    c.profile = ShiftProfile::ConstantRadial;
    CHECK_THROWS_AS(c.divergence({0.0, 0.0}), InvalidInput);

    ShiftField<2> b = c;
    b.profile = ShiftProfile::Bump;
    // the radial direction is undefined at the origin but the bump vanishes
    Vec<2> p = b.psi({0.0, 0.0});
    CHECK(p[0] == 0.0);
    CHECK(p[1] == 0.0);
    CHECK(b.divergence({0.0, 0.0}) == 0.0);
}

TEST_CASE("expanding wavefront becomes a sequence of annular bands") {
    auto seq = wavefront_sequence<2>({0.0, 0.0}, {0.1, 0.3, 0.5}, 0.1, ShiftRegime::Large);
    REQUIRE(seq.size() == 3);

    // first instant: the full disk of radius 0.1 (inner edge clamps to 0)
    REQUIRE(seq[0].support.size() == 1);
    CHECK(seq[0].support[0].r_inner == 0.0);
    CHECK(seq[0].support[0].r_outer == 0.1);
    CHECK(seq[0].regime == ShiftRegime::Large);

    // second instant: the front has moved farther than its own thickness,
    // so the previous band and the leading band stay separate
    REQUIRE(seq[1].support.size() == 2);
    CHECK(seq[1].support[0].r_inner == 0.0);
    CHECK(seq[1].support[0].r_outer == 0.1);
    CHECK(seq[1].support[1].r_inner == Catch::Approx(0.2));
    CHECK(seq[1].support[1].r_outer == 0.3);

    // single radius with thickness covering the center: one full disk
    auto disk = wavefront_sequence<2>({0.0, 0.0}, {0.2}, 0.2, ShiftRegime::Large);
    REQUIRE(disk.size() == 1);
    REQUIRE(disk[0].support.size() == 1);
    CHECK(disk[0].support[0].r_inner == 0.0);
    CHECK(disk[0].support[0].r_outer == 0.2);
}

TEST_CASE("wavefront sequence validation") {
    CHECK(wavefront_sequence<2>({0.0, 0.0}, {}, 0.1, ShiftRegime::Large).empty());
    CHECK_THROWS_AS(wavefront_sequence<2>({0.0, 0.0}, {0.3, 0.2}, 0.1, ShiftRegime::Large),
                    InvalidInput);
    CHECK_THROWS_AS(wavefront_sequence<2>({0.0, 0.0}, {-0.1, 0.2}, 0.1, ShiftRegime::Large),
                    InvalidInput);
    CHECK_THROWS_AS(wavefront_sequence<2>({0.0, 0.0}, {0.1}, 0.0, ShiftRegime::Large),
                    InvalidInput);
}

TEST_CASE("scene face indexing and normals") {
    CHECK(Scene<2>::face_axis(0) == 0);
    CHECK(Scene<2>::face_side(0) == 0);
    CHECK(Scene<2>::face_axis(3) == 1);
    CHECK(Scene<2>::face_side(3) == 1);

    Scene<2> s2;
    Vec<2> n0 = s2.outward_normal(0);
    CHECK(n0[0] == -1.0);
    CHECK(n0[1] == 0.0);
    Scene<3> s3;
    Vec<3> n5 = s3.outward_normal(5);
    CHECK(n5[2] == 1.0);
}

TEST_CASE("scene validation catches bad setups") {
    Scene<2> s;
    s.lo = {-1.0, -1.0};
    s.hi = {1.0, 1.0};
    s.illuminated = {0};
    s.measured = {1};
    CHECK_NOTHROW(s.validate());

    SECTION("intersecting boundary roles") {
        s.measured = {0};
        CHECK_THROWS_WITH(s.validate(),
                          "scene: illuminated and measured boundaries intersect");
    }
    SECTION("empty domain") {
        s.hi[0] = -2.0;
        CHECK_THROWS_AS(s.validate(), InvalidScene);
    }
    SECTION("face index out of range") {
        s.measured = {4};
        CHECK_THROWS_AS(s.validate(), InvalidScene);
    }
    SECTION("no illuminated face") {
        s.illuminated = {};
        CHECK_THROWS_AS(s.validate(), InvalidScene);
    }
    SECTION("aperture outside (0, pi/2]") {
        s.aperture_half_angle = 0.0;
        CHECK_THROWS_AS(s.validate(), InvalidScene);
    }
    SECTION("absorber outside the box") {
        s.absorbers.push_back({{5.0, 0.0}, 0.1});
        CHECK_THROWS_AS(s.validate(), InvalidScene);
    }
}

TEST_CASE("gap between radii produces two disjoint bands") {
    // leading band [0.5, 0.6) separates from the trailing band around 0.2
    auto seq = wavefront_sequence<2>({0.0, 0.0}, {0.2, 0.6}, 0.1, ShiftRegime::Moderate);
    REQUIRE(seq.size() == 2);
    REQUIRE(seq[1].support.size() == 2);
    CHECK(seq[1].support[0].r_inner == Catch::Approx(0.1));
    CHECK(seq[1].support[0].r_outer == Catch::Approx(0.2));
    CHECK(seq[1].support[1].r_inner == Catch::Approx(0.5));
    CHECK(seq[1].support[1].r_outer == Catch::Approx(0.6));

    // a point in the gap is untouched at the later instant
    CHECK_FALSE(seq[1].contains({0.35, 0.0}));
    CHECK(seq[1].contains({0.15, 0.0}));
    CHECK(seq[1].contains({0.55, 0.0}));
}
