#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nfsim/geometry.hpp"
#include "nfsim/random.hpp"

using namespace nfsim;

namespace {
constexpr double kLambda = 0.0857;  // 3.5 GHz carrier

Position3 centroid(const ArrayGeometry& g) {
    Position3 c;
    for (const auto& e : g.elements) {
        c.x += e.x;
        c.y += e.y;
        c.z += e.z;
    }
    const double n = static_cast<double>(g.size());
    return {c.x / n, c.y / n, c.z / n};
}
} // namespace

TEST_CASE("build_upa single element sits at the center") {
    const auto g = build_upa(1, 1, 0.1, {0, 0, 0});
    REQUIRE(g.size() == 1);
    CHECK(g.elements[0].x == 0.0);
    CHECK(g.elements[0].y == 0.0);
    CHECK(g.elements[0].z == 0.0);
}

TEST_CASE("build_upa 2x2 offsets are +-lambda/4 and centroid is the origin") {
    const auto g = build_upa(2, 2, kLambda / 2, {0, 0, 0});
    REQUIRE(g.size() == 4);
    for (const auto& e : g.elements) {
        CHECK(e.x == 0.0);
        CHECK(std::abs(std::abs(e.y) - kLambda / 4) < 1e-15);
        CHECK(std::abs(std::abs(e.z) - kLambda / 4) < 1e-15);
    }
    const auto c = centroid(g);
    CHECK(std::abs(c.x) < 1e-12);
    CHECK(std::abs(c.y) < 1e-12);
    CHECK(std::abs(c.z) < 1e-12);
}

TEST_CASE("build_upa element ordering is row-major with +y within a row") {
    const auto g = build_upa(2, 3, 0.5, {1, 2, 3});
    // consecutive same-row elements differ by exactly the spacing along y
    for (std::size_t r = 0; r < 2; ++r) {
        for (std::size_t c = 0; c + 1 < 3; ++c) {
            const auto& a = g.elements[r * 3 + c];
            const auto& b = g.elements[r * 3 + c + 1];
            CHECK(b.y - a.y == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(b.z == a.z);
        }
    }
}

TEST_CASE("build_upa rejects degenerate arguments") {
    CHECK_THROWS_AS(build_upa(0, 4, 0.1, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_upa(4, 0, 0.1, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_upa(2, 2, 0.0, {0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(build_upa(2, 2, -0.1, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("centroid equals center for a sweep of array sizes") {
    RandomStream rng(11);
    for (int trial = 0; trial < 24; ++trial) {
        const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 64));
        const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 64));
        const Position3 center{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const auto g = build_upa(rows, cols, kLambda / 2, center);
        const auto c = centroid(g);
        CHECK(std::abs(c.x - center.x) < 1e-12);
        CHECK(std::abs(c.y - center.y) < 1e-12);
        CHECK(std::abs(c.z - center.z) < 1e-12);
    }
}

TEST_CASE("aperture of a single element is zero") {
    CHECK(aperture(build_upa(1, 1, 0.3, {0, 0, 0})) == 0.0);
}

TEST_CASE("aperture of a 1x2 array equals the spacing") {
    CHECK(aperture(build_upa(1, 2, 0.37, {0, 0, 0})) == doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("aperture of the 32x32 half-wavelength array is about 1.88 m") {
    const auto g = build_upa(32, 32, kLambda / 2, {0, 0, 0});
    const double d = aperture(g);
    const double expected = 31.0 * (kLambda / 2) * std::sqrt(2.0);
    CHECK(d == doctest::Approx(expected).epsilon(1e-12));
    CHECK(d == doctest::Approx(1.879).epsilon(1e-3));
}

TEST_CASE("aperture is symmetric under a rows/cols swap") {
    RandomStream rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 16));
        const auto cols = static_cast<std::size_t>(rng.uniform_int(1, 16));
        const double s = rng.uniform(0.01, 0.5);
        const double a = aperture(build_upa(rows, cols, s, {0, 0, 0}));
        const double b = aperture(build_upa(cols, rows, s, {0, 0, 0}));
        CHECK(std::abs(a - b) < 1e-12);
    }
}

TEST_CASE("rayleigh_distance basics") {
    CHECK(rayleigh_distance(1.88, kLambda) == doctest::Approx(82.0).epsilon(0.01));
    CHECK(rayleigh_distance(0.0, 1.0) == 0.0);
    CHECK(rayleigh_distance(1.0, 0.1) == doctest::Approx(20.0).epsilon(1e-14));
    CHECK_THROWS_AS(rayleigh_distance(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_distance(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(rayleigh_distance(-1.0, 0.1), std::invalid_argument);
}

TEST_CASE("rayleigh_distance is monotone in aperture and wavelength") {
    RandomStream rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const double d = rng.uniform(0.1, 10.0);
        const double lam = rng.uniform(0.001, 1.0);
        const double delta = rng.uniform(0.01, 1.0);
        CHECK(rayleigh_distance(d + delta, lam) > rayleigh_distance(d, lam));
        CHECK(rayleigh_distance(d, lam + delta) < rayleigh_distance(d, lam));
    }
}

TEST_CASE("spherical_phase degenerate cases") {
    CHECK(spherical_phase(10.0, 0.3, 0.0, kLambda) == 0.0);
    const double r = 2.5;
    CHECK(spherical_phase(r, M_PI / 2, r, kLambda) ==
          doctest::Approx(-2.0 * M_PI * r / kLambda).epsilon(1e-12));
    CHECK_THROWS_AS(spherical_phase(0.0, 0.0, 0.1, kLambda), std::invalid_argument);
}

TEST_CASE("spherical_phase matches a high precision evaluation") {
    const double r = 10.0, q = 0.5, lam = kLambda;
    const long double rl = 10.0L, ql = 0.5L;
    const long double exact =
        (2.0L * 3.14159265358979323846264338327950288L / static_cast<long double>(lam)) *
        (std::sqrt(rl * rl + ql * ql) - rl);
    CHECK(spherical_phase(r, 0.0, q, lam) ==
          doctest::Approx(static_cast<double>(exact)).epsilon(1e-12));
}

TEST_CASE("planar_phase basics") {
    CHECK(planar_phase(0.7, 0.0, kLambda) == 0.0);
    CHECK(planar_phase(0.0, 0.3, kLambda) == 0.0);
    const double expected = (2.0 * M_PI / 0.1) * 0.1 * std::sin(M_PI / 6);
    CHECK(planar_phase(M_PI / 6, 0.1, 0.1) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("phase_error_approx basics and the pi/8 significance point") {
    CHECK(phase_error_approx(0.0, 0.2, 10.0, kLambda) == 0.0);
    CHECK(phase_error_approx(0.5, M_PI / 2, 10.0, kLambda) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(phase_error_approx(0.5, 0.0, 0.0, kLambda), std::invalid_argument);

    // Half the 32x32 aperture at the Rayleigh distance lands near pi/8.
    const double err = phase_error_approx(0.94, 0.0, 82.0, kLambda);
    CHECK(std::abs(err - M_PI / 8) < 0.25 * (M_PI / 8));
}

TEST_CASE("second-order phase error tracks the exact difference at boresight") {
    RandomStream rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const double q = rng.uniform(0.01, 2.0);
        const double r = rng.uniform(5.0 * q, 50.0 * q);
        const double lam = rng.uniform(0.01, 0.3);
        const double exact = spherical_phase(r, 0.0, q, lam) - planar_phase(0.0, q, lam);
        const double approx = phase_error_approx(q, 0.0, r, lam);
        CHECK(std::abs(approx - exact) <= 0.015 * std::abs(approx));
    }
}

TEST_CASE("geometric_features boresight and zenith") {
    const auto g = build_upa(1, 1, 0.1, {0, 0, 0});
    const auto f = geometric_features(g, {10, 0, 0});
    REQUIRE(f.count() == 1);
    CHECK(f.distance(0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(f.elevation(0) == 0.0);
    CHECK(f.azimuth(0) == 0.0);

    const auto fz = geometric_features(g, {0, 0, 10});
    CHECK(fz.elevation(0) == doctest::Approx(M_PI / 2).epsilon(1e-12));
}

TEST_CASE("geometric_features matches per-element brute force") {
    const auto g = build_upa(2, 2, 0.3, {0, 0, 0});
    const Position3 ue{5, 1, 1};
    const auto f = geometric_features(g, ue);
    REQUIRE(f.count() == 4);
    for (std::size_t n = 0; n < 4; ++n) {
        const auto& e = g.elements[n];
        const double dx = ue.x - e.x, dy = ue.y - e.y, dz = ue.z - e.z;
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        CHECK(std::abs(f.distance(n) - d) < 1e-12);
        CHECK(f.elevation(n) == doctest::Approx(std::asin(dz / d)).epsilon(1e-12));
        CHECK(f.azimuth(n) == doctest::Approx(std::atan2(dy, dx)).epsilon(1e-12));
    }
}

TEST_CASE("geometric_features distances equal independent Euclidean norms") {
    RandomStream rng(29);
    const auto g = build_upa(4, 4, 0.21, {0.5, -0.5, 1.0});
    for (int trial = 0; trial < 50; ++trial) {
        const Position3 ue{rng.uniform(2, 50), rng.uniform(-20, 20), rng.uniform(0, 2)};
        const auto f = geometric_features(g, ue);
        for (std::size_t n = 0; n < g.size(); ++n) {
            CHECK(std::abs(f.distance(n) - distance(g.elements[n], ue)) < 1e-12);
            CHECK(f.elevation(n) >= -M_PI / 2);
            CHECK(f.elevation(n) <= M_PI / 2);
            CHECK(f.azimuth(n) > -M_PI);
            CHECK(f.azimuth(n) <= M_PI);
        }
    }
}

TEST_CASE("geometric_features rejects coincident points") {
    const auto g = build_upa(1, 1, 0.1, {0, 0, 0});
    CHECK_THROWS_AS(geometric_features(g, {0, 0, 0}), std::invalid_argument);
}
