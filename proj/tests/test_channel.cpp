#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nfsim/channel.hpp"
#include "nfsim/random.hpp"

using namespace nfsim;

namespace {
constexpr double kLambda = 0.0857;
} // namespace

TEST_CASE("path_loss is one at the unit-gain distance") {
    const double d = kLambda / (4.0 * M_PI);
    CHECK(path_loss(d, kLambda) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("path_loss follows the inverse-square law") {
    CHECK(path_loss(20.0, kLambda) == doctest::Approx(path_loss(10.0, kLambda) / 4.0).epsilon(1e-12));
    CHECK(path_loss(10.0, kLambda) == doctest::Approx(4.65e-7).epsilon(1e-2));
    CHECK_THROWS_AS(path_loss(0.0, kLambda), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(-1.0, kLambda), std::invalid_argument);
    CHECK_THROWS_AS(path_loss(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("los_channel single element has unit magnitude at the unit-gain distance") {
    const double d = kLambda / (4.0 * M_PI);
    const auto g = build_upa(1, 1, 0.1, {0, 0, 0});
    const auto h = los_channel(g, {d, 0, 0}, kLambda);
    REQUIRE(h.size() == 1);
    CHECK(std::abs(h[0]) == doctest::Approx(1.0).epsilon(1e-12));
    const double expected_phase = wrap_angle(-2.0 * M_PI * d / kLambda);
    CHECK(wrap_angle(std::arg(h[0])) == doctest::Approx(expected_phase).epsilon(1e-9));
}

TEST_CASE("los_channel magnitudes equal sqrt(path_loss) per element") {
    const auto g = build_upa(4, 4, kLambda / 2, {0, 0, 0});
    const Position3 ue{12.0, 3.0, 0.7};
    const auto h = los_channel(g, ue, kLambda);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const double d = distance(g.elements[n], ue);
        CHECK(std::abs(std::abs(h[n]) - std::sqrt(path_loss(d, kLambda))) <
              1e-12 * std::abs(h[n]));
    }
}

TEST_CASE("los_channel respects mirror symmetry on boresight") {
    const auto g = build_upa(1, 4, kLambda / 2, {0, 0, 0});
    const auto h = los_channel(g, {10, 0, 0}, kLambda);
    // columns at -3s/2,-s/2,s/2,3s/2: mirror pairs share distances
    CHECK(std::abs(h[0] - h[3]) < 1e-15);
    CHECK(std::abs(h[1] - h[2]) < 1e-15);
}

TEST_CASE("los_channel rejects a coincident receiver") {
    const auto g = build_upa(1, 1, 0.1, {0, 0, 0});
    CHECK_THROWS_AS(los_channel(g, {0, 0, 0}, kLambda), std::invalid_argument);
}

TEST_CASE("mimo_channel 1x1 reduces to the los entry") {
    const auto a = build_upa(1, 1, 0.1, {0, 0, 0});
    const auto b = build_upa(1, 1, 0.1, {5, 1, 2});
    const auto g = mimo_channel(a, b, kLambda);
    const auto h = los_channel(a, b.elements[0], kLambda);
    REQUIRE(g.rows == 1);
    REQUIRE(g.cols == 1);
    CHECK(std::abs(g.at(0, 0) - h[0]) == 0.0);
}

TEST_CASE("mimo_channel transposes under endpoint swap") {
    const auto a = build_upa(2, 2, kLambda / 2, {0, 0, 0});
    const auto b = build_upa(1, 3, kLambda / 2, {8, 0, 4});
    const auto gab = mimo_channel(a, b, kLambda);
    const auto gba = mimo_channel(b, a, kLambda);
    REQUIRE(gab.rows == 3);
    REQUIRE(gab.cols == 4);
    for (std::size_t m = 0; m < gab.rows; ++m) {
        for (std::size_t n = 0; n < gab.cols; ++n) {
            CHECK(std::abs(gab.at(m, n) - gba.at(n, m)) == 0.0);
        }
    }
}

TEST_CASE("mimo_channel entries match per-pair brute force") {
    const auto a = build_upa(2, 2, 0.04, {0, 0, 0});
    const auto b = build_upa(2, 1, 0.017, {7, -1, 3});
    const auto g = mimo_channel(a, b, kLambda);
    for (std::size_t m = 0; m < b.size(); ++m) {
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double d = distance(b.elements[m], a.elements[n]);
            const Complex expected =
                std::polar(std::sqrt(path_loss(d, kLambda)), -2.0 * M_PI * d / kLambda);
            CHECK(std::abs(g.at(m, n) - expected) < 1e-15);
        }
    }
}

TEST_CASE("apply_blockage scales amplitude by the dB attenuation") {
    ComplexVector h{{1.0, 2.0}, {-0.5, 0.25}};
    CHECK(apply_blockage(h, false, 30.0) == h);
    CHECK(apply_blockage(h, true, 0.0) == h);
    const auto out = apply_blockage(h, true, 30.0);
    double power_in = 0.0, power_out = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        power_in += std::norm(h[i]);
        power_out += std::norm(out[i]);
    }
    CHECK(power_out == doctest::Approx(power_in / 1000.0).epsilon(1e-12));
}

TEST_CASE("effective_channel passes the direct link through for mode 1") {
    const auto bs = build_upa(2, 2, kLambda / 2, {0, 0, 0});
    const auto ris = build_upa(2, 2, kLambda / 5, {15, 0, 15});
    const auto cs = make_channel_set(bs, ris, {{20, 2, 0.5}}, kLambda);
    RisPhases phases;
    phases.angles.assign(4, 1.0);
    const auto h = effective_channel(cs.h_bd[0], cs.h_rd[0], cs.g_br, phases, 1);
    CHECK(h == cs.h_bd[0]);
}

TEST_CASE("effective_channel M=1 is the scalar cascade") {
    ComplexVector h_bd{{0, 0}, {0, 0}};
    ComplexVector h_rd{{0.3, -0.4}};
    ComplexMatrix g(1, 2);
    g.at(0, 0) = {0.1, 0.2};
    g.at(0, 1) = {-0.7, 0.05};
    RisPhases phases;
    phases.angles = {0.0};
    const auto h = effective_channel(h_bd, h_rd, g, phases, 0);
    // row vector h_eff^H = conj(h_rd[0]) * G row; returned vector is its conjugate
    for (std::size_t n = 0; n < 2; ++n) {
        const Complex expected_row = std::conj(h_rd[0]) * g.at(0, n);
        CHECK(std::abs(h[n] - std::conj(expected_row)) < 1e-15);
    }
}

TEST_CASE("effective_channel matches dense algebra for N=2, M=2") {
    RandomStream rng(31);
    ComplexVector h_bd(2), h_rd(2);
    ComplexMatrix g(2, 2);
    for (auto& x : h_rd) x = {rng.gaussian(), rng.gaussian()};
    for (auto& x : g.v) x = {rng.gaussian(), rng.gaussian()};
    RisPhases phases;
    phases.angles = {0.7, 2.9};
    const auto h = effective_channel(h_bd, h_rd, g, phases, 0);
    for (std::size_t n = 0; n < 2; ++n) {
        Complex row{0, 0};
        for (std::size_t m = 0; m < 2; ++m) {
            row += std::conj(h_rd[m]) * std::polar(1.0, phases.angles[m]) * g.at(m, n);
        }
        CHECK(std::abs(h[n] - std::conj(row)) < 1e-14);
    }
}

TEST_CASE("effective_channel with zero phases equals direct matrix algebra") {
    RandomStream rng(37);
    const std::size_t n = 3, m = 4;
    ComplexVector h_bd(n), h_rd(m);
    ComplexMatrix g(m, n);
    for (auto& x : h_rd) x = {rng.gaussian(), rng.gaussian()};
    for (auto& x : g.v) x = {rng.gaussian(), rng.gaussian()};
    RisPhases phases;
    phases.angles.assign(m, 0.0);
    const auto h = effective_channel(h_bd, h_rd, g, phases, 0);
    for (std::size_t j = 0; j < n; ++j) {
        Complex acc{0, 0};
        for (std::size_t i = 0; i < m; ++i) acc += std::conj(g.at(i, j)) * h_rd[i];
        CHECK(std::abs(h[j] - acc) < 1e-14 * (1.0 + std::abs(acc)));
    }
}

TEST_CASE("effective_channel validates dimensions") {
    ComplexVector h_bd(2), h_rd(3);
    ComplexMatrix g(2, 2);  // wrong: needs 3 rows
    RisPhases phases;
    phases.angles.assign(3, 0.0);
    CHECK_THROWS_AS(effective_channel(h_bd, h_rd, g, phases, 0), std::invalid_argument);
}

TEST_CASE("cascade gain magnitude for M=1 is the product of link gains") {
    const auto bs = build_upa(1, 2, kLambda / 2, {0, 0, 0});
    const auto ris = build_upa(1, 1, kLambda / 5, {15, 0, 15});
    const Position3 ue{20, 3, 0.5};
    const auto cs = make_channel_set(bs, ris, {ue}, kLambda);
    RisPhases phases;
    phases.angles = {0.0};
    const auto h = effective_channel(cs.h_bd[0], cs.h_rd[0], cs.g_br, phases, 0);
    const double eta_rd = path_loss(distance(ris.elements[0], ue), kLambda);
    for (std::size_t n = 0; n < bs.size(); ++n) {
        const double eta_br = path_loss(distance(ris.elements[0], bs.elements[n]), kLambda);
        CHECK(std::abs(h[n]) == doctest::Approx(std::sqrt(eta_rd * eta_br)).epsilon(1e-12));
    }
}

TEST_CASE("channel synthesis is bit-identical across regenerations") {
    const auto bs = build_upa(3, 3, kLambda / 2, {0, 0, 0});
    const auto ris = build_upa(2, 2, kLambda / 5, {15, 0, 15});
    const std::vector<Position3> ues{{20, 2, 0.5}, {33, -7, 0.2}};
    const auto a = make_channel_set(bs, ris, ues, kLambda);
    const auto b = make_channel_set(bs, ris, ues, kLambda);
    CHECK(a.g_br.v == b.g_br.v);
    CHECK(a.h_bd == b.h_bd);
    CHECK(a.h_rd == b.h_rd);
}
