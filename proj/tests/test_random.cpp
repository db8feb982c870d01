#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "nfsim/random.hpp"

using namespace nfsim;

TEST_CASE("fnv1a64 is stable and distinguishes names") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("world") != fnv1a64("init"));
    CHECK(fnv1a64("world") == fnv1a64("world"));
}

TEST_CASE("identical seeds give identical streams") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("named substreams are independent of each other") {
    RandomStream a(7, "world");
    RandomStream b(7, "exploration");
    bool differs = false;
    for (int i = 0; i < 8; ++i) {
        if (a.next_u64() != b.next_u64()) differs = true;
    }
    CHECK(differs);

    RandomStream a2(7, "world");
    for (int i = 0; i < 8; ++i) (void)a2.next_u64();
    RandomStream a3(7, "world");
    RandomStream a4(7, "world");
    for (int i = 0; i < 8; ++i) CHECK(a3.next_u64() == a4.next_u64());
}

TEST_CASE("uniform stays in range") {
    RandomStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-3.0, 5.0);
        CHECK(u >= -3.0);
        CHECK(u < 5.0);
    }
}

TEST_CASE("gaussian moments are roughly standard") {
    RandomStream rng(3);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("uniform_int covers inclusive bounds") {
    RandomStream rng(5);
    std::set<int> seen;
    for (int i = 0; i < 1000; ++i) seen.insert(rng.uniform_int(2, 5));
    CHECK(seen == std::set<int>{2, 3, 4, 5});
}

TEST_CASE("sample_without_replacement yields distinct indices") {
    RandomStream rng(9);
    auto idx = rng.sample_without_replacement(100, 32);
    CHECK(idx.size() == 32);
    std::set<std::size_t> s(idx.begin(), idx.end());
    CHECK(s.size() == 32);
    for (auto i : s) CHECK(i < 100);
}
