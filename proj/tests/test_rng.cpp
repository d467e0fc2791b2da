#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtnet/errors.hpp"
#include "mtnet/rng.hpp"

using namespace mtnet;

TEST_SUITE_BEGIN("rng");

TEST_CASE("equal seeds produce equal first 10^4 draws") {
    Rng a(12345);
    Rng b(12345);
    for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different seeds diverge") {
    Rng a(1);
    Rng b(2);
    int equal = 0;
    for (int i = 0; i < 100; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("uniform01 stays in [0,1)") {
    Rng rng(77);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("below respects the bound and covers small ranges") {
    Rng rng(42);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = rng.below(7);
        REQUIRE(v < 7);
        ++counts[static_cast<int>(v)];
    }
    for (int c : counts) CHECK(c > 800);
    CHECK_THROWS_AS(rng.below(0), ParameterError);
}

TEST_CASE("fork is independent of parent consumption") {
    Rng a(9);
    Rng b(9);
    for (int i = 0; i < 50; ++i) a.next_u64();
    Rng child_late = a.fork(3);
    Rng child_early = b.fork(3);
    for (int i = 0; i < 100; ++i) REQUIRE(child_late.next_u64() == child_early.next_u64());
}

TEST_CASE("forked streams differ from the parent and from each other") {
    Rng parent(9);
    Rng c0 = parent.fork(0);
    Rng c1 = parent.fork(1);
    int eq01 = 0, eqp0 = 0;
    Rng parent_copy(9);
    for (int i = 0; i < 100; ++i) {
        const auto a = c0.next_u64();
        const auto b = c1.next_u64();
        if (a == b) ++eq01;
        if (a == parent_copy.next_u64()) ++eqp0;
    }
    CHECK(eq01 == 0);
    CHECK(eqp0 == 0);
}

TEST_CASE("normal draws have sane moments") {
    Rng rng(2024);
    const int n = 20000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.03);
    CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_SUITE_END();
