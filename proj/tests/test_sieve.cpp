#include "helpers.hpp"

#include <cmath>

#include "zetalab/sieve.hpp"

using namespace zetalab;

namespace {

// trial division: (mu, d)
std::pair<int, unsigned> naive_mu_d(std::uint64_t n) {
    int mu = 1;
    unsigned d = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        mu = e > 1 ? 0 : -mu;
        d *= e + 1;
    }
    if (n > 1) {
        mu = -mu;
        d *= 2;
    }
    return {mu, d};
}

}  // namespace

TEST_CASE("small tables") {
    auto t1 = mobius_table(1);
    CHECK(t1.mu_at(1) == 1);
    CHECK(t1.d_at(1) == 1);

    auto t = mobius_table(10);
    CHECK(t.mu_at(4) == 0);
    CHECK(t.mu_at(6) == 1);
    CHECK(t.mu_at(10) == 1);
    for (std::uint64_t p : {2, 3, 5, 7}) {
        CHECK(t.mu_at(p) == -1);
        CHECK(t.d_at(p) == 2);
    }
}

TEST_CASE("invariants against trial division up to 10^4") {
    auto t = mobius_table(10000);
    for (std::uint64_t n = 1; n <= 10000; ++n) {
        auto [mu, d] = naive_mu_d(n);
        REQUIRE(t.mu_at(n) == mu);
        REQUIRE(t.d_at(n) == d);
    }
    // sum over divisors of mu vanishes for n >= 2
    for (std::uint64_t n = 2; n <= 10000; ++n) {
        int s = 0;
        for (std::uint64_t k = 1; k <= n; ++k)
            if (n % k == 0) s += t.mu_at(k);
        REQUIRE(s == 0);
    }
}

TEST_CASE("Mertens M(10^6) against a trial-division sieve") {
    auto t = mobius_table(1000000);
    long long M = 0, naive = 0;
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
        M += t.mu_at(n);
        naive += naive_mu_d(n).first;
    }
    CHECK(M == naive);
    CHECK(M == 212);
}

TEST_CASE("segmented and linear sieves agree") {
    SieveOptions lin, seg;
    lin.method = SieveMethod::linear;
    seg.method = SieveMethod::segmented;
    seg.segment_size = 4096;
    seg.threads = 3;
    auto a = mobius_table(1000000, lin);
    auto b = mobius_table(1000000, seg);
    CHECK(a.mu == b.mu);
    CHECK(a.d == b.d);
}

TEST_CASE("memory budget") {
    SieveOptions o;
    o.memory_budget_bytes = 1000;
    CHECK_ERRC(mobius_table(100000, o), errc::capacity);
    CHECK_THROWS_AS(mobius_table(0), error);
}

TEST_CASE("coefficient tables") {
    PrecisionContext ctx = PrecisionContext::with_bits(128);
    auto mob = mobius_table(200);

    SECTION("shift 0, all divisors below V") {
        auto c = coeff_table<double>(10, 0.0, 10, mob, ctx);
        CHECK(c.c[1] == 1.0);
        for (int n = 2; n <= 10; ++n) CHECK(c.c[n] == 0.0);
    }
    SECTION("two-divisor case at a prime") {
        const double e = std::exp(1.0);
        auto c = coeff_table<double>(10, e, 10, mob, ctx);
        CHECK(c.c[7] == Catch::Approx(1.0 - std::pow(7.0, e)).epsilon(1e-14));
    }
    SECTION("brute-force divisor sum, multiprecision") {
        precision_scope<mp_real> scope(128);
        const mp_real shift(-0.01);
        auto c = coeff_table<mp_real>(100, shift, 200, mob, ctx);
        for (std::uint64_t n : {150u, 199u, 200u, 128u}) {
            mp_real s(0);
            for (std::uint64_t d = 1; d <= 100; ++d)
                if (n % d == 0 && mob.mu_at(d) != 0) s += mob.mu_at(d) * pow(mp_real(double(d)), shift);
            CHECK(to_double(abs(c.c[n] - s)) < 1e-35);
        }
    }
    SECTION("shift 0 is the truncated Mobius transform") {
        auto big = mobius_table(10000);
        auto c = coeff_table<double>(100, 0.0, 10000, big, ctx);
        for (std::uint64_t n = 1; n <= 10000; ++n) {
            int s = 0;
            for (std::uint64_t d = 1; d <= 100 && d <= n; ++d)
                if (n % d == 0) s += big.mu_at(d);
            REQUIRE(c.c[n] == double(s));
        }
    }
    SECTION("mean-value bound for a small shift") {
        auto big = mobius_table(2000);
        const double shift = 0.05, V = 50;
        auto c = coeff_table<double>(50, shift, 2000, big, ctx);
        auto c0 = coeff_table<double>(50, 0.0, 2000, big, ctx);
        for (std::uint64_t n = 1; n <= 2000; ++n) {
            double logs = 0.0, dn = 0.0;
            for (std::uint64_t d = 1; d <= n; ++d)
                if (n % d == 0) {
                    dn += 1;
                    if (d <= 50) logs += std::log(double(d));
                }
            REQUIRE(std::abs(c.c[n] - c0.c[n]) <= shift * std::exp(shift * std::log(V)) * logs + 1e-12);
            REQUIRE(std::abs(c.c[n]) <= dn * std::max(1.0, std::pow(V, shift)) + 1e-12);
        }
    }
    SECTION("errors") {
        CHECK_THROWS_AS(coeff_table<double>(10, 0.0, 5, mob, ctx), error);
        CHECK_THROWS_AS(coeff_table<double>(10, INFINITY, 20, mob, ctx), error);
        CHECK_THROWS_AS(coeff_table<double>(10, 0.0, 1000, mob, ctx, 100), error);
    }
}
