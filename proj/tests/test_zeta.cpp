#include "helpers.hpp"

#include <cmath>
#include <random>

#include "zetalab/roots.hpp"

using namespace zetalab;

namespace {

const PrecisionContext ctx128 = PrecisionContext::with_bits(128);

double gamma1() {
    static double g = [] {
        auto r = find_zeta_zero<mp_real>(14.0, 14.2, ctx128);
        return to_double(r.value);
    }();
    return g;
}

}  // namespace

TEST_CASE("special values") {
    precision_scope<mp_real> s(128);
    auto z2 = zeta_em(Complex<mp_real>(mp_real(2)), 0, ctx128);
    const mp_real pi = real_traits<mp_real>::pi();
    CHECK(to_double(abs(z2.value.re - pi * pi / 6)) < 1e-35);
    CHECK(z2.err_bound <= ctx128.target_rel_err * z2.magnitude());

    auto z0 = zeta_em(Complex<mp_real>(mp_real(0)), 0, ctx128);
    CHECK(to_double(abs(z0.value.re + mp_real(0.5))) < 1e-35);

    auto d2 = zeta_em(Complex<double>(2.0), 1, PrecisionContext{});
    CHECK(d2.value.re == Catch::Approx(-0.93754825431584375).epsilon(1e-12));

    CHECK_ERRC(zeta_em(Complex<double>(1.0), 0, PrecisionContext{}), errc::pole);
    CHECK_ERRC(zeta_em(Complex<double>(2.0), 2, PrecisionContext{}), errc::domain);
}

TEST_CASE("zeta vanishes at the first zero") {
    auto z = zeta_em(Complex<double>(0.5, gamma1()), 0, PrecisionContext{});
    CHECK(z.magnitude() < 1e-8);
    CHECK(gamma1() > 14.0);
    CHECK(gamma1() < 14.2);
}

TEST_CASE("reciprocal zeta") {
    const PrecisionContext ctx;
    auto r = inv_zeta(Complex<double>(2.0), ctx);
    CHECK(r.value.re == Catch::Approx(6.0 / (M_PI * M_PI)).epsilon(1e-13));

    auto z = zeta_em(Complex<double>(3.0, 4.0), 0, ctx);
    auto iz = inv_zeta(Complex<double>(3.0, 4.0), ctx);
    auto prod = z.value * iz.value;
    CHECK(std::abs(prod.re - 1.0) < 1e-13);
    CHECK(std::abs(prod.im) < 1e-13);

    // near the pole 1/zeta(s) ~ (s-1)/(1 + gamma (s-1))
    const double s = 0.99, g = 0.57721566490153286;
    auto near = inv_zeta(Complex<double>(s), ctx);
    const double laurent = (s - 1) / (1 + g * (s - 1));
    CHECK(std::abs(near.value.re - laurent) < 1e-4 * std::abs(laurent));

    CHECK_ERRC(inv_zeta(Complex<double>(0.5, gamma1()), ctx), errc::near_zero);
}

TEST_CASE("chi factor") {
    const PrecisionContext ctx;
    auto c = chi_factor(Complex<double>(0.5, 20.0), ctx);
    CHECK(std::abs(c.magnitude() - 1.0) < 1e-10);
    auto h = chi_factor(Complex<double>(0.5), ctx);
    CHECK(std::abs(h.value.re - 1.0) < 1e-12);
    CHECK_ERRC(chi_factor(Complex<double>(1.0), ctx), errc::pole);
    CHECK_ERRC(chi_factor(Complex<double>(3.0), ctx), errc::pole);
    CHECK(chi_factor(Complex<double>(-2.0), ctx).magnitude() == 0.0);

    precision_scope<mp_real> s(128);
    Complex<mp_real> p(mp_real(0.3), mp_real(30));
    auto lhs = zeta_em(p, 0, ctx128);
    auto rhs = chi_factor(p, ctx128) * zeta_em(Complex<mp_real>(mp_real(1)) - p, 0, ctx128);
    CHECK(absd(lhs.value - rhs.value) <= lhs.err_bound + rhs.err_bound);
}

TEST_CASE("functional equation on random strip points") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> sig(0.01, 0.99), tt(2 * M_PI, 100.0);
    precision_scope<mp_real> s(128);
    for (int k = 0; k < 100; ++k) {
        Complex<mp_real> p(mp_real(sig(rng)), mp_real((k % 2 ? -1 : 1) * tt(rng)));
        auto lhs = zeta_em(p, 0, ctx128);
        auto rhs = chi_factor(p, ctx128) * zeta_em(Complex<mp_real>(mp_real(1)) - p, 0, ctx128);
        REQUIRE(absd(lhs.value - rhs.value) <= lhs.err_bound + rhs.err_bound);
    }
}

TEST_CASE("approximate functional equation") {
    const PrecisionContext ctx;
    for (auto [sig, t] : {std::pair{0.5, 100.0}, std::pair{0.75, 50.0}}) {
        auto a = afe_zeta(Complex<double>(sig, t), ctx);
        auto z = zeta_em(Complex<double>(sig, t), 0, ctx);
        CHECK(absd(a.value - z.value) <= a.err_bound + z.err_bound);
    }
    auto at_zero = afe_zeta(Complex<double>(0.5, gamma1()), ctx);
    CHECK(at_zero.magnitude() <= at_zero.err_bound);
    CHECK_ERRC(afe_zeta(Complex<double>(1.5, 100.0), ctx), errc::domain);
    CHECK_ERRC(afe_zeta(Complex<double>(0.5, 3.0), ctx), errc::domain);
}

TEST_CASE("zero-free boundary") {
    const double at0 = 1 - 0.034666 / std::log(705 / 47.886);
    CHECK(zero_free_boundary(0) == Catch::Approx(at0).epsilon(1e-15));
    CHECK(zero_free_boundary(705) == zero_free_boundary(0));
    CHECK(zero_free_boundary(1e6) == Catch::Approx(1 - 0.034666 / std::log(1e6 / 47.886)).epsilon(1e-15));
    double prev = zero_free_boundary(705);
    for (double t = 705; t < 1e8; t *= 1.1) {
        const double b = zero_free_boundary(t);
        REQUIRE(b >= prev);
        prev = b;
    }
    CHECK(zero_free_boundary_simple(0.0) == Catch::Approx(1 - (1.0 / 500) / std::log(2.0)));
}

TEST_CASE("Hardy Z") {
    const PrecisionContext ctx;
    auto z0 = hardy_z(0.0, ctx);
    CHECK(z0.value == Catch::Approx(-1.4603545088095868).epsilon(1e-12));
    CHECK(std::abs(hardy_z(gamma1(), ctx).value) < 1e-8);
    // sign at t = 18 agrees with the approximate functional equation path
    auto z18 = hardy_z(18.0, ctx);
    auto a = afe_zeta(Complex<double>(0.5, 18.0), ctx);
    precision_scope<mp_real> s(128);
    auto lg = log_gamma(Complex<mp_real>(mp_real(0.25), mp_real(9)), 128);
    const double theta = to_double(lg.im) - 9.0 * std::log(M_PI);
    const double rot = std::cos(theta) * a.value.re - std::sin(theta) * a.value.im;
    CHECK((rot > 0) == (z18.value > 0));
    CHECK_ERRC(hardy_z(-1.0, ctx), errc::domain);
}

TEST_CASE("Hardy Z sign changes") {
    const PrecisionContext ctx;
    // 13 zeros lie in [10, 60] and 6 in [10, 40]
    CHECK(hardy_z_sign_changes<double>(10, 60, 0.05, ctx).size() == 13);
    CHECK(hardy_z_sign_changes<double>(10, 40, 0.05, ctx).size() == 6);
    for (auto [lo, hi] : hardy_z_sign_changes<double>(10, 40, 0.05, ctx)) {
        auto r = find_zeta_zero<double>(lo, hi, ctx);
        CHECK(r.status == RootStatus::found);
    }
}

TEST_CASE("second moment") {
    const PrecisionContext ctx;
    auto m = second_moment<double>(2.0, 0.0, 1.0, ctx);
    // independent value from mpmath quad at 30 digits
    CHECK(std::abs(m.value - 2.19353102566147724) < 1e-12);
    // Riemann-sum oracle at step 1e-3
    double riemann = 0;
    for (int k = 0; k < 1000; ++k) riemann += norm(zeta_em(Complex<double>(2.0, (k + 0.5) * 1e-3), 0, ctx).value) * 1e-3;
    CHECK(std::abs(m.value - riemann) < 1e-5);

    auto big = second_moment<double>(0.75, 0.0, 200.0, ctx, 1e-8);
    const double z15 = zeta_em(Complex<double>(1.5), 0, ctx).value.re;
    const double ratio = big.value / (z15 * 200.0);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);

    CHECK(second_moment<double>(2.0, 5.0, 5.0, ctx).value == 0.0);
    CHECK_ERRC(second_moment<double>(0.4, 0.0, 1.0, ctx), errc::domain);
}

TEST_CASE("doubling precision keeps the digits above err_bound") {
    precision_scope<mp_real> s(256);
    Complex<mp_real> p(mp_real(0.25), mp_real(33.5));
    auto a = zeta_em(p, 0, ctx128);
    auto b = zeta_em(p, 0, PrecisionContext::with_bits(256));
    CHECK(absd(a.value - b.value) <= a.err_bound + b.err_bound);
    CHECK(b.err_bound < a.err_bound);
}
