#include "helpers.hpp"

#include <atomic>
#include <cmath>

#include "zetalab/core/bernoulli.hpp"
#include "zetalab/core/parallel.hpp"
#include "zetalab/core/quadrature.hpp"

using namespace zetalab;

TEST_CASE("precision context validation") {
    PrecisionContext ctx;
    CHECK(ctx.working_bits == 256);
    CHECK_NOTHROW(ctx.validate());
    CHECK_ERRC(PrecisionContext::with_bits(32), errc::domain);
    PrecisionContext bad;
    bad.working_bits = 128;
    bad.target_rel_err = 0x1p-200;
    CHECK_ERRC(bad.validate(), errc::domain);
    CHECK(ctx.doubled().working_bits == 512);
}

TEST_CASE("precision scope sets and restores the working precision") {
    const unsigned before = mp_real::default_precision();
    {
        precision_scope<mp_real> s(200);
        CHECK(detail::mp_current_bits() == 200);
        mp_real third = mp_real(1) / 3;
        CHECK(third.precision() >= 60);
    }
    CHECK(mp_real::default_precision() == before);
}

TEST_CASE("complex arithmetic") {
    Complex<double> a(3, 4), b(1, -2);
    CHECK(abs(a) == Catch::Approx(5.0));
    auto q = a / b;
    auto back = q * b;
    CHECK(back.re == Catch::Approx(3.0));
    CHECK(back.im == Catch::Approx(4.0));
    auto e = exp(Complex<double>(0, M_PI));
    CHECK(e.re == Catch::Approx(-1.0));
    CHECK(std::abs(e.im) < 1e-15);
    auto l = log(Complex<double>(-1, 0));
    CHECK(l.im == Catch::Approx(M_PI));
}

TEST_CASE("CValue error propagation") {
    CValue<double> a(Complex<double>(2.0), 1e-10), b(Complex<double>(3.0), 2e-10);
    auto s = a + b;
    CHECK(s.err_bound >= 3e-10);
    auto p = a * b;
    CHECK(p.err_bound >= 2.0 * 2e-10 + 3.0 * 1e-10);
    CValue<double> tiny(Complex<double>(1e-12), 1e-11);
    CHECK_ERRC(a / tiny, errc::near_zero);
}

TEST_CASE("Bernoulli numbers") {
    auto b = bernoulli_b2n<double>(4);
    CHECK(b[0] == Catch::Approx(1.0 / 6));
    CHECK(b[1] == Catch::Approx(-1.0 / 30));
    CHECK(b[2] == Catch::Approx(1.0 / 42));
    CHECK(b[3] == Catch::Approx(-1.0 / 30));
    // B_{2k}/(2k)! must stay finite in double even where (2k)! overflows
    const auto& r = bernoulli_over_factorial<double>(120, 53);
    for (double x : r) CHECK(std::isfinite(x));
}

TEST_CASE("log gamma") {
    precision_scope<mp_real> s(128);
    auto lg = log_gamma(Complex<mp_real>(mp_real(5)), 128);
    CHECK(std::abs(to_double(lg.re) - std::log(24.0)) < 1e-15);
    auto lh = log_gamma(Complex<mp_real>(mp_real(0.5)), 128);
    CHECK(std::abs(to_double(lh.re) - 0.5 * std::log(M_PI)) < 1e-15);
}

TEST_CASE("Gauss-Legendre and adaptive quadrature") {
    const auto& rule = gauss_legendre<double>(16, 53);
    double w = 0;
    for (double x : rule.weights) w += x;
    CHECK(w == Catch::Approx(2.0));

    QuadratureOptions opt;
    opt.abs_tol = 1e-13;
    auto r = integrate_adaptive<double>([](double x) { return Complex<double>(std::exp(x)); },
                                        std::vector<double>{0.0, 1.0}, opt, 53);
    CHECK(std::abs(r.value.re - (std::exp(1.0) - 1.0)) < 1e-13);

    // a peaked integrand forces refinement
    QuadratureOptions peak;
    peak.abs_tol = 1e-9;
    auto p = integrate_adaptive<double>([](double x) { return Complex<double>(1.0 / (1e-4 + x * x)); },
                                        std::vector<double>{-1.0, 0.0, 1.0}, peak, 53);
    CHECK(std::abs(p.value.re - 2.0 * std::atan(1.0 / 1e-2) / 1e-2) < 1e-9);
    CHECK(p.panels > 2);

    QuadratureOptions tight;
    tight.abs_tol = 1e-300;
    tight.max_panels = 4;
    CHECK_ERRC(integrate_adaptive<double>([](double x) { return Complex<double>(std::sqrt(std::abs(x))); },
                                          std::vector<double>{-1.0, 1.0}, tight, 53),
               errc::non_convergence);
}

TEST_CASE("multiprecision quadrature") {
    precision_scope<mp_real> s(160);
    QuadratureOptions opt;
    opt.abs_tol = 1e-40;
    auto r = integrate_adaptive<mp_real>([](const mp_real& x) { return Complex<mp_real>(exp(x)); },
                                         std::vector<mp_real>{mp_real(0), mp_real(1)}, opt, 160);
    CHECK(to_double(abs(r.value.re - (exp(mp_real(1)) - 1))) < 1e-40);
}

TEST_CASE("parallel_map keeps index order and rethrows") {
    auto v = parallel_map<int>(100, [](std::size_t i) { return static_cast<int>(i * i); }, 4);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
    CHECK_THROWS_AS(parallel_map<int>(10,
                                      [](std::size_t i) -> int {
                                          if (i == 7) throw error(errc::domain, "seven");
                                          return 0;
                                      },
                                      3),
                    error);
}
