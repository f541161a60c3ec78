#include "helpers.hpp"

#include <cmath>

#include "zetalab/roots.hpp"

using namespace zetalab;

namespace {

const PrecisionContext ctx128 = PrecisionContext::with_bits(128);

const MobiusTable& table() {
    static MobiusTable t = mobius_table(100000);
    return t;
}

}  // namespace

TEST_CASE("mollifier roots for tiny V") {
    auto r2 = find_mollifier_root<mp_real>(2, 0.1, table(), ctx128);
    CHECK(r2.status == RootStatus::no_sign_change);
    CHECK(r2.scan.size() == 129);

    auto r3 = find_mollifier_root<mp_real>(3, 1.0, table(), ctx128);
    REQUIRE(r3.status == RootStatus::found);
    // bisection oracle on the explicit three-term function
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200; ++k) {
        const double mid = (lo + hi) / 2;
        (1 - std::pow(2, -mid) - std::pow(3, -mid) < 0 ? lo : hi) = mid;
    }
    CHECK(std::abs(to_double(r3.value) - lo) < 1e-14);
    CHECK(r3.residual <= std::ldexp(1.0, -64));
    CHECK(r3.within_paper_bound);

    CHECK_ERRC(find_mollifier_root<mp_real>(1, 0.5, table(), ctx128), errc::domain);
    CHECK_ERRC(find_mollifier_root<mp_real>(10, 1.5, table(), ctx128), errc::domain);
}

TEST_CASE("mollifier root at V = 10^5 re-evaluates at doubled precision") {
    auto r = find_mollifier_root<mp_real>(100000, 0.2, table(), ctx128);
    REQUIRE(r.status != RootStatus::no_sign_change);
    CHECK(r.residual <= std::ldexp(1.0, -64));
    const auto ctx256 = PrecisionContext::with_bits(256);
    precision_scope<mp_real> s(256);
    auto m = m_v(Complex<mp_real>(r.value), 100000, table(), ctx256);
    CHECK(m.magnitude() <= 4 * std::max(r.residual, m.err_bound));
}

TEST_CASE("mollifier roots are deterministic") {
    auto a = find_mollifier_root<mp_real>(500, 0.5, table(), ctx128);
    auto b = find_mollifier_root<mp_real>(500, 0.5, table(), ctx128);
    CHECK(a.value == b.value);
    CHECK(a.bracket == b.bracket);
    CHECK(a.sign_changes == b.sign_changes);
}

TEST_CASE("zeta zeros") {
    auto g1 = find_zeta_zero<mp_real>(14.0, 14.2, ctx128);
    REQUIRE(g1.status == RootStatus::found);
    CHECK(std::abs(to_double(g1.value) - 14.134725141734693790) < 1e-15);
    auto g2 = find_zeta_zero<mp_real>(20.9, 21.1, ctx128);
    CHECK(std::abs(to_double(g2.value) - 21.022039638771554993) < 1e-15);
    CHECK(g1.residual <= 1e-10);
    CHECK_ERRC(find_zeta_zero<mp_real>(14.2, 14.3, ctx128), errc::no_sign_change);
}
