#include "helpers.hpp"

#include <cmath>

#include "zetalab/experiments.hpp"

using namespace zetalab;

namespace {

const std::string gamma1 = "14.134725141734693790457251983562470270784257115699243175685567460";
const PrecisionContext ctx128 = PrecisionContext::with_bits(128);

const MobiusTable& table() {
    static MobiusTable t = mobius_table(100000);
    return t;
}

double extra(const BoundReport& r, const std::string& name) {
    const Quantity* q = r.find(name);
    REQUIRE(q != nullptr);
    return q->approx;
}

}  // namespace

TEST_CASE("parameter sets") {
    ParamOverrides ov;
    ov.b = 0.1;
    auto p = build_params(Regime::doublestar, 10000, gamma1, 0.5, ov);
    CHECK(p.r == std::min({1.0 / 100, 2.0 / 181, 10.0 * 0.8 / 221}));
    CHECK(p.a == Catch::Approx(0.1 + (1 + 2 * p.r) / 2).epsilon(1e-15));
    CHECK(p.s0 == Catch::Approx(p.a + p.r));
    CHECK(p.T == Catch::Approx(2 * 14.134725141734694 / 3));
    CHECK(p.J == expansion_order(p.z0, p.U));
    CHECK_FALSE(p.hypotheses_satisfied);

    ParamOverrides st;
    st.r = 1.0 / 3000;
    auto s = build_params(Regime::star, 10000, gamma1, 0.5, st);
    CHECK(s.a == 1 + 1.0 / 3000);

    CHECK(build_params(Regime::star, 1000000, gamma1, 0.5).U == 10000);

    // desk-scale hypothesis failures are notes, never errors
    bool has_hyp = false;
    for (const auto& n : s.notes) has_hyp |= n.rfind("hypothesis:", 0) == 0;
    CHECK(has_hyp);
}

TEST_CASE("parameter consistency") {
    ParamOverrides z1;
    z1.z1 = 0.01;
    z1.z0 = 0.02;
    CHECK_ERRC(build_params(Regime::doublestar, 1000, gamma1, 0.5, z1), errc::inconsistent);
    ParamOverrides odd;
    odd.J = 5;
    CHECK_ERRC(build_params(Regime::doublestar, 1000, gamma1, 0.5, odd), errc::inconsistent);
    ParamOverrides bigU;
    bigU.U = 5000;
    CHECK_ERRC(build_params(Regime::doublestar, 1000, gamma1, 0.5, bigU), errc::inconsistent);
    CHECK_ERRC(build_params(Regime::doublestar, 1, gamma1, 0.5), errc::domain);

    // a regime inequality: error when strict, note otherwise
    ParamOverrides badb;
    badb.b = 0.7;
    CHECK_ERRC(build_params(Regime::doublestar, 1000, gamma1, 0.5, badb, true), errc::inconsistent);
    auto loose = build_params(Regime::doublestar, 1000, gamma1, 0.5, badb, false);
    CHECK_FALSE(loose.regime_valid);
}

TEST_CASE("Poisson partial sums and the factorial bound") {
    auto r2 = check_lemma1(2, 1e-3);
    CHECK(extra(r2, "grid_points") == 1);
    CHECK(r2.lhs.approx == 0.0);  // equality at u = 0
    CHECK(extra(r2, "violations") == 0);

    unsigned v = 99;
    precision_scope<mp_real> s(256);
    CHECK(to_double(factorial_bound_margin<mp_real>(1, 256, &v)) == 0.0);
    CHECK(v == 0);
    CHECK(to_double(factorial_bound_margin<mp_real>(50, 256, &v)) <= 0.0);
    CHECK(v == 0);

    auto r10 = check_lemma1(10, 1e-3);
    CHECK(extra(r10, "violations") == 0);
    CHECK(extra(r10, "grid_points") == 4001);
    CHECK_ERRC(check_lemma1(3, 1e-3), errc::domain);
}

TEST_CASE("Poisson partial sums for larger J") {
    // J <= 16 holds on the grid; the worst point is the equality at u = 0
    auto r16 = check_lemma1(16, 1e-3);
    CHECK(extra(r16, "partial_sum_violations") == 0);
    // J = 18 fails at u = (2 - J)/2 = -8; oracle: mpmath at 50 digits gives
    // sum_{j=1}^{17} p_j(-8) - p_17(-8)/2 = 580.81750585619481938888310604962...
    auto r18 = check_lemma1(18, 1e-3);
    CHECK(extra(r18, "partial_sum_argmax_u") == -8.0);
    CHECK(std::abs(extra(r18, "partial_sum_max_margin") - 580.81750585619481938888) < 1e-10);
    // the stated inequality for J = 40 on this grid; it does not hold
    auto r40 = check_lemma1(40, 1e-3);
    CHECK(extra(r40, "violations") == 0);
}

TEST_CASE("bound checks") {
    ParamOverrides ov;
    ov.v = "0";
    auto p = build_params(Regime::doublestar, 1000, gamma1, 0.5, ov);

    SECTION("lemma 3 at sigma = 3") {
        auto r = check_bound<mp_real>(3, p, {GridPoint{3.0, 0.0}}, table(), ctx128);
        REQUIRE(r.ratio.has_value());
        CHECK(r.lhs.approx < 0.1);
        CHECK(std::isfinite(*r.ratio));
        CHECK(extra(r, "points_evaluated") == 1);
    }
    SECTION("lemma 5 accepts the domain edge") {
        const double edge = p.a - p.r + 2.0 / std::log(1000.0);
        auto r = check_bound<mp_real>(5, p, {GridPoint{edge, 0.0}, GridPoint{edge - 0.01, 0.0}}, table(), ctx128);
        CHECK(extra(r, "points_evaluated") == 1);
        CHECK(extra(r, "points_skipped") == 1);
    }
    SECTION("lemma 7 at omega = 0, z = 0") {
        auto q = build_params(Regime::doublestar, 1000, gamma1, 0.5);
        auto r = check_bound<mp_real>(7, q, {GridPoint{}}, table(), ctx128);
        REQUIRE(r.ratio.has_value());
        const double env = std::pow(std::log(1000.0 + q.T), 2);
        CHECK(r.rhs_envelope.approx == Catch::Approx(env).epsilon(1e-12));
        // direct evaluation of the tilde F_V at w + r
        std::vector<std::string> notes;
        auto [spec, choice] = mollifier_for<mp_real>(q, MollifierVariant::tilde, table(), ctx128, notes);
        precision_scope<mp_real> s(128);
        auto f = f_v(Complex<mp_real>(mp_real(q.a + q.r), mp_real(gamma1)), spec, table(), ctx128);
        CHECK(std::abs(r.lhs.approx - f.magnitude()) <= 1e-12 * f.magnitude());
    }
    CHECK_ERRC(check_bound<mp_real>(4, p, {}, table(), ctx128), errc::domain);
}

TEST_CASE("expansion checks") {
    auto p = build_params(Regime::doublestar, 1000, gamma1, 0.5);
    auto r = check_expansion<mp_real>(8, p, table(), ctx128);
    CHECK_FALSE(r.hypotheses_satisfied);
    CHECK(r.ratio.has_value());
    CHECK(extra(r, "J") == p.J);
    bool z_note = false;
    for (const auto& n : r.notes) z_note |= n.find("z1 = z0") != std::string::npos;
    CHECK(z_note);

    // z0 = 1 with U >= e^10
    ParamOverrides ov;
    ov.z0 = 1.0;
    ov.U = 22027;
    auto big = build_params(Regime::doublestar, 25000, gamma1, 0.5, ov);
    CHECK(big.J == 2 * static_cast<unsigned>(std::floor(std::log(22027.0) + 2)));
    auto rb = check_expansion<mp_real>(8, big, table(), ctx128);
    CHECK(rb.ratio.has_value());
    CHECK(std::isfinite(rb.lhs.approx));

    ParamOverrides wrongJ;
    wrongJ.J = 10;
    CHECK_ERRC(check_expansion<mp_real>(8, build_params(Regime::doublestar, 1000, gamma1, 0.5, wrongJ), table(), ctx128),
               errc::inconsistent);
}

TEST_CASE("Taylor identity with integral remainder") {
    ParamOverrides ov;
    ov.z0 = 1e-3;
    ov.U = 20;
    for (unsigned J : {2u, 6u}) {
        ov.J = J;
        auto p = build_params(Regime::doublestar, 100, gamma1, 0.5, ov);
        auto r = taylor_identity_check<mp_real>(p, table(), ctx128);
        CHECK(extra(r, "discrepancy") <= 1e-8);
    }
    ov.z0 = 0.0;
    ov.J = 2;
    auto p0 = build_params(Regime::doublestar, 100, gamma1, 0.5, ov);
    auto r0 = taylor_identity_check<mp_real>(p0, table(), ctx128);
    CHECK(extra(r0, "discrepancy") == 0.0);
}

TEST_CASE("final report") {
    auto p = build_params(Regime::doublestar, 10000, gamma1, 0.5);
    auto r = final_report<mp_real>(p, table(), ctx128);
    CHECK(r.lemma_id == "final-doublestar");
    CHECK(extra(r, "zero_factor_holds") == 1.0);
    CHECK(std::abs(r.lhs.approx) <= extra(r, "zero_factor_budget"));
    const bool flag = p.J - 1.0 > 2 * p.z0 * std::log(double(p.U));
    CHECK(extra(r, "J_minus_1_exceeds_2_z0_logU") == (flag ? 1.0 : 0.0));
    CHECK_FALSE(r.hypotheses_satisfied);

    ParamOverrides st;
    st.r = 1.0 / 3000;
    auto s = build_params(Regime::star, 10000, gamma1, 0.5, st);
    auto rs = final_report<mp_real>(s, table(), ctx128);
    CHECK(std::isfinite(extra(rs, "final_quantity")));
    CHECK(extra(rs, "final_threshold") == Catch::Approx(5 * std::exp(3.0)));
    CHECK(rs.notes.back().rfind("report only", 0) == 0);
}
