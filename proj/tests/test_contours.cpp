#include "helpers.hpp"

#include <cmath>

#include "zetalab/contours.hpp"

using namespace zetalab;

namespace {

const PrecisionContext ctx;

double perron_gap(double sigma, double t, std::uint64_t V, double c, double W) {
    static MobiusTable tab = mobius_table(1000);
    auto p = perron_mv<double>(Complex<double>(sigma, t), V, ContourSpec::vertical(c, W), ctx);
    auto m = m_v(Complex<double>(sigma, t), V, tab, ctx);
    return absd(p.value.value - m.value);
}

}  // namespace

TEST_CASE("Perron integral against the direct sum") {
    const double c50 = 1.0 / std::log(50.0);
    CHECK(perron_gap(2.0, 0.0, 50, c50, 500) <= perron_envelope(2.0, 50, c50, 500));

    const double c100 = perron_default_c(1.5, 100);
    const double g1 = perron_gap(1.5, 3.0, 100, c100, 1000);
    CHECK(g1 <= perron_envelope(1.5, 100, c100, 1000));
    const double g2 = perron_gap(1.5, 3.0, 100, c100, 2000);
    CHECK(g2 <= perron_envelope(1.5, 100, c100, 2000));
}

TEST_CASE("Perron preconditions") {
    CHECK_ERRC(perron_mv<double>(Complex<double>(0.5), 10, ContourSpec::vertical(0.2, 100), ctx), errc::domain);
    CHECK_ERRC(perron_mv<double>(Complex<double>(2.0), 10, ContourSpec::circle(0, 0, 1), ctx), errc::domain);
}

TEST_CASE("rectangle decomposition recombines") {
    // s = 2: the rectangle [-0.5, c] x [-W, W] shifted by s stays in sigma > 1.5
    auto d = perron_rectangle<double>(Complex<double>(2.0), 20, ContourSpec::rect(-0.5, 0.4, 50), ctx);
    CHECK(d.discrepancy.magnitude() <= 1e-8);
}

TEST_CASE("winding numbers") {
    auto w1 = winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(1, 0, 0.3), 0, nullptr, ctx);
    CHECK(w1.winding == 1);
    auto w0 = winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(3, 0, 0.3), 0, nullptr, ctx);
    CHECK(w0.winding == 0);
    // the same integer at twice the starting node count
    auto w1b = winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(1, 0, 0.3), 0, nullptr, ctx, 128);
    CHECK(w1b.winding == 1);

    // the first zero lies inside |s - (1/2 + 14.13i)| = 0.2 and is a pole of 1/zeta
    auto wz = winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(0.5, 14.13, 0.2), 0, nullptr, ctx);
    CHECK(wz.winding == -1);

    MobiusTable tab = mobius_table(10000);
    const double R = std::pow(1e4, 0.9 - 1.0);
    // whatever integer comes out is the finding; it must survive node doubling
    auto wm = winding_number<double>(WindingFunction::m_v, ContourSpec::circle(1, 0, R), 10000, &tab, ctx);
    auto wm2 = winding_number<double>(WindingFunction::m_v, ContourSpec::circle(1, 0, R), 10000, &tab, ctx, 2 * wm.nodes, 8 * wm.nodes);
    CHECK(wm.winding == wm2.winding);

    CHECK_ERRC(winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(0.5, 14.0, 0.0), 0, nullptr, ctx),
               errc::domain);
    CHECK_ERRC(winding_number<double>(WindingFunction::m_v, ContourSpec::circle(1, 0, 0.1), 10, nullptr, ctx), errc::domain);
    CHECK_ERRC(perron_rectangle<double>(Complex<double>(2.0), 20, ContourSpec::rect(0.1, 0.4, 50), ctx), errc::domain);
}

TEST_CASE("zero on the contour") {
    // this circle passes through the pole of zeta at s = 1
    CHECK_ERRC(winding_number<double>(WindingFunction::inv_zeta, ContourSpec::circle(1.25, 0, 0.25), 0, nullptr, ctx),
               errc::zero_on_contour);
}
