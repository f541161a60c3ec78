#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "zetalab/dirichlet.hpp"

namespace zetalab {

enum class ContourKind { vertical_segment, rectangle, circle };

struct ContourSpec {
    ContourKind kind = ContourKind::vertical_segment;
    double c = 0.0;        // abscissa of the vertical line
    double W = 2.0;        // half-height
    double c_left = 0.0;   // left edge of a rectangle
    double center_re = 0.0, center_im = 0.0;
    double radius = 0.0;

    static ContourSpec vertical(double c, double W) {
        ContourSpec s;
        s.c = c;
        s.W = W;
        return s;
    }
    static ContourSpec rect(double c_left, double c_right, double W) {
        ContourSpec s;
        s.kind = ContourKind::rectangle;
        s.c = c_right;
        s.c_left = c_left;
        s.W = W;
        return s;
    }
    static ContourSpec circle(double re, double im, double radius) {
        ContourSpec s;
        s.kind = ContourKind::circle;
        s.center_re = re;
        s.center_im = im;
        s.radius = radius;
        return s;
    }
};

/// The standard abscissa max(1 - sigma, 0) + 1/log V.
inline double perron_default_c(double sigma, std::uint64_t V) {
    return std::max(1.0 - sigma, 0.0) + 1.0 / std::log(static_cast<double>(V));
}

/// 10 (V^c log V / W + log V / V^sigma).
inline double perron_envelope(double sigma, std::uint64_t V, double c, double W, double constant = 10.0) {
    const double lv = std::log(static_cast<double>(V));
    return constant * (std::pow(static_cast<double>(V), c) * lv / W + lv / std::pow(static_cast<double>(V), sigma));
}

struct PerronOptions {
    double abs_tol = 1e-9;
    std::size_t max_panels = 400000;
};

template <class T>
struct PerronResult {
    CValue<T> value;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
};

/// (1/2 pi i) int_{za}^{zb} zeta^{-1}(s+z) V^z / z dz along the segment.
template <class T>
PerronResult<T> perron_segment(const Complex<T>& s_in, std::uint64_t V, const Complex<T>& za_in,
                               const Complex<T>& zb_in, const PrecisionContext& ctx, const PerronOptions& opt = {}) {
    using std::log;
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in), za = detail::rebits(za_in), zb = detail::rebits(zb_in);
    const Complex<T> dir = zb - za;
    const double len = absd(dir);
    if (len == 0.0) return {};
    const T logV = log(T(static_cast<double>(V)));
    const T two_pi = T(2) * real_traits<T>::pi();
    double zeta_err = 0.0;
    // parameter x in [0, len]; z = za + dir x / len; dz = dir / len dx
    const Complex<T> unit = dir / T(len);
    auto f = [&](const T& x) {
        Complex<T> z = za + unit * x;
        if (absd(z) == 0.0) throw error(errc::domain, "Perron contour passes through z = 0");
        CValue<T> iz = inv_zeta(s + z, ctx);
        Complex<T> val = iz.value * exp(z * logV) / z;
        zeta_err = std::max(zeta_err, iz.err_bound * absd(exp(z * logV)) / absd(z));
        return val * unit;
    };
    // refine geometrically toward the point of the segment closest to z = 0
    std::vector<T> breaks;
    const double along = -to_double((za.re * unit.re + za.im * unit.im));
    const double foot = std::clamp(along, 0.0, len);
    const double dist0 = std::max(absd(za + unit * T(foot)), 1e-12);
    const double osc = 2.0 * real_traits<double>::pi() / std::max(1.0, to_double(logV));
    const double max_len = std::min(8.0, 2.0 * osc);
    auto add_side = [&](double from, double to, std::vector<double>& out) {
        // from = foot, moving outward toward `to`
        const double dirn = to > from ? 1.0 : -1.0;
        const double total = std::abs(to - from);
        double x = std::min(dist0 / 4.0, total);
        out.push_back(from);
        while (x < total) {
            out.push_back(from + dirn * x);
            x += std::min(std::max(x, dist0 / 4.0), max_len);
        }
        out.push_back(to);
    };
    std::vector<double> left, right;
    add_side(foot, 0.0, left);
    add_side(foot, len, right);
    std::vector<double> pts;
    for (auto it = left.rbegin(); it != left.rend(); ++it) pts.push_back(*it);
    for (std::size_t k = 1; k < right.size(); ++k) pts.push_back(right[k]);
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (breaks.empty() || to_double(breaks.back()) < pts[k]) breaks.push_back(T(pts[k]));
    QuadratureOptions qo;
    qo.abs_tol = opt.abs_tol * to_double(two_pi);
    qo.max_panels = opt.max_panels;
    auto res = integrate_adaptive<T>(f, breaks, qo, bits);
    // divide by 2 pi i
    Complex<T> v = res.value / Complex<T>(T(0), two_pi);
    PerronResult<T> out;
    out.value = CValue<T>(v, (res.error_estimate + zeta_err * len) / to_double(two_pi));
    out.evaluations = res.evaluations;
    out.panels = res.panels;
    return out;
}

/// Truncated Perron integral (1/2 pi i) int_{c-iW}^{c+iW} zeta^{-1}(s+z) V^z/z dz.
template <class T>
PerronResult<T> perron_mv(const Complex<T>& s, std::uint64_t V, const ContourSpec& spec, const PrecisionContext& ctx,
                          const PerronOptions& opt = {}) {
    if (spec.kind != ContourKind::vertical_segment) throw error(errc::domain, "perron_mv needs a vertical segment");
    if (!(spec.W > 0.0)) throw error(errc::domain, "perron_mv needs W > 0");
    const double sigma = to_double(s.re);
    if (!(spec.c > std::max(1.0 - sigma, 0.0))) throw error(errc::domain, "perron_mv needs c > max(1 - sigma, 0)");
    precision_scope<T> scope(effective_bits<T>(ctx));
    return perron_segment<T>(s, V, Complex<T>(T(spec.c), T(-spec.W)), Complex<T>(T(spec.c), T(spec.W)), ctx, opt);
}

/// The four sides of the rectangle [c_left, c] x [-W, W], each as
/// (1/2 pi i) times the integral in the stated direction.
template <class T>
struct RectangleDecomposition {
    CValue<T> right;   // c - iW -> c + iW
    CValue<T> top;     // c + iW -> c_left + iW
    CValue<T> left;    // c_left - iW -> c_left + iW
    CValue<T> bottom;  // c_left - iW -> c - iW
    CValue<T> residue; // 1/zeta(s), the residue at z = 0
    /// right - (residue + left - top - bottom); zero when no zero of zeta(s+z)
    /// lies inside.
    CValue<T> discrepancy;
};

template <class T>
RectangleDecomposition<T> perron_rectangle(const Complex<T>& s, std::uint64_t V, const ContourSpec& spec,
                                           const PrecisionContext& ctx, const PerronOptions& opt = {}) {
    if (spec.kind != ContourKind::rectangle) throw error(errc::domain, "perron_rectangle needs a rectangle");
    if (!(spec.c_left < 0.0 && spec.c > 0.0)) throw error(errc::domain, "rectangle must straddle z = 0");
    precision_scope<T> scope(effective_bits<T>(ctx));
    const Complex<T> br(T(spec.c), T(-spec.W)), tr(T(spec.c), T(spec.W));
    const Complex<T> bl(T(spec.c_left), T(-spec.W)), tl(T(spec.c_left), T(spec.W));
    RectangleDecomposition<T> d;
    d.right = perron_segment<T>(s, V, br, tr, ctx, opt).value;
    d.top = perron_segment<T>(s, V, tr, tl, ctx, opt).value;
    d.left = perron_segment<T>(s, V, bl, tl, ctx, opt).value;
    d.bottom = perron_segment<T>(s, V, bl, br, ctx, opt).value;
    d.residue = inv_zeta(s, ctx);
    d.discrepancy = d.right - (d.residue + d.left - d.top - d.bottom);
    return d;
}

enum class WindingFunction { inv_zeta, m_v };

inline const char* to_string(WindingFunction f) { return f == WindingFunction::inv_zeta ? "invzeta" : "mv"; }

struct WindingResult {
    long winding = 0;
    double raw = 0.0;         // unrounded value at the final node count
    double previous_raw = 0.0;
    std::size_t nodes = 0;
};

/// (1/2 pi i) of the contour integral of f'/f over a circle, by the
/// trapezoid rule with node doubling until two successive counts round to
/// the same integer.
template <class T>
WindingResult winding_number(WindingFunction fn, const ContourSpec& circle, std::uint64_t V, const MobiusTable* table,
                             const PrecisionContext& ctx, std::size_t min_nodes = 64, std::size_t max_nodes = 16384) {
    using std::cos;
    using std::sin;
    if (circle.kind != ContourKind::circle || !(circle.radius > 0.0))
        throw error(errc::domain, "winding_number needs a circle with positive radius");
    if (fn == WindingFunction::m_v && !table) throw error(errc::domain, "winding_number(m_v) needs a Mobius table");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> center(T(circle.center_re), T(circle.center_im));
    const T r(circle.radius);
    const T two_pi = T(2) * real_traits<T>::pi();

    // log-derivative f'/f at z
    auto logderiv = [&](const Complex<T>& z) -> Complex<T> {
        if (fn == WindingFunction::inv_zeta) {
            if (absd(z - Complex<T>(T(1))) <= 1e3 * real_traits<T>::epsilon())
                throw error(errc::zero_on_contour, "1/zeta vanishes on the contour (s = 1)");
            CValue<T> z0 = zeta_em(z, 0, ctx);
            if (z0.magnitude() <= 10.0 * z0.err_bound)
                throw error(errc::zero_on_contour, "zeta vanishes on the contour");
            CValue<T> z1 = zeta_em(z, 1, ctx);
            return -(z1.value / z0.value);
        }
        auto m = m_v_derivatives(z, V, *table, ctx, 1);
        if (m[0].magnitude() <= 10.0 * m[0].err_bound) throw error(errc::zero_on_contour, "M_V vanishes on the contour");
        return m[1].value / m[0].value;
    };
    // integrand in theta: f'/f(z) * i r e^{i th} / (2 pi i) = f'/f * r e^{i th} / (2 pi)
    auto sample = [&](std::size_t m, std::size_t total) {
        T th = two_pi * T(static_cast<double>(m)) / T(static_cast<double>(total));
        Complex<T> e(cos(th), sin(th));
        return logderiv(center + e * r) * e * r;
    };
    std::size_t M = min_nodes;
    std::vector<Complex<T>> vals;
    for (std::size_t m = 0; m < M; ++m) vals.push_back(sample(m, M));
    auto total = [&]() {
        Complex<T> acc(T(0));
        for (const auto& v : vals) acc += v;
        return to_double(acc.re) / static_cast<double>(vals.size());
    };
    double prev = total();
    for (;;) {
        if (2 * M > max_nodes) throw error(errc::ambiguous_winding, "winding count did not stabilise within the node budget");
        std::vector<Complex<T>> next(2 * M);
        for (std::size_t m = 0; m < M; ++m) {
            next[2 * m] = vals[m];
            next[2 * m + 1] = sample(2 * m + 1, 2 * M);
        }
        vals = std::move(next);
        M *= 2;
        double cur = total();
        const double rc = std::round(cur), rp = std::round(prev);
        if (rc == rp && std::abs(cur - rc) <= 0.1 && std::abs(prev - rp) <= 0.1 && std::abs(cur - prev) <= 1e-3) {
            WindingResult w;
            w.winding = static_cast<long>(rc);
            w.raw = cur;
            w.previous_raw = prev;
            w.nodes = M;
            return w;
        }
        if (std::abs(cur - prev) <= 1e-6 && std::abs(cur - rc) > 0.1)
            throw error(errc::ambiguous_winding, "argument integral converged to a non-integer value");
        prev = cur;
    }
}

}  // namespace zetalab
