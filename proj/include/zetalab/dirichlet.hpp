#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "zetalab/sieve.hpp"
#include "zetalab/zeta.hpp"

namespace zetalab {

// ---------------------------------------------------------------------------
// Mollifier polynomial M_V(s) = sum_{n <= V} mu(n) n^{-s}

/// M_V and its first `order` derivatives at s. Entry k is
/// sum mu(n) (-log n)^k n^{-s}.
template <class T>
std::vector<CValue<T>> m_v_derivatives(const Complex<T>& s_in, std::uint64_t V, const MobiusTable& table,
                                       const PrecisionContext& ctx, unsigned order) {
    if (V > table.limit) throw error(errc::domain, "m_v: V exceeds the Mobius table");
    if (V < 1) throw error(errc::domain, "m_v: V must be >= 1");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    auto pt = detail::power_table(s, static_cast<std::size_t>(V), true);
    std::vector<Complex<T>> sum(order + 1, Complex<T>(T(0)));
    std::vector<double> mag(order + 1, 0.0);
    for (std::uint64_t n = 1; n <= V; ++n) {
        const int mu = table.mu_at(n);
        if (mu == 0) continue;
        Complex<T> term = mu > 0 ? pt.pw[n] : -pt.pw[n];
        for (unsigned k = 0; k <= order; ++k) {
            sum[k] += term;
            mag[k] += absd(term);
            if (k < order) term = term * (-pt.lg[n]);
        }
    }
    const double u = std::ldexp(1.0, -static_cast<int>(bits));
    std::vector<CValue<T>> out;
    out.reserve(order + 1);
    for (unsigned k = 0; k <= order; ++k)
        out.emplace_back(sum[k], u * mag[k] * (detail::sum_rounding_factor(V) + 4.0 * (k + 1)));
    return out;
}

template <class T>
CValue<T> m_v(const Complex<T>& s, std::uint64_t V, const MobiusTable& table, const PrecisionContext& ctx) {
    return m_v_derivatives(s, V, table, ctx, 0)[0];
}

// ---------------------------------------------------------------------------
// Poisson weights p_j(u) = e^{-u} u^j / j!

template <class T>
T p_weight(unsigned j, const T& u) {
    using std::exp;
    using std::log;
    if (u > T(0)) return exp(-u + T(static_cast<double>(j)) * log(u) - real_traits<T>::log_factorial(j));
    if (u == T(0)) return j == 0 ? T(1) : T(0);
    T r = exp(-u);
    for (unsigned k = 1; k <= j; ++k) r *= u / T(static_cast<double>(k));
    return r;
}

// ---------------------------------------------------------------------------
// F_V(s) = zeta(s) M_V(s + root - 1) and G_UV

enum class MollifierVariant { standard, tilde };

inline const char* to_string(MollifierVariant v) { return v == MollifierVariant::standard ? "standard" : "tilde"; }

template <class T>
struct MollifierSpec {
    std::uint64_t V = 2;
    T root{1};
    MollifierVariant variant = MollifierVariant::standard;
};

template <class T>
struct GSpec {
    MollifierSpec<T> mollifier;
    std::uint64_t U = 2;
    T v{2};
    T s0{1};
};

/// Radius around s = 1 inside which F_V is evaluated from its Taylor
/// expansion instead of the product (the pole of zeta cancels against the
/// zero of M_V at the root).
inline double f_v_near_radius(unsigned bits) { return std::ldexp(1.0, -static_cast<int>(bits / 3)); }

template <class T>
CValue<T> f_v(const Complex<T>& s_in, const MollifierSpec<T>& spec, const MobiusTable& table,
              const PrecisionContext& ctx) {
    if (!(std::abs(to_double(spec.root) - 1.0) <= 1.0)) throw error(errc::domain, "mollifier root must satisfy |root-1| <= 1");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    const T root = at_current_precision(spec.root);
    const Complex<T> one(T(1));
    const Complex<T> delta = s - one;
    const double dabs = absd(delta);
    if (dabs <= f_v_near_radius(bits)) {
        // zeta(1+delta) = 1/delta + gamma - gamma_1 delta + ..., M(root+delta) = M0 + M1 delta + ...
        auto m = m_v_derivatives(Complex<T>(root), spec.V, table, ctx, 3);
        const double m0 = m[0].magnitude(), m1 = m[1].magnitude();
        if (m0 > std::ldexp(1.0, -static_cast<int>(bits / 2)) * std::max(1.0, m1))
            throw error(errc::precision_exhausted, "f_v: root is not a zero of M_V to working tolerance near s = 1");
        const T gamma = real_traits<T>::euler_gamma();
        Complex<T> val = m[1].value + delta * (m[1].value * gamma + m[2].value / T(2));
        const double gamma1 = 0.0728158454836767;  // |Stieltjes gamma_1|
        double err = 2.0 * dabs * dabs *
                     (m[3].magnitude() / 6.0 + 0.5773 * m[2].magnitude() / 2.0 + gamma1 * m1);
        err += m[1].err_bound + dabs * (m[1].err_bound + m[2].err_bound);
        if (m1 > 0.0) err += m0 / m1 * m[2].magnitude();
        return {val, err};
    }
    CValue<T> z = zeta_em(s, 0, ctx);
    CValue<T> mv = m_v(s + Complex<T>(root - T(1)), spec.V, table, ctx);
    return z * mv;
}

/// G_UV(s) = U^{s-s0} (F_V(s+iv) + F_V(s-iv)) / 2.
template <class T>
CValue<T> g_uv(const Complex<T>& s_in, const GSpec<T>& g, const MobiusTable& table, const PrecisionContext& ctx) {
    using std::log;
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    const Complex<T> iv(T(0), at_current_precision(g.v));
    CValue<T> fp = f_v(s + iv, g.mollifier, table, ctx);
    CValue<T> fm = f_v(s - iv, g.mollifier, table, ctx);
    const T logU = log(T(static_cast<double>(g.U)));
    Complex<T> pref = exp((s - Complex<T>(at_current_precision(g.s0))) * logU);
    CValue<T> sum = fp + fm;
    CValue<T> half(Complex<T>(T(0.5)));
    CValue<T> p(pref, 4.0 * real_traits<T>::epsilon() * absd(pref) * (1.0 + absd(s) * to_double(logU)));
    return p * (sum * half);
}

// ---------------------------------------------------------------------------
// Derivatives of G_UV

/// Taylor coefficients a_k = D^k G(s) / k! for k = 0..kmax from one set of
/// trapezoid nodes on |z - s| = radius.
template <class T>
struct TaylorCoefficients {
    std::vector<CValue<T>> a;
    std::size_t nodes = 0;
    double radius = 0.0;
};

/// Default Cauchy radius: half the distance from s +- iv to the pole of zeta,
/// capped at 1/2.
template <class T>
double default_cauchy_radius(const Complex<T>& s, const GSpec<T>& g) {
    const double sr = to_double(s.re), si = to_double(s.im), v = to_double(g.v);
    const double d1 = std::hypot(sr - 1.0, si + v), d2 = std::hypot(sr - 1.0, si - v);
    return std::min(0.5, std::min(d1, d2) / 2.0);
}

template <class T, class F>
TaylorCoefficients<T> cauchy_taylor(F&& f, const Complex<T>& s_in, unsigned kmax, double radius,
                                    const PrecisionContext& ctx, std::size_t min_nodes = 32,
                                    std::size_t max_nodes = 4096) {
    using std::cos;
    using std::pow;
    using std::sin;
    if (!(radius > 0.0)) throw error(errc::domain, "Cauchy radius must be positive");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    const T r(radius);
    const T two_pi = T(2) * real_traits<T>::pi();
    const double target = effective_target<T>(ctx);
    const double floor = std::ldexp(1.0, -static_cast<int>(bits / 2));
    const double u = std::ldexp(1.0, -static_cast<int>(bits));

    std::size_t M = std::max<std::size_t>(min_nodes, 2 * kmax + 2);
    std::vector<Complex<T>> vals;  // values at e^{2 pi i m / M}, in index order
    double max_abs = 0.0, max_err = 0.0;
    auto sample = [&](std::size_t m, std::size_t total) {
        T th = two_pi * T(static_cast<double>(m)) / T(static_cast<double>(total));
        CValue<T> v = f(s + Complex<T>(r * cos(th), r * sin(th)));
        max_abs = std::max(max_abs, v.magnitude());
        max_err = std::max(max_err, v.err_bound);
        return v.value;
    };
    for (std::size_t m = 0; m < M; ++m) vals.push_back(sample(m, M));

    auto coefficients = [&](const std::vector<Complex<T>>& v) {
        const std::size_t n = v.size();
        std::vector<Complex<T>> a(kmax + 1, Complex<T>(T(0)));
        for (std::size_t m = 0; m < n; ++m) {
            T th = two_pi * T(static_cast<double>(m)) / T(static_cast<double>(n));
            // e^{-i k th}, built by repeated multiplication
            Complex<T> w(cos(th), -sin(th));
            Complex<T> p(T(1));
            for (unsigned k = 0; k <= kmax; ++k) {
                a[k] += v[m] * p;
                p = p * w;
            }
        }
        T rk(1);
        for (unsigned k = 0; k <= kmax; ++k) {
            a[k] = a[k] / (T(static_cast<double>(n)) * rk);
            rk *= r;
        }
        return a;
    };

    std::vector<Complex<T>> prev = coefficients(vals);
    for (;;) {
        if (2 * M > max_nodes) throw error(errc::non_convergence, "Cauchy trapezoid: node budget exhausted");
        std::vector<Complex<T>> next(2 * M);
        for (std::size_t m = 0; m < M; ++m) {
            next[2 * m] = vals[m];
            next[2 * m + 1] = sample(2 * m + 1, 2 * M);
        }
        vals = std::move(next);
        M *= 2;
        std::vector<Complex<T>> cur = coefficients(vals);
        bool ok = true;
        std::vector<double> diff(kmax + 1);
        for (unsigned k = 0; k <= kmax; ++k) {
            diff[k] = absd(cur[k] - prev[k]);
            const double scale = std::max(absd(cur[k]), floor * max_abs / std::pow(radius, static_cast<double>(k)));
            if (diff[k] > target * scale) ok = false;
        }
        prev = std::move(cur);
        if (ok) {
            TaylorCoefficients<T> out;
            out.nodes = M;
            out.radius = radius;
            for (unsigned k = 0; k <= kmax; ++k) {
                const double rk = std::pow(radius, static_cast<double>(k));
                const double err = diff[k] + (max_err + 4.0 * u * max_abs * std::log2(double(M) + 2.0)) / rk;
                out.a.emplace_back(prev[k], err);
            }
            return out;
        }
    }
}

/// D^j G_UV(s) by the Cauchy integral on |z - s| = radius (radius <= 0 picks
/// the default).
template <class T>
CValue<T> g_deriv_cauchy(unsigned j, const Complex<T>& s, const GSpec<T>& g, double radius, const MobiusTable& table,
                         const PrecisionContext& ctx) {
    if (radius <= 0.0) radius = default_cauchy_radius(s, g);
    auto tc = cauchy_taylor<T>([&](const Complex<T>& z) { return g_uv(z, g, table, ctx); }, s, j, radius, ctx);
    using std::exp;
    precision_scope<T> scope(effective_bits<T>(ctx));
    T fact = exp(real_traits<T>::log_factorial(j));
    if constexpr (!real_traits<T>::is_multiprecision) fact = std::round(fact);
    CValue<T> a = tc.a[j];
    return {a.value * fact, a.err_bound * to_double(fact)};
}

/// Central finite difference h^{-j} sum_k (-1)^k C(j,k) f(s + (j/2 - k) h).
template <class T, class F>
CValue<T> central_difference(F&& f, unsigned j, const Complex<T>& s, const T& h, const PrecisionContext& ctx) {
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    Complex<T> acc(T(0));
    double err = 0.0;
    T binom(1);
    for (unsigned k = 0; k <= j; ++k) {
        const T offset = (T(static_cast<double>(j)) / T(2) - T(static_cast<double>(k))) * h;
        CValue<T> v = f(s + Complex<T>(offset));
        Complex<T> term = v.value * binom;
        acc += (k % 2 == 0) ? term : -term;
        err += v.err_bound * to_double(binom) + real_traits<T>::epsilon() * absd(term);
        binom = binom * T(static_cast<double>(j - k)) / T(static_cast<double>(k + 1));
    }
    T hj(1);
    for (unsigned k = 0; k < j; ++k) hj *= h;
    return {acc / hj, err / to_double(hj)};
}

/// Step balancing O(h^2) truncation against eps / h^j cancellation.
inline double default_fd_step(unsigned j, unsigned bits) {
    return std::pow(2.0, -static_cast<double>(bits) / static_cast<double>(j + 2));
}

/// D^j G_UV(s) by central differences; h <= 0 picks default_fd_step.
template <class T>
CValue<T> g_deriv_fd(unsigned j, const Complex<T>& s, const GSpec<T>& g, double h, const MobiusTable& table,
                     const PrecisionContext& ctx) {
    if (h <= 0.0) h = default_fd_step(j, effective_bits<T>(ctx));
    precision_scope<T> scope(effective_bits<T>(ctx));
    return central_difference<T>([&](const Complex<T>& z) { return g_uv(z, g, table, ctx); }, j, s, T(h), ctx);
}

enum class SeriesTail { euler_maclaurin, bound_only };

namespace detail {

/// Jet in h of sum_{m >= m0} m^{-(a0+h)} by Euler-Maclaurin, with an
/// estimate of the remainder.
template <class T>
std::pair<Jet<T>, double> hurwitz_tail_jet(const Complex<T>& a0, std::uint64_t m0, std::size_t order, unsigned bits) {
    using std::log;
    const T m0r(static_cast<double>(m0));
    const T lm = log(m0r);
    const Complex<T> one(T(1));
    Jet<T> pw = jet_pow_neg(lm, a0, order);  // m0^{-a}
    Jet<T> res = (pw * Complex<T>(m0r)) * jet_reciprocal_linear(a0 - one, order);
    res += pw * Complex<T>(T(0.5));
    Jet<T> P = Jet<T>::variable(a0, order);  // (a)_{2l-1}
    Jet<T> base = pw * Complex<T>(T(1) / m0r);  // m0^{-a-2l+1} at l = 1
    const T m02 = m0r * m0r;
    const double tol = std::ldexp(1.0, -static_cast<int>(bits) + 2);
    double res_mag = 0.0;
    for (const auto& c : res.c) res_mag = std::max(res_mag, absd(c));
    double remainder = INFINITY, prev_mag = INFINITY;
    for (std::size_t l = 1; l <= 4 * bits + 16; ++l) {
        const T& b = bernoulli_over_factorial<T>(std::max<std::size_t>(l, 32), bits)[l - 1];
        Jet<T> term = (P * base) * Complex<T>(b);
        double mag = 0.0;
        for (const auto& c : term.c) mag = std::max(mag, absd(c));
        // asymptotic series: stop at the target or at the smallest term
        if (mag <= tol * std::max(res_mag, 1e-300) || mag > prev_mag) {
            remainder = 2.0 * std::min(mag, prev_mag);
            break;
        }
        prev_mag = mag;
        res += term;
        for (std::size_t m = 2 * l - 1; m <= 2 * l; ++m)
            P = P * Jet<T>::variable(a0 + Complex<T>(T(static_cast<double>(m))), order);
        base = base * Complex<T>(T(1) / m02);
    }
    return {res, remainder};
}

/// sum_{n > N} c_n n^{-a} (log n - L)^j with c_n = sum_{d | n, d <= V} w_d,
/// exact up to rounding and the Euler-Maclaurin remainder.
template <class T>
std::pair<Complex<T>, double> coefficient_tail(const Complex<T>& a, unsigned j, const T& L, std::uint64_t N,
                                               std::uint64_t V, const T& shift, const MobiusTable& table,
                                               unsigned bits) {
    using std::exp;
    using std::log;
    Complex<T> total(T(0));
    double err = 0.0;
    // binomials C(j,k) and factorials k!
    std::vector<T> binom(j + 1), fact(j + 1);
    binom[0] = T(1);
    fact[0] = T(1);
    for (unsigned k = 1; k <= j; ++k) {
        binom[k] = binom[k - 1] * T(static_cast<double>(j - k + 1)) / T(static_cast<double>(k));
        fact[k] = fact[k - 1] * T(static_cast<double>(k));
    }
    for (std::uint64_t d = 1; d <= V; ++d) {
        const int mu = table.mu_at(d);
        if (mu == 0) continue;
        const std::uint64_t m0 = N / d + 1;
        auto [jet, rem] = hurwitz_tail_jet(a, m0, j, bits);
        const T ld = log(T(static_cast<double>(d)));
        // sum_{m >= m0} m^{-a} (log m)^k = (-1)^k k! jet_k
        Complex<T> inner(T(0));
        const T x = ld - L;
        T xp(1);  // (log d - L)^{j-k}, built from k = j downward
        for (unsigned kk = 0; kk <= j; ++kk) {
            const unsigned k = j - kk;
            Complex<T> mk = jet.c[k] * fact[k];
            if (k % 2 == 1) mk = -mk;
            inner += mk * (binom[k] * xp);
            xp *= x;
        }
        T w = exp(shift * ld);
        if (mu < 0) w = -w;
        Complex<T> dpow = pow_neg(ld, a);  // d^{-a}
        Complex<T> contrib = inner * dpow * w;
        total += contrib;
        double scale = to_double(abs(w)) * absd(dpow) * to_double(fact[j]) * std::pow(std::abs(to_double(x)) + 1.0, j);
        err += rem * scale + std::ldexp(1.0, -static_cast<int>(bits) + 4) * absd(contrib);
    }
    return {total, err};
}

/// Upper estimate of sum_{n > N} d(n) (log n)^j n^{-sigma} from the integral
/// of (log x + 1)(log x)^j x^{-sigma}.
inline double divisor_log_tail_estimate(double sigma, unsigned j, double N) {
    if (!(sigma > 1.0)) return INFINITY;
    const double b = sigma - 1.0, y0 = std::log(N);
    // int_{y0}^inf (y+1) y^j e^{-b y} dy
    auto part = [&](unsigned p) {
        return boost::math::tgamma(static_cast<double>(p + 1), b * y0) / std::pow(b, static_cast<double>(p + 1));
    };
    return part(j + 1) + part(j);
}

}  // namespace detail

/// (-z0)^j / j! D^j G_UV(s) from the coefficient series
///   (1/2) U^{s-s0} z0^j / j! sum_{+-} sum_n c_n n^{-(s +- iv)} (log n - log U)^j,
/// summed directly up to coeffs.limit. The remainder n > limit is either
/// added in closed form (divisor-wise Euler-Maclaurin) or only bounded.
template <class T>
CValue<T> g_deriv_series(unsigned j, const Complex<T>& s_in, const GSpec<T>& g, const CoeffTable<T>& coeffs, double z0,
                         const MobiusTable& table, const PrecisionContext& ctx,
                         SeriesTail tail = SeriesTail::euler_maclaurin, double margin = 0.05) {
    using std::exp;
    using std::log;
    using std::pow;
    if (j < 1) throw error(errc::domain, "g_deriv_series needs j >= 1");
    if (!(to_double(s_in.re) >= 1.0 + margin))
        throw error(errc::domain, "g_deriv_series needs Re(s) >= 1 + margin for term-wise convergence");
    if (coeffs.V != g.mollifier.V) throw error(errc::inconsistent, "coefficient table built for a different V");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    if (z0 == 0.0) return {Complex<T>(T(0)), 0.0};
    const Complex<T> s = detail::rebits(s_in);
    const T logU = log(T(static_cast<double>(g.U)));
    const T v = at_current_precision(g.v);
    const std::uint64_t N = coeffs.limit;
    const double u = std::ldexp(1.0, -static_cast<int>(bits));

    Complex<T> total(T(0));
    double err = 0.0;
    for (int sign : {+1, -1}) {
        const Complex<T> a = s + Complex<T>(T(0), sign > 0 ? v : -v);
        auto pt = detail::power_table(a, static_cast<std::size_t>(N));
        Complex<T> head(T(0));
        double mag = 0.0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            if (coeffs.c[n] == T(0)) continue;
            T x = pt.lg[n] - logU;
            T xj(1);
            for (unsigned k = 0; k < j; ++k) xj *= x;
            Complex<T> term = pt.pw[n] * (coeffs.c[n] * xj);
            head += term;
            mag += absd(term);
        }
        total += head;
        err += u * mag * (detail::sum_rounding_factor(N) + 2.0 * j);
        if (tail == SeriesTail::euler_maclaurin) {
            auto [t, te] = detail::coefficient_tail(a, j, logU, N, coeffs.V, coeffs.exponent_shift, table, bits);
            total += t;
            err += te;
        } else {
            const double cmax = std::max(1.0, std::pow(static_cast<double>(coeffs.V), to_double(coeffs.exponent_shift)));
            // (log n - log U)^j <= (log n)^j for n > N >= U
            err += cmax * detail::divisor_log_tail_estimate(to_double(s.re), j, static_cast<double>(N));
        }
    }
    // prefactor (1/2) U^{s-s0} z0^j / j!
    const T z(z0);
    T c = exp(T(static_cast<double>(j)) * log(abs(z)) - real_traits<T>::log_factorial(j)) / T(2);
    if (z0 < 0 && j % 2 == 1) c = -c;
    Complex<T> pref = exp((s - Complex<T>(at_current_precision(g.s0))) * logU) * c;
    const double pm = absd(pref);
    return {total * pref, err * pm + 8.0 * u * pm * absd(total) * (1.0 + j)};
}

/// (sum_{j=1}^{J-1} (-z0 log U)^j / j!, U^{-z_gap} (-z0 log U)^J / J!).
template <class T>
std::pair<T, T> taylor_main_terms(unsigned J, const T& z0, std::uint64_t U, const T& z_gap) {
    using std::exp;
    using std::log;
    if (J < 2) throw error(errc::domain, "taylor_main_terms needs J >= 2");
    if (z_gap < T(0)) throw error(errc::domain, "z_gap must be >= 0");
    const T x = -z0 * log(T(static_cast<double>(U)));
    T term(1), partial(0);
    for (unsigned j = 1; j < J; ++j) {
        term = term * x / T(static_cast<double>(j));
        partial += term;
    }
    term = term * x / T(static_cast<double>(J));
    T rem = term * exp(-z_gap * log(T(static_cast<double>(U))));
    return {partial, rem};
}

}  // namespace zetalab
