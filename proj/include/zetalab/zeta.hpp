#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <vector>

#include "zetalab/core/bernoulli.hpp"
#include "zetalab/core/complex.hpp"
#include "zetalab/core/quadrature.hpp"

namespace zetalab {

namespace detail {

/// Smallest-prime-factor table shared by all power-table builds. Grows on
/// demand; readers hold a snapshot.
inline std::shared_ptr<const std::vector<std::uint32_t>> spf_table(std::size_t n) {
    static std::mutex m;
    static std::shared_ptr<const std::vector<std::uint32_t>> cur;
    std::lock_guard<std::mutex> g(m);
    if (cur && cur->size() > n) return cur;
    std::size_t size = std::max<std::size_t>(n + 1, cur ? 2 * cur->size() : 1024);
    auto spf = std::make_shared<std::vector<std::uint32_t>>(size, 0);
    for (std::size_t i = 2; i < size; ++i) {
        if ((*spf)[i]) continue;
        for (std::size_t j = i; j < size; j += i)
            if (!(*spf)[j]) (*spf)[j] = static_cast<std::uint32_t>(i);
    }
    cur = spf;
    return cur;
}

/// n^{-s} and log n for 1 <= n <= N. Exponentials are taken only at primes;
/// composites are products of earlier entries, which is far cheaper at high
/// precision and loses only a few ulps per prime factor.
template <class T>
struct PowerTable {
    std::vector<Complex<T>> pw;  // pw[n] = n^{-s}
    std::vector<T> lg;           // lg[n] = log n
};

template <class T>
PowerTable<T> power_table(const Complex<T>& s, std::size_t N, bool squarefree_only = false) {
    using std::log;
    auto spf = spf_table(N);
    PowerTable<T> t;
    t.pw.resize(N + 1);
    t.lg.resize(N + 1);
    if (N >= 1) {
        t.pw[1] = Complex<T>(T(1));
        t.lg[1] = T(0);
    }
    for (std::size_t n = 2; n <= N; ++n) {
        std::uint32_t p = (*spf)[n];
        if (p == n) {
            t.lg[n] = log(T(static_cast<double>(n)));
            t.pw[n] = pow_neg(t.lg[n], s);
        } else {
            std::size_t q = n / p;
            if (squarefree_only && q % p == 0) continue;
            t.lg[n] = t.lg[p] + t.lg[q];
            t.pw[n] = t.pw[p] * t.pw[q];
        }
    }
    return t;
}

template <class T>
Complex<T> rebits(const Complex<T>& z) {
    return {at_current_precision(z.re), at_current_precision(z.im)};
}

inline double sum_rounding_factor(std::size_t N) {
    return 2.0 * std::log2(static_cast<double>(N) + 1.0) + 10.0 + std::sqrt(static_cast<double>(N));
}

/// One Euler-Maclaurin evaluation of zeta (order 0) or zeta' (order 1) at
/// the active precision.
template <class T>
CValue<T> zeta_em_once(const Complex<T>& s_in, int order, unsigned bits) {
    using std::abs;
    using std::ceil;
    const Complex<T> s = rebits(s_in);
    const double t = std::abs(to_double(s.im));
    const double sigma = to_double(s.re);
    const std::size_t N = static_cast<std::size_t>(std::max(std::ceil(t / 2.0), static_cast<double>(bits)));
    const double u = std::ldexp(1.0, -static_cast<int>(bits));

    PowerTable<T> pt = power_table(s, N);
    Complex<T> S(T(0));
    double S_abs = 0.0;
    for (std::size_t n = 1; n < N; ++n) {
        if (order == 0) {
            S += pt.pw[n];
            S_abs += absd(pt.pw[n]);
        } else {
            Complex<T> term = pt.pw[n] * (-pt.lg[n]);
            S += term;
            S_abs += absd(term);
        }
    }

    const T Nr(static_cast<double>(N));
    const T logN = pt.lg[N];
    const Complex<T> Nps = pt.pw[N];
    const Complex<T> one(T(1));
    const Complex<T> sm1 = s - one;
    const Complex<T> A = Nps * Nr / sm1;
    const Complex<T> B = Nps / T(2);
    if (order == 0) {
        S += A;
        S += B;
    } else {
        S += A * (-logN) - A / sm1;
        S += B * (-logN);
    }
    S_abs += absd(A) + absd(B);

    // Bernoulli corrections T_k = B_{2k}/(2k)! (s)_{2k-1} N^{1-s-2k}.
    const double tol_abs_floor = std::ldexp(1.0, -static_cast<int>(bits / 2));
    const double tol_rel = std::ldexp(1.0, -static_cast<int>(bits) + 4);
    const std::size_t kmax = 8 * bits + 64;
    Complex<T> P = s;      // (s)_{2k-1}
    Complex<T> dP = one;   // d/ds (s)_{2k-1}
    Complex<T> Npow = Nps / Nr;
    const T N2 = Nr * Nr;
    double remainder = 0.0;
    double prev_mag = INFINITY;
    bool converged = false;
    for (std::size_t k = 1; k <= kmax; ++k) {
        const T& bk = bernoulli_over_factorial<T>(std::max<std::size_t>(k, 32), bits)[k - 1];
        Complex<T> term = order == 0 ? (P * Npow) * bk : ((dP - P * logN) * Npow) * bk;
        const double mag = absd(term);
        const double ratio = absd(s + Complex<T>(T(static_cast<double>(2 * k - 1)))) /
                             (sigma + static_cast<double>(2 * k - 1));
        const double bound = (sigma + 2.0 * k - 1.0 > 0.0) ? ratio * mag * (order == 0 ? 1.0 : 2.0) : INFINITY;
        const double scale = std::max(absd(S), tol_abs_floor);
        // Stop before adding T_k once it bounds the remainder of the first k-1 terms.
        if (bound <= tol_rel * scale) {
            remainder = bound;
            converged = true;
            break;
        }
        if (k > 4 && mag > prev_mag) {
            remainder = bound;
            break;  // asymptotic series turned; let the caller retry
        }
        prev_mag = mag;
        S += term;
        S_abs += mag;
        // advance (s)_m and its derivative two steps: P_{m+1} = P_m (s+m)
        for (std::size_t m = 2 * k - 1; m <= 2 * k; ++m) {
            Complex<T> f = s + Complex<T>(T(static_cast<double>(m)));
            dP = dP * f + P;
            P = P * f;
        }
        Npow = Npow / N2;
    }
    if (!converged && remainder == 0.0) remainder = INFINITY;
    const double err = remainder + u * S_abs * sum_rounding_factor(N);
    return {S, err};
}

}  // namespace detail

/// zeta(s) (order 0) or zeta'(s) (order 1) by Euler-Maclaurin summation with
/// an analytic remainder bound. The multiprecision path retries at doubled
/// precision until err_bound <= target * max(|value|, 2^(-bits/2)).
template <class T>
CValue<T> zeta_em(const Complex<T>& s, int order, const PrecisionContext& ctx) {
    ctx.validate();
    if (order != 0 && order != 1) throw error(errc::domain, "zeta order must be 0 or 1");
    if (s.re == T(1) && s.im == T(0)) throw error(errc::pole, "zeta has a pole at s = 1");
    const double target = effective_target<T>(ctx);
    const double floor = std::ldexp(1.0, -static_cast<int>(effective_bits<T>(ctx) / 2));
    PrecisionContext c = ctx;
    for (unsigned attempt = 0;; ++attempt) {
        const unsigned bits = effective_bits<T>(c);
        CValue<T> r;
        {
            precision_scope<T> scope(bits);
            r = detail::zeta_em_once(s, order, bits);
        }
        if (!real_traits<T>::is_multiprecision) {
            if (!std::isfinite(r.err_bound) || !std::isfinite(r.magnitude()))
                throw error(errc::precision_exhausted, "zeta: double precision cannot resolve this point");
            return r;
        }
        if (std::isfinite(r.err_bound) && r.err_bound <= target * std::max(r.magnitude(), floor)) return r;
        if (attempt >= ctx.max_retries)
            throw error(errc::precision_exhausted, "zeta: accuracy target not met after precision doublings");
        c = c.doubled();
    }
}

/// 1/zeta(s), refusing points where zeta is indistinguishable from zero.
template <class T>
CValue<T> inv_zeta(const Complex<T>& s, const PrecisionContext& ctx) {
    CValue<T> z = zeta_em(s, 0, ctx);
    if (z.magnitude() <= 4.0 * z.err_bound) throw error(errc::near_zero, "zeta(s) is within 4 err_bound of zero");
    precision_scope<T> scope(effective_bits<T>(ctx));
    return CValue<T>(Complex<T>(T(1))) / z;
}

namespace detail {

/// Distance of x from the nearest integer, and that integer.
template <class T>
std::pair<double, long> nearest_integer(const T& x) {
    using std::round;
    double xd = to_double(x);
    double r = std::round(xd);
    return {std::abs(to_double(T(x - T(r)))), static_cast<long>(r)};
}

}  // namespace detail

/// chi(s) with zeta(s) = chi(s) zeta(1-s), via
/// pi^{s-1/2} Gamma((1-s)/2) / Gamma(s/2).
template <class T>
CValue<T> chi_factor(const Complex<T>& s_in, const PrecisionContext& ctx) {
    using std::log;
    ctx.validate();
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    const double u = std::ldexp(1.0, -static_cast<int>(bits));
    const double mag_s = absd(s);
    const double tiny = 64.0 * u * std::max(1.0, mag_s);
    if (std::abs(to_double(s.im)) <= tiny) {
        auto [dist, k] = detail::nearest_integer(s.re);
        if (dist <= tiny) {
            if (k >= 1 && k % 2 == 1) throw error(errc::pole, "chi has a pole at odd positive integers");
            if (k <= 0 && k % 2 == 0) return CValue<T>(Complex<T>(T(0)), 0.0);
        }
    }
    const T half(0.5);
    const Complex<T> one(T(1));
    Complex<T> lg1 = log_gamma((one - s) / T(2), bits);
    Complex<T> lg2 = log_gamma(s / T(2), bits);
    Complex<T> e = (s - Complex<T>(half)) * log(real_traits<T>::pi()) + lg1 - lg2;
    Complex<T> v = exp(e);
    const double err = absd(v) * u * (64.0 + 8.0 * (mag_s + 1.0) * std::log(mag_s + 2.0));
    return {v, err};
}

/// Approximate functional equation with x = y = sqrt(|t|/2pi). The error
/// bound includes the envelope 10 (x^{-sigma} + |t|^{1/2-sigma} y^{sigma-1}).
template <class T>
CValue<T> afe_zeta(const Complex<T>& s_in, const PrecisionContext& ctx) {
    using std::sqrt;
    ctx.validate();
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    const Complex<T> s = detail::rebits(s_in);
    const double sigma = to_double(s.re);
    const double t = std::abs(to_double(s.im));
    const double two_pi = 2.0 * real_traits<double>::pi();
    if (sigma < 0.0 || sigma > 1.0) throw error(errc::domain, "afe_zeta needs 0 <= sigma <= 1");
    if (t < two_pi) throw error(errc::domain, "afe_zeta needs |t| >= 2 pi");
    const double x = std::sqrt(t / two_pi);
    const std::size_t n_max = static_cast<std::size_t>(std::floor(x));
    const Complex<T> one(T(1));
    auto p1 = detail::power_table(s, n_max);
    auto p2 = detail::power_table(one - s, n_max);
    Complex<T> s1(T(0)), s2(T(0));
    double abs_sum = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        s1 += p1.pw[n];
        s2 += p2.pw[n];
        abs_sum += absd(p1.pw[n]) + absd(p2.pw[n]);
    }
    CValue<T> chi = chi_factor(s, ctx);
    Complex<T> v = s1 + chi.value * s2;
    const double envelope = 10.0 * (std::pow(x, -sigma) + std::pow(t, 0.5 - sigma) * std::pow(x, sigma - 1.0));
    const double u = std::ldexp(1.0, -static_cast<int>(bits));
    const double err = envelope + chi.err_bound * absd(s2) + u * abs_sum * (1.0 + chi.magnitude()) *
                                                               detail::sum_rounding_factor(n_max);
    return {v, err};
}

inline constexpr double zero_free_c = 0.034666;
inline constexpr double zero_free_t0 = 705.0;
inline constexpr double zero_free_scale = 47.886;

/// Right edge of the explicit zero-free region at height t.
inline double zero_free_boundary(double t) {
    return 1.0 - zero_free_c / std::log(std::max(std::abs(t), zero_free_t0) / zero_free_scale);
}

/// The simplified form 1 - c1/log(|t|+2), with c1 defaulting to 1/500.
inline double zero_free_boundary_simple(double t, double c1 = 1.0 / 500.0) {
    return 1.0 - c1 / std::log(std::abs(t) + 2.0);
}

/// Hardy's Z(t) = e^{i theta(t)} zeta(1/2+it), theta the Riemann-Siegel theta.
template <class T>
RValue<T> hardy_z(const T& t_in, const PrecisionContext& ctx) {
    using std::cos;
    using std::log;
    using std::sin;
    ctx.validate();
    if (to_double(t_in) < 0.0) throw error(errc::domain, "hardy_z needs t >= 0");
    const unsigned bits = effective_bits<T>(ctx);
    const T half(0.5);
    CValue<T> z;
    {
        precision_scope<T> scope(bits);
        z = zeta_em(Complex<T>(half, at_current_precision(t_in)), 0, ctx);
    }
    precision_scope<T> scope(bits);
    const T t = at_current_precision(t_in);
    Complex<T> lg = log_gamma(Complex<T>(T(0.25), t / T(2)), bits);
    T theta = lg.im - t / T(2) * log(real_traits<T>::pi());
    Complex<T> w = Complex<T>(cos(theta), sin(theta)) * z.value;
    const double u = std::ldexp(1.0, -static_cast<int>(bits));
    const double theta_err = 16.0 * u * (absd(lg) + to_double(t) + 10.0);
    const double err = z.err_bound + z.magnitude() * theta_err + 4.0 * u * z.magnitude();
    if (std::abs(to_double(w.im)) > 8.0 * err + 16.0 * u)
        throw error(errc::precision_exhausted, "hardy_z: rotated value is not real to within err_bound");
    return {w.re, err};
}

/// Integral of |zeta(sigma+it)|^2 over [t_lo, t_hi] by adaptive
/// Gauss-Legendre. rel_tol = 0 uses the context target.
template <class T>
RValue<T> second_moment(double sigma, double t_lo, double t_hi, const PrecisionContext& ctx, double rel_tol = 0.0,
                        std::size_t max_panels = 200000) {
    ctx.validate();
    if (t_hi == t_lo && t_lo >= 0.0) return {T(0), 0.0};
    if (!(t_hi > t_lo) || t_lo < 0.0) throw error(errc::domain, "second_moment needs t_hi > t_lo >= 0");
    if (!(sigma > 0.5)) throw error(errc::domain, "second_moment needs sigma > 1/2");
    if (rel_tol <= 0.0) rel_tol = effective_target<T>(ctx);
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);

    // The mean value of |zeta|^2 is close to zeta(2 sigma); it fixes the
    // absolute tolerance without a pilot pass.
    CValue<T> z2 = zeta_em(Complex<T>(T(2 * sigma)), 0, ctx);
    const double scale = z2.magnitude() * (t_hi - t_lo);
    double zeta_err_integral = 0.0;
    const T sig(sigma);
    auto f = [&](const T& t) {
        CValue<T> z = zeta_em(Complex<T>(sig, t), 0, ctx);
        zeta_err_integral = std::max(zeta_err_integral, 2.0 * z.magnitude() * z.err_bound);
        return Complex<T>(norm(z.value));
    };
    std::vector<T> breaks;
    const std::size_t pieces = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / 4.0));
    for (std::size_t k = 0; k <= pieces; ++k)
        breaks.push_back(T(t_lo) + (T(t_hi) - T(t_lo)) * T(static_cast<double>(k)) / T(static_cast<double>(pieces)));
    QuadratureOptions opt;
    opt.abs_tol = 0.5 * rel_tol * scale;
    opt.max_panels = max_panels;
    auto res = integrate_adaptive<T>(f, breaks, opt, bits);
    return {res.value.re, res.error_estimate + zeta_err_integral * (t_hi - t_lo)};
}

}  // namespace zetalab
