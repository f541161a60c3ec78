#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "zetalab/core/precision.hpp"

namespace zetalab {

/// Minimal complex number over any real type. `std::complex` is unspecified
/// for non-builtin reals, so the MPFR path needs its own.
template <class T>
struct Complex {
    T re{};
    T im{};

    Complex() = default;
    Complex(T r) : re(std::move(r)), im(0) {}
    Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}

    template <class U>
    static Complex from(const Complex<U>& z) {
        return {T(z.re), T(z.im)};
    }
    static Complex from(std::complex<double> z) { return {T(z.real()), T(z.imag())}; }

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o) {
        T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = std::move(r);
        return *this;
    }
    Complex& operator*=(const T& s) {
        re *= s;
        im *= s;
        return *this;
    }
    Complex& operator/=(const Complex& o) { return *this = *this / o; }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator*(Complex a, const T& s) { return a *= s; }
    friend Complex operator*(const T& s, Complex a) { return a *= s; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator/(const Complex& a, const T& s) { return {a.re / s, a.im / s}; }
    friend Complex operator/(const Complex& a, const Complex& b) {
        using std::abs;
        // Smith's algorithm keeps the double path free of spurious overflow.
        if (abs(b.re) >= abs(b.im)) {
            T r = b.im / b.re;
            T d = b.re + b.im * r;
            return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
        }
        T r = b.re / b.im;
        T d = b.re * r + b.im;
        return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
    }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

    std::complex<double> to_std() const { return {to_double(re), to_double(im)}; }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
    return {z.re, -z.im};
}

template <class T>
T norm(const Complex<T>& z) {
    return z.re * z.re + z.im * z.im;
}

template <class T>
T abs(const Complex<T>& z) {
    using std::hypot;
    return hypot(z.re, z.im);
}

template <class T>
T arg(const Complex<T>& z) {
    using std::atan2;
    return atan2(z.im, z.re);
}

template <class T>
Complex<T> exp(const Complex<T>& z) {
    using std::cos;
    using std::exp;
    using std::sin;
    T m = exp(z.re);
    return {m * cos(z.im), m * sin(z.im)};
}

/// Principal logarithm.
template <class T>
Complex<T> log(const Complex<T>& z) {
    using std::log;
    return {log(abs(z)), arg(z)};
}

/// n^(-s) from a precomputed log n.
template <class T>
Complex<T> pow_neg(const T& log_n, const Complex<T>& s) {
    using std::cos;
    using std::exp;
    using std::sin;
    T m = exp(-s.re * log_n);
    T ph = s.im * log_n;
    return {m * cos(ph), -(m * sin(ph))};
}

template <class T>
Complex<T> sin(const Complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}

template <class T>
Complex<T> cos(const Complex<T>& z) {
    using std::cos;
    using std::cosh;
    using std::sin;
    using std::sinh;
    return {cos(z.re) * cosh(z.im), -(sin(z.re) * sinh(z.im))};
}

template <class T>
double absd(const Complex<T>& z) {
    return std::hypot(to_double(z.re), to_double(z.im));
}

/// A complex value with an estimated absolute error. Arithmetic propagates
/// the bound to first order plus one rounding of the result.
template <class T>
struct CValue {
    Complex<T> value;
    double err_bound = 0.0;

    CValue() = default;
    CValue(Complex<T> v, double e = 0.0) : value(std::move(v)), err_bound(e) {}

    const T& re() const { return value.re; }
    const T& im() const { return value.im; }
    double magnitude() const { return absd(value); }
};

/// A real value with an estimated absolute error.
template <class T>
struct RValue {
    T value{};
    double err_bound = 0.0;
};

namespace detail {

template <class T>
double rounding(const Complex<T>& r) {
    return 2.0 * real_traits<T>::epsilon() * absd(r);
}

}  // namespace detail

template <class T>
CValue<T> operator+(const CValue<T>& a, const CValue<T>& b) {
    Complex<T> r = a.value + b.value;
    double e = a.err_bound + b.err_bound + detail::rounding(r);
    return {std::move(r), e};
}

template <class T>
CValue<T> operator-(const CValue<T>& a, const CValue<T>& b) {
    Complex<T> r = a.value - b.value;
    double e = a.err_bound + b.err_bound + detail::rounding(r);
    return {std::move(r), e};
}

template <class T>
CValue<T> operator*(const CValue<T>& a, const CValue<T>& b) {
    Complex<T> r = a.value * b.value;
    double e = a.magnitude() * b.err_bound + b.magnitude() * a.err_bound + a.err_bound * b.err_bound +
               detail::rounding(r);
    return {std::move(r), e};
}

template <class T>
CValue<T> operator/(const CValue<T>& a, const CValue<T>& b) {
    const double bm = b.magnitude();
    if (!(bm > b.err_bound))
        throw error(errc::near_zero, "division by a value indistinguishable from zero");
    Complex<T> r = a.value / b.value;
    double e = (a.err_bound + absd(r) * b.err_bound) / (bm - b.err_bound) + detail::rounding(r);
    return {std::move(r), e};
}

/// Truncated Taylor polynomial c[0] + c[1] h + ... + c[K] h^K in one complex
/// variable. Used to carry derivatives of Dirichlet tails through closed forms.
template <class T>
struct Jet {
    std::vector<Complex<T>> c;

    explicit Jet(std::size_t order = 0) : c(order + 1, Complex<T>(T(0))) {}

    static Jet constant(const Complex<T>& v, std::size_t order) {
        Jet j(order);
        j.c[0] = v;
        return j;
    }
    /// The identity jet a0 + h.
    static Jet variable(const Complex<T>& a0, std::size_t order) {
        Jet j = constant(a0, order);
        if (order >= 1) j.c[1] = Complex<T>(T(1));
        return j;
    }

    std::size_t order() const { return c.size() - 1; }

    Jet& operator+=(const Jet& o) {
        for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k];
        return *this;
    }
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.order());
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t k = 0; i + k < a.c.size(); ++k) r.c[i + k] += a.c[i] * b.c[k];
        return r;
    }
    friend Jet operator*(Jet a, const Complex<T>& s) {
        for (auto& x : a.c) x *= s;
        return a;
    }
};

/// exp(-(a0 + h) L) as a jet in h.
template <class T>
Jet<T> jet_pow_neg(const T& log_base, const Complex<T>& a0, std::size_t order) {
    Jet<T> j(order);
    j.c[0] = pow_neg(log_base, a0);
    for (std::size_t k = 1; k <= order; ++k) j.c[k] = j.c[k - 1] * (-log_base / T(k));
    return j;
}

/// 1/(b0 + h) as a jet in h.
template <class T>
Jet<T> jet_reciprocal_linear(const Complex<T>& b0, std::size_t order) {
    Jet<T> j(order);
    Complex<T> inv = Complex<T>(T(1)) / b0;
    j.c[0] = inv;
    for (std::size_t k = 1; k <= order; ++k) j.c[k] = -(j.c[k - 1] * inv);
    return j;
}

}  // namespace zetalab
