#pragma once

#include <map>
#include <mutex>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

#include "zetalab/core/complex.hpp"

namespace zetalab {

namespace detail {

/// Exact B_{2k} = num/den for k = 1..n, from tangent numbers (Brent-Harvey
/// recurrence, integer arithmetic only).
class bernoulli_table {
public:
    struct ratio {
        boost::multiprecision::mpz_int num;
        boost::multiprecision::mpz_int den;
    };

    static bernoulli_table& instance() {
        static bernoulli_table t;
        return t;
    }

    /// Exact B_{2k}, k >= 1.
    ratio get(std::size_t k) {
        std::lock_guard<std::mutex> g(mutex_);
        ensure(k);
        return values_[k - 1];
    }

    /// B_{2k} for k = 1..n rounded to T at the active precision.
    template <class T>
    std::vector<T> rounded(std::size_t n) {
        std::vector<T> out;
        out.reserve(n);
        std::lock_guard<std::mutex> g(mutex_);
        ensure(n);
        for (std::size_t k = 0; k < n; ++k) out.push_back(convert<T>(values_[k]));
        return out;
    }

private:
    template <class T>
    static T convert(const ratio& r) {
        mp_real num, den;
        mpfr_set_z(num.backend().data(), r.num.backend().data(), MPFR_RNDN);
        mpfr_set_z(den.backend().data(), r.den.backend().data(), MPFR_RNDN);
        if constexpr (real_traits<T>::is_multiprecision)
            return num / den;
        else
            return (num / den).template convert_to<double>();
    }

    void ensure(std::size_t n) {
        if (values_.size() >= n) return;
        using boost::multiprecision::mpz_int;
        // Tangent numbers T_1..T_n.
        std::vector<mpz_int> t(n + 1);
        t[1] = 1;
        for (std::size_t k = 2; k <= n; ++k) t[k] = t[k - 1] * static_cast<unsigned long>(k - 1);
        for (std::size_t k = 2; k <= n; ++k)
            for (std::size_t j = k; j <= n; ++j)
                t[j] = t[j - 1] * static_cast<unsigned long>(j - k) + t[j] * static_cast<unsigned long>(j - k + 2);
        values_.clear();
        for (std::size_t k = 1; k <= n; ++k) {
            mpz_int four_k = mpz_int(1) << (2 * k);
            ratio r;
            r.num = t[k] * static_cast<unsigned long>(2 * k);
            if (k % 2 == 0) r.num = -r.num;
            r.den = four_k * (four_k - 1);
            mpz_int g = gcd(r.num, r.den);
            r.num /= g;
            r.den /= g;
            values_.push_back(std::move(r));
        }
    }

    std::mutex mutex_;
    std::vector<ratio> values_;
};

}  // namespace detail

/// B_2, B_4, ..., B_{2n} rounded at the active precision of T.
template <class T>
std::vector<T> bernoulli_b2n(std::size_t n) {
    return detail::bernoulli_table::instance().rounded<T>(n);
}

/// B_{2k}/(2k)! for k = 1..n at `bits`, cached per thread.
template <class T>
const std::vector<T>& bernoulli_over_factorial(std::size_t n, unsigned bits) {
    static thread_local std::map<unsigned, std::vector<T>> cache;
    auto& v = cache[bits];
    if (v.size() < n) {
        std::size_t want = std::max<std::size_t>(n, 2 * v.size());
        // (2k)! overflows double early, so form the ratio in MPFR and round.
        std::vector<T> b;
        b.reserve(want);
        {
            precision_scope<mp_real> scope(bits + 32);
            std::vector<mp_real> raw = bernoulli_b2n<mp_real>(want);
            mp_real fact(1);
            for (std::size_t k = 1; k <= want; ++k) {
                fact *= mp_real(static_cast<unsigned long>((2 * k - 1) * (2 * k)));
                mp_real q = raw[k - 1] / fact;
                if constexpr (real_traits<T>::is_multiprecision)
                    b.push_back(q);
                else
                    b.push_back(q.template convert_to<double>());
            }
        }
        v = std::move(b);
    }
    return v;
}

/// A branch of log Gamma(z) via the Stirling series after shifting Re z
/// upward. Only exp() of the result is branch-independent; callers needing
/// Gamma or a phase modulo 2 pi may use it directly.
template <class T>
Complex<T> log_gamma(const Complex<T>& z_in, unsigned bits) {
    using std::log;
    const double R = 0.12 * bits + 6.0;
    Complex<T> z = z_in;
    Complex<T> shift_prod(T(1));
    bool shifted = false;
    while (absd(z) < R || to_double(z.re) < 1.0) {
        if (absd(z) == 0.0) throw error(errc::pole, "log_gamma at a pole");
        shift_prod *= z;
        z.re += T(1);
        shifted = true;
    }
    const T half(0.5);
    const T pi = real_traits<T>::pi();
    Complex<T> lz = log(z);
    Complex<T> result = (z - Complex<T>(half)) * lz - z + Complex<T>(log(T(2) * pi) / T(2));

    static thread_local std::map<unsigned, std::vector<T>> cache;
    const std::size_t kmax = static_cast<std::size_t>(bits / 2 + 20);
    auto& b = cache[bits];
    if (b.size() < kmax) b = bernoulli_b2n<T>(kmax);

    const double tol = std::ldexp(1.0, -static_cast<int>(bits) - 4);
    Complex<T> zinv = Complex<T>(T(1)) / z;
    Complex<T> zinv2 = zinv * zinv;
    Complex<T> zpow = zinv;
    for (std::size_t k = 1; k <= kmax; ++k) {
        Complex<T> term = zpow * (b[k - 1] / T(static_cast<unsigned long>((2 * k) * (2 * k - 1))));
        result += term;
        if (absd(term) <= tol * std::max(1.0, absd(result))) break;
        zpow *= zinv2;
    }
    if (shifted) result -= log(shift_prod);
    return result;
}

}  // namespace zetalab
