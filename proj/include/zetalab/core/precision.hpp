#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/mpfr.hpp>

namespace zetalab {

/// Arbitrary-precision real backed by MPFR. Precision of new temporaries is
/// governed by the active `precision_scope`.
using mp_real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;

enum class errc {
    pole,
    precision_exhausted,
    domain,
    capacity,
    near_zero,
    non_convergence,
    ambiguous_winding,
    zero_on_contour,
    no_sign_change,
    inconsistent,
};

inline const char* to_string(errc e) {
    switch (e) {
    case errc::pole: return "pole";
    case errc::precision_exhausted: return "precision-exhausted";
    case errc::domain: return "domain";
    case errc::capacity: return "capacity";
    case errc::near_zero: return "near-zero";
    case errc::non_convergence: return "non-convergence";
    case errc::ambiguous_winding: return "ambiguous-winding";
    case errc::zero_on_contour: return "zero-on-contour";
    case errc::no_sign_change: return "no-sign-change";
    case errc::inconsistent: return "inconsistent";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Working precision and accuracy target threaded explicitly through every
/// evaluation. Immutable value; `doubled()` yields the retry context.
struct PrecisionContext {
    unsigned working_bits = 256;
    double target_rel_err = 0x1p-128;
    unsigned max_retries = 2;

    static PrecisionContext with_bits(unsigned bits) {
        PrecisionContext ctx;
        ctx.working_bits = bits;
        ctx.target_rel_err = std::ldexp(1.0, -static_cast<int>(bits / 2));
        ctx.validate();
        return ctx;
    }

    void validate() const {
        if (working_bits < 64)
            throw error(errc::domain, "working_bits must be >= 64");
        if (!(target_rel_err > 0) || !std::isfinite(target_rel_err))
            throw error(errc::domain, "target_rel_err must be a positive finite number");
        // 2^(-bits+8) underflows double for huge precisions; the floor is then 0.
        const int e = 8 - static_cast<int>(working_bits);
        if (e > -1000 && target_rel_err < std::ldexp(1.0, e))
            throw error(errc::domain, "target_rel_err below 2^(8-working_bits)");
    }

    PrecisionContext doubled() const {
        PrecisionContext c = *this;
        c.working_bits *= 2;
        return c;
    }

    /// Unit roundoff at the working precision.
    double unit_roundoff() const { return std::ldexp(1.0, -static_cast<int>(working_bits)); }
};

namespace detail {

inline std::recursive_mutex& mp_precision_mutex() {
    static std::recursive_mutex m;
    return m;
}

inline unsigned& mp_current_bits() {
    static unsigned bits = 0;
    return bits;
}

inline unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace detail

/// Numeric traits shared by the double fast path and the MPFR path.
template <class T>
struct real_traits;

template <>
struct real_traits<double> {
    static constexpr bool is_multiprecision = false;
    static unsigned bits() { return 53; }
    static double epsilon() { return 0x1p-52; }
    static double pi() { return 3.14159265358979323846; }
    static double euler_gamma() { return 0.57721566490153286061; }
    static double from_string(const std::string& s) { return std::stod(s); }
    static double to_double(double x) { return x; }
    static double log_factorial(unsigned j) { return std::lgamma(static_cast<double>(j) + 1.0); }
    static std::string to_string(double x, int digits) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*e", digits > 1 ? digits - 1 : 0, x);
        return buf;
    }
};

template <>
struct real_traits<mp_real> {
    static constexpr bool is_multiprecision = true;
    static unsigned bits() {
        unsigned b = detail::mp_current_bits();
        return b ? b : 256;
    }
    static double epsilon() { return std::ldexp(1.0, 1 - static_cast<int>(bits())); }
    static mp_real pi() {
        mp_real r;
        mpfr_const_pi(r.backend().data(), MPFR_RNDN);
        return r;
    }
    static mp_real euler_gamma() {
        mp_real r;
        mpfr_const_euler(r.backend().data(), MPFR_RNDN);
        return r;
    }
    static mp_real from_string(const std::string& s) { return mp_real(s); }
    static double to_double(const mp_real& x) { return x.convert_to<double>(); }
    static mp_real log_factorial(unsigned j) {
        mp_real r(j + 1);
        mpfr_lngamma(r.backend().data(), r.backend().data(), MPFR_RNDN);
        return r;
    }
    static std::string to_string(const mp_real& x, int digits) {
        // precision counts digits after the point, and 0 would mean "all"
        if (digits <= 1 && std::isfinite(x.convert_to<double>()) && x.convert_to<double>() != 0.0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.0e", x.convert_to<double>());
            return buf;
        }
        return x.str(digits > 1 ? digits - 1 : 1, std::ios_base::scientific);
    }
};

/// Sets the MPFR working precision for the lifetime of the scope. Scopes for
/// the multiprecision path hold a process-wide recursive lock because Boost's
/// default precision is global state; scopes nest within one thread.
template <class T>
class precision_scope {
public:
    explicit precision_scope(unsigned) {}
};

template <>
class precision_scope<mp_real> {
public:
    explicit precision_scope(unsigned bits) : lock_(detail::mp_precision_mutex()) {
        saved_digits_ = mp_real::default_precision();
        saved_bits_ = detail::mp_current_bits();
        mp_real::default_precision(detail::bits_to_digits10(bits));
        detail::mp_current_bits() = bits;
    }
    ~precision_scope() {
        mp_real::default_precision(saved_digits_);
        detail::mp_current_bits() = saved_bits_;
    }
    precision_scope(const precision_scope&) = delete;
    precision_scope& operator=(const precision_scope&) = delete;

private:
    std::unique_lock<std::recursive_mutex> lock_;
    unsigned saved_digits_ = 0;
    unsigned saved_bits_ = 0;
};

/// Effective working precision in bits of type T under `ctx`.
template <class T>
unsigned effective_bits(const PrecisionContext& ctx) {
    if constexpr (real_traits<T>::is_multiprecision)
        return ctx.working_bits;
    else
        return real_traits<T>::bits();
}

/// Unit roundoff of T under `ctx`.
template <class T>
double unit_roundoff(const PrecisionContext& ctx) {
    return std::ldexp(1.0, -static_cast<int>(effective_bits<T>(ctx)));
}

/// Relative target under `ctx`, clamped to what T can deliver.
template <class T>
double effective_target(const PrecisionContext& ctx) {
    if constexpr (real_traits<T>::is_multiprecision)
        return ctx.target_rel_err;
    else
        return std::max(ctx.target_rel_err, 0x1p-44);
}

/// Copy of x rounded to the active precision (MPFR copies keep their source
/// precision otherwise).
template <class T>
T at_current_precision(const T& x) {
    if constexpr (real_traits<T>::is_multiprecision) {
        T r;
        mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
        return r;
    } else {
        return x;
    }
}

template <class T>
double to_double(const T& x) {
    return real_traits<T>::to_double(x);
}

}  // namespace zetalab
