#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "zetalab/dirichlet.hpp"

namespace zetalab {

enum class RootStatus { found, no_sign_change, multiple };

inline const char* to_string(RootStatus s) {
    switch (s) {
    case RootStatus::found: return "found";
    case RootStatus::no_sign_change: return "no-sign-change";
    case RootStatus::multiple: return "multiple";
    }
    return "unknown";
}

template <class T>
struct RootResult {
    RootStatus status = RootStatus::no_sign_change;
    T value{};
    double residual = 0.0;
    double value_err = 0.0;  // final bisection width plus residual / slope
    std::pair<T, T> bracket{};
    bool within_paper_bound = false;
    std::size_t sign_changes = 0;
    std::vector<std::pair<double, double>> scan;  // (sigma, M_V(sigma)) samples
};

namespace detail {

/// Bisection on a bracket with f(lo), f(hi) of opposite sign, continued until
/// the bracket can no longer shrink at this precision (so any |f| tolerance
/// above the rounding floor is met as well).
template <class T>
struct BisectResult {
    T x;
    RValue<T> fx;
    double width = 0.0;
};

template <class T, class F>
BisectResult<T> bisect(F&& f, T lo, T hi, RValue<T> flo, unsigned max_iter) {
    RValue<T> fmid = flo;
    T mid = lo;
    for (unsigned it = 0; it < max_iter; ++it) {
        T next = (lo + hi) / T(2);
        if (next == lo || next == hi) break;
        mid = next;
        fmid = f(mid);
        if (fmid.value == T(0)) {
            lo = hi = mid;
            break;
        }
        if ((fmid.value > T(0)) == (flo.value > T(0))) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return {mid, fmid, to_double(hi - lo)};
}

}  // namespace detail

/// Real zero of sigma -> M_V(sigma) in [1-R, 1+R]: scan at step R/64, then
/// bisect the sign change nearest to 1. A missing sign change is a status,
/// not an error. within_paper_bound compares |root - 1| with lemma_radius
/// (defaults to R).
template <class T>
RootResult<T> find_mollifier_root(std::uint64_t V, double R, const MobiusTable& table, const PrecisionContext& ctx,
                                  std::optional<double> lemma_radius = std::nullopt) {
    if (V < 2) throw error(errc::domain, "find_mollifier_root needs V >= 2");
    if (!(R > 0.0 && R <= 1.0)) throw error(errc::domain, "bracket radius must lie in (0, 1]");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    auto f = [&](const T& x) {
        CValue<T> m = m_v(Complex<T>(x), V, table, ctx);
        return RValue<T>{m.value.re, m.err_bound};
    };
    RootResult<T> out;
    std::vector<T> xs;
    std::vector<RValue<T>> fs;
    const T step = T(R) / T(64);
    for (int k = 0; k <= 128; ++k) {
        T x = T(1) - T(R) + step * T(static_cast<double>(k));
        xs.push_back(x);
        fs.push_back(f(x));
        out.scan.emplace_back(to_double(x), to_double(fs.back().value));
    }
    std::vector<std::size_t> changes;  // index k: sign change on [x_k, x_{k+1}]
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
        const bool zero_here = fs[k].value == T(0);
        if (zero_here || (fs[k].value > T(0)) != (fs[k + 1].value > T(0))) {
            if (fs[k + 1].value == T(0) && k + 2 < xs.size()) continue;  // counted at k+1
            changes.push_back(k);
        }
    }
    out.sign_changes = changes.size();
    if (changes.empty()) {
        out.status = RootStatus::no_sign_change;
        out.bracket = {xs.front(), xs.back()};
        out.value = T(1);
        return out;
    }
    std::size_t best = changes.front();
    double best_dist = INFINITY;
    for (auto k : changes) {
        double d = std::abs(0.5 * (to_double(xs[k]) + to_double(xs[k + 1])) - 1.0);
        if (d < best_dist) {
            best_dist = d;
            best = k;
        }
    }
    T lo = xs[best], hi = xs[best + 1];
    const double slope = std::abs(to_double(fs[best + 1].value - fs[best].value)) / to_double(hi - lo);
    if (fs[best].value == T(0)) {
        out.value = lo;
        out.residual = fs[best].err_bound;
    } else {
        auto b = detail::bisect(f, lo, hi, fs[best], bits + 64);
        out.value = b.x;
        out.residual = std::abs(to_double(b.fx.value)) + b.fx.err_bound;
        out.value_err = b.width;
    }
    out.value_err += slope > 0 ? out.residual / slope : to_double(hi - lo);
    out.bracket = {lo, hi};
    out.status = changes.size() > 1 ? RootStatus::multiple : RootStatus::found;
    out.within_paper_bound = std::abs(to_double(out.value) - 1.0) <= lemma_radius.value_or(R);
    return out;
}

/// Ordinate of a zero of zeta on the critical line in (t_lo, t_hi) by
/// bisection on Hardy's Z.
template <class T>
RootResult<T> find_zeta_zero(double t_lo, double t_hi, const PrecisionContext& ctx, double z_tol = 1e-10) {
    if (!(t_hi > t_lo) || t_lo < 0.0) throw error(errc::domain, "find_zeta_zero needs 0 <= t_lo < t_hi");
    const unsigned bits = effective_bits<T>(ctx);
    precision_scope<T> scope(bits);
    auto f = [&](const T& t) { return hardy_z(t, ctx); };
    const T lo(t_lo), hi(t_hi);
    RValue<T> flo = f(lo), fhi = f(hi);
    if (!((flo.value > T(0)) != (fhi.value > T(0))) || flo.value == T(0) || fhi.value == T(0)) {
        if (flo.value == T(0) || fhi.value == T(0)) {
            RootResult<T> out;
            out.status = RootStatus::found;
            out.value = flo.value == T(0) ? lo : hi;
            out.bracket = {lo, hi};
            out.sign_changes = 1;
            out.within_paper_bound = true;
            return out;
        }
        throw error(errc::no_sign_change, "Z(t) has the same sign at both ends of the bracket");
    }
    auto b = detail::bisect(f, lo, hi, flo, bits + 64);
    RootResult<T> out;
    out.status = RootStatus::found;
    out.value = b.x;
    out.residual = std::abs(to_double(b.fx.value)) + b.fx.err_bound;
    const double slope = std::abs(to_double(fhi.value - flo.value)) / (t_hi - t_lo);
    out.value_err = b.width + (slope > 0 ? out.residual / slope : t_hi - t_lo);
    if (std::abs(to_double(b.fx.value)) > z_tol)
        throw error(errc::non_convergence, "bisection could not bring |Z| below the tolerance");
    out.bracket = {lo, hi};
    out.sign_changes = 1;
    out.within_paper_bound = true;
    return out;
}

/// Bracketing intervals of sign changes of Z on [t_lo, t_hi] at the given step.
template <class T>
std::vector<std::pair<double, double>> hardy_z_sign_changes(double t_lo, double t_hi, double step,
                                                            const PrecisionContext& ctx) {
    std::vector<std::pair<double, double>> out;
    double prev_t = t_lo;
    double prev = to_double(hardy_z(T(t_lo), ctx).value);
    for (double t = t_lo + step; t <= t_hi + 1e-12; t += step) {
        double cur = to_double(hardy_z(T(t), ctx).value);
        if ((cur > 0) != (prev > 0)) out.emplace_back(prev_t, t);
        prev = cur;
        prev_t = t;
    }
    return out;
}

}  // namespace zetalab
