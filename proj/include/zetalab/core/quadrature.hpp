#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "zetalab/core/complex.hpp"

namespace zetalab {

template <class T>
struct GaussLegendreRule {
    std::vector<T> nodes;    // on [-1, 1]
    std::vector<T> weights;
};

namespace detail {

template <class T>
GaussLegendreRule<T> compute_gauss_legendre(unsigned n, unsigned bits) {
    using std::abs;
    using std::cos;
    GaussLegendreRule<T> rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const T pi = real_traits<T>::pi();
    const T tol = T(std::ldexp(1.0, -static_cast<int>(bits) + 3));
    for (unsigned i = 0; i < (n + 1) / 2; ++i) {
        T x = cos(pi * (T(i) + T(0.75)) / (T(n) + T(0.5)));
        T dp(0);
        for (int it = 0; it < 100; ++it) {
            T p0(1), p1 = x;
            for (unsigned k = 2; k <= n; ++k) {
                T p2 = ((T(2 * k - 1)) * x * p1 - T(k - 1) * p0) / T(k);
                p0 = p1;
                p1 = p2;
            }
            dp = T(n) * (x * p1 - p0) / (x * x - T(1));
            T dx = p1 / dp;
            x -= dx;
            if (abs(dx) <= tol) break;
        }
        // recompute the derivative at the converged node
        T p0(1), p1 = x;
        for (unsigned k = 2; k <= n; ++k) {
            T p2 = ((T(2 * k - 1)) * x * p1 - T(k - 1) * p0) / T(k);
            p0 = p1;
            p1 = p2;
        }
        dp = T(n) * (x * p1 - p0) / (x * x - T(1));
        T w = T(2) / ((T(1) - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace detail

/// Cached n-point Gauss-Legendre rule at the active precision of T.
template <class T>
const GaussLegendreRule<T>& gauss_legendre(unsigned n, unsigned bits) {
    static std::mutex m;
    static std::map<std::pair<unsigned, unsigned>, GaussLegendreRule<T>> cache;
    std::lock_guard<std::mutex> g(m);
    auto key = std::make_pair(n, bits);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, detail::compute_gauss_legendre<T>(n, bits)).first;
    return it->second;
}

template <class T>
struct QuadratureResult {
    Complex<T> value;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
};

struct QuadratureOptions {
    double abs_tol = 1e-12;
    std::size_t max_panels = 200000;
    unsigned nodes_per_panel = 16;
};

/// Adaptive Gauss-Legendre integration of f over the union of consecutive
/// intervals given by `breaks`. Each panel is bisected until the two-halves
/// estimate agrees with the whole-panel estimate to abs_tol scaled by the
/// panel's share of the total length. Panels are summed left to right, so the
/// result is reproducible.
template <class T, class F>
QuadratureResult<T> integrate_adaptive(F&& f, const std::vector<T>& breaks, const QuadratureOptions& opt,
                                       unsigned bits) {
    const auto& rule = gauss_legendre<T>(opt.nodes_per_panel, bits);
    QuadratureResult<T> res;
    res.value = Complex<T>(T(0));
    if (breaks.size() < 2) return res;
    const T total = breaks.back() - breaks.front();
    const double total_len = std::abs(to_double(total));
    if (total_len == 0.0) return res;

    auto panel = [&](const T& a, const T& b) {
        T half = (b - a) / T(2);
        T mid = (a + b) / T(2);
        Complex<T> acc(T(0));
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += f(mid + half * rule.nodes[i]) * rule.weights[i];
        res.evaluations += rule.nodes.size();
        return acc * half;
    };

    struct Pending {
        T a, b;
        Complex<T> whole;
    };
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
        std::vector<Pending> stack;
        stack.push_back({breaks[k], breaks[k + 1], panel(breaks[k], breaks[k + 1])});
        while (!stack.empty()) {
            Pending p = std::move(stack.back());
            stack.pop_back();
            T mid = (p.a + p.b) / T(2);
            Complex<T> left = panel(p.a, mid);
            Complex<T> right = panel(mid, p.b);
            Complex<T> both = left + right;
            double diff = absd(both - p.whole);
            double share = std::abs(to_double(p.b - p.a)) / total_len;
            if (diff <= opt.abs_tol * share || share < 1e-15) {
                res.value += both;
                res.error_estimate += diff;
                ++res.panels;
                if (res.panels > opt.max_panels)
                    throw error(errc::non_convergence, "quadrature panel budget exhausted");
            } else {
                if (stack.size() + res.panels > opt.max_panels)
                    throw error(errc::non_convergence, "quadrature panel budget exhausted");
                // push right first so the left half is processed first
                stack.push_back({mid, p.b, std::move(right)});
                stack.push_back({p.a, mid, std::move(left)});
            }
        }
    }
    return res;
}

/// Breakpoints on [-W, W] that refine geometrically toward 0 (down to
/// `inner`), then uniformly with spacing at most `max_len` outward.
template <class T>
std::vector<T> symmetric_geometric_breaks(const T& W, const T& inner, const T& max_len) {
    std::vector<T> pos;
    T x = inner;
    while (x < W) {
        pos.push_back(x);
        T step = x;
        if (step > max_len) step = max_len;
        x += step;
    }
    pos.push_back(W);
    std::vector<T> out;
    out.reserve(2 * pos.size() + 1);
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    out.push_back(T(0));
    for (const auto& p : pos) out.push_back(p);
    return out;
}

/// Samples f at M equispaced points z_k = center + radius e^{2 pi i k / M}.
template <class T, class F>
std::vector<Complex<T>> circle_samples(F&& f, const Complex<T>& center, const T& radius, std::size_t M) {
    using std::cos;
    using std::sin;
    const T two_pi = T(2) * real_traits<T>::pi();
    std::vector<Complex<T>> out;
    out.reserve(M);
    for (std::size_t k = 0; k < M; ++k) {
        T th = two_pi * T(k) / T(M);
        Complex<T> z = center + Complex<T>(radius * cos(th), radius * sin(th));
        out.push_back(f(z));
    }
    return out;
}

}  // namespace zetalab
