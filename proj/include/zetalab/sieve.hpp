#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "zetalab/core/parallel.hpp"
#include "zetalab/core/precision.hpp"

namespace zetalab {

enum class SieveMethod { automatic, linear, segmented };

struct SieveOptions {
    SieveMethod method = SieveMethod::automatic;
    std::uint64_t memory_budget_bytes = std::uint64_t(4) << 30;
    std::uint64_t segment_size = std::uint64_t(1) << 18;
    unsigned threads = 0;
};

/// mu(n) and d(n) for 1 <= n <= limit. Index 0 is unused.
struct MobiusTable {
    std::uint64_t limit = 0;
    std::vector<std::int8_t> mu;
    std::vector<std::uint32_t> d;

    int mu_at(std::uint64_t n) const { return mu[n]; }
    std::uint32_t d_at(std::uint64_t n) const { return d[n]; }
};

/// Linear sieves switch to segments above this size.
inline constexpr std::uint64_t linear_sieve_max = 10'000'000;

namespace detail {

inline std::vector<std::uint32_t> small_primes(std::uint64_t n) {
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint32_t> primes;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return primes;
}

inline void linear_sieve(MobiusTable& t) {
    const std::uint64_t N = t.limit;
    std::vector<std::uint32_t> spf(N + 1, 0);
    std::vector<std::uint8_t> spf_exp(N + 1, 0);  // exponent of spf(n) in n
    std::vector<std::uint32_t> primes;
    t.mu[1] = 1;
    t.d[1] = 1;
    for (std::uint64_t i = 2; i <= N; ++i) {
        if (spf[i] == 0) {
            spf[i] = static_cast<std::uint32_t>(i);
            spf_exp[i] = 1;
            t.mu[i] = -1;
            t.d[i] = 2;
            primes.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes) {
            std::uint64_t m = i * p;
            if (p > spf[i] || m > N) break;
            spf[m] = p;
            if (p == spf[i]) {
                spf_exp[m] = static_cast<std::uint8_t>(spf_exp[i] + 1);
                t.mu[m] = 0;
                t.d[m] = t.d[i] / (spf_exp[i] + 1u) * (spf_exp[i] + 2u);
            } else {
                spf_exp[m] = 1;
                t.mu[m] = static_cast<std::int8_t>(-t.mu[i]);
                t.d[m] = t.d[i] * 2;
            }
        }
    }
}

inline void segmented_sieve(MobiusTable& t, const SieveOptions& opt) {
    const std::uint64_t N = t.limit;
    const auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(N))) + 1;
    const std::vector<std::uint32_t> primes = small_primes(root);
    const std::uint64_t seg = std::max<std::uint64_t>(opt.segment_size, 1024);
    const std::size_t nseg = static_cast<std::size_t>((N + seg - 1) / seg);

    // Segments write disjoint slices, so workers need no synchronisation.
    parallel_map<int>(
        nseg,
        [&](std::size_t k) {
            const std::uint64_t lo = 1 + k * seg;
            const std::uint64_t hi = std::min<std::uint64_t>(N, lo + seg - 1);
            std::vector<std::uint64_t> rest(hi - lo + 1);
            for (std::uint64_t n = lo; n <= hi; ++n) {
                rest[n - lo] = n;
                t.mu[n] = 1;
                t.d[n] = 1;
            }
            for (std::uint32_t p : primes) {
                if (std::uint64_t(p) * p > hi) break;
                for (std::uint64_t n = (lo + p - 1) / p * p; n <= hi; n += p) {
                    unsigned e = 0;
                    std::uint64_t& r = rest[n - lo];
                    while (r % p == 0) {
                        r /= p;
                        ++e;
                    }
                    t.mu[n] = e > 1 ? 0 : static_cast<std::int8_t>(-t.mu[n]);
                    t.d[n] *= e + 1;
                }
            }
            for (std::uint64_t n = lo; n <= hi; ++n) {
                if (rest[n - lo] > 1) {
                    t.mu[n] = static_cast<std::int8_t>(-t.mu[n]);
                    t.d[n] *= 2;
                }
            }
            return 0;
        },
        opt.threads);
}

}  // namespace detail

/// Bytes a table of the given size occupies, sieve scratch included.
inline std::uint64_t mobius_table_bytes(std::uint64_t N, SieveMethod method) {
    std::uint64_t base = (N + 1) * (sizeof(std::int8_t) + sizeof(std::uint32_t));
    if (method == SieveMethod::linear) base += (N + 1) * (sizeof(std::uint32_t) + 1);
    return base;
}

inline MobiusTable mobius_table(std::uint64_t N, const SieveOptions& opt = {}) {
    if (N < 1) throw error(errc::domain, "sieve limit must be >= 1");
    SieveMethod method = opt.method;
    if (method == SieveMethod::automatic)
        method = N <= linear_sieve_max ? SieveMethod::linear : SieveMethod::segmented;
    if (mobius_table_bytes(N, method) > opt.memory_budget_bytes)
        throw error(errc::capacity, "sieve limit " + std::to_string(N) + " exceeds the memory budget");
    MobiusTable t;
    t.limit = N;
    t.mu.assign(N + 1, 0);
    t.d.assign(N + 1, 0);
    if (method == SieveMethod::linear)
        detail::linear_sieve(t);
    else
        detail::segmented_sieve(t, opt);
    return t;
}

/// Mollifier coefficients c[n] = sum over d | n, d <= V of mu(d) d^shift.
template <class T>
struct CoeffTable {
    std::uint64_t V = 0;
    T exponent_shift{};
    std::uint64_t limit = 0;
    std::vector<T> c;  // index 0 unused
};

/// Default truncation for coefficient series: V^2.
inline std::uint64_t default_coeff_limit(std::uint64_t V) { return V * V; }

template <class T>
CoeffTable<T> coeff_table(std::uint64_t V, const T& shift, std::uint64_t N, const MobiusTable& mobius,
                          const PrecisionContext& ctx, std::uint64_t memory_budget_bytes = std::uint64_t(4) << 30) {
    using std::exp;
    using std::log;
    if (V < 2 || N < V) throw error(errc::domain, "coeff_table needs N >= V >= 2");
    if (!std::isfinite(to_double(shift))) throw error(errc::domain, "exponent shift must be finite");
    if (V > mobius.limit) throw error(errc::domain, "Mobius table shorter than V");
    const std::uint64_t bytes = (N + 1) * (real_traits<T>::is_multiprecision ? (ctx.working_bits / 8 + 32) : 8);
    if (bytes > memory_budget_bytes) throw error(errc::capacity, "coefficient table exceeds the memory budget");

    precision_scope<T> scope(effective_bits<T>(ctx));
    CoeffTable<T> out;
    out.V = V;
    out.exponent_shift = shift;
    out.limit = N;
    out.c.assign(N + 1, T(0));
    for (std::uint64_t d = 1; d <= V; ++d) {
        const int mu = mobius.mu_at(d);
        if (mu == 0) continue;
        T w = d == 1 ? T(1) : exp(shift * log(T(static_cast<double>(d))));
        if (mu < 0) w = -w;
        for (std::uint64_t n = d; n <= N; n += d) out.c[n] += w;
    }
    return out;
}

}  // namespace zetalab
