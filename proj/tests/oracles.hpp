// Test-side oracles, independent of the library implementation paths they
// check: direct-summation zeta, inverse-CDF power-law samplers, dense
// Floyd-Warshall, the occupancy formula and a chi-square critical value.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "metamob/rng.hpp"

namespace oracles {

/// Hurwitz zeta by direct summation plus an Euler-Maclaurin style remainder
/// (integral + half-term). Accurate to ~1e-12 for s in (1, 30], q >= 1.
inline double zeta_sum(double s, double q, std::size_t terms = 200000) {
    double sum = 0.0, c = 0.0;  // Kahan
    for (std::size_t k = 0; k < terms; ++k) {
        const double y = std::pow(q + double(k), -s) - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    const double m = q + double(terms);
    return sum + std::pow(m, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(m, -s);
}

/// Exact-ish discrete power-law sampler: single CDF sweep over sorted
/// uniforms; the far tail (beyond the sweep cutoff, mass < 1e-4 in the
/// worst tested case) falls back to the continuous inverse, which is
/// accurate to O(1/k) at that magnitude.
inline std::vector<double> sample_discrete_powerlaw(double alpha, std::uint64_t xmin,
                                                    std::size_t n, metamob::Rng& rng) {
    std::vector<double> u(n);
    for (auto& v : u) v = rng.next_double();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&u](std::size_t a, std::size_t b) { return u[a] < u[b]; });

    const double z = zeta_sum(alpha, double(xmin));
    std::vector<double> out(n);
    const std::uint64_t cutoff = std::uint64_t(1) << 26;
    double cdf = 0.0;
    std::uint64_t k = xmin;
    std::size_t i = 0;
    while (i < n && k < cutoff) {
        cdf += std::pow(double(k), -alpha) / z;
        while (i < n && u[order[i]] <= cdf) {
            out[order[i]] = double(k);
            ++i;
        }
        ++k;
    }
    for (; i < n; ++i) {
        // asymptotic inverse for the residual far tail:
        // P(X >= k) = zeta(a, k)/z ~ k^(1-a) / ((a-1) z)
        const double tail = 1.0 - u[order[i]];
        const double x = std::pow(tail * (alpha - 1.0) * z, -1.0 / (alpha - 1.0));
        out[order[i]] = std::floor(std::max(x, double(cutoff)));
    }
    return out;
}

inline std::vector<double> sample_continuous_powerlaw(double alpha, double xmin, std::size_t n,
                                                      metamob::Rng& rng) {
    std::vector<double> out(n);
    for (auto& v : out)
        v = xmin * std::pow(1.0 - rng.next_double(), -1.0 / (alpha - 1.0));
    return out;
}

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();

/// All-pairs shortest hop counts on an undirected graph given as an edge list.
inline std::vector<std::vector<std::uint64_t>> floyd_warshall(
    std::size_t nodes, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    std::vector<std::vector<std::uint64_t>> d(nodes, std::vector<std::uint64_t>(nodes, kInf));
    for (std::size_t i = 0; i < nodes; ++i) d[i][i] = 0;
    for (const auto& [a, b] : edges) {
        d[a][b] = std::min<std::uint64_t>(d[a][b], 1);
        d[b][a] = std::min<std::uint64_t>(d[b][a], 1);
    }
    for (std::size_t k = 0; k < nodes; ++k)
        for (std::size_t i = 0; i < nodes; ++i) {
            if (d[i][k] == kInf) continue;
            for (std::size_t j = 0; j < nodes; ++j) {
                if (d[k][j] == kInf) continue;
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
    return d;
}

/// Expected distinct values after n i.i.d. uniform draws over s categories.
inline double occupancy_expected(double s, double n) {
    return s * (1.0 - std::pow(1.0 - 1.0 / s, n));
}

/// Upper critical value of chi-square at p = 0.001 (Wilson-Hilferty).
inline double chi2_critical_001(double dof) {
    const double z = 3.090232306167813;  // Phi^-1(0.999)
    const double a = 2.0 / (9.0 * dof);
    const double t = 1.0 - a + z * std::sqrt(a);
    return dof * t * t * t;
}

}  // namespace oracles
