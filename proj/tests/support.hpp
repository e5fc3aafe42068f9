#pragma once

// Test-only generators and brute-force oracles. Nothing here calls into the
// code paths it is used to check.

#include "qso/dynamics.hpp"
#include "qso/operators.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace qso::test {

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) total += (x = e(rng));
    for (double& x : w) x /= total;
    return w;
}

inline GenotypeSpace single_trait_space(std::size_t n) {
    std::vector<std::string> alleles;
    for (std::size_t i = 0; i < n; ++i) alleles.push_back("t" + std::to_string(i));
    return GenotypeSpace::build({alleles});
}

/// Gender-symmetric measure family with random per-pair trait weights.
inline MeasureFamily random_family(std::mt19937_64& rng, const GenotypeSpace& space) {
    const std::size_t m = space.trait_count();
    MeasureFamily family(space);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const auto w = random_weights(rng, m);
            std::vector<double> mu(2 * m);
            for (std::size_t k = 0; k < m; ++k) mu[k] = mu[k + m] = 0.5 * w[k];
            family.set(f, g, Distribution(std::move(mu)));
        }
    }
    return family;
}

/// Symmetric stochastic tensor with every entry at least `floor`.
inline ReducedQso random_reduced(std::mt19937_64& rng, std::size_t n, double floor = 0.0) {
    std::vector<double> p(n * n * n);
    const double free_mass = 1.0 - floor * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const auto w = random_weights(rng, n);
            for (std::size_t k = 0; k < n; ++k) {
                p[(i * n + j) * n + k] = p[(j * n + i) * n + k] = floor + free_mass * w[k];
            }
        }
    }
    return ReducedQso(n, std::move(p));
}

inline ReducedDistribution random_point(std::mt19937_64& rng, std::size_t n) {
    return ReducedDistribution(random_weights(rng, n));
}

/// Brute-force evaluation of y'_k = Σ_{i,j} p_{ij,k} y_i y_j.
inline std::vector<double> quadratic_form(const std::vector<std::vector<std::vector<double>>>& p,
                                          const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out[k] += p[i][j][k] * y[i] * y[j];
    return out;
}

/// Bisection root of g on [lo, hi], g(lo) and g(hi) of opposite sign.
template <class G>
double bisect(G g, double lo, double hi) {
    double glo = g(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace qso::test
