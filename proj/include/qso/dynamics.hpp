#pragma once

#include "qso/error.hpp"
#include "qso/operators.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qso {

inline constexpr double kDefaultTol = 1e-12;
inline constexpr std::size_t kDefaultMaxIters = 1'000'000;
inline constexpr double kClassificationMargin = 1e-6;

struct IterateOptions {
    std::size_t max_iters = kDefaultMaxIters;
    double tol = kDefaultTol;
    std::size_t stride = 1;  // keep every stride-th point; the last point is always kept
};

struct Trajectory {
    std::vector<ReducedDistribution> points;
    std::vector<std::size_t> steps;  // iteration number of each kept point (0 = start)
    bool converged = false;
    std::size_t iterations = 0;
    double final_residual = 0.0;  // l1 distance between the last two iterates

    const ReducedDistribution& last() const { return points.back(); }
};

/// One generation followed by a retraction onto the simplex. The quadratic
/// form squares total mass, so without the retraction rounding error off the
/// simplex doubles every step.
ReducedDistribution step(const ReducedQso& q, const ReducedDistribution& y);

Trajectory iterate(const ReducedQso& q, const ReducedDistribution& y0, const IterateOptions& options = {});

enum class Stability { attracting, repelling, neutral, undetermined };

std::string_view to_string(Stability s) noexcept;

struct FixedPointReport {
    ReducedDistribution point;
    double residual = 0.0;  // l1 norm of y - V(y)
    double jacobian_spectral_radius = 0.0;
    Stability classification = Stability::undetermined;
    std::size_t iterations = 0;
};

/// Raised by find_fixed_point; carries the best point found.
class NoConvergenceError : public Error {
public:
    explicit NoConvergenceError(FixedPointReport partial);
    const FixedPointReport& partial() const noexcept { return partial_; }

private:
    FixedPointReport partial_;
};

/// J_{ki} = dV_k/dy_i = 2 Σ_j p_{ij,k} y_j, row-major n×n.
std::vector<double> jacobian(const ReducedQso& q, const ReducedDistribution& y);

/// Spectral radius of the Jacobian restricted to the tangent space Σv = 0,
/// which the Jacobian preserves because every column of J sums to 2.
double tangent_spectral_radius(const ReducedQso& q, const ReducedDistribution& y);

Stability classify(double spectral_radius, double margin = kClassificationMargin);

double fixed_point_residual(const ReducedQso& q, const ReducedDistribution& y);

FixedPointReport find_fixed_point(const ReducedQso& q, const ReducedDistribution& y0,
                                  const IterateOptions& options = {});

struct Regularity {
    bool holds = false;
    double margin = 0.0;  // min coefficient - 1/(2n)
};

Regularity regularity_check(const ReducedQso& q);

// Closed-form analysis of the one-locus trait map f_α(u) = 2(1-4α)u² + 4αu.

enum class FAlphaRegime { converges_to_zero, identity, converges_to_half };

std::string_view to_string(FAlphaRegime r) noexcept;

struct FAlphaAnalysis {
    double alpha = 0.0;
    std::vector<double> fixed_points;
    FAlphaRegime regime = FAlphaRegime::identity;
};

double f_alpha(double alpha, double u);
FAlphaAnalysis analyze_f_alpha(double alpha);

/// One-dimensional QSO y' = a y² + 2b y(1-y) + c(1-y)².
struct Quadratic1dAnalysis {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double delta = 0.0;  // 4(1-a)c + (1-2b)²
    std::vector<double> fixed_points;
    std::string regime;
};

Quadratic1dAnalysis analyze_quadratic_1d(double a, double b, double c);

/// Reads (a, b, c) = (p_{11,1}, p_{12,1}, p_{22,1}) off a two-type operator.
Quadratic1dAnalysis analyze_quadratic_1d(const ReducedQso& q);

/// Reproducible simplex sampling: std::mt19937_64 seeded with `seed`,
/// uniforms u = (x >> 11) * 2^-53, Dirichlet(1,...,1) points by normalizing
/// -log(1 - u). Only fully specified arithmetic is used so results do not
/// depend on the standard library implementation.
class SimplexSampler {
public:
    explicit SimplexSampler(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    ReducedDistribution point(std::size_t n);

private:
    std::mt19937_64 engine_;
};

} // namespace qso
