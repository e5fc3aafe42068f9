#include "qso/dynamics.hpp"

#include "qso/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qso {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

ReducedDistribution step(const ReducedQso& q, const ReducedDistribution& y) {
    ReducedDistribution next = apply_reduced(q, y);
    const double total = next.sum();
    std::vector<double> v(next.values().begin(), next.values().end());
    for (double& x : v) x /= total;
    return ReducedDistribution(std::move(v));
}

Trajectory iterate(const ReducedQso& q, const ReducedDistribution& y0, const IterateOptions& options) {
    check_simplex(y0, q.dimension());
    if (!(options.tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
    const std::size_t stride = std::max<std::size_t>(options.stride, 1);

    Trajectory t;
    t.points.push_back(y0);
    t.steps.push_back(0);
    ReducedDistribution current = y0;
    for (std::size_t k = 1; k <= options.max_iters; ++k) {
        ReducedDistribution next = step(q, current);
        t.final_residual = l1_distance(next.values(), current.values());
        t.iterations = k;
        current = std::move(next);
        t.converged = t.final_residual < options.tol;
        if (k % stride == 0 || t.converged || k == options.max_iters) {
            t.points.push_back(current);
            t.steps.push_back(k);
        }
        if (t.converged) break;
    }
    return t;
}

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::attracting: return "attracting";
        case Stability::repelling: return "repelling";
        case Stability::neutral: return "neutral";
        case Stability::undetermined: return "undetermined";
    }
    return "undetermined";
}

NoConvergenceError::NoConvergenceError(FixedPointReport partial)
    : Error(Errc::NoConvergence, "fixed-point residual " + fmt(partial.residual) + " after " +
                                     std::to_string(partial.iterations) + " iterations"),
      partial_(std::move(partial)) {}

std::vector<double> jacobian(const ReducedQso& q, const ReducedDistribution& y) {
    const std::size_t n = q.dimension();
    if (y.size() != n) throw Error(Errc::DimensionMismatch, "point does not match operator dimension");
    std::vector<double> J(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += q(i, j, k) * y[j];
            J[k * n + i] = 2.0 * s;
        }
    }
    return J;
}

double tangent_spectral_radius(const ReducedQso& q, const ReducedDistribution& y) {
    const std::size_t n = q.dimension();
    if (n < 2) return 0.0;
    const std::vector<double> J = jacobian(q, y);
    const Eigen::Index d = static_cast<Eigen::Index>(n - 1);
    // Basis v_b = e_b - e_{n-1}; a tangent vector's first n-1 entries are its
    // coordinates in that basis.
    Eigen::MatrixXd M(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
            M(a, b) = J[static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)] -
                      J[static_cast<std::size_t>(a) * n + (n - 1)];
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, false);
    if (solver.info() != Eigen::Success) return std::nan("");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

Stability classify(double rho, double margin) {
    if (!std::isfinite(rho)) return Stability::undetermined;
    if (rho < 1.0 - margin) return Stability::attracting;
    if (rho > 1.0 + margin) return Stability::repelling;
    return Stability::neutral;
}

double fixed_point_residual(const ReducedQso& q, const ReducedDistribution& y) {
    return l1_distance(y.values(), apply_reduced(q, y).values());
}

namespace {

// Newton on the residual y - V(y), parameterized by the first n-1
// coordinates. Steps are halved until they stay on the simplex and lower the
// residual; when no such step exists the iterate is left unchanged.
ReducedDistribution refine(const ReducedQso& q, ReducedDistribution y) {
    const std::size_t n = q.dimension();
    if (n < 2) return y;
    const Eigen::Index d = static_cast<Eigen::Index>(n - 1);
    double residual = fixed_point_residual(q, y);
    for (int iter = 0; iter < 50 && residual > 0.0; ++iter) {
        const ReducedDistribution v = apply_reduced(q, y);
        const std::vector<double> J = jacobian(q, y);
        Eigen::MatrixXd A(d, d);
        Eigen::VectorXd g(d);
        for (Eigen::Index a = 0; a < d; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            g(a) = v[ua] - y[ua];
            for (Eigen::Index b = 0; b < d; ++b) {
                const auto ub = static_cast<std::size_t>(b);
                A(a, b) = J[ua * n + ub] - J[ua * n + (n - 1)] - (a == b ? 1.0 : 0.0);
            }
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        if (!lu.isInvertible()) break;
        const Eigen::VectorXd delta = lu.solve(-g);

        bool improved = false;
        double scale = 1.0;
        for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
            std::vector<double> trial(n);
            double head = 0.0;
            bool inside = true;
            for (std::size_t a = 0; a + 1 < n; ++a) {
                trial[a] = y[a] + scale * delta(static_cast<Eigen::Index>(a));
                head += trial[a];
                if (trial[a] < 0.0) inside = false;
            }
            trial[n - 1] = 1.0 - head;
            if (trial[n - 1] < 0.0) inside = false;
            if (!inside) continue;
            ReducedDistribution candidate(std::move(trial));
            const double r = fixed_point_residual(q, candidate);
            if (r < residual) {
                y = std::move(candidate);
                residual = r;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return y;
}

} // namespace

FixedPointReport find_fixed_point(const ReducedQso& q, const ReducedDistribution& y0, const IterateOptions& options) {
    IterateOptions opts = options;
    opts.stride = std::max<std::size_t>(options.max_iters, 1);
    const Trajectory t = iterate(q, y0, opts);

    FixedPointReport report;
    report.iterations = t.iterations;
    const ReducedDistribution& coarse = t.last();
    ReducedDistribution polished = refine(q, coarse);
    report.point = fixed_point_residual(q, polished) <= fixed_point_residual(q, coarse) ? polished : coarse;
    report.residual = fixed_point_residual(q, report.point);
    report.jacobian_spectral_radius = tangent_spectral_radius(q, report.point);
    report.classification = classify(report.jacobian_spectral_radius);
    if (!(report.residual < options.tol)) throw NoConvergenceError(std::move(report));
    return report;
}

Regularity regularity_check(const ReducedQso& q) {
    const double threshold = 1.0 / (2.0 * static_cast<double>(q.dimension()));
    const double margin = q.min_coefficient() - threshold;
    return {margin > 0.0, margin};
}

std::string_view to_string(FAlphaRegime r) noexcept {
    switch (r) {
        case FAlphaRegime::converges_to_zero: return "converges to 0";
        case FAlphaRegime::identity: return "identity";
        case FAlphaRegime::converges_to_half: return "converges to 1/2";
    }
    return "identity";
}

double f_alpha(double alpha, double u) { return 2.0 * (1.0 - 4.0 * alpha) * u * u + 4.0 * alpha * u; }

FAlphaAnalysis analyze_f_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        throw Error(Errc::AlphaOutOfRange, "alpha must lie in (0, 1/2), got " + fmt(alpha));
    }
    FAlphaAnalysis out;
    out.alpha = alpha;
    out.fixed_points = {0.0, 0.5};
    if (alpha == 0.25) {
        out.regime = FAlphaRegime::identity;
    } else if (alpha < 0.25) {
        out.regime = FAlphaRegime::converges_to_zero;
    } else {
        out.regime = FAlphaRegime::converges_to_half;
    }
    return out;
}

Quadratic1dAnalysis analyze_quadratic_1d(double a, double b, double c) {
    for (double x : {a, b, c}) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw Error(Errc::InvalidCoefficients,
                        "coefficients must lie in [0, 1]: a=" + fmt(a) + " b=" + fmt(b) + " c=" + fmt(c));
        }
    }
    Quadratic1dAnalysis out{a, b, c, 4.0 * (1.0 - a) * c + (1.0 - 2.0 * b) * (1.0 - 2.0 * b), {}, {}};

    // Fixed points solve A y² + B y + C = 0.
    const double A = a - 2.0 * b + c;
    const double B = 2.0 * b - 2.0 * c - 1.0;
    const double C = c;
    constexpr double eps = 1e-15;
    std::vector<double> roots;
    if (std::abs(A) < eps && std::abs(B) < eps && std::abs(C) < eps) {
        out.fixed_points = {0.0, 1.0};
        out.regime = "identity";
        return out;
    }
    if (std::abs(A) < eps) {
        roots.push_back(-C / B);
    } else {
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            const double qq = -0.5 * (B + std::copysign(s, B));
            if (qq != 0.0) {
                roots.push_back(qq / A);
                roots.push_back(C / qq);
            } else {
                roots.push_back(0.0);
            }
        }
    }
    const auto map = [&](double y) { return a * y * y + 2.0 * b * y * (1.0 - y) + c * (1.0 - y) * (1.0 - y); };
    for (double r : roots) {
        if (r < -1e-12 || r > 1.0 + 1e-12) continue;
        r = std::clamp(r, 0.0, 1.0);
        if (std::abs(map(r) - r) >= 1e-12) continue;
        if (std::none_of(out.fixed_points.begin(), out.fixed_points.end(),
                         [&](double f) { return std::abs(f - r) < 1e-12; })) {
            out.fixed_points.push_back(r);
        }
    }
    std::sort(out.fixed_points.begin(), out.fixed_points.end());

    if (out.delta > 0.0 && out.delta < 4.0) {
        out.regime = "unique attracting";
    } else if (out.delta == 0.0) {
        out.regime = "degenerate";
    } else {
        out.regime = "non-attracting";
    }
    return out;
}

Quadratic1dAnalysis analyze_quadratic_1d(const ReducedQso& q) {
    if (q.dimension() != 2) throw Error(Errc::DimensionMismatch, "1D analysis needs a two-type operator");
    return analyze_quadratic_1d(q(0, 0, 0), q(0, 1, 0), q(1, 1, 0));
}

double SimplexSampler::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

ReducedDistribution SimplexSampler::point(std::size_t n) {
    std::vector<double> v(n);
    double total = 0.0;
    for (double& x : v) {
        x = -std::log1p(-uniform());
        total += x;
    }
    if (total == 0.0) return ReducedDistribution::uniform(n);
    for (double& x : v) x /= total;
    return ReducedDistribution(std::move(v));
}

} // namespace qso
