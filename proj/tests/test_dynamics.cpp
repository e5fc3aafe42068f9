#include "doctest.h"

#include "support.hpp"

#include "qso/dynamics.hpp"
#include "qso/error.hpp"
#include "qso/models.hpp"

#include <cmath>
#include <random>

using namespace qso;
using doctest::Approx;

namespace {

// y' = (y2, y1): every orbit off (1/2, 1/2) has period two.
ReducedQso swap_operator() { return ReducedQso(2, {0.0, 1.0, 0.5, 0.5, 0.5, 0.5, 1.0, 0.0}); }

// Fixed point of the Rh 1D map found by bisection on the published table
// values (a = 2·0.4925, b = 0.3230 + 0.3273, c = 2·0.05).
double rh_root_by_bisection() {
    const double a = 0.985, b = 0.6503, c = 0.1;
    return test::bisect([&](double y) { return a * y * y + 2 * b * y * (1 - y) + c * (1 - y) * (1 - y) - y; }, 0.5,
                        1.0);
}

// Frozen from an independent numpy run (power iteration with renormalization,
// 5000 steps, four starts) on the renormalized ABO table.
const std::vector<double> kAboFixedPoint = {0.08449073, 0.51722622, 0.05686362, 0.34141943};
constexpr double kAboSpectralRadius = 0.91153818;

} // namespace

TEST_CASE("iterate: trait regimes") {
    SUBCASE("alpha = 0.1 goes to (0, 1)") {
        const auto t = iterate(mendelian_trait(0.1), ReducedDistribution({0.5, 0.5}));
        CHECK(t.converged);
        CHECK(t.last()[0] < 1e-10);
        CHECK(t.last()[1] == Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("alpha = 0.4 goes to (1, 0)") {
        const auto t = iterate(mendelian_trait(0.4), ReducedDistribution({0.5, 0.5}));
        CHECK(t.converged);
        CHECK(t.last()[0] == Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("alpha = 1/4 stays put") {
        const ReducedDistribution y0({0.3, 0.7});
        const auto t = iterate(mendelian_trait(0.25), y0);
        CHECK(t.converged);
        CHECK(t.iterations == 1);
        REQUIRE(t.points.size() == 2);
        CHECK(test::max_abs_diff(t.last().values(), y0.values()) <= 1e-15);
    }
}

TEST_CASE("iterate: stride and non-convergence") {
    const auto t = iterate(swap_operator(), ReducedDistribution({0.2, 0.8}), {101, 1e-12, 10});
    CHECK_FALSE(t.converged);
    CHECK(t.iterations == 101);
    CHECK(t.steps.front() == 0);
    CHECK(t.steps[1] == 10);
    CHECK(t.steps.back() == 101);
    CHECK(t.points.size() == 12);
    CHECK(t.final_residual == Approx(1.2));
    CHECK(t.last()[0] == Approx(0.8));
    CHECK_THROWS_AS(iterate(swap_operator(), ReducedDistribution({0.2, 0.7})), Error);
    CHECK_THROWS_AS(iterate(swap_operator(), ReducedDistribution({0.2, 0.8}), {10, 0.0, 1}), Error);
}

TEST_CASE("iterate: a million steps stay on the simplex") {
    std::mt19937_64 rng(1);
    const auto q = test::random_reduced(rng, 4);
    const IterateOptions opts{1'000'000, 1e-300, 1000};
    for (const auto& op : {swap_operator(), q}) {
        const auto t = iterate(op, test::random_point(rng, op.dimension()), opts);
        for (const auto& p : t.points) {
            CHECK(std::abs(p.sum() - 1.0) < 1e-9);
            for (double x : p.values()) CHECK(x >= 0.0);
        }
    }
}

TEST_CASE("find_fixed_point: Rh operator") {
    const auto model = rh_model();
    const auto r = find_fixed_point(model.qso, ReducedDistribution({0.5, 0.5}));
    const double root = rh_root_by_bisection();
    CHECK(root == Approx(0.95319956).epsilon(1e-7));
    CHECK(r.point[0] == Approx(root).epsilon(1e-12));
    CHECK(r.point[1] == Approx(1 - root).epsilon(1e-10));
    CHECK(r.classification == Stability::attracting);
    CHECK(r.residual < kDefaultTol);
    CHECK(fixed_point_residual(model.qso, r.point) == r.residual);
    // Derivative of the 1D map at the root equals the tangent eigenvalue.
    const double slope = 2 * 0.985 * root + 2 * 0.6503 * (1 - 2 * root) - 2 * 0.1 * (1 - root);
    CHECK(r.jacobian_spectral_radius == Approx(std::abs(slope)).epsilon(1e-9));
}

TEST_CASE("find_fixed_point: Volterra vertex and ABO") {
    const auto v = multi_allele({0.2, 0.1, 0.12, 0.08});
    for (std::size_t i = 0; i < 4; ++i) {
        const auto r = find_fixed_point(v, ReducedDistribution::vertex(4, i));
        CHECK(r.residual == 0.0);
        CHECK(r.point[i] == 1.0);
    }
    const auto abo = abo_model().qso;
    const auto r = find_fixed_point(abo, ReducedDistribution::uniform(4));
    CHECK(test::max_abs_diff(r.point.values(), kAboFixedPoint) < 2e-8);
    CHECK(test::max_abs_diff(r.point.values(), std::vector<double>{0.084, 0.516, 0.058, 0.342}) < 5e-3);
    CHECK(r.classification == Stability::attracting);
    CHECK(r.jacobian_spectral_radius == Approx(kAboSpectralRadius).epsilon(1e-6));
    CHECK(l1_distance(r.point.values(), apply_reduced(abo, r.point).values()) < kDefaultTol);
}

TEST_CASE("find_fixed_point: classification of the trait model") {
    const auto neutral = find_fixed_point(mendelian_trait(0.25), ReducedDistribution({0.3, 0.7}));
    CHECK(neutral.classification == Stability::neutral);
    const auto at_zero = find_fixed_point(mendelian_trait(0.1), ReducedDistribution({0.5, 0.5}));
    CHECK(at_zero.classification == Stability::attracting);
    CHECK(at_zero.jacobian_spectral_radius == Approx(0.4).epsilon(1e-9));
    const auto repeller = find_fixed_point(mendelian_trait(0.1), ReducedDistribution({1.0, 0.0}));
    CHECK(repeller.classification == Stability::repelling);
    CHECK(repeller.jacobian_spectral_radius == Approx(1.6).epsilon(1e-12));
}

TEST_CASE("find_fixed_point: NoConvergence carries the partial report") {
    try {
        find_fixed_point(abo_model().qso, ReducedDistribution::uniform(4), {5, 1e-300, 1});
        FAIL("expected NoConvergenceError");
    } catch (const NoConvergenceError& e) {
        CHECK(e.code() == Errc::NoConvergence);
        CHECK(e.partial().residual > 0.0);
        CHECK(e.partial().point[1] == Approx(0.51722622).epsilon(1e-7));
    }
}

TEST_CASE("classify margins") {
    CHECK(classify(1.0 - 2e-6) == Stability::attracting);
    CHECK(classify(1.0 + 2e-6) == Stability::repelling);
    CHECK(classify(1.0 + 5e-7) == Stability::neutral);
    CHECK(classify(std::nan("")) == Stability::undetermined);
}

TEST_CASE("regularity_check") {
    const ReducedQso q(2, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7, 0.3, 0.7});
    const auto r = regularity_check(q);
    CHECK(r.holds);
    CHECK(r.margin == Approx(0.05));

    const auto rh = regularity_check(rh_model().qso);
    CHECK_FALSE(rh.holds);
    CHECK(rh.margin == Approx(0.015 - 0.25));

    for (std::size_t n = 1; n <= 5; ++n) {
        const ReducedQso u(n, std::vector<double>(n * n * n, 1.0 / static_cast<double>(n)));
        const auto ru = regularity_check(u);
        CHECK(ru.holds);
        CHECK(ru.margin == Approx(1.0 / (2.0 * static_cast<double>(n))));
    }
}

TEST_CASE("analyze_f_alpha") {
    const auto id = analyze_f_alpha(0.25);
    CHECK(id.regime == FAlphaRegime::identity);
    for (double x = 0.0; x <= 0.5; x += 0.05) CHECK(f_alpha(0.25, x) == Approx(x).epsilon(1e-15));

    const auto low = analyze_f_alpha(0.1);
    CHECK(low.regime == FAlphaRegime::converges_to_zero);
    CHECK(f_alpha(0.1, 0.25) == Approx(0.175).epsilon(1e-15));
    CHECK(low.fixed_points == std::vector<double>{0.0, 0.5});

    CHECK(analyze_f_alpha(0.4).regime == FAlphaRegime::converges_to_half);
    double u = 0.1;
    for (int i = 0; i < 200; ++i) {
        const double next = f_alpha(0.4, u);
        CHECK(next >= u);
        CHECK(next <= 0.5);
        u = next;
    }
    CHECK(u == Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(analyze_f_alpha(0.0), Error);
    CHECK_THROWS_AS(analyze_f_alpha(0.5), Error);
}

TEST_CASE("analyze_quadratic_1d") {
    SUBCASE("Rh coefficients") {
        const auto r = analyze_quadratic_1d(0.985, 0.6503, 0.1);
        CHECK(r.delta == Approx(4 * 0.015 * 0.1 + 0.3006 * 0.3006).epsilon(1e-14));
        CHECK(std::abs(r.delta - 0.0964) < 5e-4);
        CHECK(r.regime == "unique attracting");
        REQUIRE(r.fixed_points.size() == 1);
        CHECK(r.fixed_points[0] == Approx(rh_root_by_bisection()).epsilon(1e-12));

        const auto published = analyze_quadratic_1d(0.9849, 0.6503, 0.1);
        CHECK(published.delta == Approx(0.0964).epsilon(1e-3));
        CHECK(published.fixed_points.at(0) == Approx(0.95290699).epsilon(1e-7));
    }
    SUBCASE("identity row") {
        const auto r = analyze_quadratic_1d(1.0, 0.5, 0.0);
        CHECK(r.delta == 0.0);
        CHECK(r.regime == "identity");
        CHECK(r.fixed_points == std::vector<double>{0.0, 1.0});
    }
    SUBCASE("coefficients symmetric under y -> 1-y put the fixed point at 1/2") {
        for (double a : {0.1, 0.3, 0.5, 0.8}) {
            const auto r = analyze_quadratic_1d(a, 0.5, 1.0 - a);
            REQUIRE(r.fixed_points.size() == 1);
            CHECK(r.fixed_points[0] == Approx(0.5).epsilon(1e-14));
        }
        const auto half = analyze_quadratic_1d(0.5, 0.5, 0.5);
        CHECK(half.delta == Approx(1.0));
        CHECK(half.fixed_points == std::vector<double>{0.5});
    }
    SUBCASE("invalid coefficients") {
        CHECK_THROWS_AS(analyze_quadratic_1d(1.2, 0.5, 0.0), Error);
        CHECK_THROWS_AS(analyze_quadratic_1d(0.5, -0.1, 0.0), Error);
    }
}

TEST_CASE("property: folded trait step is f_alpha") {
    for (double alpha = 0.05; alpha < 0.451; alpha += 0.05) {
        const auto q = mendelian_trait(alpha);
        for (int i = 0; i <= 20; ++i) {
            const double y1 = i / 20.0;
            const auto out = apply_reduced(q, ReducedDistribution({y1, 1.0 - y1}));
            CHECK(out[0] / 2 == Approx(f_alpha(alpha, y1 / 2)).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: Volterra structure and dominance") {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 20; ++rep) {
        auto w = test::random_weights(rng, 4);
        for (double& x : w) x *= 0.5;
        const auto q = multi_allele(w);
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                const double a_ij = 2 * q(i, j, i) - 1;
                const double a_ji = 2 * q(j, i, j) - 1;
                if (i != j) {
                    CHECK(a_ij == Approx(-a_ji).epsilon(1e-14));
                    CHECK(std::abs(a_ij) <= 1.0);
                }
            }
        }
        // Faces are invariant: a zero coordinate stays zero.
        const auto y = test::random_point(rng, 4);
        std::vector<double> face(y.values().begin(), y.values().end());
        const double dropped = face[rep % 4];
        face[rep % 4] = 0.0;
        for (double& x : face) x /= 1.0 - dropped;
        CHECK(apply_reduced(q, ReducedDistribution(face))[rep % 4] == 0.0);
    }
}

TEST_CASE("property: regular operators have one attracting point") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + rep % 3;
        const auto q = test::random_reduced(rng, n, 1.0 / (2.0 * n) + 0.01);
        REQUIRE(regularity_check(q).holds);
        const auto a = iterate(q, test::random_point(rng, n));
        const auto b = iterate(q, test::random_point(rng, n));
        CHECK(a.converged);
        CHECK(b.converged);
        CHECK(l1_distance(a.last().values(), b.last().values()) < 1e-8);
    }
}

TEST_CASE("SimplexSampler is reproducible") {
    SimplexSampler a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const auto pa = a.point(4);
        const auto pb = b.point(4);
        CHECK(test::max_abs_diff(pa.values(), pb.values()) == 0.0);
        CHECK(pa.sum() == Approx(1.0).epsilon(1e-15));
        for (double x : pa.values()) CHECK(x >= 0.0);
    }
    CHECK(test::max_abs_diff(SimplexSampler(42).point(4).values(), c.point(4).values()) > 0.0);
    // Pins the uniform construction (x >> 11) * 2^-53.
    std::mt19937_64 ref(0);
    CHECK(SimplexSampler(0).uniform() == static_cast<double>(ref() >> 11) * 0x1.0p-53);
}
