#include "tcid/contkernel.hpp"
#include "tcid/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace tcid;

namespace {

const double kPi = std::acos(-1.0);

double phi(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2 * kPi);
}
double Phi(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Midpoint rule, crude but independent of the library quadrature.
template <class F>
double midpoint(F f, double lo, double hi, int n) {
    const double h = (hi - lo) / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
    return s * h;
}

// E[clip(X,-1,1)] for X ~ N(m, s^2).
double clip_mean(double m, double s) {
    const double a = (-1 - m) / s, b = (1 - m) / s;
    return -Phi(a) + (1 - Phi(b)) + m * (Phi(b) - Phi(a)) - s * (phi(b) - phi(a));
}

}  // namespace

TEST_CASE("quadrature") {
    for (auto rule : {QuadRule::TanhSinh, QuadRule::GaussKronrod61}) {
        QuadratureCfg cfg;
        cfg.rule = rule;
        CHECK(integrate([](double x) { return std::exp(x); }, 0, 1, {}, cfg).value ==
              doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
        CHECK(integrate([](double x) { return std::abs(x); }, -1, 2, {0}, cfg).value ==
              doctest::Approx(2.5).epsilon(1e-12));
        auto s = integrate([](double x) { return -std::log(std::abs(x)); }, -1, 1, {0}, cfg);
        CHECK(s.value == doctest::Approx(2.0).epsilon(1e-8));
        // the reported error bounds the true error
        CHECK(std::abs(s.value - 2.0) <= s.error + 1e-12);
    }
    CHECK(integrate([](double) { return 1.0; }, 1, 1, {}).value == 0.0);
    QuadratureCfg bad;
    bad.rel_tol = -1;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0, 1, {}, bad), PreconditionError);
}

TEST_CASE("densities and distances") {
    CHECK(total_mass(Uniform{0, 2}).value == doctest::Approx(1).epsilon(1e-12));
    CHECK(total_mass(Gaussian{1, 4}).value == doctest::Approx(1).epsilon(1e-9));
    CHECK(total_mass(DiracMixture{{0, 1}, {0.25, 0.75}}).value == 1.0);
    CHECK(atoms(Uniform{0.5, 0.5}).size() == 1);
    CHECK(mass_on(Gaussian{0, 1}, -1, 1) == doctest::Approx(Phi(1) - Phi(-1)).epsilon(1e-10));
    CHECK(mass_on(Uniform{0, 1}, 0.25, 5) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(mass_on(DiracMixture{{0, 1}, {0.25, 0.75}}, 0, 0) == 0.25);

    CHECK(tv_distance(Uniform{0, 1}, Uniform{0, 1}) == doctest::Approx(0).scale(1));
    CHECK(tv_distance(Uniform{0, 1}, Uniform{0, 2}) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(tv_distance(DiracMixture{{0.5}, {1}}, Uniform{0, 1}) == 1.0);
    CHECK(tv_distance(DiracMixture{{0, 1}, {0.5, 0.5}}, DiracMixture{{0}, {1}}) == doctest::Approx(0.5));
    // N(0,1) vs N(1,1): 2 Phi(1/2) - 1
    CHECK(tv_distance(Gaussian{0, 1}, Gaussian{1, 1}) == doctest::Approx(2 * Phi(0.5) - 1).epsilon(1e-9));

    PiecewiseClosedForm tri{"tri", [](double x) { return 1 - std::abs(x); }, -1, 1, {0}};
    CHECK(total_mass(tri).value == doctest::Approx(1).epsilon(1e-12));
    CHECK(mass_on(tri, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("no pointwise version of the do-kernel") {
    auto rows = demo_no_pointwise(default_no_pointwise_points());
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        if (r.boundary) {
            CHECK(r.point.value == 0.0);
            CHECK(r.tv == 0.0);
        } else if (r.point.rational) {
            CHECK(r.tv == 1.0);
        } else {
            CHECK(r.tv == doctest::Approx(0).scale(1));
        }
    }
    CHECK(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.boundary; }) == 1);
    CHECK_THROWS_AS(demo_no_pointwise({{"2", 2.0, true}}), PreconditionError);
}

TEST_CASE("back-door adjustment fails without positivity") {
    // closed forms: both densities integrate to one
    for (double x_a : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        auto r = demo_backdoor_failure(x_a);
        CHECK(r.mass_do.value == doctest::Approx(1).epsilon(1e-6));
        CHECK(r.mass_adjusted.value == doctest::Approx(1).epsilon(1e-6));
        const double lo = std::min(x_a - 0.5, -0.25), hi = std::max(x_a + 0.5, 0.25);
        const double crude = midpoint(
            [&](double b) { return std::abs(backdoor_do_density(x_a, b) - backdoor_adjusted_density(x_a, b)); }, lo,
            hi, 2000000);
        CHECK(r.l1.value == doctest::Approx(crude).epsilon(1e-3));
        CHECK(r.l1.value >= r.l1_bound);
        CHECK(r.pointwise_checked > 0);
        CHECK(r.pointwise_max_diff == 0.0);
        MESSAGE("x_a=" << x_a << " l1=" << r.l1.value << " conflicts=" << r.pointwise_conflicts);
    }
    // far from the strip the two densities coincide on the shared region
    CHECK(backdoor_do_density(1.0, 0.7) == backdoor_adjusted_density(1.0, 0.7));
    CHECK(backdoor_do_density(1.0, 2.0) == 0.0);
    CHECK_THROWS_AS(demo_backdoor_failure(0.0), PreconditionError);
}

TEST_CASE("positivity is not necessary (continuous)") {
    auto r = demo_positivity_not_necessary({}, 42, 1000000, 0.05);
    CHECK(r.grid_points == 175);
    CHECK(r.grid_max_abs_diff <= 1e-15);
    CHECK(r.density_at_example == doctest::Approx(1 / std::sqrt(2 * kPi)).epsilon(1e-15));
    CHECK(r.mass_on_2_3 == 0.0);
    CHECK(r.mass_below_0 == 0.0);
    CHECK(r.cells.size() == 15);
    for (const auto& c : r.cells) {
        CHECK(c.expected_re == doctest::Approx(std::exp(-c.t * c.t / 2) * std::cos(c.t * c.c0)));
        CHECK(c.effective_n > 100);
    }
    MESSAGE("mc sup deviation " << r.mc_sup_deviation);
    CHECK(r.mc_sup_deviation < r.mc_tolerance);

    auto again = demo_positivity_not_necessary({}, 42, 20000, 0.2);
    auto twice = demo_positivity_not_necessary({}, 42, 20000, 0.2);
    CHECK(again.mc_sup_deviation == twice.mc_sup_deviation);
    CHECK_THROWS_AS(demo_positivity_not_necessary({}, 1, 0, 0.1), PreconditionError);
}

TEST_CASE("shrinking-ball conditional converges") {
    const std::vector<double> deltas{0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.001};
    CHECK(test_functions().size() == 10);
    for (double rho : {-0.5, 0.0, 0.5}) {
        const double y = 0.7;
        BivariateGaussian g{rho};
        auto r = shrinking_ball_conditional(g, y, deltas);
        REQUIRE(r.errors.size() == deltas.size());
        CHECK(r.decreasing);
        CHECK(r.errors[5] < 1e-3);
        CHECK(r.errors[6] < 1e-3);

        // independent value for clip(x,-1,1): average the closed-form conditional mean over the ball
        const double sd = std::sqrt(1 - rho * rho);
        for (std::size_t i = 0; i < 3; ++i) {
            const double d = deltas[i];
            const double num = midpoint([&](double yp) { return phi(yp) * clip_mean(rho * yp, sd); }, y - d, y + d,
                                        20000);
            const double den = midpoint([&](double yp) { return phi(yp); }, y - d, y + d, 20000);
            const double err = std::abs(num / den - clip_mean(rho * y, sd));
            CHECK(r.errors[i] >= err - 1e-9);
        }
        MESSAGE("rho=" << rho << " err(0.5)=" << r.errors[0] << " err(0.01)=" << r.errors[5]);
    }
    // conditional N(0.5, 0.75) at y = 1
    auto half = shrinking_ball_conditional({0.5}, 1.0, {0.1, 0.01, 0.001});
    CHECK(half.decreasing);
    CHECK(half.errors[1] < 1e-3);
    auto indep = shrinking_ball_conditional({0.0}, 1.0, {0.1, 0.01, 0.001});
    for (double e : indep.errors) CHECK(e < 1e-3);

    auto a = shrinking_ball_conditional({0.3}, 0.1, {0.1});
    auto b = shrinking_ball_conditional({0.3}, 0.1, {0.1});
    CHECK(a.errors == b.errors);
    CHECK_THROWS_AS(shrinking_ball_conditional({1.0}, 0, {0.1}), PreconditionError);
    CHECK_THROWS_AS(shrinking_ball_conditional({0.0}, 0, {0.0}), PreconditionError);
}
