#include <catch_amalgamated.hpp>

#include <cmath>

#include "rifs/benchmarks.hpp"
#include "rifs/config.hpp"
#include "rifs/error.hpp"
#include "rifs/measure.hpp"
#include "rifs/spectrum.hpp"

using namespace rifs;
using Catch::Approx;

namespace {

// The four equiprobable ratio pairs of the worked example, written out by hand.
double four_pair_kappa(double q) {
    const double a = 1.0 / 3.0;
    const double b = 2.0 / 3.0;
    const double pairs[4][2] = {{a, a}, {a, b}, {b, a}, {b, b}};
    double total = 0.0;
    for (const auto& p : pairs) {
        const double s = p[0] + p[1];
        total += 0.25 * std::log(std::pow(p[0] / s, q) + std::pow(p[1] / s, q));
    }
    return total;
}

double mean_abs_kappa_error(int depth, int seeds, const QGrid& grid) {
    const OneStepEnvironment env;
    double err = 0.0;
    for (int s = 0; s < seeds; ++s) {
        const auto r = grow(worked_example_config(depth, 500 + static_cast<std::uint64_t>(s)));
        const auto est = tau_fit(scale_matrix(r, Canonical{1.0}), grid, MeshMode::GeoMean, Source::Mass);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            err += std::abs(est.kappa_hat[j] - kappa_exact(env, grid[j]));
        }
    }
    return err / (seeds * static_cast<double>(grid.size()));
}

} // namespace

TEST_CASE("one-step S examples", "[benchmarks]") {
    CHECK(one_step_S(std::vector<double>{0.5, 0.5}, 2.0) == Approx(0.5));
    CHECK(one_step_S(std::vector<double>{0.2, 0.3, 0.5}, 1.0) == Approx(1.0));
    CHECK(one_step_S(std::vector<double>{1.0 / 3.0, 2.0 / 3.0}, 2.0) == Approx(5.0 / 9.0));
}

TEST_CASE("worked example closed form", "[benchmarks]") {
    CHECK(kappa_closed_form_worked_example(0.0) == Approx(std::log(2.0)).margin(1e-12));
    CHECK(kappa_closed_form_worked_example(1.0) == Approx(0.0).margin(1e-12));
    CHECK(kappa_closed_form_worked_example(2.0) == Approx(0.5 * std::log(5.0 / 18.0)).margin(1e-12));
    CHECK(kappa_closed_form_worked_example(2.0) == Approx(-0.6405).margin(1e-4));
}

TEST_CASE("exact enumeration matches the closed form", "[benchmarks]") {
    const OneStepEnvironment env;
    REQUIRE(env.enumerable());
    CHECK(env.outcome_count() == 4.0);
    for (double q = -2.0; q <= 4.0 + 1e-9; q += 0.25) {
        CHECK(kappa_exact(env, q) == Approx(kappa_closed_form_worked_example(q)).margin(1e-12));
        CHECK(kappa_exact(env, q) == Approx(four_pair_kappa(q)).margin(1e-12));
    }
}

TEST_CASE("constant contraction gives a linear kappa", "[benchmarks]") {
    OneStepEnvironment env;
    env.contraction = ContractionLaw{Constant{0.3}};
    for (double q : {-2.0, -0.5, 0.0, 1.0, 2.5, 4.0}) {
        CHECK(kappa_exact(env, q) == Approx((1.0 - q) * std::log(2.0)).margin(1e-12));
    }
}

TEST_CASE("kappa vanishes at q = 1", "[benchmarks]") {
    OneStepEnvironment env;
    env.offspring = OffspringLaw({0.1, 0.2, 0.3, 0.4});
    env.contraction = ContractionLaw{DeterministicRatios{{0.2, 0.3, 0.4}}};
    CHECK(kappa_exact(env, 1.0) == Approx(0.0).margin(1e-12));
    env.contraction = ContractionLaw{TwoPoint{0.1, 0.3, 0.25}};
    CHECK(kappa_exact(env, 1.0) == Approx(0.0).margin(1e-12));
    Rng rng(1);
    const auto mc = kappa_monte_carlo(env, 1.0, 1000, rng);
    CHECK(mc.mean == Approx(0.0).margin(1e-12));
    CHECK(mc.standard_error == Approx(0.0).margin(1e-12));
}

TEST_CASE("kappa is convex in q", "[benchmarks]") {
    std::vector<OneStepEnvironment> envs(3);
    envs[1].contraction = ContractionLaw{Constant{0.5}};
    envs[2].offspring = OffspringLaw({0.2, 0.3, 0.5});
    envs[2].contraction = ContractionLaw{TwoPoint{0.2, 0.45, 0.3}};
    for (std::size_t e = 0; e < envs.size(); ++e) {
        double max_second = 0.0;
        for (double q = -2.0; q <= 4.0; q += 0.25) {
            const double d2 = kappa_exact(envs[e], q - 0.25) - 2 * kappa_exact(envs[e], q) +
                              kappa_exact(envs[e], q + 0.25);
            REQUIRE(d2 >= -1e-12);
            max_second = std::max(max_second, d2);
        }
        CHECK((max_second > 1e-9) == envs[e].contraction.is_nondegenerate());
    }
}

TEST_CASE("continuous laws are not enumerable", "[benchmarks]") {
    OneStepEnvironment env;
    env.contraction = ContractionLaw{Uniform{0.0, 1.0}};
    CHECK_FALSE(env.enumerable());
    CHECK_THROWS_AS(kappa_exact(env, 2.0), NotEnumerableError);
    Rng rng(3);
    const auto mc = kappa_monte_carlo(env, 0.0, 500, rng);
    CHECK(mc.mean == Approx(std::log(2.0)).margin(1e-12));
    CHECK(mc.standard_error == Approx(0.0).margin(1e-12));
    CHECK(std::isfinite(kappa_reference(env, 2.0, rng, 1000)));
}

TEST_CASE("Monte Carlo agrees with the closed form", "[benchmarks]") {
    const OneStepEnvironment env;
    Rng rng(2718);
    const auto mc = kappa_monte_carlo(env, 2.0, 100000, rng);
    CHECK(mc.samples == 100000);
    CHECK(std::abs(mc.mean - kappa_closed_form_worked_example(2.0)) < 3 * mc.standard_error);
}

TEST_CASE("power mean bounds", "[benchmarks]") {
    const auto equal = power_mean_bounds_check(std::vector<double>{0.5, 0.5}, 3.0);
    CHECK(equal.pass);
    CHECK(equal.s == Approx(0.25));
    CHECK(equal.lower == Approx(0.25));
    const auto mixed = power_mean_bounds_check(std::vector<double>{1.0 / 3.0, 2.0 / 3.0}, 2.0);
    CHECK(mixed.pass);
    CHECK(mixed.lower == Approx(0.5));
    CHECK(mixed.s == Approx(5.0 / 9.0));
    CHECK(mixed.upper == Approx(1.0));
    const auto root = power_mean_bounds_check(std::vector<double>{1.0 / 3.0, 2.0 / 3.0}, 0.5);
    CHECK(root.pass);
    CHECK(root.lower == Approx(1.0));
    CHECK(root.upper == Approx(std::sqrt(2.0)));
    CHECK(root.s == Approx(1.394).margin(1e-3));
}

TEST_CASE("domain endpoints", "[benchmarks]") {
    const auto two = domain_endpoints(ContractionLaw{TwoPoint{1.0 / 3.0, 2.0 / 3.0, 0.5}}, 1.0);
    CHECK(std::isinf(two.q_minus));
    CHECK(two.q_minus < 0);
    CHECK(std::isinf(two.q_plus));
    CHECK_FALSE(two.degenerate);
    const auto uni = domain_endpoints(ContractionLaw{Uniform{0.0, 1.0}}, 1.0);
    CHECK(uni.q_minus == -1.0);
    CHECK(uni.t_star == 1.0);
    CHECK(std::isinf(uni.q_plus));
    CHECK(domain_endpoints(ContractionLaw{Uniform{0.0, 1.0}}, 2.0).q_minus == -0.5);
    const auto flat = domain_endpoints(ContractionLaw{Constant{0.5}}, 1.0);
    CHECK(flat.degenerate);
    CHECK(std::isinf(flat.q_minus));
}

TEST_CASE("simulated kappa approaches the exact value with depth", "[benchmarks]") {
    const auto grid = QGrid::arithmetic(-1.0, 3.0, 0.5);
    const double e8 = mean_abs_kappa_error(8, 20, grid);
    const double e11 = mean_abs_kappa_error(11, 20, grid);
    const double e14 = mean_abs_kappa_error(14, 20, grid);
    INFO("errors " << e8 << " " << e11 << " " << e14);
    CHECK(e8 > e11);
    CHECK(e11 > e14);
    CHECK(e14 < 0.05);
}

TEST_CASE("canonical and raw-product weighting give the same tau", "[benchmarks]") {
    const auto r = grow(dyadic_config(14, 21));
    const auto grid = QGrid::arithmetic(0.0, 3.0, 0.25);
    const auto canonical = tau_fit(scale_matrix(r, Canonical{1.0}), grid, MeshMode::GeoMean, Source::Mass);
    const auto raw = tau_fit(scale_matrix(r, RawProduct{}), grid, MeshMode::GeoMean, Source::Mass);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(canonical.tau[j] == Approx(raw.tau[j]).margin(0.05));
    }
}
