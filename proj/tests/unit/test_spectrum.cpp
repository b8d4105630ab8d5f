#include <catch_amalgamated.hpp>

#include <cmath>

#include "rifs/config.hpp"
#include "rifs/error.hpp"
#include "rifs/spectrum.hpp"

using namespace rifs;
using Catch::Approx;

namespace {

double binomial_tau(double q) { return -std::log2(std::pow(0.25, q) + std::pow(0.75, q)); }

double binomial_alpha(double q) {
    const double a = std::pow(0.25, q);
    const double b = std::pow(0.75, q);
    return -(a * std::log2(0.25) + b * std::log2(0.75)) / (a + b);
}

ScaleMatrix binomial_matrix(int depth) {
    auto config = dyadic_config(depth, 3);
    config.weighting = Explicit{{0.25, 0.75}};
    return scale_matrix(grow(config), config.weighting);
}

} // namespace

TEST_CASE("partition function examples", "[spectrum]") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(partition_function(half, 2.0) == Approx(0.5).epsilon(1e-15));
    const std::vector<double> row{0.1, 0.2, 0.3, 0.4};
    CHECK(partition_function(row, 1.0) == Approx(1.0).epsilon(1e-15));
    CHECK(partition_function(row, 0.0) == Approx(4.0).epsilon(1e-15));
    // large |q| stays finite through log-sum-exp
    CHECK(std::isfinite(log_partition_function(row, -800.0)));
    CHECK(std::isfinite(log_partition_function(row, 800.0)));
    CHECK_THROWS_AS(partition_function(std::vector<double>{}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(partition_function(std::vector<double>{0.0, 1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("mesh scale examples", "[spectrum]") {
    const std::vector<double> d{0.1, 0.2, 0.4};
    CHECK(mesh_scale(d, MeshMode::Max) == Approx(0.4));
    CHECK(mesh_scale(d, MeshMode::GeoMean) == Approx(0.2).epsilon(1e-14));
    CHECK(mesh_scale(d, MeshMode::Median) == Approx(0.2));
    CHECK(mesh_scale(std::vector<double>{0.1, 0.3}, MeshMode::Median) == Approx(0.2));
}

TEST_CASE("q grid construction", "[spectrum]") {
    const auto g = QGrid::arithmetic(-2.0, 4.0, 0.1);
    CHECK(g.size() == 61);
    CHECK(std::find(g.values().begin(), g.values().end(), 0.0) != g.values().end());
    CHECK(std::find(g.values().begin(), g.values().end(), 1.0) != g.values().end());
    CHECK(g.max_spacing() == Approx(0.1));
    const auto h = QGrid::arithmetic(-0.75, 2.0, 0.5);
    CHECK(std::find(h.values().begin(), h.values().end(), 1.0) != h.values().end());
    CHECK_THROWS_AS(QGrid::arithmetic(1.0, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("dyadic cascade has tau = q - 1", "[spectrum]") {
    const auto m = scale_matrix(grow(dyadic_config(12, 1)), Canonical{1.0});
    const auto grid = QGrid::arithmetic(-2.0, 4.0, 0.1);
    for (MeshMode mode : {MeshMode::Max, MeshMode::GeoMean, MeshMode::Median}) {
        const auto est = tau_fit(m, grid, mode, Source::Mass);
        const auto via = tau_via_kappa(m, grid, mode, Source::Mass);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            REQUIRE(est.tau[j] == Approx(grid[j] - 1.0).margin(1e-9));
            REQUIRE(via[j] == Approx(grid[j] - 1.0).margin(1e-9));
        }
        CHECK(est.kappa_hat[std::find(grid.values().begin(), grid.values().end(), 0.0) - grid.values().begin()] ==
              Approx(std::log(2.0)).margin(1e-9));
    }
}

TEST_CASE("tau vanishes at q = 1 for the mass source", "[spectrum]") {
    const auto m = scale_matrix(grow(figure_config(14, 8)), Canonical{1.0});
    const auto est = tau_fit(m, QGrid::from_values({0.0, 1.0, 2.0}), MeshMode::GeoMean, Source::Mass);
    CHECK(est.tau[1] == Approx(0.0).margin(1e-9));
}

TEST_CASE("binomial cascade oracle", "[spectrum]") {
    const auto m = binomial_matrix(12);
    const auto grid = QGrid::arithmetic(-2.0, 4.0, 0.1);
    const auto est = estimate_spectrum(m, grid, MeshMode::GeoMean, Source::Mass);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        REQUIRE(est.tau[j] == Approx(binomial_tau(grid[j])).margin(0.02));
    }
    REQUIRE(est.alpha.size() == grid.size());
    for (std::size_t j = 1; j + 1 < grid.size(); ++j) {
        CHECK(est.alpha[j] == Approx(binomial_alpha(grid[j])).margin(0.01));
    }
}

TEST_CASE("binomial alpha range on an extended grid", "[spectrum]") {
    const auto est = estimate_spectrum(binomial_matrix(12), QGrid::arithmetic(-8.0, 8.0, 0.1), MeshMode::GeoMean,
                                       Source::Mass);
    const auto [lo, hi] = std::minmax_element(est.alpha.begin(), est.alpha.end());
    CHECK(*lo == Approx(-std::log2(0.75)).margin(0.05));
    CHECK(*hi == Approx(2.0).margin(0.05));
    CHECK(is_strictly_concave_spectrum(est.alpha, est.f));
}

TEST_CASE("legendre of an affine tau is a point", "[spectrum]") {
    std::vector<double> q;
    std::vector<double> tau;
    for (double x = -2.0; x <= 4.0 + 1e-9; x += 0.25) {
        q.push_back(x);
        tau.push_back(x - 1.0);
    }
    const auto lt = legendre(q, tau);
    for (std::size_t i = 0; i < q.size(); ++i) {
        CHECK(lt.alpha[i] == Approx(1.0).margin(1e-12));
        CHECK(lt.f[i] == Approx(1.0).margin(1e-12));
    }
    const auto report = convexity_report(q, tau);
    CHECK(report.verdict == Curvature::Affine);
    CHECK(to_string(report.verdict) == "affine/degenerate");
}

TEST_CASE("legendre at q = 0 returns -tau(0)", "[spectrum]") {
    const std::vector<double> q{-1.0, 0.0, 1.0, 2.0};
    const std::vector<double> tau{-2.5, -0.7, 0.0, 0.4};
    const auto lt = legendre(q, tau);
    CHECK(lt.f[1] == Approx(0.7));
    CHECK_THROWS_AS(legendre(std::vector<double>{0.0, 1.0}, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("f(alpha(1)) = alpha(1) for the mass source", "[spectrum]") {
    const auto m = scale_matrix(grow(worked_example_config(12, 2)), Canonical{1.0});
    const auto est = estimate_spectrum(m, QGrid::arithmetic(-1.0, 3.0, 0.1), MeshMode::GeoMean, Source::Mass);
    const auto j = std::find(est.q.begin(), est.q.end(), 1.0) - est.q.begin();
    CHECK(est.f[static_cast<std::size_t>(j)] == Approx(est.alpha[static_cast<std::size_t>(j)]).margin(1e-9));
}

TEST_CASE("worked example tau is strictly concave", "[spectrum]") {
    const auto m = scale_matrix(grow(worked_example_config(14, 1)), Canonical{1.0});
    const auto grid = QGrid::arithmetic(-1.0, 3.0, 0.25);
    const auto est = tau_fit(m, grid, MeshMode::GeoMean, Source::Mass);
    const auto report = convexity_report(est.q, est.tau, 1e-6, std::make_pair(-1.0, 3.0));
    CHECK(report.verdict == Curvature::StrictlyConcave);
    // log Z_n(q) is convex in q at every depth
    for (const auto& row : est.log_z) {
        for (std::size_t j = 1; j + 1 < row.size(); ++j) {
            REQUIRE(row[j - 1] - 2.0 * row[j] + row[j + 1] >= -1e-12);
        }
    }
}

TEST_CASE("constant contraction gives an affine tau", "[spectrum]") {
    auto config = worked_example_config(12, 6);
    config.contraction = ContractionLaw{Constant{0.4}};
    const auto m = scale_matrix(grow(config), config.weighting);
    const auto est = estimate_spectrum(m, QGrid::arithmetic(-2.0, 4.0, 0.1), MeshMode::GeoMean, Source::Mass);
    CHECK(convexity_report(est.q, est.tau).verdict == Curvature::Affine);
    const auto [lo, hi] = std::minmax_element(est.alpha.begin(), est.alpha.end());
    CHECK(*hi - *lo < 1e-6);
}

TEST_CASE("concave hull", "[spectrum]") {
    const std::vector<double> q{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> tau{0.0, 1.0, 1.5, 2.2, 2.4};
    const auto hull = concave_hull(q, tau);
    CHECK(hull[0] == 0.0);
    CHECK(hull[2] == Approx(1.6));
    CHECK(hull[3] == 2.2);
    CHECK(hull[4] == 2.4);
    const auto report = convexity_report(q, hull);
    CHECK(report.max_second_difference <= 1e-12);
}

TEST_CASE("strict concavity check for spectra", "[spectrum]") {
    CHECK(is_strictly_concave_spectrum(std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{0.0, 1.0, 0.5}));
    CHECK_FALSE(is_strictly_concave_spectrum(std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{0.0, 1.0, 2.0}));
    CHECK_FALSE(is_strictly_concave_spectrum(std::vector<double>{1.0, 1.0, 1.0}, std::vector<double>{1.0, 1.0, 1.0}));
}

TEST_CASE("depth window rules", "[spectrum]") {
    const auto deep = scale_matrix(grow(dyadic_config(10, 1)), Canonical{1.0});
    const auto w = default_depth_window(deep);
    CHECK(w.lo == 3);
    CHECK(w.hi == 10);
    const auto shallow = scale_matrix(grow(dyadic_config(3, 1)), Canonical{1.0});
    const auto ws = default_depth_window(shallow);
    CHECK(ws.lo == 1);
    CHECK(ws.hi == 3);
    const auto est = tau_fit(shallow, QGrid::from_values({0.0, 1.0}), MeshMode::GeoMean, Source::Mass);
    CHECK_FALSE(est.warnings.empty());
    const auto tiny = scale_matrix(grow(dyadic_config(2, 1)), Canonical{1.0});
    CHECK_THROWS_AS(default_depth_window(tiny), InsufficientDataError);
}

TEST_CASE("least squares", "[spectrum]") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto fit = least_squares(x, y);
    CHECK(fit.slope == Approx(2.0));
    CHECK(fit.intercept == Approx(1.0));
    CHECK(fit.r2 == Approx(1.0));
}

TEST_CASE("estimate invariants on the worked example", "[spectrum]") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto m = scale_matrix(grow(worked_example_config(13, seed)), Canonical{1.0});
        const auto est = estimate_spectrum(m, QGrid::arithmetic(-2.0, 4.0, 0.1), MeshMode::GeoMean, Source::Mass);
        const auto at = [&](double q) {
            return static_cast<std::size_t>(std::find(est.q.begin(), est.q.end(), q) - est.q.begin());
        };
        CHECK(est.lambda_hat < 0.0);
        CHECK(est.tau[at(0.0)] <= 0.0);
        CHECK(std::abs(est.tau[at(1.0)]) <= 0.02);
        CHECK(est.f[at(0.0)] == Approx(-est.tau[at(0.0)]).margin(1e-12));
        CHECK_FALSE(est.hull_smoothed);
        CHECK(is_strictly_concave_spectrum(est.alpha, est.f));
        for (std::size_t j = 0; j < est.q.size(); ++j) {
            CHECK(est.f[j] == Approx(est.q[j] * est.alpha[j] - est.tau[j]).margin(1e-12));
        }
    }
}
