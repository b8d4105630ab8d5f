#include <catch_amalgamated.hpp>

#include <cmath>

#include "rifs/config.hpp"
#include "rifs/error.hpp"
#include "rifs/spectrum.hpp"
#include "rifs/tangent.hpp"

using namespace rifs;
using Catch::Approx;

namespace {

CascadeConfig anchored_worked_example(int depth, std::uint64_t seed) {
    auto c = worked_example_config(depth, seed);
    c.variant = Variant::Anchored;
    return c;
}

/// Depth-`depth` leaves below `v`, in row order.
std::vector<std::size_t> descendants(const Realization& r, std::size_t v, int depth) {
    std::vector<std::size_t> out;
    for (std::size_t id : r.leaves(depth)) {
        std::size_t a = id;
        while (a != kNoNode && a != v) {
            a = r.node(a).parent;
        }
        if (a == v) {
            out.push_back(id);
        }
    }
    return out;
}

double log_mass_ks(const std::vector<TangentSample>& a, const std::vector<TangentSample>& b) {
    return compare_ensembles(ensemble_statistics(a), ensemble_statistics(b))[0].distance;
}

std::vector<TangentSample> root_ensemble(CascadeConfig config, int k, std::uint32_t stream, int count) {
    std::vector<TangentSample> out;
    config.max_depth = k;
    for (int i = 0; i < count; ++i) {
        config.master_seed = derive_node_seed(99, std::vector<std::uint32_t>{stream, static_cast<std::uint32_t>(i)});
        out.push_back(tangent_measure(grow(config), config.weighting, 0, k));
    }
    return out;
}

} // namespace

TEST_CASE("k = 0 gives the trivial measure", "[tangent]") {
    const auto r = grow(anchored_worked_example(4, 1));
    for (std::size_t leaf : r.leaves(4)) {
        const auto t = tangent_measure(r, Canonical{1.0}, leaf, 0);
        REQUIRE(t.intervals.size() == 1);
        CHECK(t.intervals[0].left == 0.0);
        CHECK(t.intervals[0].diameter == 1.0);
        CHECK(t.masses[0] == 1.0);
    }
}

TEST_CASE("children keep their relative masses", "[tangent]") {
    const auto r = grow(anchored_worked_example(5, 2));
    const auto mass = node_masses(r, Canonical{1.0});
    for (std::size_t leaf : r.leaves(4)) {
        const auto t = tangent_measure(r, mass, leaf, 1);
        const auto kids = r.children(r.node(leaf));
        REQUIRE(t.masses.size() == kids.size());
        for (std::size_t i = 0; i < kids.size(); ++i) {
            CHECK(t.masses[i] == Approx(mass[kids[i].id] / mass[leaf]).epsilon(1e-14));
            CHECK(t.intervals[i].diameter == Approx(kids[i].ratio).epsilon(1e-14));
        }
    }
}

TEST_CASE("anchored tangent at n = 6, k = 6", "[tangent]") {
    const auto r = grow(anchored_worked_example(12, 3));
    const auto mass = node_masses(r, Canonical{1.0});
    for (std::size_t leaf : {r.leaves(6).front(), r.leaves(6)[17], r.leaves(6).back()}) {
        const auto t = tangent_measure(r, mass, leaf, 6);
        const auto ids = descendants(r, leaf, 12);
        REQUIRE(t.masses.size() == 64);
        REQUIRE(ids.size() == 64);
        double total = 0.0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            total += t.masses[i];
            double product = 1.0;
            for (std::size_t a = ids[i]; a != leaf; a = r.node(a).parent) {
                product *= r.node(a).ratio;
            }
            CHECK(t.intervals[i].diameter == Approx(product).epsilon(1e-12));
            CHECK(t.intervals[i].left == 0.0);
        }
        CHECK(total == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("tangent extraction commutes with depth", "[tangent]") {
    const auto r = grow(worked_example_config(9, 4));
    const auto mass = node_masses(r, Canonical{1.0});
    const std::size_t v = r.leaves(3)[5];
    const int k1 = 2;
    const int k2 = 4;
    const auto outer = tangent_measure(r, mass, v, k1 + k2);
    const auto& v_node = r.node(v);
    std::size_t offset = 0;
    for (std::size_t w : descendants(r, v, 3 + k1)) {
        const auto inner = tangent_measure(r, mass, w, k2);
        const auto& w_node = r.node(w);
        const double w_mass = mass[w] / mass[v];
        const double w_scale = w_node.diameter / v_node.diameter;
        const double w_left = (w_node.left - v_node.left) / v_node.diameter;
        for (std::size_t i = 0; i < inner.masses.size(); ++i) {
            const auto j = offset + i;
            REQUIRE(j < outer.masses.size());
            CHECK(outer.masses[j] == Approx(w_mass * inner.masses[i]).epsilon(1e-12));
            CHECK(outer.intervals[j].diameter == Approx(w_scale * inner.intervals[i].diameter).epsilon(1e-12));
            CHECK(outer.intervals[j].left == Approx(w_left + w_scale * inner.intervals[i].left).margin(1e-12));
        }
        offset += inner.masses.size();
    }
    CHECK(offset == outer.masses.size());
}

TEST_CASE("tangent errors", "[tangent]") {
    const auto r = grow(anchored_worked_example(5, 5));
    CHECK_THROWS_AS(tangent_measure(r, Canonical{1.0}, r.leaves(4)[0], 3), ExtinctDepthError);
    CHECK_THROWS_AS(tangent_measure(r, Canonical{1.0}, r.leaves(4)[0], -1), std::invalid_argument);
    std::vector<TangentSample> few(10);
    CHECK_THROWS_AS(ensemble_statistics(few), InsufficientDataError);
}

TEST_CASE("the KS comparison is calibrated", "[tangent]") {
    const auto config = worked_example_config(6, 1);
    int accepted = 0;
    const int experiments = 40;
    for (int e = 0; e < experiments; ++e) {
        const auto a = root_ensemble(config, 6, 2 * static_cast<std::uint32_t>(e), 100);
        const auto b = root_ensemble(config, 6, 2 * static_cast<std::uint32_t>(e) + 1, 100);
        accepted += log_mass_ks(a, b) <= ks_critical_value(100, 100, 0.05);
    }
    CHECK(accepted >= 0.9 * experiments);
}

TEST_CASE("degenerate ensembles coincide", "[tangent]") {
    auto config = dyadic_config(6, 1);
    const auto a = root_ensemble(config, 5, 0, 40);
    const auto b = root_ensemble(config, 5, 1, 40);
    for (const auto& c : compare_ensembles(ensemble_statistics(a), ensemble_statistics(b))) {
        CHECK(c.distance == 0.0);
    }
}

TEST_CASE("mismatched ensembles are rejected", "[tangent]") {
    const auto config = worked_example_config(6, 1);
    auto flat = config;
    flat.contraction = ContractionLaw{Constant{0.5}};
    const auto a = root_ensemble(config, 6, 0, 100);
    const auto b = root_ensemble(flat, 6, 1, 100);
    const auto cmp = compare_ensembles(ensemble_statistics(a), ensemble_statistics(b));
    CHECK(cmp[0].reject);
    CHECK(cmp[1].reject);
}

TEST_CASE("equivalence test on the worked example", "[tangent]") {
    const auto config = worked_example_config(12, 7);
    TangentTestOptions options;
    options.threads = 2;
    const auto report = tangent_equivalence_test(config, options);
    CHECK(report.anchored_samples == 100);
    CHECK(report.reference_samples == 100);
    CHECK(report.verdict == TangentVerdict::NotRejected);

    options.control_contraction = ContractionLaw{Constant{0.5}};
    const auto control = tangent_equivalence_test(config, options);
    CHECK(control.control);
    CHECK(control.verdict == TangentVerdict::Rejected);
}

TEST_CASE("equivalence test edge cases", "[tangent]") {
    const auto config = worked_example_config(12, 8);
    TangentTestOptions options;
    options.k = 0;
    const auto trivial = tangent_equivalence_test(config, options);
    REQUIRE(trivial.verdict == TangentVerdict::NotRejected);
    for (const auto& c : trivial.comparisons) {
        CHECK(c.distance == 0.0);
    }

    options.k = 6;
    options.n = 0;
    CHECK(tangent_equivalence_test(config, options).verdict == TangentVerdict::NotRejected);

    auto dying = config;
    dying.offspring = OffspringLaw({0.6, 0.0, 0.4});
    options.n = 6;
    const auto report = tangent_equivalence_test(dying, options);
    CHECK(report.verdict == TangentVerdict::Inconclusive);
    CHECK(report.anchored_extinct > 50);
}

TEST_CASE("pooled tangent spectra match the free cascade", "[tangent]") {
    const int n = 4;
    const int k = 10;
    const int count = 20;
    std::vector<ScaleMatrix> tangents;
    std::vector<ScaleMatrix> free;
    for (int i = 0; i < count; ++i) {
        const auto seed = static_cast<std::uint64_t>(i) + 1000;
        const auto a = grow(anchored_worked_example(n + k, seed));
        const auto mass = node_masses(a, Canonical{1.0});
        tangents.push_back(tangent_scale_matrix(a, mass, a.leaves(n)[static_cast<std::size_t>(i) % 16], k));
        free.push_back(scale_matrix(grow(worked_example_config(k, seed + 5000)), Canonical{1.0}));
    }
    const auto grid = QGrid::arithmetic(0.0, 2.0, 0.25);
    const auto t = tau_fit(pool_scale_matrices(tangents), grid, MeshMode::GeoMean, Source::Mass);
    const auto f = tau_fit(pool_scale_matrices(free), grid, MeshMode::GeoMean, Source::Mass);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(t.tau[j] == Approx(f.tau[j]).margin(0.05));
    }
}
