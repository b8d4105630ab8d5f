#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rifs/config.hpp"
#include "rifs/io.hpp"
#include "rifs/measure.hpp"
#include "random_config.hpp"

using namespace rifs;
using rifs::testing::random_config;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

} // namespace

TEST_CASE("structural invariants on random configurations", "[properties]") {
    Rng rng(20240601);
    int checked = 0;
    for (std::uint64_t i = 0; i < 150; ++i) {
        const auto config = random_config(rng, 1000 + i);
        INFO("config " << i << "\n" << config_to_string(config));
        const auto r = grow(config);
        ++checked;

        for (const auto& n : r.nodes()) {
            if (n.is_root()) {
                continue;
            }
            const auto& p = r.node(n.parent);
            REQUIRE(n.diameter < p.diameter);
            REQUIRE(n.diameter == n.ratio * p.diameter);
            REQUIRE(n.left >= p.left);
            REQUIRE(n.right() <= p.right() + 4 * kEps);
        }

        if (config.placement == Placement::DisjointPack && config.variant == Variant::NonAnchored) {
            for (const auto& n : r.nodes()) {
                const auto kids = r.children(n);
                for (std::size_t k = 1; k < kids.size(); ++k) {
                    REQUIRE(kids[k - 1].right() <= kids[k].left + 4 * kEps);
                }
            }
        }

        int last = r.depth();
        while (last >= 0 && r.leaves(last).empty()) {
            --last;
        }
        const auto masses = leaf_masses(r, config.weighting, last);
        for (const auto& row : masses) {
            REQUIRE(std::abs(pairwise_sum(row) - 1.0) <= 1e-9);
            for (double m : row) {
                REQUIRE(m > 0.0);
            }
        }

        if (config.variant == Variant::Anchored) {
            for (int d = 0; d <= last; ++d) {
                double lowest = 1.0;
                for (std::size_t id : r.leaves(d)) {
                    lowest = std::min(lowest, r.node(id).left);
                }
                REQUIRE(lowest == 0.0);
            }
        }

        const auto canonical = node_masses(r, Canonical{1.0});
        for (const auto& n : r.nodes()) {
            if (n.child_count == 0) {
                continue;
            }
            double total = 0.0;
            for (const auto& c : r.children(n)) {
                total += canonical[c.id];
            }
            REQUIRE(std::abs(total - canonical[n.id]) <= 1e-12 * canonical[n.id]);
        }

        if (last >= 0) {
            const auto matrix = scale_matrix(r, config.weighting);
            std::ostringstream a;
            write_leaf_csv(a, matrix);
            std::istringstream in(a.str());
            std::ostringstream b;
            write_leaf_csv(b, parse_leaf_csv(in));
            REQUIRE(a.str() == b.str());
        }
    }
    CHECK(checked >= 100);
}

TEST_CASE("anchored leaves shrink toward zero", "[properties]") {
    Rng rng(7);
    for (std::uint64_t i = 0; i < 30; ++i) {
        auto config = random_config(rng, 50 + i);
        config.variant = Variant::Anchored;
        const auto r = grow(config);
        double previous = 2.0;
        for (int d = 0; d <= r.depth() && !r.leaves(d).empty(); ++d) {
            double widest = 0.0;
            for (std::size_t id : r.leaves(d)) {
                widest = std::max(widest, r.node(id).diameter);
            }
            REQUIRE(widest < previous);
            previous = widest;
        }
    }
}
